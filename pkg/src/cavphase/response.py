"""Single-atom response to cavity phase variations.

Vertical traversals are evaluated against radial tables built from the field
maps: the tipping angle is the running z-integral of H0z scaled by eta*b*pi/2,
and the effective phase of a traversal is the tipping-weighted z-integral of
the loss field g_mz.  Transverse motion is frozen during each traversal and
gravity is neglected within it (model assumptions; both are poor only for
short interrogation times).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, simpson

from .bessel import j0, J0_ROOT_1
from .constants import PhysicalConstants, DEFAULT_CONSTANTS
from .errors import NoRoot, SlopeNearZero

PULSE_AREA_GUARD = 0.1


def normalize_amplitude(r_a: float, constants: PhysicalConstants = DEFAULT_CONSTANTS,
                        curvature_k: float | None = None) -> float:
    """Amplitude normalization eta: b = 1 maximizes the ensemble fringe slope.

    Smallest eta > 0 with d/d eta int_0^{r_a} sin[eta (pi/2) J0(k rho)] rho
    d rho = 0, i.e. the first zero of
    int_0^{r_a} cos[eta (pi/2) J0(k rho)] J0(k rho) rho d rho.
    """
    k = constants.k if curvature_k is None else curvature_k
    if not 0.0 < r_a < J0_ROOT_1 / k:
        raise NoRoot(f"aperture radius must be in (0, {J0_ROOT_1 / k * 1e3:.1f} mm)")
    nodes, weights = np.polynomial.legendre.leggauss(200)
    rho = 0.5 * r_a * (nodes + 1.0)
    w = 0.5 * r_a * weights
    bess = j0(k * rho)

    def deriv(eta: float) -> float:
        return float(np.sum(np.cos(eta * (np.pi / 2) * bess) * bess * rho * w))

    lo, hi = 1e-9, 1.05
    flo = deriv(lo)
    while deriv(hi) * flo > 0.0:
        hi += 0.1
        if hi > 3.0:
            raise NoRoot("no sign change for eta in (0, 3]")
    from scipy.optimize import brentq
    return float(brentq(deriv, lo, hi, xtol=1e-14, rtol=1e-14))


@dataclass
class LineFields:
    """Vertical-line samples of the normalized fields.

    h0z and each g_mz are (n_rho, n_z) arrays sampled on a uniform z grid;
    points outside the cavity volume are zero.  Units: 1/m (H0z normalized so
    its on-axis z-integral is 1).
    """

    rho: np.ndarray
    z: np.ndarray
    h0z: np.ndarray
    g_mz: dict[int, np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_analytic(cls, sw, pe, m_indices=(0, 1, 2, 3, 4),
                      rho_max: float | None = None, n_rho: int = 1024,
                      n_z: int = 2049) -> "LineFields":
        from .analytic import loss_field_from_phase
        rmax = 1.3 * pe.r_a if rho_max is None else rho_max
        rho = np.linspace(0.0, rmax, n_rho)
        z = np.linspace(-sw.height / 2, sw.height / 2, n_z)
        P, Z = np.meshgrid(rho, z, indexing="ij")
        h0z = sw.h0_z(P, Z)
        g = {}
        for m in m_indices:
            g[m] = loss_field_from_phase(pe, sw, m)(P, Z)
        return cls(rho=rho, z=z, h0z=h0z, g_mz=g)


@dataclass
class ResponseContext:
    """Radial response tables for one field solution.

    delta_nu is the Ramsey fringe width; by default 1/(2 (t2 - t1)) supplied
    by the ensemble timing.
    """

    lines: LineFields
    eta: float
    r_a: float
    delta_nu: float

    def __post_init__(self):
        z = self.lines.z
        dz = z[1] - z[0]
        # running integral of H0z along each line (trapezoid; dense grid)
        h = self.lines.h0z
        self._w_run = np.concatenate(
            [np.zeros((h.shape[0], 1)),
             np.cumsum(0.5 * (h[:, 1:] + h[:, :-1]) * dz, axis=1)], axis=1)
        self._w_tot = self._w_run[:, -1]
        self._dphi_cache: dict[tuple[int, float], np.ndarray] = {}
        self._area_warned: set[int] = set()

    @property
    def rho(self) -> np.ndarray:
        return self.lines.rho

    def theta_profile(self, b: float) -> np.ndarray:
        """theta(rho) on the radial grid."""
        return self.eta * b * (np.pi / 2) * self._w_tot

    def tipping_angle(self, b: float, rho, z):
        """theta(rho, z): running tipping angle at height z."""
        rho = np.asarray(rho, dtype=float)
        z = np.asarray(z, dtype=float)
        w = _bilinear(self.lines.rho, self.lines.z, self._w_run, rho, z)
        return self.eta * b * (np.pi / 2) * w

    def total_tipping(self, b: float, rho):
        rho = np.asarray(rho, dtype=float)
        return self.eta * b * (np.pi / 2) * np.interp(
            rho, self.lines.rho, self._w_tot)

    def dphi_profile(self, m: int, b: float) -> np.ndarray:
        """delta Phi_m(b, rho) on the radial grid (Simpson over z)."""
        key = (m, float(b))
        if key not in self._dphi_cache:
            g = self.lines.g_mz[m]
            theta = self.eta * b * (np.pi / 2) * self._w_run
            integrand = np.cos(theta) * g
            val = -b * self.eta * (np.pi / 2) * simpson(integrand, x=self.lines.z, axis=1)
            self._dphi_cache[key] = val
            self._check_pulse_area(m, b, g)
        return self._dphi_cache[key]

    def _check_pulse_area(self, m: int, b: float, g: np.ndarray) -> None:
        if m in self._area_warned:
            return
        dz = self.lines.z[1] - self.lines.z[0]
        area = np.max(np.sum(np.abs(g), axis=1)) * dz * b * self.eta * np.pi / 2
        if area > PULSE_AREA_GUARD:
            self._area_warned.add(m)
            warnings.warn(
                f"pulse area of g_{m}z ({area:.3g} at b={b}) exceeds the "
                f"perturbative guard {PULSE_AREA_GUARD}", stacklevel=3)

    def effective_phase(self, m: int, b: float, rho):
        """delta Phi_m(b, rho) interpolated at arbitrary radii."""
        rho = np.asarray(rho, dtype=float)
        return np.interp(rho, self.lines.rho, self.dphi_profile(m, b))

    def disk_average(self, values: np.ndarray, r_max: float | None = None) -> float:
        """Uniform-disk average over rho <= r_max of a radial-grid array."""
        r = self.lines.rho
        rm = self.r_a if r_max is None else r_max
        mask = r <= rm
        return float(np.trapz(values[mask] * r[mask], r[mask])
                     / np.trapz(r[mask], r[mask]))

    def apply_phi0_convention(self) -> float:
        """Fix the arbitrary m=0 phase offset so <dPhi_0(b=1, rho)> = 0.

        Averages over a uniform disk of the aperture radius; mutates the m=0
        loss line in place (g_0z -> g_0z - Phi0 H0z) and returns Phi0.
        """
        if 0 not in self.lines.g_mz:
            return 0.0
        raw = self.dphi_profile(0, 1.0)
        sin_theta = np.sin(self.theta_profile(1.0))
        phi0 = -self.disk_average(raw) / self.disk_average(sin_theta)
        self.lines.g_mz[0] = self.lines.g_mz[0] - phi0 * self.lines.h0z
        self._dphi_cache = {k: v for k, v in self._dphi_cache.items() if k[0] != 0}
        return float(phi0)


def _bilinear(xg, yg, table, x, y):
    ix = np.clip(np.searchsorted(xg, x) - 1, 0, len(xg) - 2)
    iy = np.clip(np.searchsorted(yg, y) - 1, 0, len(yg) - 2)
    fx = np.clip((x - xg[ix]) / (xg[ix + 1] - xg[ix]), 0.0, 1.0)
    fy = np.clip((y - yg[iy]) / (yg[iy + 1] - yg[iy]), 0.0, 1.0)
    return ((1 - fx) * (1 - fy) * table[ix, iy]
            + fx * (1 - fy) * table[ix + 1, iy]
            + (1 - fx) * fy * table[ix, iy + 1]
            + fx * fy * table[ix + 1, iy + 1])


def delta_p_pair(ctx: ResponseContext, m: int, b: float, r1, r2) -> float:
    """Transition-probability change for one up/down traversal pair.

    r1, r2 are (rho, phi) tuples of the two passages.
    """
    rho1, phi1 = r1
    rho2, phi2 = r2
    s1 = np.sin(ctx.total_tipping(b, rho1))
    s2 = np.sin(ctx.total_tipping(b, rho2))
    d1 = ctx.effective_phase(m, b, rho1)
    d2 = ctx.effective_phase(m, b, rho2)
    return float(0.5 * s2 * d1 * np.cos(m * phi1) - 0.5 * s1 * d2 * np.cos(m * phi2))


def ramsey_slope_pair(ctx: ResponseContext, b: float, rho1, rho2) -> float:
    """Per-atom Ramsey fringe slope dP/d nu (1/Hz)."""
    s1 = np.sin(ctx.total_tipping(b, rho1))
    s2 = np.sin(ctx.total_tipping(b, rho2))
    return float(-(np.pi / (2 * ctx.delta_nu)) * s1 * s2)


def frequency_shift(dp_mean: float, slope: float,
                    f_atom: float = DEFAULT_CONSTANTS.f_atom,
                    slope_floor: float = 1e-6) -> tuple[float, float]:
    """(delta nu in Hz, fractional shift).  Raises SlopeNearZero when singular.

    slope_floor is relative to pi/(2 delta_nu) ... the caller passes the
    ensemble-averaged slope in 1/Hz; the floor is absolute in those units.
    """
    if abs(slope) < slope_floor:
        raise SlopeNearZero(f"|slope| = {abs(slope):.3g} < floor {slope_floor:.3g}")
    dnu = -dp_mean / slope
    return dnu, dnu / f_atom


def longitudinal_template(b: float, p: int) -> tuple[float, float]:
    """Closed-cavity power-dependence template (flat tipping angle).

    Returns (dPhi_long_p(b), dP_mp_delta(b)) with
    dPhi_long_p(b) = b pi/4 int_{-pi/2}^{pi/2} cos[b pi/4 (1 + sin u)] cos(pu) du
    and dP = sin(b pi/2) dPhi / 2.  For p = 1 the integral collapses to
    sin(b pi/2) exactly.
    """
    if p % 2 == 0 or p < 1:
        raise ValueError("longitudinal index p must be odd and positive")
    a = b * np.pi / 4

    def integrand(u):
        return np.cos(a * (1.0 + np.sin(u))) * np.cos(p * u)

    val, _err = quad(integrand, -np.pi / 2, np.pi / 2, epsabs=1e-13, epsrel=1e-13)
    dphi = a * val
    return float(dphi), float(0.5 * np.sin(b * np.pi / 2) * dphi)
