"""Cavity cross-section geometry and the closed-cavity dispersion relation.

The cross-section is axisymmetric and mirror-symmetric about the midplane
z = 0: a cylindrical body, a stack of cutoff waveguide sections on each
endcap, an optional aperture constriction inside the stack, and an optional
annular mode-filter groove in the endcaps.  All metal corners are rounded
with corner_radius (sharp corners are rejected; the FEM resolves the arcs).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bessel import J1_ROOT_1
from .constants import PhysicalConstants, DEFAULT_CONSTANTS
from .errors import BelowCutoff


@dataclass(frozen=True)
class CutoffSection:
    """One cutoff waveguide section: inner radius and axial length (m)."""

    radius: float
    length: float


@dataclass(frozen=True)
class ModeFilter:
    """Annular groove in each endcap used to tune m>=1 mode spectra.

    The groove is flush with the cavity sidewall: it spans
    rho in [R - radial_width, R], recessed by `length` beyond the endcap,
    opening to the cavity over a radial gap `coupling_gap` (<= radial_width).
    """

    radial_width: float
    length: float
    coupling_gap: float


@dataclass(frozen=True)
class FeedSite:
    """Machined feed port location on the sidewall."""

    z: float
    phi: float


@dataclass(frozen=True)
class CavityGeometry:
    body_radius: float
    body_height: float
    cutoff_sections: tuple[CutoffSection, ...] = ()
    aperture_radius: float = 0.0
    aperture_offset: float = 0.0       # distance of the aperture lip from the endcap
    aperture_length: float = 2.0e-3    # axial extent of the aperture lip
    corner_radius: float = 20.0e-6
    mode_filter: ModeFilter | None = None
    feed_sites: tuple[FeedSite, ...] = ()

    @property
    def is_closed(self) -> bool:
        return len(self.cutoff_sections) == 0

    def cutoff_z_spans(self) -> list[tuple[float, float, float]]:
        """(radius, z_lo, z_hi) of each top-side cutoff section, endcap outward."""
        spans = []
        z = self.body_height / 2.0
        for sec in self.cutoff_sections:
            spans.append((sec.radius, z, z + sec.length))
            z += sec.length
        return spans

    def stack_height(self) -> float:
        return sum(s.length for s in self.cutoff_sections)

    def min_cutoff_radius(self) -> float:
        radii = [s.radius for s in self.cutoff_sections]
        if self.aperture_radius > 0 and not self.is_closed:
            radii.append(self.aperture_radius)
        return min(radii) if radii else self.body_radius


def te011_resonant_height(radius: float, frequency: float,
                          constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Height d at which a closed cylinder of the given radius resonates in TE011.

    Dispersion: k^2 = gamma_1^2 + k_1^2 with gamma_1 = x_11/R, k_1 = pi/d,
    x_11 the first zero of J1.  Raises BelowCutoff when gamma_1 >= k.
    """
    k = 2.0 * np.pi * frequency / constants.c
    gamma1 = J1_ROOT_1 / radius
    if gamma1 >= k:
        raise BelowCutoff(
            f"radius {radius*1e3:.2f} mm is below the TE01 cutoff "
            f"({J1_ROOT_1/k*1e3:.2f} mm) at {frequency/1e9:.4f} GHz")
    k1 = np.sqrt(k * k - gamma1 * gamma1)
    return float(np.pi / k1)


def te011_wavenumbers(geom: CavityGeometry,
                      constants: PhysicalConstants = DEFAULT_CONSTANTS) -> tuple[float, float]:
    """(gamma_1, k_1) for the body cylinder; k_1 from the actual height."""
    gamma1 = J1_ROOT_1 / geom.body_radius
    k1 = np.pi / geom.body_height
    return float(gamma1), float(k1)


def validate_geometry(geom: CavityGeometry) -> list[str]:
    """Invariant check; returns one message per violation, empty if clean."""
    v: list[str] = []
    if geom.body_radius <= 0:
        v.append("body_radius must be positive")
    if geom.body_height <= 0:
        v.append("body_height must be positive")
    if geom.corner_radius <= 0:
        v.append("corner_radius must be positive")
    for i, sec in enumerate(geom.cutoff_sections):
        if sec.radius <= 0:
            v.append(f"cutoff_sections[{i}].radius must be positive")
        if sec.length < 0:
            v.append(f"cutoff_sections[{i}].length must be non-negative")
        if sec.radius > geom.body_radius:
            v.append(f"cutoff_sections[{i}].radius exceeds body_radius")
    if geom.aperture_radius > geom.body_radius:
        v.append("aperture_radius exceeds body_radius")
    if not geom.is_closed:
        if geom.aperture_radius <= 0:
            v.append("aperture_radius must be positive for a holed cavity")
        stack = geom.stack_height()
        if geom.aperture_offset < 0 or geom.aperture_offset > stack:
            v.append("aperture_offset must lie within the cutoff stack")
    if geom.mode_filter is not None:
        mf = geom.mode_filter
        if mf.radial_width <= 0 or mf.length <= 0:
            v.append("mode_filter dimensions must be positive")
        if mf.coupling_gap <= 0 or mf.coupling_gap > mf.radial_width:
            v.append("mode_filter coupling_gap must be in (0, radial_width]")
        if mf.radial_width >= geom.body_radius:
            v.append("mode_filter radial_width must be smaller than body_radius")
    # corner arcs must fit on every section wall they join
    min_feature = min(
        [geom.body_height / 2.0, geom.body_radius]
        + [s.length for s in geom.cutoff_sections if s.length > 0]
        + [s.radius for s in geom.cutoff_sections])
    if geom.corner_radius > 0 and geom.corner_radius * 2.0 > min_feature:
        v.append("corner_radius too large for the smallest section")
    return v
