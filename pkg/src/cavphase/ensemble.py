"""Ensemble averaging of transition-probability changes and fringe slopes.

Trajectories are transverse-only (vertical motion enters through the config
times): r(t) = r_ref + v (t - t_ref) + a (t - t_ref)^2 / 2, with the tilt
acceleration a = -g alpha_tilt along the tilt azimuth.  Atoms survive if they
clear the aperture radius at t1 +- dt_a and t2 +- dt_a (plus any extra cuts)
and are weighted by the detection probability at t_detect.

Sampling is chunked over a counter-based Philox stream keyed on the seed, so
the trajectory set is identical for any thread count or chunk schedule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .constants import PhysicalConstants, DEFAULT_CONSTANTS
from .errors import EmptyEnsemble, SlopeNearZero
from .response import ResponseContext, frequency_shift

_CHUNK = 1 << 18
_MIN_SURVIVAL = 1e-6


@dataclass(frozen=True)
class Detection:
    a: float = 0.0            # quadratic curvature along x (dimensionless)
    b: float = 0.0            # quadratic curvature along y
    center: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class EnsembleConfig:
    r00: float                # 1/e transverse cloud radius at t_ref (m); 0 = point
    rho_off: float = 0.0
    phi_off: float = 0.0
    temperature: float = 1e-6  # K
    v0: tuple[float, float] = (0.0, 0.0)   # extra mean transverse velocity (m/s)
    alpha_tilt: float = 0.0    # fountain tilt (rad)
    tilt_azimuth: float = 0.0
    launch_mode: str = "center-on-down"    # or "along-axis"
    t1: float = 0.13
    t2: float = 0.63
    t_detect: float = 0.7
    dt_a: float = 0.035
    r_a: float = 5.0e-3
    detection: Detection = Detection()
    ref_time: float = 0.0      # time at which r00/rho_off are defined
    extra_apertures: tuple[tuple[float, float], ...] = ()   # (time, radius)

    def validate(self) -> list[str]:
        v = []
        if not (self.t1 < self.t1 + self.dt_a <= self.t2 - self.dt_a
                < self.t2 < self.t_detect):
            v.append("times must satisfy t1 < t1+dt_a <= t2-dt_a < t2 < t_detect")
        if self.r00 < 0:
            v.append("r00 must be non-negative")
        if self.temperature <= 0:
            v.append("temperature must be positive")
        if self.r_a <= 0:
            v.append("r_a must be positive")
        if self.launch_mode not in ("center-on-down", "along-axis"):
            v.append("launch_mode must be 'center-on-down' or 'along-axis'")
        return v

    def ramsey_width(self) -> float:
        """Default Ramsey fringe width 1/(2 (t2 - t1)) (Hz)."""
        return 1.0 / (2.0 * (self.t2 - self.t1))


@dataclass
class Trajectories:
    rho1: np.ndarray
    phi1: np.ndarray
    rho2: np.ndarray
    phi2: np.ndarray
    weight: np.ndarray        # detection weight per survivor
    x1: np.ndarray
    x2: np.ndarray
    n_drawn: int

    @property
    def n_survived(self) -> int:
        return self.rho1.shape[0]


def _mean_offsets(cfg: EnsembleConfig, constants: PhysicalConstants):
    """Launch center, tilt acceleration, and steering velocity."""
    center = np.array([cfg.rho_off * np.cos(cfg.phi_off),
                       cfg.rho_off * np.sin(cfg.phi_off)])
    accel = -constants.g_grav * cfg.alpha_tilt * np.array(
        [np.cos(cfg.tilt_azimuth), np.sin(cfg.tilt_azimuth)])
    v_mean = np.array(cfg.v0, dtype=float)
    if cfg.launch_mode == "center-on-down":
        dt2 = cfg.t2 - cfg.ref_time
        v_mean = v_mean - (center + 0.5 * accel * dt2 * dt2) / dt2
    return center, accel, v_mean


def sample_trajectories(cfg: EnsembleConfig, seed: int, n: int,
                        constants: PhysicalConstants = DEFAULT_CONSTANTS) -> Trajectories:
    """Draw n trajectories and keep the aperture survivors."""
    u = constants.thermal_speed(cfg.temperature)
    center, accel, v_mean = _mean_offsets(cfg, constants)
    pos_sigma = cfg.r00 / np.sqrt(2.0)     # 1/e density radius -> per-axis sigma
    vel_sigma = u / np.sqrt(2.0)

    cut_times = [cfg.t1 - cfg.dt_a, cfg.t1 + cfg.dt_a,
                 cfg.t2 - cfg.dt_a, cfg.t2 + cfg.dt_a]
    cut_radii = [cfg.r_a] * 4
    for t_cut, r_cut in cfg.extra_apertures:
        cut_times.append(t_cut)
        cut_radii.append(r_cut)

    keep = {k: [] for k in ("x1", "y1", "x2", "y2", "xd", "yd")}
    n_chunks = (n + _CHUNK - 1) // _CHUNK
    for c in range(n_chunks):
        m = min(_CHUNK, n - c * _CHUNK)
        gen = np.random.Generator(np.random.Philox(key=seed).jumped(c))
        r0 = center + pos_sigma * gen.standard_normal((m, 2))
        v = v_mean + vel_sigma * gen.standard_normal((m, 2))

        def pos(t):
            dt = t - cfg.ref_time
            return r0 + v * dt + 0.5 * accel * dt * dt

        alive = np.ones(m, dtype=bool)
        for t_cut, r_cut in zip(cut_times, cut_radii):
            p = pos(t_cut)
            alive &= (p[:, 0] ** 2 + p[:, 1] ** 2) < r_cut * r_cut
        p1 = pos(cfg.t1)[alive]
        p2 = pos(cfg.t2)[alive]
        pd = pos(cfg.t_detect)[alive]
        keep["x1"].append(p1[:, 0]); keep["y1"].append(p1[:, 1])
        keep["x2"].append(p2[:, 0]); keep["y2"].append(p2[:, 1])
        keep["xd"].append(pd[:, 0]); keep["yd"].append(pd[:, 1])

    x1 = np.concatenate(keep["x1"]); y1 = np.concatenate(keep["y1"])
    x2 = np.concatenate(keep["x2"]); y2 = np.concatenate(keep["y2"])
    xd = np.concatenate(keep["xd"]); yd = np.concatenate(keep["yd"])
    if x1.size < n * _MIN_SURVIVAL:
        raise EmptyEnsemble(
            f"{x1.size} of {n} trajectories survived the apertures")

    det = cfg.detection
    wd = (1.0 - det.a * (xd - det.center[0]) ** 2 / cfg.r_a ** 2) \
        * (1.0 - det.b * (yd - det.center[1]) ** 2 / cfg.r_a ** 2)
    wd = np.maximum(wd, 0.0)
    return Trajectories(
        rho1=np.hypot(x1, y1), phi1=np.arctan2(y1, x1),
        rho2=np.hypot(x2, y2), phi2=np.arctan2(y2, x2),
        weight=wd, x1=x1, x2=x2, n_drawn=n)


def _weighted_stats(values: np.ndarray, weights: np.ndarray) -> tuple[float, float]:
    wsum = float(np.sum(weights))
    mean = float(np.sum(weights * values) / wsum)
    var = float(np.sum((weights * (values - mean)) ** 2))
    return mean, np.sqrt(var) / wsum


def average_delta_p(cfg: EnsembleConfig, ctx: ResponseContext, m: int, b: float,
                    seed: int, n: int,
                    traj: Trajectories | None = None,
                    constants: PhysicalConstants = DEFAULT_CONSTANTS):
    """Detection-weighted MC means: (dP_m mean, stderr, slope mean)."""
    if traj is None:
        traj = sample_trajectories(cfg, seed, n, constants)
    theta_tab = ctx.theta_profile(b)
    dphi_tab = ctx.dphi_profile(m, b)
    slope_pref = -np.pi / (2.0 * ctx.delta_nu)
    dp, slope = kernels.pair_terms(traj.rho1, traj.phi1, traj.rho2, traj.phi2,
                                   ctx.rho, theta_tab, dphi_tab, m, slope_pref)
    dp_mean, dp_err = _weighted_stats(dp, traj.weight)
    slope_mean = float(np.sum(traj.weight * slope) / np.sum(traj.weight))
    return dp_mean, dp_err, slope_mean


# Closed-form ensemble models ---------------------------------------------------

@dataclass(frozen=True)
class QuadraticDensity:
    """n(r) = n0 [1 + alpha ((r - r_off)^2 / r_a^2 - 1/2)] over the aperture disk."""

    alpha: float = 0.0
    offset: tuple[float, float] = (0.0, 0.0)

    def values(self, x, y, r_a):
        dx = x - self.offset[0]
        dy = y - self.offset[1]
        return 1.0 + self.alpha * ((dx * dx + dy * dy) / (r_a * r_a) - 0.5)


@dataclass(frozen=True)
class GridDensity:
    """Arbitrary density on a Cartesian grid, bilinearly interpolated."""

    x: np.ndarray
    y: np.ndarray
    n: np.ndarray

    def values(self, x, y, r_a):
        from .response import _bilinear
        return _bilinear(self.x, self.y, self.n, np.asarray(x), np.asarray(y))


def _disk_quadrature(r_a: float, n_r: int = 96, n_phi: int = 128):
    nodes, wts = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * r_a * (nodes + 1.0)
    wr = 0.5 * r_a * wts * r
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * np.pi / n_phi
    R, PHI = np.meshgrid(r, phi, indexing="ij")
    W = np.outer(wr, np.full(n_phi, wphi))
    return R, PHI, W


def uncorrelated_average(n1, n2, ctx: ResponseContext, m: int, b: float) -> float:
    """Separable product-of-averages model over the two passages.

    n1, n2 are density models (QuadraticDensity or GridDensity).  Correlations
    between the passages are dropped; for uniform-plus-quadratic densities the
    result reduces to the curvature-difference form.
    """
    R, PHI, W = _disk_quadrature(ctx.r_a)
    X, Y = R * np.cos(PHI), R * np.sin(PHI)
    sin_theta = np.sin(np.interp(R, ctx.rho, ctx.theta_profile(b)))
    dphi_cos = np.interp(R, ctx.rho, ctx.dphi_profile(m, b)) * np.cos(m * PHI)

    out = []
    for dens in (n1, n2):
        nv = dens.values(X, Y, ctx.r_a)
        norm = float(np.sum(W * nv))
        out.append((float(np.sum(W * nv * sin_theta)) / norm,
                    float(np.sum(W * nv * dphi_cos)) / norm))
    (s1, d1), (s2, d2) = out
    return 0.5 * s2 * d1 - 0.5 * s1 * d2


def delta_function_average(rho_off: float, phi_off: float,
                           ctx: ResponseContext, m: int, b: float) -> float:
    """Point source on the upward passage, uniform disk on the downward.

    The m = 0 second term uses the Phi_0 convention that makes the uniform
    average of dPhi_0(b=1, rho) vanish (apply_phi0_convention on the context).
    """
    sin_theta_avg = ctx.disk_average(np.sin(ctx.theta_profile(b)))
    dphi_off = float(ctx.effective_phase(m, b, rho_off))
    term1 = 0.5 * sin_theta_avg * dphi_off * np.cos(m * phi_off)
    if m != 0:
        return term1
    dphi_avg = ctx.disk_average(ctx.dphi_profile(0, b))
    sin_theta_off = float(np.sin(ctx.total_tipping(b, rho_off)))
    return term1 - 0.5 * sin_theta_off * dphi_avg


# Curve assembly ---------------------------------------------------------------

@dataclass
class DcpCurvePoint:
    b: float
    m: int
    dp_mean: float
    dp_stderr: float
    slope: float
    dnu_hz: float
    dnu_fractional: float
    singular: bool


@dataclass
class DcpCurve:
    points: list[DcpCurvePoint]
    meta: dict

    CSV_HEADER = "b,m,dp_mean,dp_stderr,slope,dnu_hz,dnu_fractional,singular_flag"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for p in self.points:
            lines.append(
                f"{p.b:.10g},{p.m},{p.dp_mean:.12e},{p.dp_stderr:.12e},"
                f"{p.slope:.12e},"
                + (f"{p.dnu_hz:.12e},{p.dnu_fractional:.12e}" if not p.singular
                   else "nan,nan")
                + f",{int(p.singular)}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "meta": self.meta,
            "points": [vars(p) for p in self.points],
        }, indent=2, sort_keys=True)

    def select(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        pts = [(p.b, p.dp_mean) for p in self.points if p.m == m]
        arr = np.array(pts)
        return arr[:, 0], arr[:, 1]


def dcp_curve(cfg: EnsembleConfig, ctx: ResponseContext, m_indices, b_grid,
              seed: int, n: int, model: str = "mc",
              constants: PhysicalConstants = DEFAULT_CONSTANTS,
              slope_floor: float = 1e-9, meta: dict | None = None) -> DcpCurve:
    """Sampled dP_m(b), slope(b), and frequency shift over an amplitude grid.

    model: "mc" (full Monte Carlo), "delta" (point-up/uniform-down closed
    form), or "uncorrelated" (separable averages of Gaussian-limit quadratic
    densities are not assumed; the uniform model is used).
    """
    traj = None
    if model == "mc":
        traj = sample_trajectories(cfg, seed, n, constants)
    points = []
    for b in b_grid:
        sin_theta = np.sin(ctx.theta_profile(b))
        for m in m_indices:
            if model == "mc":
                dp, err, slope = average_delta_p(cfg, ctx, m, b, seed, n,
                                                 traj=traj, constants=constants)
            elif model == "delta":
                dp = delta_function_average(cfg.rho_off, cfg.phi_off, ctx, m, b)
                err = 0.0
                savg = ctx.disk_average(sin_theta)
                soff = float(np.sin(ctx.total_tipping(b, cfg.rho_off)))
                slope = float(-(np.pi / (2 * ctx.delta_nu)) * soff * savg)
            elif model == "uncorrelated":
                dp = uncorrelated_average(QuadraticDensity(), QuadraticDensity(),
                                          ctx, m, b)
                err = 0.0
                savg = ctx.disk_average(sin_theta)
                slope = float(-(np.pi / (2 * ctx.delta_nu)) * savg * savg)
            else:
                raise ValueError(f"unknown averaging model {model!r}")
            try:
                dnu, frac = frequency_shift(dp, slope, constants.f_atom,
                                            slope_floor=slope_floor)
                singular = False
            except SlopeNearZero:
                dnu, frac, singular = float("nan"), float("nan"), True
            points.append(DcpCurvePoint(b=float(b), m=int(m), dp_mean=dp,
                                        dp_stderr=err, slope=slope, dnu_hz=dnu,
                                        dnu_fractional=frac, singular=singular))
    base_meta = {"seed": int(seed), "n_mc": int(n), "model": model,
                 "kernel_backend": kernels.BACKEND}
    if meta:
        base_meta.update(meta)
    return DcpCurve(points=points, meta=base_meta)


# Table-style presets ------------------------------------------------------------

def preset(name: str) -> EnsembleConfig:
    """Named launch configurations used throughout the power-dependence studies."""
    base = EnsembleConfig(r00=0.5e-3)
    table = {
        "I": replace(base, r00=0.5e-3, rho_off=2e-3, launch_mode="center-on-down"),
        "II0": replace(base, r00=0.5e-3, launch_mode="along-axis"),
        "II1": replace(base, r00=0.5e-3, launch_mode="along-axis",
                       alpha_tilt=1e-3),
        "II2": replace(base, r00=0.5e-3, launch_mode="along-axis",
                       detection=Detection(a=0.5, b=0.0)),
        "III": replace(base, r00=3e-3, rho_off=2e-3, launch_mode="center-on-down"),
        "IV0": replace(base, r00=3e-3, launch_mode="along-axis"),
        "IV1": replace(base, r00=3e-3, launch_mode="along-axis", alpha_tilt=1e-3),
        "IV2": replace(base, r00=3e-3, launch_mode="along-axis",
                       detection=Detection(a=0.5, b=0.0)),
        "delta0": replace(base, r00=0.0, rho_off=0.0, ref_time=0.13,
                          launch_mode="along-axis"),
        "delta1": replace(base, r00=0.0, rho_off=2e-3, ref_time=0.13,
                          launch_mode="along-axis"),
        "delta2": replace(base, r00=0.0, rho_off=2e-3, ref_time=0.13,
                          launch_mode="along-axis"),
    }
    if name not in table:
        raise KeyError(f"unknown ensemble preset {name!r}; "
                       f"choices: {sorted(table)}")
    return table[name]
