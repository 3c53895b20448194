"""Feed amplitude/phase imbalance algebra for strongly coupled cavities.

Loss fields scale linearly with the drive, so amplitude and phase imbalances
of the feeds act as per-Fourier-index multiplicative factors on the fields of
a single weakly-coupled feed.  Each feed j at azimuth phi_j with drive
fraction xi_j, drive phase psi_j, and coupling quality factor Q_j contributes

    (xi_j exp(i psi_j) Q0/Q - Q0/Q_j) cos(m phi_j)

to the factor for Fourier index m, where Q0 is the wall Q and Q the loaded Q.
The classic two-opposed-feed cases are special cases of this sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import MissingBaseSolution


@dataclass(frozen=True)
class Feed:
    phi: float                 # azimuth (rad)
    z: float                   # height on sidewall (m)
    xi: float                  # drive amplitude fraction
    psi: float = 0.0           # drive phase (rad)
    Q: float = math.inf        # coupling quality factor (inf = lossless port)


@dataclass(frozen=True)
class FeedNetwork:
    feeds: tuple[Feed, ...]
    Q0: float                  # unloaded (wall) quality factor
    delta_omega: float = 0.0   # cavity detuning omega - omega_cav (rad/s)
    omega: float = 2.0 * math.pi * 9.1926e9

    @property
    def q_loaded(self) -> float:
        inv = 1.0 / self.Q0 + sum(1.0 / f.Q for f in self.feeds if math.isfinite(f.Q))
        return 1.0 / inv

    @property
    def gamma(self) -> float:
        """Cavity halfwidth Gamma = omega / (2 Q_loaded) (rad/s)."""
        return self.omega / (2.0 * self.q_loaded)

    def validate(self) -> list[str]:
        v = []
        xi_total = sum(f.xi * complex(math.cos(f.psi), math.sin(f.psi)) for f in self.feeds)
        if abs(xi_total - 1.0) > 1e-9:
            v.append("feed drive fractions must satisfy sum(xi_j e^{i psi_j}) = 1 "
                     "to maintain the standing wave")
        if self.Q0 <= 0:
            v.append("Q0 must be positive")
        return v


def alpha(delta_omega: float, gamma: float) -> float:
    """Detuning parameter alpha = delta_omega / Gamma of the field superposition."""
    if gamma <= 0:
        raise ValueError("cavity halfwidth must be positive")
    return delta_omega / gamma


def feed_factor(net: FeedNetwork, m: int) -> complex:
    """Complex factor multiplying the single-weak-feed loss fields for index m."""
    q0_over_q = net.Q0 / net.q_loaded
    total = 0j
    for f in net.feeds:
        drive = f.xi * complex(math.cos(f.psi), math.sin(f.psi)) * q0_over_q
        loss = net.Q0 / f.Q if math.isfinite(f.Q) else 0.0
        total += (drive - loss) * math.cos(m * f.phi)
    return total


def amplitude_scale(net: FeedNetwork, m: int) -> float:
    """Real factor for two opposed equal-phase feeds (phi = 0, pi).

    [xi1 Q0/Q - Q0/Q1 + (-1)^m (xi2 Q0/Q - Q0/Q2)]
    """
    if len(net.feeds) != 2:
        raise ValueError("amplitude_scale is defined for exactly two feeds")
    f1, f2 = net.feeds
    if abs(f1.phi) > 1e-12 or abs(abs(f2.phi) - math.pi) > 1e-12:
        raise ValueError("feeds must sit at phi = 0 and pi")
    if f1.psi != f2.psi:
        raise ValueError("amplitude_scale assumes equal feed phases")
    q0_over_q = net.Q0 / net.q_loaded
    loss1 = net.Q0 / f1.Q if math.isfinite(f1.Q) else 0.0
    loss2 = net.Q0 / f2.Q if math.isfinite(f2.Q) else 0.0
    return (f1.xi * q0_over_q - loss1) + (-1) ** m * (f2.xi * q0_over_q - loss2)


def phase_imbalance_scale(net: FeedNetwork, rel_phase: float, m: int) -> complex:
    """Loss-field factor for two opposed equal feeds with relative drive phase.

    On resonance the odd-m factor is i tan(phase/2) Q0/Q: the scaled loss field
    is in quadrature with the weak-feed one, so it distorts the standing-wave
    amplitude without creating a phase gradient.  Even m is unaffected.
    """
    if abs(rel_phase) >= math.pi:
        raise ValueError("relative feed phase must satisfy |phase| < pi")
    if m % 2 == 0:
        return 1.0 + 0j
    return 1j * math.tan(rel_phase / 2.0) * net.Q0 / net.q_loaded


def observable_gradient_scale(net: FeedNetwork, rel_phase: float,
                              delta_omega: float | None = None) -> float:
    """Scale of Im[H_z] (the phase-generating part) for odd m with detuning.

    (delta_omega Q0 / (Gamma Q)) tan(phase/2): odd in the detuning, and
    independent of coupling strength and wall losses since Gamma*Q = omega/2.
    """
    dw = net.delta_omega if delta_omega is None else delta_omega
    return (dw / net.gamma) * (net.Q0 / net.q_loaded) * math.tan(rel_phase / 2.0)


def compose(net: FeedNetwork, base_fields: dict[int, object],
            m_indices: tuple[int, ...] | None = None) -> dict[int, tuple[complex, object]]:
    """Apply per-m feed factors to precomputed single-weak-feed solutions.

    Returns {m: (factor, base_field)}.  Only the real part of the factor
    generates a phase (tan Phi = -g_z/H_z with the real standing-wave
    convention); callers scale g_mz by factor.real for response evaluation
    and keep the complex factor for detuning algebra.
    """
    ms = tuple(sorted(base_fields)) if m_indices is None else m_indices
    out = {}
    for m in ms:
        if m not in base_fields:
            raise MissingBaseSolution(f"no base solution for m={m}")
        out[m] = (feed_factor(net, m), base_fields[m])
    return out


# Named constructors for the standard configurations ---------------------------

def single_weak(Q0: float, phi: float = 0.0, z: float = 0.0) -> FeedNetwork:
    return FeedNetwork(feeds=(Feed(phi=phi, z=z, xi=1.0),), Q0=Q0)


def single_overcoupled(Q0: float, Q1: float, phi: float = 0.0, z: float = 0.0) -> FeedNetwork:
    return FeedNetwork(feeds=(Feed(phi=phi, z=z, xi=1.0, Q=Q1),
                              Feed(phi=phi + math.pi, z=z, xi=0.0)), Q0=Q0)


def two_balanced(Q0: float, Qc: float = math.inf, z: float = 0.0) -> FeedNetwork:
    return FeedNetwork(feeds=(Feed(phi=0.0, z=z, xi=0.5, Q=Qc),
                              Feed(phi=math.pi, z=z, xi=0.5, Q=Qc)), Q0=Q0)


def unequal_feeds_equal_losses(Q0: float, eps: float, QL: float, z: float = 0.0) -> FeedNetwork:
    return FeedNetwork(feeds=(
        Feed(phi=0.0, z=z, xi=0.5 * (1 + eps / 2), Q=2 * QL),
        Feed(phi=math.pi, z=z, xi=0.5 * (1 - eps / 2), Q=2 * QL)), Q0=Q0)


def equal_feeds_unequal_losses(Q0: float, eps: float, QL: float, z: float = 0.0) -> FeedNetwork:
    return FeedNetwork(feeds=(
        Feed(phi=0.0, z=z, xi=0.5, Q=2 * (1 + eps / 2) * QL),
        Feed(phi=math.pi, z=z, xi=0.5, Q=2 * (1 - eps / 2) * QL)), Q0=Q0)


def matched_unequal(Q0: float, eps: float, QL: float, z: float = 0.0) -> FeedNetwork:
    """Ring-waveguide case: feed imbalance matched to the loss imbalance."""
    return FeedNetwork(feeds=(
        Feed(phi=0.0, z=z, xi=0.5 * (1 + eps / 2), Q=2 * (1 - eps / 2) * QL),
        Feed(phi=math.pi, z=z, xi=0.5 * (1 - eps / 2), Q=2 * (1 + eps / 2) * QL)), Q0=Q0)


def ring_waveguide(Q0: float, Qc: float, angles: tuple[float, ...] = None,
                   z: float = 0.0) -> FeedNetwork:
    """Four matched couplings at +-pi/4, +-3pi/4 fed by one external line."""
    if angles is None:
        angles = (math.pi / 4, 3 * math.pi / 4, -3 * math.pi / 4, -math.pi / 4)
    n = len(angles)
    return FeedNetwork(feeds=tuple(
        Feed(phi=a, z=z, xi=1.0 / n, Q=n * Qc) for a in angles), Q0=Q0)


def alternate_feed(Q0: float, Qc: float, side: str = "left", z: float = 0.0) -> FeedNetwork:
    """Power to only one of two strongly coupled opposed feeds."""
    phi_on = 0.0 if side == "left" else math.pi
    phi_off = math.pi if side == "left" else 0.0
    return FeedNetwork(feeds=(Feed(phi=phi_on, z=z, xi=1.0, Q=Qc),
                              Feed(phi=phi_off, z=z, xi=0.0, Q=Qc)), Q0=Q0)


PRESETS = {
    "single_weak": single_weak,
    "two_balanced": two_balanced,
    "ring_waveguide": ring_waveguide,
    "alternate_left": lambda Q0, Qc=math.inf, z=0.0: alternate_feed(Q0, Qc, "left", z),
    "alternate_right": lambda Q0, Qc=math.inf, z=0.0: alternate_feed(Q0, Qc, "right", z),
}
