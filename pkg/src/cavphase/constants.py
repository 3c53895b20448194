"""Physical constants and derived microwave quantities.

All internal quantities are SI (m, s, Hz, rad).  Config files carry explicit
unit suffixes and are converted on load.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MU0 = 4.0e-7 * np.pi          # vacuum permeability (H/m)
C_LIGHT = 299792458.0         # speed of light (m/s)
K_BOLTZMANN = 1.380649e-23    # Boltzmann constant (J/K)
EPS0 = 1.0 / (MU0 * C_LIGHT**2)


@dataclass(frozen=True)
class PhysicalConstants:
    """Atom and cavity-material constants.

    k and the skin depth are derived, never stored, so they cannot drift out
    of sync with f_atom / sigma_cu.
    """

    c: float = C_LIGHT
    f_atom: float = 9.1926e9        # cesium clock transition (Hz)
    sigma_cu: float = 5.8e7         # copper conductivity (S/m)
    mass: float = 2.20695e-25       # cesium mass (kg)
    g_grav: float = 9.80665         # gravitational acceleration (m/s^2)

    @property
    def omega(self) -> float:
        return 2.0 * np.pi * self.f_atom

    @property
    def k(self) -> float:
        """Free-space wavenumber omega/c (1/m)."""
        return self.omega / self.c

    @property
    def skin_depth(self) -> float:
        """Conductor skin depth sqrt(2/(mu0 omega sigma)) (m)."""
        return float(np.sqrt(2.0 / (MU0 * self.omega * self.sigma_cu)))

    def thermal_speed(self, temperature: float) -> float:
        """Most-probable transverse thermal speed u = sqrt(2 kB T / mass)."""
        return float(np.sqrt(2.0 * K_BOLTZMANN * temperature / self.mass))


DEFAULT_CONSTANTS = PhysicalConstants()
