"""Hot per-trajectory kernels with a numba fast path and a numpy fallback.

The backend is selected once at import: set CAVPHASE_NUMBA=0 to force the
pure-numpy path (the numba path is also skipped automatically when numba is
unavailable).  Both paths use the same interpolation arithmetic and write
per-trajectory outputs only, so results do not depend on thread count;
reductions happen outside the kernels in fixed numpy order.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("CAVPHASE_NUMBA", "1").strip().lower()
USE_NUMBA = _FLAG not in ("0", "false", "off")
if USE_NUMBA:
    try:
        from numba import njit, prange
    except ImportError:        # pragma: no cover - numba is a declared dep
        USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"


if USE_NUMBA:
    @njit(cache=True, parallel=True)
    def _pair_terms_parallel(rho1, phi1, rho2, phi2, drho, nrho,
                             theta_tab, dphi_tab, m, slope_pref, dp_out, slope_out):
        n = rho1.shape[0]
        for i in prange(n):
            p1 = rho1[i] / drho
            i1 = int(p1)
            if i1 > nrho - 2:
                i1 = nrho - 2
            f1 = p1 - i1
            if f1 > 1.0:
                f1 = 1.0
            p2 = rho2[i] / drho
            i2 = int(p2)
            if i2 > nrho - 2:
                i2 = nrho - 2
            f2 = p2 - i2
            if f2 > 1.0:
                f2 = 1.0
            th1 = theta_tab[i1] + (theta_tab[i1 + 1] - theta_tab[i1]) * f1
            th2 = theta_tab[i2] + (theta_tab[i2 + 1] - theta_tab[i2]) * f2
            d1 = dphi_tab[i1] + (dphi_tab[i1 + 1] - dphi_tab[i1]) * f1
            d2 = dphi_tab[i2] + (dphi_tab[i2 + 1] - dphi_tab[i2]) * f2
            s1 = np.sin(th1)
            s2 = np.sin(th2)
            dp_out[i] = 0.5 * s2 * d1 * np.cos(m * phi1[i]) \
                - 0.5 * s1 * d2 * np.cos(m * phi2[i])
            slope_out[i] = slope_pref * s1 * s2


def _pair_terms_numpy(rho1, phi1, rho2, phi2, drho, nrho,
                      theta_tab, dphi_tab, m, slope_pref, dp_out, slope_out):
    p1 = rho1 / drho
    i1 = np.minimum(p1.astype(np.int64), nrho - 2)
    f1 = np.minimum(p1 - i1, 1.0)
    p2 = rho2 / drho
    i2 = np.minimum(p2.astype(np.int64), nrho - 2)
    f2 = np.minimum(p2 - i2, 1.0)
    th1 = theta_tab[i1] + (theta_tab[i1 + 1] - theta_tab[i1]) * f1
    th2 = theta_tab[i2] + (theta_tab[i2 + 1] - theta_tab[i2]) * f2
    d1 = dphi_tab[i1] + (dphi_tab[i1 + 1] - dphi_tab[i1]) * f1
    d2 = dphi_tab[i2] + (dphi_tab[i2 + 1] - dphi_tab[i2]) * f2
    s1 = np.sin(th1)
    s2 = np.sin(th2)
    np.copyto(dp_out, 0.5 * s2 * d1 * np.cos(m * phi1)
              - 0.5 * s1 * d2 * np.cos(m * phi2))
    np.copyto(slope_out, slope_pref * s1 * s2)


def pair_terms(rho1, phi1, rho2, phi2, rho_grid, theta_tab, dphi_tab,
               m: int, slope_pref: float):
    """Per-trajectory dP_m and Ramsey slope from the radial tables.

    rho_grid must be uniform starting at 0.  Returns (dp, slope) arrays of the
    trajectory count; callers reduce them (weighted) in fixed order.
    """
    n = rho1.shape[0]
    dp = np.empty(n)
    slope = np.empty(n)
    drho = float(rho_grid[1] - rho_grid[0])
    nrho = rho_grid.shape[0]
    args = (np.ascontiguousarray(rho1, dtype=float),
            np.ascontiguousarray(phi1, dtype=float),
            np.ascontiguousarray(rho2, dtype=float),
            np.ascontiguousarray(phi2, dtype=float),
            drho, nrho,
            np.ascontiguousarray(theta_tab, dtype=float),
            np.ascontiguousarray(dphi_tab, dtype=float),
            float(m), float(slope_pref), dp, slope)
    if USE_NUMBA:
        _pair_terms_parallel(*args)
    else:
        _pair_terms_numpy(*args)
    return dp, slope
