"""Exception types shared across the package."""


class CavphaseError(Exception):
    """Base class for all package errors."""


class BelowCutoff(CavphaseError):
    """Cavity radius is below the TE01 waveguide cutoff at the target frequency."""


class DegenerateGeometry(CavphaseError):
    """Cross-section sections overlap or corner arcs cannot fit."""


class NoModeNearTarget(CavphaseError):
    """No eigenvalue within the accepted window around the target wavenumber."""


class SolverDiverged(CavphaseError):
    """Linear solve residual exceeded the configured tolerance."""


class FormatError(CavphaseError):
    """Field-map or mesh file does not match the expected schema."""


class NoRoot(CavphaseError):
    """Bracketing for a 1D root-find failed."""


class SlopeNearZero(CavphaseError):
    """Ramsey fringe slope too close to zero to convert dP into a frequency."""


class EmptyEnsemble(CavphaseError):
    """Aperture cuts removed essentially all trajectories."""


class MissingBaseSolution(CavphaseError):
    """Feed-network composition requested a Fourier index with no base field."""


class BracketFailed(CavphaseError):
    """A nulling step could not bracket its root."""

    def __init__(self, step: str, message: str = ""):
        self.step = step
        super().__init__(f"{step}: {message}" if message else step)


class SolveFailed(CavphaseError):
    """Objective evaluation failed; carries the parameter vector."""

    def __init__(self, params, message: str = ""):
        self.params = params
        super().__init__(message or f"solve failed at params {params}")
