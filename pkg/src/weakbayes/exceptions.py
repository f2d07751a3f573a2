"""Exception hierarchy for the weakbayes package."""


class WeakBayesError(Exception):
    """Base class for all domain errors raised by this package."""


class NotHermitianError(WeakBayesError):
    """Matrix fails the Hermitian symmetry check at the given tolerance."""


class NotPSDError(WeakBayesError):
    """Hermitian matrix has an eigenvalue below the PSD tolerance floor."""


class NoConvergenceError(WeakBayesError):
    """An iterative procedure (eigensolver, extrapolation) did not converge."""


class NotNormalizedError(WeakBayesError):
    """State vector or wavefunction norm deviates from 1 beyond tolerance."""


class ZeroOverlapError(WeakBayesError):
    """Postselection overlap with a pure state is below the cutoff; the
    weak value is undefined."""


class ZeroProbabilityError(WeakBayesError):
    """Postselection probability of an outcome on a mixed state is below
    the cutoff; the conditional value is undefined."""


class DegenerateEnsembleError(WeakBayesError):
    """Too much of the prior state is invisible to the postselection basis."""


class NonRealLossError(WeakBayesError):
    """Quadratic loss came out with a non-negligible imaginary residue,
    signalling broken Hermiticity upstream."""


class ZeroPostselectionError(WeakBayesError):
    """Pointer simulation postselected onto an outcome of vanishing
    probability."""


class GridOverflowError(WeakBayesError):
    """Wavefunction mass leaked off the pointer grid beyond tolerance."""


class ResolutionError(WeakBayesError):
    """Grid too coarse to resolve the requested wavepacket in position or
    momentum."""


class ProblemFormatError(WeakBayesError):
    """Problem file failed to parse or validate."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
