"""weakbayes: weak values and minimum-quadratic-loss estimation on
pre- and postselected quantum ensembles, with a pointer-measurement
simulator and a momentum-from-position grid demo."""

from .estimation import (
    GridSpec,
    LossReport,
    bayes_estimator,
    bruteforce_bayes,
    exactness_certificate,
    loss,
    schwarz_vectors,
    verify_bounds,
)
from .fourier_grid import (
    GridWavefunction,
    exact_uncertainty_check,
    momentum_moment,
    momentum_observable,
    position_profile,
)
from .linalg import EigenDecomposition, eig_hermitian, is_hermitian, sqrt_psd
from .pointer import PointerGrid, PointerStats, extract_weak_value, simulate
from .states import (
    DensityMatrix,
    Observable,
    PostselectionBasis,
    PureState,
    ValidationReport,
    density_from_pure,
    random_instance,
    trial_seed,
    validate,
)
from .weak_values import (
    Estimator,
    WeakValueProfile,
    alpha_mixed,
    estimator_operators,
    profile,
    weak_value_pure,
)

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "EigenDecomposition",
    "Estimator",
    "GridSpec",
    "GridWavefunction",
    "LossReport",
    "Observable",
    "PointerGrid",
    "PointerStats",
    "PostselectionBasis",
    "PureState",
    "ValidationReport",
    "WeakValueProfile",
    "alpha_mixed",
    "bayes_estimator",
    "bruteforce_bayes",
    "density_from_pure",
    "eig_hermitian",
    "estimator_operators",
    "exact_uncertainty_check",
    "exactness_certificate",
    "extract_weak_value",
    "is_hermitian",
    "loss",
    "momentum_moment",
    "momentum_observable",
    "position_profile",
    "profile",
    "random_instance",
    "schwarz_vectors",
    "simulate",
    "sqrt_psd",
    "trial_seed",
    "validate",
    "verify_bounds",
    "weak_value_pure",
]
