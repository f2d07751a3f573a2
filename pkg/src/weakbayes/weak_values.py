"""Weak values and the per-outcome conditional profile.

For a prior rho, observable a and postselection outcome |b>, the complex
conditional value is

    alpha(b) = <b| a rho |b> / <b| rho |b>,

which for a pure prior |psi><psi| reduces to the familiar weak value
<b|a|psi> / <b|psi>.  Its real part mu(b) is the minimum-quadratic-loss
estimate of a given outcome b; the imaginary part sigma(b) measures how
far the outcome is from admitting an exact estimate.  Outcomes whose
postselection probability falls below ``EPS_PS`` are excluded instead of
dividing by a vanishing denominator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .exceptions import (
    DegenerateEnsembleError,
    ZeroOverlapError,
    ZeroProbabilityError,
)
from .states import DensityMatrix, Observable, PostselectionBasis, PureState

# Outcomes with p(b) below this cutoff are excluded rather than producing
# a huge or NaN conditional value.
EPS_PS = 1e-12

# Aggregation tolerance for p-weighted identities (unbiasedness etc).
TOL_AGG = 1e-10


@dataclass(frozen=True)
class ProfileEntry:
    """One postselection outcome: probability, conditional value, flags."""

    label: str
    prob: float
    alpha: complex | None
    mu: float | None
    sigma: float | None
    excluded: bool


@dataclass(frozen=True)
class WeakValueProfile:
    """Per-outcome conditional values over a full postselection basis."""

    entries: tuple[ProfileEntry, ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e.label for e in self.entries)

    def probs(self) -> np.ndarray:
        return np.array([e.prob for e in self.entries])

    def mus(self, fill: float = 0.0) -> np.ndarray:
        """Real parts; excluded outcomes are filled with ``fill``."""
        return np.array([fill if e.excluded else e.mu for e in self.entries])

    def sigmas(self, fill: float = 0.0) -> np.ndarray:
        """Imaginary parts; excluded outcomes are filled with ``fill``."""
        return np.array([fill if e.excluded else e.sigma for e in self.entries])

    def excluded_mask(self) -> np.ndarray:
        return np.array([e.excluded for e in self.entries], dtype=bool)

    def excluded_mass(self) -> float:
        return float(sum(e.prob for e in self.entries if e.excluded))


@dataclass(frozen=True)
class Estimator:
    """Outcome-indexed real estimate theta(b), diagonal in the basis.

    ``zeroed`` lists outcomes whose value was defaulted to 0 because they
    were excluded from the profile; their probability mass is below the
    cutoff so they cannot move any expectation by more than EPS_PS.
    """

    basis: PostselectionBasis
    values: np.ndarray
    zeroed: tuple[str, ...] = field(default=())

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if vals.shape[0] != self.basis.dim:
            raise ValueError("one estimate per basis outcome required")
        if not np.all(np.isfinite(vals)):
            raise ValueError("estimator values must be finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "zeroed", tuple(self.zeroed))

    def matrix(self) -> np.ndarray:
        """Assemble sum_b theta(b) |b><b|."""
        v = self.basis.vectors
        return (v * self.values) @ linalg.dagger(v)


def weak_value_pure(
    psi: PureState, a: Observable, b: np.ndarray, eps_ps: float = EPS_PS
) -> complex:
    """<b|a|psi> / <b|psi>; raises ZeroOverlapError when |<b|psi>|^2 < eps_ps."""
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    overlap = complex(np.vdot(b, psi.amplitudes))
    if abs(overlap) ** 2 < eps_ps:
        raise ZeroOverlapError(
            f"postselection probability {abs(overlap)**2:.3e} below cutoff {eps_ps:.1e}"
        )
    return complex(np.vdot(b, a.matrix @ psi.amplitudes)) / overlap


def alpha_mixed(
    rho: DensityMatrix, a: Observable, b: np.ndarray, eps_ps: float = EPS_PS
) -> complex:
    """<b| a rho |b> / <b| rho |b> for a mixed prior."""
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    prob = float(np.real(np.vdot(b, rho.matrix @ b)))
    if prob < eps_ps:
        raise ZeroProbabilityError(
            f"outcome probability {prob:.3e} below cutoff {eps_ps:.1e}"
        )
    return complex(np.vdot(b, a.matrix @ (rho.matrix @ b))) / prob


def profile(
    rho: DensityMatrix,
    a: Observable,
    basis: PostselectionBasis,
    eps_ps: float = EPS_PS,
) -> WeakValueProfile:
    """Conditional values over every outcome of the basis.

    Outcomes with p(b) < eps_ps are marked excluded with alpha/mu/sigma
    unset.  Raises DegenerateEnsembleError when the excluded probability
    mass exceeds eps_ps * dim.
    """
    v = basis.vectors
    numer = np.einsum("ib,ij,jb->b", np.conj(v), a.matrix @ rho.matrix, v)
    probs = np.real(np.einsum("ib,ij,jb->b", np.conj(v), rho.matrix, v))

    entries = []
    for k, label in enumerate(basis.labels):
        p = float(probs[k])
        if p < eps_ps:
            entries.append(ProfileEntry(label, p, None, None, None, True))
            continue
        alpha = complex(numer[k]) / p
        entries.append(ProfileEntry(label, p, alpha, alpha.real, alpha.imag, False))

    prof = WeakValueProfile(tuple(entries))
    if prof.excluded_mass() > eps_ps * basis.dim:
        raise DegenerateEnsembleError(
            f"excluded probability mass {prof.excluded_mass():.3e} exceeds "
            f"{eps_ps * basis.dim:.3e}"
        )
    return prof


def estimator_operators(
    prof: WeakValueProfile, basis: PostselectionBasis
) -> tuple[np.ndarray, np.ndarray]:
    """Assemble mu_hat = sum_b mu(b)|b><b| and sigma_hat = sum_b sigma(b)|b><b|.

    Excluded outcomes contribute 0 on their one-dimensional subspace; any
    finite choice there shifts expectations by at most eps_ps per outcome.
    """
    if len(prof) != basis.dim:
        raise ValueError("profile and basis disagree on the number of outcomes")
    v = basis.vectors
    mu_hat = (v * prof.mus()) @ linalg.dagger(v)
    sigma_hat = (v * prof.sigmas()) @ linalg.dagger(v)
    return mu_hat, sigma_hat
