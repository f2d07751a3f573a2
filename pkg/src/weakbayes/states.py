"""Quantum domain types: states, observables and postselection bases.

Random generation convention
----------------------------
All random objects are drawn from numpy's default PCG64 generator
(``numpy.random.default_rng``).  Gaussian variates are produced by an
explicit Box-Muller transform of the uniform stream, so the exact draw
sequence is pinned by this module rather than by numpy's normal sampler.
``random_instance`` consumes one generator in a fixed order: state first,
then observable, then basis.  Multi-trial sweeps derive one independent
stream per trial with ``trial_seed(master_seed, index)``, which wraps
``numpy.random.SeedSequence([master_seed, index])``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from . import linalg
from .exceptions import NotHermitianError, NotNormalizedError

TOL_NORM = 1e-10

Purity = Literal["pure", "mixed"]


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PureState:
    """Normalized state vector.

    Construction rejects vectors whose squared norm deviates from 1 by
    more than ``TOL_NORM``; use :meth:`normalized` to build from an
    arbitrary nonzero vector.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size < 1 or not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be a finite, nonempty vector")
        defect = abs(float(np.sum(np.abs(amps) ** 2)) - 1.0)
        if defect > TOL_NORM:
            raise NotNormalizedError(f"norm defect {defect:.3e} exceeds {TOL_NORM:.1e}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def normalized(cls, vec: Sequence[complex]) -> "PureState":
        v = np.asarray(vec, dtype=np.complex128).reshape(-1)
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            raise NotNormalizedError("cannot normalize the zero vector")
        return cls(v / nrm)


@dataclass(frozen=True)
class DensityMatrix:
    """Prior state. Construction only checks shape and finiteness; use
    :func:`validate` to measure Hermiticity, positivity and trace defects."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", linalg.as_complex_matrix(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        """Tr(rho^2); equals 1 for pure states."""
        return linalg.trace_real(self.matrix @ self.matrix)


@dataclass(frozen=True)
class Observable:
    """Hermitian operator to be estimated. Rejects non-Hermitian input."""

    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_complex_matrix(self.matrix)
        if not linalg.is_hermitian(m):
            raise NotHermitianError(
                f"observable hermiticity defect {linalg.hermiticity_defect(m):.3e}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectral_radius(self) -> float:
        """Largest |eigenvalue|."""
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))


@dataclass(frozen=True)
class PostselectionBasis:
    """Orthonormal, complete set of postselection outcomes.

    ``vectors`` stores the basis vectors as columns; ``labels`` are the
    distinct outcome identifiers.  Degenerate or overcomplete outcome sets
    are rejected at construction: the conditional value of an outcome is
    defined per basis vector only.
    """

    vectors: np.ndarray
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        v = linalg.as_complex_matrix(self.vectors)
        dim = v.shape[0]
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(dim))
        if len(labels) != dim or len(set(labels)) != dim:
            raise ValueError("labels must be one distinct identifier per outcome")
        gram_defect = float(np.max(np.abs(linalg.dagger(v) @ v - np.eye(dim))))
        complete_defect = float(np.max(np.abs(v @ linalg.dagger(v) - np.eye(dim))))
        if gram_defect > linalg.TOL_HERM or complete_defect > linalg.TOL_HERM:
            raise ValueError(
                f"basis not orthonormal/complete (gram defect {gram_defect:.3e}, "
                f"completeness defect {complete_defect:.3e})"
            )
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def standard(cls, dim: int) -> "PostselectionBasis":
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def from_vectors(
        cls, vectors: Sequence[Sequence[complex]], labels: Sequence[str] | None = None
    ) -> "PostselectionBasis":
        """Build from a sequence of basis vectors (rows of the argument)."""
        cols = np.asarray(vectors, dtype=np.complex128).T
        return cls(cols, tuple(labels) if labels is not None else ())

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no outcome labelled {label!r}") from None

    def vector(self, label: str) -> np.ndarray:
        return self.vectors[:, self.index(label)]


# ---------------------------------------------------------------------------
# Construction and validation
# ---------------------------------------------------------------------------


def density_from_pure(psi: PureState) -> DensityMatrix:
    """Rank-1 projector |psi><psi|."""
    v = psi.amplitudes
    return DensityMatrix(np.outer(v, np.conj(v)))


@dataclass(frozen=True)
class Violation:
    invariant: str
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    """List of violated density-matrix invariants with measured magnitudes."""

    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> list[dict]:
        return [
            {"invariant": v.invariant, "magnitude": v.magnitude} for v in self.violations
        ]


def validate(
    rho: DensityMatrix,
    tol_herm: float = linalg.TOL_HERM,
    tol_psd: float = linalg.TOL_PSD,
    tol_norm: float = TOL_NORM,
) -> ValidationReport:
    """Measure all density-matrix invariants. Never raises.

    Positivity is assessed on the Hermitian part so a report is still
    produced when the symmetry check fails too.
    """
    m = rho.matrix
    violations = []
    herm = linalg.hermiticity_defect(m)
    if herm > tol_herm:
        violations.append(Violation("hermitian", herm))
    w = np.linalg.eigvalsh((m + linalg.dagger(m)) / 2.0)
    if w[0] < -tol_psd:
        violations.append(Violation("psd", float(-w[0])))
    trace = abs(linalg.trace_real(m) - 1.0)
    if trace > tol_norm:
        violations.append(Violation("trace", trace))
    return ValidationReport(tuple(violations))


# ---------------------------------------------------------------------------
# Seeded random instances
# ---------------------------------------------------------------------------

SeedLike = "int | np.random.SeedSequence | np.random.Generator"


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Stream-split convention for multi-trial sweeps."""
    return np.random.SeedSequence([master_seed, index])


def standard_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via Box-Muller on the uniform stream."""
    count = int(np.prod(shape))
    pairs = (count + 1) // 2
    u1 = rng.random(pairs)
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u1))  # 1-u1 in (0,1] keeps the log finite
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:count]
    return z.reshape(shape)


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance complex Gaussians (real part drawn before imaginary)."""
    re = standard_normal(rng, shape)
    im = standard_normal(rng, shape)
    return (re + 1j * im) / np.sqrt(2.0)


def random_pure_state(dim: int, seed) -> PureState:
    rng = _rng(seed)
    return PureState.normalized(complex_normal(rng, (dim,)))


def random_density_matrix(dim: int, purity: Purity, seed) -> DensityMatrix:
    """Mixed: g^dag g / Tr(g^dag g) with Gaussian g. Pure: random projector."""
    rng = _rng(seed)
    if purity == "pure":
        return density_from_pure(random_pure_state(dim, rng))
    if purity != "mixed":
        raise ValueError(f"purity must be 'pure' or 'mixed', got {purity!r}")
    g = complex_normal(rng, (dim, dim))
    m = linalg.dagger(g) @ g
    return DensityMatrix(m / linalg.trace_real(m))


def random_observable(dim: int, seed) -> Observable:
    rng = _rng(seed)
    g = complex_normal(rng, (dim, dim))
    return Observable((g + linalg.dagger(g)) / 2.0)


def random_basis(dim: int, seed) -> PostselectionBasis:
    """Orthonormalized Gaussian matrix; column phases fixed so the QR
    factor has a positive real diagonal (determinism)."""
    rng = _rng(seed)
    q, r = np.linalg.qr(complex_normal(rng, (dim, dim)))
    d = np.where(np.abs(np.diagonal(r)) == 0, 1.0, np.diagonal(r))
    return PostselectionBasis(q * (d / np.abs(d)))


def random_instance(
    dim: int, purity: Purity, seed
) -> tuple[DensityMatrix, Observable, PostselectionBasis]:
    """Deterministic (state, observable, basis) triple for a given seed.

    dim must be at least 2.  All outputs pass :func:`validate` and the
    basis construction checks.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    rng = _rng(seed)
    rho = random_density_matrix(dim, purity, rng)
    a = random_observable(dim, rng)
    basis = random_basis(dim, rng)
    return rho, a, basis
