"""Dense complex linear algebra: Hermitian checks, eigendecomposition and
PSD square roots.

All functions are pure and operate on plain ``numpy`` complex matrices.
Eigenvalues are always returned in ascending order so downstream golden
tests see a deterministic layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoConvergenceError, NotHermitianError, NotPSDError

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_EIG = 1e-10


def as_complex_matrix(m: np.ndarray) -> np.ndarray:
    """Coerce to a square, finite complex128 matrix.

    Raises ValueError on anything that is not a finite square matrix.
    """
    out = np.asarray(m, dtype=np.complex128)
    if out.ndim != 2 or out.shape[0] != out.shape[1] or out.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError("matrix contains NaN or Inf entries")
    return out


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(m).T


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-norm deviation from conjugate symmetry, max |m_ij - conj(m_ji)|."""
    m = as_complex_matrix(m)
    return float(np.max(np.abs(m - dagger(m))))


def is_hermitian(m: np.ndarray, tol: float = TOL_HERM) -> bool:
    """True iff the conjugate-symmetry defect is within ``tol``."""
    return hermiticity_defect(m) <= tol


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral data of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; ``eigenvectors`` holds the
    matching orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Reassemble sum_k lambda_k |v_k><v_k|."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def eig_hermitian(m: np.ndarray, tol: float = TOL_HERM) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises NotHermitianError if the input fails the symmetry check, and
    NoConvergenceError if the underlying solver gives up.
    """
    m = as_complex_matrix(m)
    if not is_hermitian(m, tol):
        raise NotHermitianError(
            f"hermiticity defect {hermiticity_defect(m):.3e} exceeds tol {tol:.3e}"
        )
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"eigensolver failed: {exc}") from exc
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def sqrt_psd(m: np.ndarray, tol_psd: float = TOL_PSD) -> np.ndarray:
    """Hermitian PSD square root.

    Eigenvalues in [-tol_psd, 0) are clipped to 0 before taking the root;
    anything below -tol_psd raises NotPSDError.
    """
    dec = eig_hermitian(m)
    w = dec.eigenvalues
    if w[0] < -tol_psd:
        raise NotPSDError(
            f"smallest eigenvalue {w[0]:.3e} is below the PSD floor -{tol_psd:.3e}"
        )
    w = np.clip(w, 0.0, None)
    v = dec.eigenvectors
    return (v * np.sqrt(w)) @ dagger(v)


def trace_real(m: np.ndarray, imag_tol: float | None = None) -> float:
    """Real part of the trace; optionally assert the imaginary residue."""
    t = complex(np.trace(m))
    if imag_tol is not None and abs(t.imag) > imag_tol:
        raise ValueError(f"trace imaginary residue {t.imag:.3e} exceeds {imag_tol:.3e}")
    return t.real
