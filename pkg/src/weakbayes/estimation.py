"""Quadratic-loss estimation on a postselected ensemble.

The loss of an outcome-diagonal estimator theta is
L(theta) = Tr[rho (theta_hat - a)^2].  Writing mu(b), sigma(b) for the
real and imaginary parts of the conditional value alpha(b), the loss
decomposes exactly as

    L(theta) = <a^2> - <mu_hat^2> + <(theta_hat - mu_hat)^2>,

so the unique minimizer is theta(b) = mu(b) with minimum <a^2> - <mu_hat^2>.
Combined with the Schwarz bound <mu_hat^2> + <sigma_hat^2> <= <a^2> (an
equality for pure priors) this gives L >= <sigma_hat^2>: the expected
squared imaginary part is the irreducible loss floor.

``bruteforce_bayes`` is an independent oracle for the minimizer that never
touches the closed form: it scans the full trace expression on a grid per
outcome and refines with one quadratic-vertex step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import linalg
from .exceptions import NonRealLossError
from .states import DensityMatrix, Observable, PostselectionBasis
from .weak_values import EPS_PS, Estimator, WeakValueProfile, estimator_operators, profile

TOL_ID = 1e-9  # identity/bound tolerance; 10x the linalg tolerance to
# absorb accumulation over desk-scale traces.

ThetaSpec = Union[Estimator, str]


@dataclass(frozen=True)
class GridSpec:
    """Scan grid for the brute-force minimizer.

    ``half_width`` defaults to the spectral radius of the observable plus
    one step, so the scan brackets every in-spectrum estimate; the vertex
    refinement recovers minimizers outside the bracket as well because the
    per-coordinate loss is exactly quadratic.
    """

    step: float = 1e-3
    half_width: float | None = None

    def points(self, a: Observable) -> np.ndarray:
        half = self.half_width
        if half is None:
            half = a.spectral_radius() + self.step
        if half <= 0 or self.step <= 0:
            raise ValueError("grid step and half-width must be positive")
        n = int(np.ceil(2.0 * half / self.step)) + 1
        return np.linspace(-half, half, n)


@dataclass(frozen=True)
class LossReport:
    """All second moments entering the loss analysis, plus bound flags.

    ``pure_saturation_ok`` is None when the check does not apply (mixed
    prior, or a non-Bayes estimator was supplied).
    """

    loss: float
    a2: float
    theta2: float
    gap: float
    sigma2: float
    mu2: float
    schwarz_slack: float
    decomposition_ok: bool
    schwarz_ok: bool
    loss_bound_ok: bool
    sigma_bound_ok: bool
    pure_saturation_ok: bool | None


def loss(rho: DensityMatrix, a: Observable, theta: Estimator) -> float:
    """Tr[rho (theta_hat - a)^2].

    The trace of a product of Hermitian factors must be real; an imaginary
    residue above 1e-9 signals broken Hermiticity upstream and raises
    NonRealLossError.
    """
    diff = theta.matrix() - a.matrix
    val = complex(np.trace(rho.matrix @ diff @ diff))
    if abs(val.imag) > 1e-9:
        raise NonRealLossError(f"imaginary residue {val.imag:.3e} in the loss trace")
    return val.real


def bayes_estimator(
    rho: DensityMatrix,
    a: Observable,
    basis: PostselectionBasis,
    eps_ps: float = EPS_PS,
) -> Estimator:
    """Minimum-loss estimator theta(b) = mu(b); excluded outcomes get 0."""
    prof = profile(rho, a, basis, eps_ps)
    zeroed = tuple(e.label for e in prof if e.excluded)
    return Estimator(basis, prof.mus(fill=0.0), zeroed)


def _parabola_vertex(ts: np.ndarray, ls: np.ndarray) -> float | None:
    """Vertex abscissa of the parabola through three (t, L) points.

    Returns None when the fitted curvature is non-positive or the points
    are degenerate, in which case the caller keeps the grid argmin.
    """
    t0, t1, t2 = ts
    l0, l1, l2 = ls
    denom = (t0 - t1) * (t0 - t2) * (t1 - t2)
    if denom == 0.0:
        return None
    curv = (t2 * (l1 - l0) + t1 * (l0 - l2) + t0 * (l2 - l1)) / denom
    slope = (t2**2 * (l0 - l1) + t1**2 * (l2 - l0) + t0**2 * (l1 - l2)) / denom
    if not np.isfinite(curv) or curv <= 0.0:
        return None
    return float(-slope / (2.0 * curv))


def bruteforce_bayes(
    rho: DensityMatrix,
    a: Observable,
    basis: PostselectionBasis,
    grid: GridSpec = GridSpec(),
) -> Estimator:
    """Grid-scan minimizer of the loss, independent of the closed form.

    Because theta_hat is diagonal in the postselection basis, the loss is
    additively separable over outcomes:

        L(theta) = <a^2> + sum_b p(b) [theta(b)^2 - 2 theta(b) mu(b)],

    so each coordinate can be minimized on its own with the other
    coordinates held fixed.  The scan below does NOT use that expansion;
    it evaluates the full trace Tr[rho (theta_hat - a)^2] on the grid and
    takes one exact quadratic-vertex step from the three best points,
    which is exact for a quadratic coordinate function even when the
    minimizer lies outside the scanned bracket.
    """
    dim = basis.dim
    ts = grid.points(a)
    values = np.zeros(dim)
    v = basis.vectors
    for k in range(dim):
        bk = v[:, k]
        proj = np.outer(bk, np.conj(bk))
        base = Estimator(basis, values).matrix()
        base = base - values[k] * proj - a.matrix
        trial = base[None, :, :] + ts[:, None, None] * proj[None, :, :]
        losses = np.real(np.einsum("ij,tji->t", rho.matrix, trial @ trial))
        order = np.argsort(losses)[:3]
        order = order[np.argsort(ts[order])]
        vertex = _parabola_vertex(ts[order], losses[order])
        values[k] = vertex if vertex is not None else float(ts[np.argmin(losses)])
    return Estimator(basis, values)


def schwarz_vectors(
    rho: DensityMatrix, a: Observable, b: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """The pair |u> = rho^(1/2) a |b>, |w> = rho^(1/2) |b>.

    The Schwarz inequality on this pair, summed over a complete basis,
    yields <mu_hat^2> + <sigma_hat^2> <= <a^2>; both vectors are parallel
    for a pure prior, which is where the bound saturates.
    """
    root = linalg.sqrt_psd(rho.matrix)
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    return root @ (a.matrix @ b), root @ b


def verify_bounds(
    rho: DensityMatrix,
    a: Observable,
    basis: PostselectionBasis,
    theta: ThetaSpec = "bayes",
    eps_ps: float = EPS_PS,
    tol_id: float = TOL_ID,
) -> LossReport:
    """Evaluate every moment in the loss analysis and flag each bound.

    ``theta`` is either an Estimator or the string "bayes".  All
    expectations are dense traces Tr[rho O]; tests are expected to
    recompute them through the p-weighted outcome sums independently.
    """
    prof = profile(rho, a, basis, eps_ps)
    mu_hat, sigma_hat = estimator_operators(prof, basis)
    is_bayes = isinstance(theta, str)
    if is_bayes:
        if theta != "bayes":
            raise ValueError(f"theta must be an Estimator or 'bayes', got {theta!r}")
        zeroed = tuple(e.label for e in prof if e.excluded)
        theta_est = Estimator(basis, prof.mus(fill=0.0), zeroed)
    else:
        theta_est = theta

    rho_m = rho.matrix
    theta_m = theta_est.matrix()
    a2 = float(np.real(np.trace(rho_m @ a.matrix @ a.matrix)))
    theta2 = float(np.real(np.trace(rho_m @ theta_m @ theta_m)))
    mu2 = float(np.real(np.trace(rho_m @ mu_hat @ mu_hat)))
    sigma2 = float(np.real(np.trace(rho_m @ sigma_hat @ sigma_hat)))
    diff = theta_m - mu_hat
    gap = float(np.real(np.trace(rho_m @ diff @ diff)))
    loss_val = loss(rho, a, theta_est)
    slack = a2 - mu2 - sigma2

    pure_saturation: bool | None = None
    if is_bayes and abs(rho.purity() - 1.0) <= 1e-10:
        pure_saturation = abs(loss_val - sigma2) <= tol_id and abs(slack) <= tol_id

    return LossReport(
        loss=loss_val,
        a2=a2,
        theta2=theta2,
        gap=gap,
        sigma2=sigma2,
        mu2=mu2,
        schwarz_slack=slack,
        decomposition_ok=abs(loss_val - (a2 - mu2 + gap)) <= tol_id,
        schwarz_ok=slack >= -tol_id,
        loss_bound_ok=loss_val >= a2 - mu2 - tol_id,
        sigma_bound_ok=loss_val >= sigma2 - tol_id,
        pure_saturation_ok=pure_saturation,
    )


def exactness_certificate(prof: WeakValueProfile, tol: float) -> bool:
    """True iff every non-excluded |sigma(b)| is within ``tol``.

    When this holds, the Bayes loss is bounded by tol_id plus
    2 * tol * ||a||: an exact estimate exists exactly when the imaginary
    parts vanish.
    """
    sigmas = [abs(e.sigma) for e in prof if not e.excluded]
    return max(sigmas, default=0.0) <= tol
