"""Interpolants and truncated weighted least-squares approximants.

In a weighted SVD basis the interpolant is ``P_X f = sum_j c_j u_j`` with
native-space coefficients ``c_j = (f, u_j)_Phi``, computable from samples as
``c_j = (f, u_j)_w / sigma_j^2``. Dropping the trailing terms gives the
weighted least-squares approximant of order ``M``; no re-solve is needed.
The classical interpolant in the basis of translates is provided for
comparison, together with leave-one-out selection of the shape parameter.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as la

from .basis import WsvdBasis, eval_basis
from .exceptions import LengthMismatch, SingularMatrix
from .kernels import Kernel, kernel_block, kernel_matrix


@dataclass(frozen=True, eq=False)
class Approximant:
    """``sum_{j < m_active} coeffs[j] u_j(x)`` for a weighted SVD basis."""

    basis: WsvdBasis
    coeffs: np.ndarray
    m_active: int
    truncation_tol: float | None = None

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def native_norm(self) -> float:
        """Native-space norm, by Parseval in the orthonormal basis."""
        return float(np.linalg.norm(self.coeffs[: self.m_active]))


def project(basis: WsvdBasis, samples) -> Approximant:
    """Interpolant of the node values ``samples`` in the weighted SVD basis.

    All active basis functions are used, so ``m_active = basis.n_active``.
    """
    f = np.asarray(samples, dtype=float)
    if f.shape != (len(basis),):
        raise LengthMismatch(
            f"expected {len(basis)} samples, got array of shape {f.shape}"
        )
    n = basis.n_active
    # discrete weighted product (f, u_j)_w divided by |u_j|_w^2 = sigma_j^2
    coeffs = basis.v_matrix.T @ (basis.weights * f) / basis.sigma2[:n]
    coeffs.setflags(write=False)
    return Approximant(basis, coeffs, n)


def truncate(a: Approximant, order: int | None = None, sigma_tol: float | None = None):
    """Keep only the leading terms of ``a``.

    Exactly one of ``order`` (keep ``M`` terms) or ``sigma_tol`` (keep the
    terms with singular value ``sigma_j >= sigma_tol``) must be given.
    Coefficients are shared, not recomputed.
    """
    if (order is None) == (sigma_tol is None):
        raise ValueError("give exactly one of order or sigma_tol")
    n = a.basis.n_active
    if order is not None:
        if not 0 <= order <= n:
            raise ValueError(f"order must lie in [0, {n}], got {order}")
        return replace(a, m_active=int(order), truncation_tol=None)
    if not sigma_tol > 0:
        raise ValueError("sigma_tol must be positive")
    sigma = np.sqrt(a.basis.sigma2[:n])
    m = int(np.count_nonzero(sigma >= sigma_tol))
    return replace(a, m_active=m, truncation_tol=float(sigma_tol))


def evaluate(a: Approximant, x):
    """Value of the approximant at one point or at each row of an array."""
    U = eval_basis(a.basis, x)
    return U[..., : a.m_active] @ a.coeffs[: a.m_active]


def l2w_error_bound(basis: WsvdBasis, M: int) -> float:
    """``sqrt(sum_{j > M} sigma_j^2)``, the f-independent factor of the
    weighted least-squares error bound ``|f - L_M f|_w <= (.) |f|_Phi``."""
    N = len(basis)
    if not 0 <= M <= N:
        raise ValueError(f"M must lie in [0, {N}], got {M}")
    return float(np.sqrt(np.sum(basis.sigma2[M:])))


def l2w_norm(weights, values) -> float:
    """Discrete weighted norm ``sqrt(sum_i w_i v_i^2)``."""
    values = np.asarray(values, dtype=float)
    return float(np.sqrt(np.dot(weights, values**2)))


@dataclass(frozen=True, eq=False)
class StandardInterpolant:
    """Interpolant ``sum_i alpha_i Phi(., x_i)`` in the basis of translates."""

    kernel: Kernel
    centers: np.ndarray
    alpha: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        vals = kernel_block(self.kernel, x[None, :] if single else x, self.centers) @ self.alpha
        return vals[0] if single else vals


def _spd_solve(A, b):
    """Solve ``A x = b`` for symmetric ``A``: Cholesky, falling back to LU."""
    try:
        c = la.cho_factor(A, check_finite=False)
        return la.cho_solve(c, b, check_finite=False)
    except la.LinAlgError:
        pass
    with warnings.catch_warnings():
        warnings.simplefilter("error", la.LinAlgWarning)
        try:
            return la.solve(A, b, assume_a="gen", check_finite=False)
        except (la.LinAlgError, la.LinAlgWarning) as exc:
            cond = float(np.linalg.cond(A))
            raise SingularMatrix(
                f"kernel matrix is numerically singular (cond ~ {cond:.2e})",
                cond=cond,
            ) from exc


def standard_interpolant(kernel: Kernel, X, samples) -> StandardInterpolant:
    """Interpolant in the translate basis, ``A alpha = f(X)``.

    Raises
    ------
    SingularMatrix
        If neither a Cholesky nor a pivoted LU solve succeeds cleanly.
    """
    X = np.asarray(X, dtype=float)
    f = np.asarray(samples, dtype=float)
    if f.shape != (len(X),):
        raise LengthMismatch(f"expected {len(X)} samples, got shape {f.shape}")
    A = kernel_matrix(kernel, X)
    return StandardInterpolant(kernel, X, _spd_solve(A, f))


def loo_score(kernel: Kernel, X, samples) -> float:
    """``max_i |P_X f(x_i) - P_i f(x_i)|`` with ``P_i`` built on ``X`` minus ``x_i``.

    Every reduced interpolant is factorized from scratch.
    """
    X = np.asarray(X, dtype=float)
    f = np.asarray(samples, dtype=float)
    A = kernel_matrix(kernel, X)
    full = A @ _spd_solve(A, f)
    n = len(X)
    keep = np.ones(n, dtype=bool)
    worst = 0.0
    for i in range(n):
        keep[i] = False
        alpha = _spd_solve(A[np.ix_(keep, keep)], f[keep])
        worst = max(worst, abs(full[i] - A[i, keep] @ alpha))
        keep[i] = True
    return float(worst)


@dataclass
class LooResult:
    eps_star: float
    scores: list = field(default_factory=list)  # (eps, score) sorted by eps


def loo_optimize(family: str, eps_grid, X, samples) -> LooResult:
    """Shape parameter minimizing the leave-one-out score over ``eps_grid``.

    Candidates whose kernel matrix is numerically singular score ``inf``.
    Ties go to the smallest shape parameter.
    """
    eps_grid = sorted(float(e) for e in eps_grid)
    if not eps_grid:
        raise ValueError("eps_grid must not be empty")
    if len(X) < 2:
        raise ValueError("leave-one-out needs at least 2 points")
    scores = []
    for eps in eps_grid:
        try:
            s = loo_score(Kernel(family, eps), X, samples)
        except SingularMatrix:
            s = np.inf
        scores.append((eps, s))
    best = min(scores, key=lambda t: (t[1], t[0]))
    return LooResult(best[0], scores)
