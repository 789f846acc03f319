"""Weighted SVD bases.

Given a kernel and a cubature rule ``(X, W)`` exact for constants, the scaled
kernel matrix ``A_W = sqrt(W) A sqrt(W)`` is symmetric positive definite and
has the unitary diagonalization ``A_W = Q diag(sigma^2) Q^T``. The basis
functions ``u_j`` are the translates combination ``U(x) = T(x) C_U`` with

    V_U = sqrt(W)^-1 Q Sigma   (values u_j(x_i) at the nodes)
    C_U = sqrt(W) Q Sigma^-1   (coefficients in the translate basis)

The basis is orthonormal in the native space, orthogonal in the discrete
weighted product ``sum_i w_i f(x_i) g(x_i)`` with ``|u_j|^2 = sigma_j^2``, and
``sum_j sigma_j^2 = phi(0) |Omega|``. The ``sigma_j^2`` are the Nystrom
approximations of the eigenvalues of the kernel integral operator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .cubature import CubatureRule
from .exceptions import DegenerateRule, EigenFailure
from .geometry import contains
from .kernels import Kernel, kernel_block, kernel_matrix

#: Eigenvalues below ``CLAMP_REL * sigma_1^2`` are treated as numerically zero.
CLAMP_REL = 1e-16


class ExtrapolationWarning(UserWarning):
    """Basis evaluated outside the domain of its cubature rule."""


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WsvdBasis:
    """A weighted SVD basis for the span of the kernel translates at the nodes.

    Attributes
    ----------
    kernel : Kernel
    rule : CubatureRule
    q_factor : ndarray, shape (N, N)
        Orthogonal eigenvector matrix of ``A_W``, columns sorted by
        decreasing eigenvalue.
    sigma2 : ndarray, shape (N,)
        Eigenvalues of ``A_W`` in decreasing order, negative roundoff clamped
        to zero.
    n_active : int
        Number of leading eigenvalues above the clamp threshold; only these
        directions are turned into basis functions.
    v_matrix : ndarray, shape (N, n_active)
        ``V_U[i, j] = u_j(x_i)``.
    c_matrix : ndarray, shape (N, n_active)
        ``C_U`` so that ``u_j = sum_i C_U[i, j] Phi(., x_i)``.
    """

    kernel: Kernel
    rule: CubatureRule
    q_factor: np.ndarray
    sigma2: np.ndarray
    n_active: int
    v_matrix: np.ndarray
    c_matrix: np.ndarray
    clamp_rel: float = CLAMP_REL

    @property
    def nodes(self):
        return self.rule.nodes

    @property
    def weights(self):
        return self.rule.weights

    @property
    def sigma(self):
        return np.sqrt(self.sigma2)

    def __len__(self):
        return len(self.sigma2)

    def __call__(self, x):
        return eval_basis(self, x)


def scaled_matrix(kernel: Kernel, rule: CubatureRule) -> np.ndarray:
    """``A_W = sqrt(W) A sqrt(W)``."""
    sw = np.sqrt(rule.weights)
    return sw[:, None] * kernel_matrix(kernel, rule.nodes) * sw[None, :]


def _fix_signs(Q):
    # make the largest-magnitude entry of each column positive
    idx = np.argmax(np.abs(Q), axis=0)
    signs = np.sign(Q[idx, np.arange(Q.shape[1])])
    signs[signs == 0] = 1.0
    return Q * signs


def build_basis(kernel: Kernel, rule: CubatureRule, clamp_rel: float = CLAMP_REL):
    """Build the weighted SVD basis of ``kernel`` on the cubature rule.

    Parameters
    ----------
    kernel : Kernel
    rule : CubatureRule
        Nodes must be pairwise distinct and weights positive.
    clamp_rel : float, optional
        Eigenvalues ``sigma_j^2 < clamp_rel * sigma_1^2`` (and all non-positive
        ones) are considered numerically zero and get no basis function.
        ``clamp_rel = 0`` keeps every strictly positive eigenvalue.

    Returns
    -------
    WsvdBasis
    """
    w = np.asarray(rule.weights, dtype=float)
    if np.any(w <= 0):
        raise DegenerateRule("cubature weights must be positive")
    a_w = scaled_matrix(kernel, rule)
    try:
        lam, Q = la.eigh(a_w)
    except la.LinAlgError as exc:
        raise EigenFailure(f"symmetric eigensolver failed: {exc}") from exc
    Q = _fix_signs(Q)
    # descending eigenvalues; exact ties broken by the sign-fixed vectors
    keys = tuple(Q[i] for i in range(Q.shape[0] - 1, -1, -1)) + (-lam,)
    order = np.lexsort(keys)
    lam, Q = lam[order], Q[:, order]

    sigma2 = np.where(lam > 0, lam, 0.0)
    thresh = max(0.0, clamp_rel * sigma2[0])
    active = (sigma2 > 0) & (sigma2 >= thresh)
    n_active = int(np.count_nonzero(active))

    sw = np.sqrt(w)
    sig = np.sqrt(sigma2[:n_active])
    Qa = Q[:, :n_active]
    v_matrix = Qa * sig / sw[:, None]
    c_matrix = sw[:, None] * Qa / sig
    return WsvdBasis(
        kernel=kernel,
        rule=rule,
        q_factor=_readonly(Q),
        sigma2=_readonly(sigma2),
        n_active=n_active,
        v_matrix=_readonly(v_matrix),
        c_matrix=_readonly(c_matrix),
        clamp_rel=clamp_rel,
    )


def eval_basis(basis: WsvdBasis, x, warn_outside: bool = True) -> np.ndarray:
    """Values ``u_j(x)`` of the active basis functions.

    ``x`` may be one point (returns shape ``(n_active,)``) or an ``(k, 2)``
    array (returns ``(k, n_active)``). Evaluation outside the rule's domain is
    allowed but emits an :class:`ExtrapolationWarning`.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    P = x[None, :] if single else x
    if warn_outside and not np.all(contains(basis.rule.domain, P)):
        warnings.warn(
            f"evaluating basis outside the domain {basis.rule.domain.name!r}",
            ExtrapolationWarning,
            stacklevel=2,
        )
    U = kernel_block(basis.kernel, P, basis.nodes) @ basis.c_matrix
    return U[0] if single else U


def power_function(basis: WsvdBasis, x, M: int | None = None):
    """Norm of the pointwise error functional of the order-``M`` approximant.

    ``sqrt(max(0, phi(0) - sum_{j <= M} u_j(x)^2))``; ``M = None`` uses all
    active basis functions (the interpolation Power Function). ``M`` larger
    than ``n_active`` is capped, since clamped directions carry no function.
    """
    N = len(basis)
    M = basis.n_active if M is None else int(M)
    if not 0 <= M <= N:
        raise ValueError(f"M must lie in [0, {N}], got {M}")
    M = min(M, basis.n_active)
    U = eval_basis(basis, x)[..., :M]
    p2 = basis.kernel.phi0 - np.sum(U**2, axis=-1)
    return np.sqrt(np.maximum(p2, 0.0))


def nystrom_spectrum(basis: WsvdBasis):
    """Discrete eigenvalues ``sigma_j^2`` and node eigenfunctions ``V_U``.

    A read-only view into the basis; nothing is recomputed.
    """
    return basis.sigma2, basis.v_matrix


def gram_residual(basis: WsvdBasis) -> float:
    """``max |C_U^T A C_U - I|`` over the active columns."""
    A = kernel_matrix(basis.kernel, basis.nodes)
    C = basis.c_matrix
    G = C.T @ (A @ C)
    return float(np.max(np.abs(G - np.eye(basis.n_active)), initial=0.0))


def l2w_gram_residual(basis: WsvdBasis) -> float:
    """``max |V_U^T W V_U - diag(sigma^2)|`` over the active columns."""
    V = basis.v_matrix
    G = V.T @ (basis.weights[:, None] * V)
    return float(
        np.max(np.abs(G - np.diag(basis.sigma2[: basis.n_active])), initial=0.0)
    )


def trace_residual(basis: WsvdBasis) -> float:
    """Relative defect of ``sum sigma_j^2 = phi(0) |Omega|``."""
    target = basis.kernel.phi0 * basis.rule.domain.measure
    return abs(float(np.sum(basis.sigma2)) - target) / target
