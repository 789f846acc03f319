"""Radial positive definite kernels and kernel matrix assembly.

A kernel is a radial profile ``phi`` together with a shape parameter
``epsilon``; the bivariate kernel is ``Phi(x, y) = phi(epsilon * |x - y|)``.
Profiles are kept exactly as tabulated, so ``phi(0)`` is not normalized to one
(Matern2 gives 3, Matern3 gives 15, Wendland21 gives 1/20).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .exceptions import DuplicatePoints

#: Minimal Euclidean distance below which two data sites count as duplicates.
DUP_TOL = 1e-12


def _gauss(s):
    return np.exp(-s**2)


def _imq(s):
    return 1.0 / np.sqrt(1.0 + s**2)


def _gimq(s):
    return 1.0 / (1.0 + s**2) ** 2


def _iq(s):
    # Tabulated as 1/(1 + eps r), not the usual 1/(1 + (eps r)^2).
    return 1.0 / (1.0 + s)


def _mat1(s):
    return np.exp(-s) * (1.0 + s)


def _mat2(s):
    return np.exp(-s) * (3.0 + 3.0 * s + s**2)


def _mat3(s):
    return np.exp(-s) * (15.0 + 15.0 * s + 6.0 * s**2 + s**3)


def _lg1(s):
    s2 = s**2
    return np.exp(-s2) * (2.0 - s2)


def _lg2(s):
    s2 = s**2
    return np.exp(-s2) * (3.0 - 3.0 * s2 + 0.5 * s2**2)


def _lgimq(s):
    s2 = s**2
    return (2.0 - s2) / (1.0 + s2) ** 4


def _w20(s):
    return np.maximum(1.0 - s, 0.0) ** 2


def _w21(s):
    return np.maximum(1.0 - s, 0.0) ** 4 * (3.0 * s + 1.0) / 20.0


@dataclass(frozen=True)
class Profile:
    name: str
    label: str
    func: Callable[[np.ndarray], np.ndarray]
    # None means positive definite in every dimension.
    valid_dim: int | None
    compact: bool = False


PROFILES = {
    p.name: p
    for p in [
        Profile("gauss", "Gaussian", _gauss, None),
        Profile("imq", "Inverse multiquadric", _imq, None),
        Profile("gimq", "Generalized IMQ", _gimq, None),
        Profile("iq", "Inverse quadratic", _iq, None),
        Profile("mat1", "Linear Matern", _mat1, None),
        Profile("mat2", "Quadratic Matern", _mat2, None),
        Profile("mat3", "Cubic Matern", _mat3, None),
        Profile("lg1", "Linear Laguerre-Gaussian", _lg1, 2),
        Profile("lg2", "Quadratic Laguerre-Gaussian", _lg2, 2),
        Profile("lgimq", "Linear generalized IMQ", _lgimq, 2),
        Profile("w20", "Wendland 2,0", _w20, 2, compact=True),
        Profile("w21", "Wendland 2,1", _w21, 2, compact=True),
    ]
}

FAMILIES = tuple(PROFILES)


@dataclass(frozen=True)
class Kernel:
    """A scaled radial kernel ``Phi(x, y) = phi(epsilon * |x - y|)``.

    Parameters
    ----------
    family : str
        One of :data:`FAMILIES` (``"gauss"``, ``"imq"``, ``"mat3"``, ...).
    epsilon : float
        Positive shape parameter.
    """

    family: str
    epsilon: float

    def __post_init__(self):
        if self.family not in PROFILES:
            raise ValueError(
                f"unknown kernel family {self.family!r}; expected one of {FAMILIES}"
            )
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        object.__setattr__(self, "epsilon", float(self.epsilon))

    @property
    def profile(self) -> Profile:
        return PROFILES[self.family]

    @property
    def valid_dim(self) -> int | None:
        return self.profile.valid_dim

    @property
    def phi0(self) -> float:
        return float(self.profile.func(np.float64(0.0)))

    def __call__(self, r):
        return phi(self, r)


def check_dimension(kernel: Kernel, dim: int) -> None:
    """Reject kernels that are only positive definite in another dimension."""
    vd = kernel.valid_dim
    if vd is not None and dim > vd:
        raise ValueError(
            f"kernel {kernel.family!r} is positive definite only up to dimension "
            f"{vd}, requested {dim}"
        )


def phi(kernel: Kernel, r):
    """Evaluate the scaled radial profile ``phi(epsilon * r)``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    return kernel.profile.func(kernel.epsilon * r)


def _as_points(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected an (n, d) point array, got shape {X.shape}")
    return X


def min_separation(X) -> float:
    """Smallest pairwise Euclidean distance (``inf`` for fewer than 2 points)."""
    X = _as_points(X)
    if len(X) < 2:
        return np.inf
    return float(pdist(X).min())


def kernel_matrix(kernel: Kernel, X, dup_tol: float = DUP_TOL) -> np.ndarray:
    """Assemble the symmetric kernel matrix ``A[i, j] = Phi(x_i, x_j)``.

    Raises
    ------
    DuplicatePoints
        If two points are closer than ``dup_tol``.
    """
    X = _as_points(X)
    sep = min_separation(X)
    if sep < dup_tol:
        raise DuplicatePoints(
            f"data sites closer than {dup_tol:g} (min distance {sep:.3g})"
        )
    return phi(kernel, cdist(X, X))


def kernel_block(kernel: Kernel, P, X) -> np.ndarray:
    """Evaluation matrix ``B[k, i] = Phi(p_k, x_i)`` for points ``P`` and centers ``X``."""
    return phi(kernel, cdist(_as_points(P), _as_points(X)))


def kernel_column(kernel: Kernel, X, x) -> np.ndarray:
    """The row vector ``T(x) = [Phi(x, x_1), ..., Phi(x, x_N)]``."""
    return kernel_block(kernel, np.asarray(x, dtype=float)[None, :], X)[0]
