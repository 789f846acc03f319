"""Positive-weight cubature rules exact for constants on the experiment domains.

The square uses a tensor Gauss-Legendre rule. The disk-like regions use polar
product rules. On the full disk this is Gauss-Legendre in the squared radius
(which absorbs the area element ``r dr``) times the trapezoidal rule in angle;
the cut disk uses Gauss-Legendre in both radius and angle. The lens is split along ``x = 0`` into
two circular segments, each integrated in polar coordinates about the centre
of the circle it belongs to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .exceptions import DegenerateRule, UnsupportedDomain
from .geometry import (
    CUTDISK,
    DISK,
    DISK_CENTER,
    DISK_RADIUS,
    LENS,
    LENS_CENTERS,
    SQUARE,
    Domain,
    contains,
)

#: Weights below this fraction of the domain measure are rejected.
MIN_REL_WEIGHT = 1e-15
SUM_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class CubatureRule:
    """Nodes ``X`` in a domain with positive weights summing to its area."""

    nodes: np.ndarray
    weights: np.ndarray
    domain: Domain

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 2 or len(nodes) != len(weights):
            raise ValueError("nodes must be (N, 2) and match the weights length")
        if np.any(weights <= MIN_REL_WEIGHT * self.domain.measure):
            raise DegenerateRule("cubature weights must be positive")
        total = weights.sum()
        if abs(total - self.domain.measure) > SUM_RTOL * self.domain.measure:
            raise DegenerateRule(
                f"weights sum to {total!r}, domain measure is {self.domain.measure!r}"
            )
        if not np.all(contains(self.domain, nodes)):
            raise DegenerateRule("cubature nodes must lie in the domain")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.weights)

    def integrate(self, f):
        return integrate(self, f)


def integrate(rule: CubatureRule, f) -> float:
    """``sum_j w_j f(x_j)``; ``f`` maps an (N, 2) array to N values."""
    values = np.asarray(f(rule.nodes), dtype=float)
    return float(np.dot(rule.weights, np.broadcast_to(values, rule.weights.shape)))


def gauss_legendre_1d(n: int, a: float = -1.0, b: float = 1.0):
    """``n``-point Gauss-Legendre nodes and weights on ``[a, b]``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not a < b:
        raise ValueError("need a < b")
    t, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (t + 1.0), half * w


def square_rule(m: int) -> CubatureRule:
    """Tensor product of the ``m``-point Gauss-Legendre rule on [0, 1]."""
    x, w = gauss_legendre_1d(m, 0.0, 1.0)
    gx, gy = np.meshgrid(x, x, indexing="ij")
    nodes = np.column_stack([gx.ravel(), gy.ravel()])
    return CubatureRule(nodes, np.outer(w, w).ravel(), SQUARE)


def _sector(center, radius, theta, wtheta, n_r, squared=True):
    """Polar product rule on a full-radius sector given an angular rule.

    With ``squared`` the radial rule is Gauss-Legendre in ``r**2``, which is
    only appropriate when the angular rule annihilates odd powers of ``r``
    (full circles); otherwise it is Gauss-Legendre in ``r`` itself.
    """
    if squared:
        s, ws = gauss_legendre_1d(n_r, 0.0, radius**2)
        r = np.sqrt(s)
    else:
        r, wr = gauss_legendre_1d(n_r, 0.0, radius)
        ws = 2.0 * r * wr
    tt, rr = np.meshgrid(theta, r, indexing="ij")
    nodes = np.column_stack(
        [center[0] + (rr * np.cos(tt)).ravel(), center[1] + (rr * np.sin(tt)).ravel()]
    )
    # r dr dtheta = (1/2) ds dtheta
    weights = 0.5 * np.outer(wtheta, ws).ravel()
    return nodes, weights


def _lens_segment(n_theta, n_r):
    """Rule on the half of the lens with x >= 0, polar about the left centre."""
    a = -LENS_CENTERS[0][0]
    theta, wtheta = gauss_legendre_1d(n_theta, -np.pi / 4, np.pi / 4)
    t, wt = leggauss(n_r)
    nodes, weights = [], []
    for th, wth in zip(theta, wtheta):
        s0 = (a / np.cos(th)) ** 2
        half = 0.5 * (1.0 - s0)
        s = s0 + half * (t + 1.0)
        r = np.sqrt(s)
        nodes.append(np.column_stack([-a + r * np.cos(th), r * np.sin(th)]))
        weights.append(0.5 * wth * half * wt)
    return np.concatenate(nodes), np.concatenate(weights)


def polar_rule(domain: Domain, m: int, n_theta: int | None = None) -> CubatureRule:
    """Polar product rule with ``m`` radial nodes on a disk-like domain.

    Parameters
    ----------
    domain : Domain
        ``DISK``, ``CUTDISK`` or ``LENS``.
    m : int
        Radial nodes (per angular ray).
    n_theta : int, optional
        Angular nodes; defaults to ``4 * m`` on the disk, ``3 * m`` on the cut
        disk and ``m`` on the lens, where both counts apply to each of the two
        segments.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if domain.name not in _THETA_RATIO:
        raise UnsupportedDomain(f"polar rules are not defined on {domain.name!r}")
    n_theta = _THETA_RATIO[domain.name] * m if n_theta is None else n_theta
    if n_theta < 1:
        raise ValueError("n_theta must be at least 1")
    if domain.name == "disk":
        # equal weights in theta: the trapezoidal rule is spectrally accurate
        # for periodic integrands
        theta = 2.0 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
        wtheta = np.full(n_theta, 2.0 * np.pi / n_theta)
        nodes, weights = _sector(DISK_CENTER, DISK_RADIUS, theta, wtheta, m)
        return CubatureRule(nodes, weights, DISK)
    if domain.name == "cutdisk":
        theta, wtheta = gauss_legendre_1d(n_theta, -np.pi / 2, np.pi)
        # a sector: odd powers of r survive the angular integral, so r**2
        # would see a square-root singularity at the apex
        nodes, weights = _sector((0.0, 0.0), 1.0, theta, wtheta, m, squared=False)
        return CubatureRule(nodes, weights, CUTDISK)
    if domain.name == "lens":
        nodes, weights = _lens_segment(n_theta, m)
        nodes = np.concatenate([nodes, nodes * [-1.0, 1.0]])
        weights = np.concatenate([weights, weights])
        # the angular integrand (1 - a^2 sec^2) is only approximately
        # integrated; rescale so that constants are exact
        weights = weights * (LENS.measure / weights.sum())
        return CubatureRule(nodes, weights, LENS)
    raise UnsupportedDomain(f"polar rules are not defined on {domain.name!r}")


# angular nodes per radial node; resolving the boundary arc matters more
# than the radial direction, where Gauss-Legendre in r^2 already clusters
_THETA_RATIO = {"disk": 4, "cutdisk": 3, "lens": 1}


def _polar_shape(domain: Domain, n: int) -> tuple[int, int]:
    ratio = _THETA_RATIO[domain.name]
    per = max(n / 2.0, 1.0) if domain.name == "lens" else float(n)
    m = max(1, round(np.sqrt(per / ratio)))
    return m, max(1, round(per / m))


def rule_for_budget(domain: Domain, n: int, kind: str | None = None) -> CubatureRule:
    """The rule of the given kind whose node count is near ``n``.

    ``kind`` is ``"gl"`` (square only) or ``"polar"`` (other domains); ``None``
    picks the natural one for the domain.
    """
    if n < 1:
        raise ValueError("budget must be at least 1")
    if kind is None:
        kind = "gl" if domain.name == "square" else "polar"
    if kind == "gl":
        if domain.name != "square":
            raise UnsupportedDomain("the gl rule is defined on the square only")
        return square_rule(max(1, round(np.sqrt(n))))
    if kind == "polar":
        m, n_theta = _polar_shape(domain, n)
        try:
            return polar_rule(domain, m, n_theta)
        except DegenerateRule:
            return polar_rule(domain, m + 1, n_theta)
    raise ValueError(f"unknown rule kind {kind!r}; expected 'gl' or 'polar'")
