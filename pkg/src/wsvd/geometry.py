"""Planar experiment domains and non-cubature point sets.

Four closed regions are provided: the unit square, the disk of radius 1/2
centred at (1/2, 1/2), the unit disk with its open third quadrant removed, and
the lens cut out by two unit disks whose centres are sqrt(2) apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .exceptions import TooFewPoints

_A = np.sqrt(2.0) / 2.0


@dataclass(frozen=True)
class Domain:
    """A closed planar region.

    Attributes
    ----------
    name : str
        ``"square"``, ``"disk"``, ``"cutdisk"`` or ``"lens"``.
    measure : float
        Area of the region.
    bbox : tuple
        ``(xmin, xmax, ymin, ymax)``.
    """

    name: str
    measure: float
    bbox: tuple

    def contains(self, p):
        return contains(self, p)


SQUARE = Domain("square", 1.0, (0.0, 1.0, 0.0, 1.0))
DISK = Domain("disk", np.pi / 4.0, (0.0, 1.0, 0.0, 1.0))
CUTDISK = Domain("cutdisk", 3.0 * np.pi / 4.0, (-1.0, 1.0, -1.0, 1.0))
LENS = Domain("lens", np.pi / 2.0 - 1.0, (_A - 1.0, 1.0 - _A, -_A, _A))

DOMAINS = {d.name: d for d in (SQUARE, DISK, CUTDISK, LENS)}

DISK_CENTER = (0.5, 0.5)
DISK_RADIUS = 0.5
LENS_CENTERS = ((-_A, 0.0), (_A, 0.0))


def get_domain(name: str) -> Domain:
    try:
        return DOMAINS[name]
    except KeyError:
        raise ValueError(
            f"unknown domain {name!r}; expected one of {tuple(DOMAINS)}"
        ) from None


def contains(domain: Domain, p):
    """Membership test for the closed region; vectorized over rows of ``p``.

    Returns a bool for a single point and a boolean array for an (n, 2) array.
    """
    p = np.asarray(p, dtype=float)
    x, y = p[..., 0], p[..., 1]
    if domain.name == "square":
        inside = (x >= 0) & (x <= 1) & (y >= 0) & (y <= 1)
    elif domain.name == "disk":
        inside = (x - 0.5) ** 2 + (y - 0.5) ** 2 <= 0.25
    elif domain.name == "cutdisk":
        inside = (x**2 + y**2 <= 1.0) & ~((x < 0) & (y < 0))
    elif domain.name == "lens":
        inside = ((x + _A) ** 2 + y**2 <= 1.0) & ((x - _A) ** 2 + y**2 <= 1.0)
    else:
        raise ValueError(f"unknown domain {domain.name!r}")
    return bool(inside) if inside.ndim == 0 else inside


def radical_inverse(indices, base: int) -> np.ndarray:
    """Van der Corput radical inverse of non-negative integers in ``base``."""
    n = np.array(indices, dtype=np.int64)
    out = np.zeros(n.shape)
    f = 1.0 / base
    while np.any(n > 0):
        out += f * (n % base)
        n //= base
        f /= base
    return out


def halton_points(n: int, domain: Domain) -> np.ndarray:
    """First ``n`` points of the (2, 3) Halton sequence that fall in ``domain``.

    The sequence starts at index 1, so the first unit-square point is
    ``(1/2, 1/3)``. Points are mapped affinely onto the bounding box and
    rejected if outside the region; the result is prefix-stable in ``n``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    x0, x1, y0, y1 = domain.bbox
    chunks, have, start = [], 0, 1
    # rejection rate is bounded by the area ratio, so a few chunks suffice
    while have < n:
        size = max(2 * (n - have), 64)
        idx = np.arange(start, start + size)
        pts = np.column_stack(
            [
                x0 + (x1 - x0) * radical_inverse(idx, 2),
                y0 + (y1 - y0) * radical_inverse(idx, 3),
            ]
        )
        pts = pts[contains(domain, pts)]
        chunks.append(pts)
        have += len(pts)
        start += size
    return np.concatenate(chunks)[:n]


def uniform_grid(m: int, domain: Domain) -> np.ndarray:
    """An ``m x m`` equispaced grid over the bounding box, clipped to the domain.

    ``m = 1`` gives the bounding-box centre (if it lies in the domain).
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    x0, x1, y0, y1 = domain.bbox
    if m == 1:
        xs, ys = np.array([(x0 + x1) / 2]), np.array([(y0 + y1) / 2])
    else:
        xs, ys = np.linspace(x0, x1, m), np.linspace(y0, y1, m)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    return pts[contains(domain, pts)]


def fill_and_separation(X, domain: Domain, probe) -> tuple[float, float]:
    """Fill distance (estimated on ``probe``) and separation distance of ``X``.

    Returns
    -------
    h : float
        ``max`` over probe points inside ``domain`` of the distance to ``X``.
    q : float
        Half the minimal pairwise distance in ``X``.
    """
    X = np.asarray(X, dtype=float)
    if len(X) < 2:
        raise TooFewPoints("fill/separation distance needs at least 2 points")
    probe = np.asarray(probe, dtype=float)
    probe = probe[contains(domain, probe)]
    q = 0.5 * float(pdist(X).min())
    h = float(cKDTree(X).query(probe)[0].max())
    return h, q
