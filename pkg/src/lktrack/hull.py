"""Planar convex hulls by Andrew's monotone chain."""
from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError


def cross(o, a, b) -> float:
    """z-component of (a - o) x (b - o); positive for a left (CCW) turn."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"points must have shape (n, 2), got {pts.shape}")
    return pts


def monotone_chain(points) -> np.ndarray:
    """Convex hull as a ``(k, 2)`` array of CCW vertices.

    Starts at the lexicographically smallest vertex; points lying on a hull
    edge are not vertices.
    """
    pts = _as_points(points)
    uniq = sorted({(float(x), float(y)) for x, y in pts})
    if len(uniq) < 3:
        raise DegenerateInputError(f"need at least 3 distinct points, got {len(uniq)}")

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(uniq)
    upper = half(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateInputError("all points are collinear")
    return np.array(hull)


def contains(polygon: np.ndarray, pt, tol: float = 0.0) -> bool:
    """True if ``pt`` is inside or on the CCW convex ``polygon`` (with slack ``tol``)."""
    n = len(polygon)
    for i in range(n):
        if cross(polygon[i], polygon[(i + 1) % n], pt) < -tol:
            return False
    return True


def interior_prune(points) -> np.ndarray:
    """Drop points strictly inside the polygon spanned by the four axis-extreme points.

    Such points can never be hull vertices, so the hull is unchanged.
    """
    pts = _as_points(points)
    if len(pts) < 4:
        return pts.copy()
    # min-x, min-y, max-x, max-y is a CCW walk around the hull
    idx = [
        np.lexsort((pts[:, 1], pts[:, 0]))[0],
        np.lexsort((-pts[:, 0], pts[:, 1]))[0],
        np.lexsort((-pts[:, 1], -pts[:, 0]))[0],
        np.lexsort((pts[:, 0], -pts[:, 1]))[0],
    ]
    quad = []
    for i in idx:
        v = tuple(pts[i])
        if not quad or quad[-1] != v:
            quad.append(v)
    if quad[0] == quad[-1]:
        quad.pop()
    if len(quad) < 3:
        return pts.copy()
    n = len(quad)
    inside = np.ones(len(pts), dtype=bool)
    for k in range(n):
        o, a = quad[k], quad[(k + 1) % n]
        c = (a[0] - o[0]) * (pts[:, 1] - o[1]) - (a[1] - o[1]) * (pts[:, 0] - o[0])
        inside &= c > 0
    return pts[~inside]
