"""Planar convex hulls and the footprint scores used by the spreading policies."""
from __future__ import annotations

import numpy as np


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Hull vertices in counter-clockwise order (Andrew's monotone chain).

    Degenerate inputs are fine: one point gives a single vertex, collinear
    points give the two extreme ones.
    """
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) <= 2:
        return pts

    def half(ordered):
        chain: list[np.ndarray] = []
        for p in ordered:
            while len(chain) > 1:
                a, b = chain[-2], chain[-1]
                if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) <= 0.0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def hull_perimeter(points: np.ndarray) -> float:
    """Boundary length of the convex hull (a segment counts both ways)."""
    hull = convex_hull(points)
    if len(hull) < 2:
        return 0.0
    return float(np.linalg.norm(np.roll(hull, -1, axis=0) - hull, axis=1).sum())


def hull_area(points: np.ndarray) -> float:
    """Area of the convex hull via the shoelace formula; 0 when degenerate."""
    hull = convex_hull(points)
    if len(hull) < 3:
        return 0.0
    x, y = hull[:, 0], hull[:, 1]
    return 0.5 * abs(float(x @ np.roll(y, -1) - y @ np.roll(x, -1)))
