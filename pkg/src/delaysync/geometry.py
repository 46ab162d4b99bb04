"""Planar convex hulls and point location over complex numbers.

The complex plane stands in for the (Re sigma, Im sigma) parameter plane, so
every helper takes and returns complex values directly.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

CROSS_TOL = 1e-10
INSIDE_TOL = 1e-9


def _cross(o: complex, a: complex, b: complex) -> float:
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


def convex_hull(points: Iterable[complex], tol: float = CROSS_TOL) -> list[complex]:
    """Convex hull by the monotone-chain method.

    Returns the extreme points in counterclockwise order with collinear
    interior points dropped (cross products within ``tol`` count as
    collinear).  Degenerate inputs collapse: a single repeated point gives
    one vertex, a collinear set gives its two endpoints.
    """
    pts = sorted({(complex(p).real, complex(p).imag) for p in points})
    if not pts:
        return []
    verts = [complex(x, y) for x, y in pts]
    if len(verts) <= 2:
        return verts
    lower: list[complex] = []
    for p in verts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    upper: list[complex] = []
    for p in reversed(verts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def conjugate_closure(points: Iterable[complex]) -> list[complex]:
    """The input points together with their complex conjugates."""
    out = []
    for p in points:
        p = complex(p)
        out.append(p)
        out.append(p.conjugate())
    return out


def point_in_hull(hull: Sequence[complex], z: complex, tol: float = INSIDE_TOL) -> bool:
    """Point-in-convex-polygon test; boundary counts as inside.

    ``hull`` must be in counterclockwise order (as produced by
    :func:`convex_hull`).
    """
    m = len(hull)
    if m == 0:
        return False
    if m == 1:
        return abs(z - hull[0]) <= tol
    if m == 2:
        return boundary_distance(hull, z) <= tol
    for i in range(m):
        if _cross(hull[i], hull[(i + 1) % m], z) < -tol:
            return False
    return True


def boundary_distance(hull: Sequence[complex], z: complex) -> float:
    """Distance from ``z`` to the polygon boundary (its edges and vertices)."""
    m = len(hull)
    if m == 0:
        return math.inf
    if m == 1:
        return abs(z - hull[0])
    best = math.inf
    for i in range(m):
        a = hull[i]
        b = hull[(i + 1) % m]
        vx, vy = b.real - a.real, b.imag - a.imag
        seg2 = vx * vx + vy * vy
        if seg2 == 0.0:
            best = min(best, abs(z - a))
            continue
        t = ((z.real - a.real) * vx + (z.imag - a.imag) * vy) / seg2
        t = max(0.0, min(1.0, t))
        proj = complex(a.real + t * vx, a.imag + t * vy)
        best = min(best, abs(z - proj))
    return best


def strictly_inside(hull: Sequence[complex], z: complex, margin: float = INSIDE_TOL) -> bool:
    """True when ``z`` is inside the hull and not within ``margin`` of its boundary."""
    return point_in_hull(hull, z) and boundary_distance(hull, z) > margin
