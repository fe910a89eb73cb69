"""Planar predicates with an exact fallback.

Orientation and in-circle tests first use floating point; when the result
is too close to zero to trust, they are recomputed exactly with
``fractions.Fraction`` on the (exactly representable) float inputs.
"""

from __future__ import annotations

from fractions import Fraction

_EPS = 2.0**-52


def orient(a, b, c) -> int:
    """+1 if a, b, c turn counter-clockwise, -1 if clockwise, 0 if collinear."""
    acx, acy = a[0] - c[0], a[1] - c[1]
    bcx, bcy = b[0] - c[0], b[1] - c[1]
    left = acx * bcy
    right = acy * bcx
    det = left - right
    bound = 8 * _EPS * (abs(left) + abs(right))
    if det > bound:
        return 1
    if det < -bound:
        return -1
    return _orient_exact(a, b, c)


def _orient_exact(a, b, c) -> int:
    ax, ay, bx, by, cx, cy = (Fraction(v) for v in (*a, *b, *c))
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def incircle(a, b, c, d) -> int:
    """+1 if d lies strictly inside the circle through CCW a, b, c; 0 on it."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    t1 = alift * (bdx * cdy - bdy * cdx)
    t2 = blift * (cdx * ady - cdy * adx)
    t3 = clift * (adx * bdy - ady * bdx)
    det = t1 + t2 + t3
    perm = (
        alift * (abs(bdx * cdy) + abs(bdy * cdx))
        + blift * (abs(cdx * ady) + abs(cdy * adx))
        + clift * (abs(adx * bdy) + abs(ady * bdx))
    )
    bound = 32 * _EPS * perm
    if det > bound:
        return 1
    if det < -bound:
        return -1
    return _incircle_exact(a, b, c, d)


def _incircle_exact(a, b, c, d) -> int:
    ax, ay, bx, by, cx, cy, dx, dy = (Fraction(v) for v in (*a, *b, *c, *d))
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - bdy * cdx)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - cdy * adx)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - ady * bdx)
    )
    return (det > 0) - (det < 0)


def on_segment(p, a, b) -> bool:
    """p lies on the closed segment ab (assumes collinearity was checked)."""
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segments_intersect(p1, p2, q1, q2) -> bool:
    """Closed segments p1p2 and q1q2 share at least one point."""
    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    return (
        (d1 == 0 and on_segment(p1, q1, q2))
        or (d2 == 0 and on_segment(p2, q1, q2))
        or (d3 == 0 and on_segment(q1, p1, p2))
        or (d4 == 0 and on_segment(q2, p1, p2))
    )


def convex_hull(pts) -> list:
    """Indices of the strict convex hull in CCW order (monotone chain).

    Points on hull edges but not at corners are left out.
    """
    order = sorted(range(len(pts)), key=lambda i: (pts[i][0], pts[i][1]))
    if len(order) < 3:
        return order

    def chain(idx):
        out = []
        for i in idx:
            while len(out) >= 2 and orient(pts[out[-2]], pts[out[-1]], pts[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    return lower[:-1] + upper[:-1]


def signed_area2(pts, poly) -> float:
    s = 0.0
    for k in range(len(poly)):
        a, b = pts[poly[k]], pts[poly[(k + 1) % len(poly)]]
        s += a[0] * b[1] - a[1] * b[0]
    return s
