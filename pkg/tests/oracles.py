"""Independent reference computations used by the tests.

Nothing here calls into the library's enumeration or cost code.
"""

import itertools
import math


def unique_gap_entry(n, i, j):
    """1-based formula: row i holds n**(i-1) times the rank of column j."""
    rank = j if j < i else j - 1
    return n ** (i - 1) * rank


def brute_force_cycle_costs(cost):
    """{tour (0-based, starting at 0): cost} using plain Python arithmetic."""
    n = len(cost)
    out = {}
    for rest in itertools.permutations(range(1, n)):
        t = (0,) + rest
        total = 0
        for k in range(n):
            total += cost[t[k]][t[(k + 1) % n]]
        out[t] = total
    return out


def circumcircle_contains(a, b, c, p, rel=1e-9):
    """True if p lies strictly inside the circumcircle of a, b, c (float, tolerant)."""
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    r = math.hypot(ax - ux, ay - uy)
    return math.hypot(p[0] - ux, p[1] - uy) < r * (1 - rel)


def hull_size(points):
    """Number of strict convex hull corners, gift-wrapping style."""
    pts = sorted(map(tuple, points))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return len(lower) + len(upper) - 2


def wilson(hits, k, z=1.959963984540054):
    p = hits / k
    d = 1 + z * z / k
    c = (p + z * z / (2 * k)) / d
    h = z * math.sqrt(p * (1 - p) / k + z * z / (4 * k * k)) / d
    return c - h, c + h
