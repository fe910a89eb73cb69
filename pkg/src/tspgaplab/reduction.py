"""Triangle reduction: triangulations, restricted edge masks and metric audits.

Two triangulations are offered. ``delaunay_triangulate`` needs only the
points. ``triangulate_around_tour`` is forced to contain a given tour and
therefore always keeps that tour available to a restricted re-solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import geometry as geo
from .exact import REL_TOL, check_tour, solve_exact, tour_edges
from .instances import CostMatrix, PointSet, gen_random_points, points_to_costs

JITTER_REL = 1e-12
_MAX_JITTER_TRIES = 8


class TriangulationError(ValueError):
    pass


@dataclass(frozen=True)
class Triangulation:
    """Undirected edges ``(i, j)`` with ``i < j``, 0-based.

    ``jitter_seed`` is set when coordinates had to be perturbed to break a
    cocircular tie; the edges still refer to the original points.
    """

    n: int
    edges: frozenset
    faces: Optional[tuple] = None
    jitter_seed: Optional[int] = None

    @property
    def jittered(self) -> bool:
        return self.jitter_seed is not None

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


def _edge(a, b):
    return (a, b) if a < b else (b, a)


def _triangulation(n, tris, jitter_seed=None) -> Triangulation:
    faces = tuple(sorted(_rotate_min(t) for t in tris))
    edges = frozenset(_edge(a, b) for a, b, c in faces for a, b in ((a, b), (b, c), (c, a)))
    return Triangulation(n, edges, faces, jitter_seed)


def _rotate_min(t):
    k = t.index(min(t))
    return t[k:] + t[:k]


# ------------------------------------------------------------ construction


def _sweep(pts) -> list:
    """Any triangulation of the point set, built by a left-to-right sweep."""
    order = sorted(range(len(pts)), key=lambda i: (pts[i][0], pts[i][1]))
    a, b = order[0], order[1]
    k = 2
    while k < len(order) and geo.orient(pts[a], pts[b], pts[order[k]]) == 0:
        k += 1
    if k == len(order):
        raise TriangulationError("all points are collinear")
    line, apex = order[:k], order[k]
    tris = []
    for u, v in zip(line, line[1:]):
        tris.append((u, v, apex) if geo.orient(pts[u], pts[v], pts[apex]) > 0 else (v, u, apex))
    if geo.orient(pts[line[0]], pts[line[-1]], pts[apex]) > 0:
        hull = line + [apex]
    else:
        hull = [line[0], apex] + line[:0:-1]

    for p in order[k + 1:]:
        m = len(hull)
        vis = [geo.orient(pts[hull[i]], pts[hull[(i + 1) % m]], pts[p]) < 0 for i in range(m)]
        start = next(i for i in range(m) if vis[i] and not vis[i - 1])
        hull = hull[start:] + hull[:start]
        run = 0
        while run < m and vis[(start + run) % m]:
            u, v = hull[run], hull[(run + 1) % m]
            tris.append((v, u, p))
            run += 1
        hull = [hull[0], p] + hull[run:]
    return tris


def _lawson(pts, tris, locked=frozenset()) -> list:
    """Flip non-locked edges until every one is locally Delaunay."""
    opp = {}
    for a, b, c in tris:
        opp[(a, b)], opp[(b, c)], opp[(c, a)] = c, a, b
    stack = sorted({_edge(a, b) for (a, b) in opp if (b, a) in opp})
    while stack:
        a, b = stack.pop()
        if (a, b) not in opp or (b, a) not in opp or (a, b) in locked:
            continue
        c, d = opp[(a, b)], opp[(b, a)]
        if geo.incircle(pts[a], pts[b], pts[c], pts[d]) <= 0:
            continue
        for key in ((a, b), (b, c), (c, a), (b, a), (a, d), (d, b)):
            del opp[key]
        opp[(a, d)], opp[(d, c)], opp[(c, a)] = c, a, d
        opp[(d, b)], opp[(b, c)], opp[(c, d)] = c, d, b
        stack.extend([_edge(a, d), _edge(d, b), _edge(b, c), _edge(c, a)])
    return _faces_from_opp(opp)


def _faces_from_opp(opp) -> list:
    faces = set()
    for (a, b), c in opp.items():
        faces.add(_rotate_min((a, b, c)))
    return sorted(faces)


def _has_cocircular(pts, tris) -> bool:
    opp = {}
    for a, b, c in tris:
        opp[(a, b)], opp[(b, c)], opp[(c, a)] = c, a, b
    for (a, b), c in opp.items():
        if a < b and (b, a) in opp and geo.incircle(pts[a], pts[b], pts[c], pts[opp[(b, a)]]) == 0:
            return True
    return False


def _jittered(points: np.ndarray, seed: int) -> list:
    span = np.ptp(points, axis=0).max()
    scale = JITTER_REL * (span if span > 0 else 1.0)
    rng = np.random.default_rng(seed)
    return [tuple(p) for p in (points + rng.uniform(-scale, scale, points.shape)).tolist()]


def _drop_slivers(pts, tris) -> list:
    """Remove faces that are flat in the original coordinates.

    Jitter can turn collinear points into thin but valid triangles. A flat
    face on the boundary is dropped; an interior one is removed by splitting
    its neighbour across the long edge at the middle vertex.
    """
    tris = [tuple(t) for t in tris]
    for _ in range(4 * len(tris) + 4):
        flat = next((t for t in tris if geo.orient(pts[t[0]], pts[t[1]], pts[t[2]]) == 0), None)
        if flat is None:
            return tris
        tris.remove(flat)
        a, b, m = next(
            (flat[(k + 1) % 3], flat[(k + 2) % 3], flat[k])
            for k in range(3)
            if geo.on_segment(pts[flat[k]], pts[flat[(k + 1) % 3]], pts[flat[(k + 2) % 3]])
        )
        nb = next((t for t in tris if (b, a) in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))), None)
        if nb is None:
            continue
        tris.remove(nb)
        d = next(v for v in nb if v not in (a, b))
        tris += [(b, m, d), (m, a, d)]
    raise TriangulationError("could not clean up flat triangles")


def delaunay_triangulate(ps: PointSet, jitter_seed: int = 0) -> Triangulation:
    """Delaunay triangulation by sweep construction plus Lawson flips.

    Predicates are exact, so ties are detected reliably. When four or more
    points are cocircular the result is made unique by re-running on
    coordinates jittered by ``1e-12`` of the bounding box, drawn from
    ``default_rng(jitter_seed)``; the seed used is stored on the result.
    """
    pts = [tuple(p) for p in ps.points.tolist()]
    tris = _lawson(pts, _sweep(pts))
    if not _has_cocircular(pts, tris):
        return _triangulation(ps.n, tris)
    for attempt in range(_MAX_JITTER_TRIES):
        seed = jitter_seed + attempt
        jpts = _jittered(ps.points, seed)
        tris = _lawson(jpts, _sweep(jpts))
        if not _has_cocircular(jpts, tris):
            return _triangulation(ps.n, _drop_slivers(pts, tris), jitter_seed=seed)
    raise TriangulationError("could not resolve cocircular degeneracy")


def is_simple_polygon(pts, poly) -> bool:
    m = len(poly)
    segs = [(pts[poly[k]], pts[poly[(k + 1) % m]]) for k in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            (p1, p2), (q1, q2) = segs[i], segs[j]
            if j == i + 1 or (i == 0 and j == m - 1):
                # adjacent edges share one endpoint; they must not fold onto each other
                shared = p2 if j == i + 1 else p1
                far_p = p1 if shared is p2 else p2
                far_q = q2 if shared is q1 else q1
                if geo.orient(p1, p2, far_q) == 0 and (
                    geo.on_segment(far_q, p1, p2) or geo.on_segment(far_p, q1, q2)
                ):
                    return False
                continue
            if geo.segments_intersect(p1, p2, q1, q2):
                return False
    return True


def _in_closed_triangle(p, a, b, c) -> bool:
    return geo.orient(a, b, p) >= 0 and geo.orient(b, c, p) >= 0 and geo.orient(c, a, p) >= 0


def ear_clip(pts, poly) -> list:
    """Triangulate a simple polygon; zero-area remnants are dropped."""
    poly = list(poly)
    if geo.signed_area2(pts, poly) < 0:
        poly.reverse()
    tris = []
    while len(poly) > 3:
        m = len(poly)
        for k in range(m):
            a, b, c = poly[k - 1], poly[k], poly[(k + 1) % m]
            if geo.orient(pts[a], pts[b], pts[c]) <= 0:
                continue
            if any(
                _in_closed_triangle(pts[v], pts[a], pts[b], pts[c])
                for v in poly
                if v not in (a, b, c)
            ):
                continue
            tris.append((a, b, c))
            del poly[k]
            break
        else:
            # only reflex or flat corners left: drop a flat one
            flat = next(
                (k for k in range(m) if geo.orient(pts[poly[k - 1]], pts[poly[k]], pts[poly[(k + 1) % m]]) == 0),
                None,
            )
            if flat is None:
                raise TriangulationError("ear clipping failed; polygon is not simple")
            del poly[flat]
    if geo.orient(*(pts[v] for v in poly)) > 0:
        tris.append(tuple(poly))
    return tris


def triangulate_around_tour(ps: PointSet, tour: Sequence[int]) -> Triangulation:
    """Constrained Delaunay triangulation of the hull containing every tour edge.

    The tour polygon is ear-clipped, as is every pocket between it and the
    convex hull; then all non-tour edges are flipped to Delaunay.
    """
    n = ps.n
    tour = check_tour(tour, n)
    pts = [tuple(p) for p in ps.points.tolist()]
    if not is_simple_polygon(pts, tour):
        raise TriangulationError("tour not simple")
    poly = list(tour)
    if geo.signed_area2(pts, poly) < 0:
        poly.reverse()
    tris = ear_clip(pts, poly)

    pos = {v: k for k, v in enumerate(poly)}
    hull = geo.convex_hull(pts)
    for i, a in enumerate(hull):
        b = hull[(i + 1) % len(hull)]
        lo, hi = pos[a], pos[b]
        chain = poly[lo:hi + 1] if lo <= hi else poly[lo:] + poly[:hi + 1]
        if len(chain) > 2:
            tris.extend(ear_clip(pts, chain))

    locked = set()
    for a, b in tour_edges(tour):
        locked.update({(a, b), (b, a)})
    tris = [t if geo.orient(*(pts[v] for v in t)) > 0 else t[::-1] for t in tris]
    tris = _lawson(pts, tris, frozenset(locked))
    tr = _triangulation(n, tris)
    missing = [e for e in tour_edges(tour) if _edge(*e) not in tr.edges]
    if missing:
        # only reachable when a tour edge degenerates onto a collinear chain
        tr = Triangulation(n, tr.edges | {_edge(*e) for e in missing}, tr.faces)
    return tr


# ------------------------------------------------------------------ masks


def restrict_to_edges(n_or_cm, tr: Triangulation) -> np.ndarray:
    """Directed edge mask holding both orientations of every triangulation edge."""
    n = n_or_cm.n if isinstance(n_or_cm, CostMatrix) else int(n_or_cm)
    if n != tr.n:
        raise ValueError("triangulation size does not match the instance")
    mask = np.zeros((n, n), dtype=bool)
    for i, j in tr.edges:
        mask[i, j] = mask[j, i] = True
    return mask


def containment_check(tour: Sequence[int], tr: Triangulation) -> bool:
    return all(_edge(a, b) in tr.edges for a, b in tour_edges(tour))


# ------------------------------------------------------------------ audit


@dataclass
class AuditReport:
    """Ordered triples ``(i, k, j)`` with ``c[i, j] > c[i, k] + c[k, j]``.

    ``witnesses`` holds up to ``max_witnesses`` triples in lexicographic
    order as ``(i, k, j, direct, two_hop)``.
    """

    violations: int
    triples_checked: int
    worst_ratio: float
    witnesses: list = field(default_factory=list)


def triangle_audit(cm: CostMatrix, tolerance: float = REL_TOL, max_witnesses: int = 20) -> AuditReport:
    n = cm.n
    c = cm.cost
    violations = 0
    worst = 0.0
    witnesses = []
    for i in range(n):
        direct = c[i][None, :]  # c[i, j] for every (k, j)
        hop = c[i][:, None] + c  # c[i, k] + c[k, j]
        valid = np.ones((n, n), dtype=bool)
        valid[i, :] = False
        valid[:, i] = False
        np.fill_diagonal(valid, False)
        if cm.exact:
            bad = (direct > hop) & valid
        else:
            slack = tolerance * np.maximum(np.abs(direct), np.abs(hop))
            bad = (direct - hop > slack) & valid
        violations += int(bad.sum())
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(valid, direct / hop, 0.0)
        ratio = np.where(valid & (hop == 0) & (direct > 0), np.inf, np.nan_to_num(ratio, nan=0.0))
        if valid.any():
            worst = max(worst, float(ratio[valid].max()))
        if len(witnesses) < max_witnesses and bad.any():
            for k, j in zip(*np.nonzero(bad)):
                if len(witnesses) == max_witnesses:
                    break
                witnesses.append((i, int(k), int(j), c[i, j].item(), hop[k, j].item()))
    return AuditReport(violations, n * (n - 1) * (n - 2), worst, witnesses)


# ----------------------------------------------------------- experiments


@dataclass
class ReductionResult:
    """Full solve against a solve restricted to a triangulation's edges."""

    method: str
    full: object
    tri: Triangulation
    contained: bool
    restricted: object

    @property
    def same_cost(self) -> bool:
        return self.restricted.feasible and self.restricted.opt_cost == self.full.opt_cost


def reduce_and_resolve(ps: PointSet, method: str = "constrained", tour=None, workers: int = 1) -> ReductionResult:
    cm = points_to_costs(ps)
    full = solve_exact(cm, workers=workers)
    if method == "constrained":
        tr = triangulate_around_tour(ps, full.opt_tours[0] if tour is None else tour)
    elif method == "delaunay":
        tr = delaunay_triangulate(ps)
    else:
        raise ValueError(f"unknown triangulation method {method!r}")
    reference = full.opt_tours[0] if tour is None else tour
    restricted = solve_exact(cm, restrict_to_edges(cm, tr), workers=workers)
    return ReductionResult(method, full, tr, containment_check(reference, tr), restricted)


@dataclass
class ContainmentBatch:
    n: int
    seeds: list
    contained: list

    @property
    def fraction(self) -> float:
        return sum(self.contained) / len(self.contained)

    def format(self) -> str:
        lines = [
            f"n: {self.n}",
            f"seeds: {len(self.seeds)}",
            f"contained: {sum(self.contained)}",
            f"fraction: {self.fraction!r}",
        ]
        lines += [f"seed {s}: {str(c).lower()}" for s, c in zip(self.seeds, self.contained)]
        return "\n".join(lines) + "\n"


def delaunay_containment_batch(n: int, seeds, workers: int = 1) -> ContainmentBatch:
    """Does the Delaunay triangulation of random points contain the optimum?"""
    seeds = list(seeds)
    flags = []
    for s in seeds:
        ps = gen_random_points(n, s)
        sol = solve_exact(points_to_costs(ps), workers=workers)
        flags.append(containment_check(sol.opt_tours[0], delaunay_triangulate(ps)))
    return ContainmentBatch(n, seeds, flags)


# ------------------------------------------------------------ file format


def serialize_triangulation(tr: Triangulation) -> str:
    lines = [f"tri {tr.n} {len(tr.edges)}"]
    lines += [f"{i + 1} {j + 1}" for i, j in tr.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_triangulation(text: str) -> Triangulation:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 3 or rows[0][0] != "tri":
        raise ValueError("header must be 'tri <n> <edges>'")
    n, count = int(rows[0][1]), int(rows[0][2])
    if len(rows) - 1 != count:
        raise ValueError(f"expected {count} edge lines, found {len(rows) - 1}")
    edges = set()
    for toks in rows[1:]:
        i, j = int(toks[0]) - 1, int(toks[1]) - 1
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"bad edge {toks[0]} {toks[1]}")
        edges.add(_edge(i, j))
    return Triangulation(n, frozenset(edges))
