import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import circumcircle_contains, hull_size
from tspgaplab.exact import solve_exact
from tspgaplab.geometry import incircle, orient
from tspgaplab.instances import PointSet, gen_random_gap, gen_random_points, gen_unique_gap, points_to_costs
from tspgaplab.reduction import (
    TriangulationError,
    containment_check,
    delaunay_containment_batch,
    delaunay_triangulate,
    parse_triangulation,
    restrict_to_edges,
    serialize_triangulation,
    triangle_audit,
    triangulate_around_tour,
)


def test_predicates_exact_on_ties():
    assert orient((0, 0), (1, 0), (0, 1)) == 1
    assert orient((0, 0), (1, 1), (3, 3)) == 0
    assert orient((0.1, 0.1), (0.2, 0.2), (0.30000000000000004, 0.30000000000000004)) in (-1, 0, 1)
    assert incircle((0, 0), (1, 0), (1, 1), (0, 1)) == 0
    assert incircle((0, 0), (1, 0), (1, 1), (0.5, 0.5)) == 1


def test_three_points():
    tr = delaunay_triangulate(PointSet([(0, 0), (1, 0), (0, 1)]))
    assert len(tr.edges) == 3 and len(tr.faces) == 1


def test_unit_square_delaunay(unit_square):
    tr = delaunay_triangulate(unit_square)
    assert len(tr.edges) == 5
    assert {(0, 1), (1, 2), (2, 3), (0, 3)} <= tr.edges
    assert tr.jittered
    assert tr == delaunay_triangulate(unit_square)


def test_collinear_rejected():
    with pytest.raises(TriangulationError):
        delaunay_triangulate(PointSet([(0, 0), (1, 1), (2, 2), (3, 3)]))


def test_collinear_subset_is_fine():
    ps = PointSet([(0, 0), (1, 0), (2, 0), (3, 0), (1.5, 1)])
    tr = delaunay_triangulate(ps)
    assert len(tr.faces) == 3
    assert len(tr.edges) == 7


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 50), st.integers(0, 10**6))
def test_delaunay_empty_circumcircle_and_euler(n, seed):
    ps = gen_random_points(n, seed)
    tr = delaunay_triangulate(ps)
    pts = ps.points.tolist()
    for a, b, c in tr.faces:
        for p in range(n):
            if p not in (a, b, c):
                assert not circumcircle_contains(pts[a], pts[b], pts[c], pts[p])
    assert len(tr.edges) == 3 * n - 3 - hull_size(pts)


def test_grid_cocircular_jitter_is_reported():
    pts = [(x, y) for x in range(4) for y in range(4)]
    tr = delaunay_triangulate(PointSet(pts))
    assert tr.jittered
    assert len(tr.edges) == 3 * 16 - 3 - 12
    # Delaunay on the original points up to ties: nobody strictly inside
    for a, b, c in tr.faces:
        for p in range(16):
            if p not in (a, b, c):
                assert not circumcircle_contains(pts[a], pts[b], pts[c], pts[p])


def test_tour_constrained_unit_square(unit_square):
    tr = triangulate_around_tour(unit_square, (0, 1, 2, 3))
    assert len(tr.edges) == 5
    assert containment_check((0, 1, 2, 3), tr)


def test_tour_constrained_convex_hull():
    ang = np.linspace(0, 2 * np.pi, 9, endpoint=False)
    ps = PointSet(np.c_[np.cos(ang), np.sin(ang)] * [3, 1])
    tr = triangulate_around_tour(ps, tuple(range(9)))
    for i in range(9):
        a, b = sorted((i, (i + 1) % 9))
        assert (a, b) in tr.edges
    assert len(tr.edges) == 3 * 9 - 3 - 9


def test_nonconvex_tour_keeps_edges_and_counts():
    # star-shaped polygon around the origin: alternating radii
    ang = np.linspace(0, 2 * np.pi, 10, endpoint=False)
    r = np.where(np.arange(10) % 2 == 0, 2.0, 0.7)
    ps = PointSet(np.c_[r * np.cos(ang), r * np.sin(ang)])
    tour = tuple(range(10))
    tr = triangulate_around_tour(ps, tour)
    assert containment_check(tour, tr)
    assert len(tr.edges) == 3 * 10 - 3 - hull_size(ps.points.tolist())


def test_crossing_tour_rejected(unit_square):
    with pytest.raises(TriangulationError, match="tour not simple"):
        triangulate_around_tour(unit_square, (0, 2, 1, 3))


@pytest.mark.parametrize("seed", range(40))
def test_constrained_reduction_preserves_optimum(seed):
    n = 6 + seed % 4
    ps = gen_random_points(n, 1000 + seed)
    cm = points_to_costs(ps)
    full = solve_exact(cm)
    tr = triangulate_around_tour(ps, full.opt_tours[0])
    assert containment_check(full.opt_tours[0], tr)
    red = solve_exact(cm, restrict_to_edges(cm, tr))
    assert red.opt_cost == full.opt_cost


@pytest.mark.parametrize("seed", range(20))
def test_delaunay_restricted_never_better(seed):
    ps = gen_random_points(8, seed)
    cm = points_to_costs(ps)
    full = solve_exact(cm)
    tr = delaunay_triangulate(ps)
    red = solve_exact(cm, restrict_to_edges(cm, tr))
    if containment_check(full.opt_tours[0], tr):
        assert red.opt_cost == full.opt_cost
    else:
        assert not red.feasible or red.opt_cost >= full.opt_cost


def test_mask_sizes(unit_square):
    assert restrict_to_edges(4, delaunay_triangulate(unit_square)).sum() == 10
    for n in (7, 12):
        ps = gen_random_points(n, 3)
        mask = restrict_to_edges(n, delaunay_triangulate(ps))
        assert mask.sum() <= 6 * n - 12 < n * (n - 1)


def test_containment_examples(unit_square):
    tri = PointSet([(0, 0), (1, 0), (0, 1)])
    assert containment_check((0, 1, 2), delaunay_triangulate(tri))
    assert not containment_check((0, 2, 1, 3), delaunay_triangulate(unit_square))


def test_containment_batch_deterministic():
    a = delaunay_containment_batch(7, range(30))
    b = delaunay_containment_batch(7, range(30), workers=4)
    assert a.contained == b.contained
    assert a.format() == b.format()
    assert 0 < a.fraction <= 1


def test_audit_unique_gap3():
    rep = triangle_audit(gen_unique_gap(3))
    assert rep.violations >= 1
    assert rep.witnesses[0] == (1, 0, 2, 6, 5)
    assert rep.triples_checked == 6


def test_audit_against_triple_loop():
    cm = gen_random_gap(7, 4)
    c = cm.cost
    count = 0
    worst = 0.0
    for i in range(7):
        for k in range(7):
            for j in range(7):
                if len({i, k, j}) == 3:
                    hop = c[i, k] + c[k, j]
                    worst = max(worst, c[i, j] / hop)
                    count += c[i, j] - hop > 1e-9 * max(c[i, j], hop)
    rep = triangle_audit(cm)
    assert rep.violations == count
    assert rep.worst_ratio == pytest.approx(worst, rel=1e-12)
    assert len(rep.witnesses) == min(count, 20)


def test_triangulation_file_round_trip(unit_square):
    tr = delaunay_triangulate(unit_square)
    text = serialize_triangulation(tr)
    assert text.splitlines()[0] == "tri 4 5"
    back = parse_triangulation(text)
    assert back.edges == tr.edges
