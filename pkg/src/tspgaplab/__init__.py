"""Exhaustive small-instance laboratory for general and Euclidean TSP instances."""

from .compose import Composition, compose_instances, preservation_search
from .exact import (
    Solution,
    VertexRelabeling,
    apply_relabeling,
    coincident_edge_count,
    enumerate_cycles,
    monotonicity_check,
    path_cost,
    relabel_to_descent,
    solve_exact,
    tour_cost,
)
from .instances import (
    CostMatrix,
    InstanceFile,
    PointSet,
    gen_random_gap,
    gen_random_points,
    gen_unique_gap,
    parse_instance,
    points_to_costs,
    serialize_instance,
)
from .reduction import (
    Triangulation,
    containment_check,
    delaunay_containment_batch,
    delaunay_triangulate,
    reduce_and_resolve,
    restrict_to_edges,
    triangle_audit,
    triangulate_around_tour,
)
from .scm import build_scm, compute_frontier, near_optimal_set, render_scm
from .stochastic import bounds_report, estimate_hit_rate, sample_cycles

__version__ = "0.1.0"

__all__ = [
    "Composition",
    "CostMatrix",
    "InstanceFile",
    "PointSet",
    "Solution",
    "Triangulation",
    "VertexRelabeling",
    "apply_relabeling",
    "bounds_report",
    "build_scm",
    "coincident_edge_count",
    "compose_instances",
    "compute_frontier",
    "containment_check",
    "delaunay_containment_batch",
    "delaunay_triangulate",
    "enumerate_cycles",
    "estimate_hit_rate",
    "gen_random_gap",
    "gen_random_points",
    "gen_unique_gap",
    "monotonicity_check",
    "near_optimal_set",
    "parse_instance",
    "path_cost",
    "points_to_costs",
    "preservation_search",
    "reduce_and_resolve",
    "relabel_to_descent",
    "render_scm",
    "restrict_to_edges",
    "sample_cycles",
    "serialize_instance",
    "solve_exact",
    "tour_cost",
    "triangle_audit",
    "triangulate_around_tour",
]
