"""Dropping most edges of a planar instance without losing the optimum.

A triangulation built around the optimal tour always keeps it. Delaunay
needs no knowledge of the tour but sometimes misses one of its edges.
"""

from tspgaplab import delaunay_containment_batch, gen_random_points, reduce_and_resolve
from tspgaplab.svg import render_svg

ps = gen_random_points(9, seed=4)
for method in ("constrained", "delaunay"):
    res = reduce_and_resolve(ps, method)
    print(
        f"{method:>11}: {len(res.tri.edges)} of {9 * 8 // 2} edges kept, "
        f"tour contained={res.contained}, same optimum={res.same_cost}"
    )

render_svg(ps, res.tri, res.full.opt_tours[0], "delaunay_demo.svg")
print("wrote delaunay_demo.svg")

batch = delaunay_containment_batch(8, range(100))
print(batch.format())
