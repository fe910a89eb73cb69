"""Adding a vertex to a path never makes it cheaper in the plane; in general it can."""

from tspgaplab import gen_random_points, gen_unique_gap, monotonicity_check, points_to_costs

euclid = monotonicity_check(points_to_costs(gen_random_points(6, seed=1)))
print(f"planar n=6: {euclid.violations} violations over {euclid.pairs_checked} path pairs")

rep = monotonicity_check(gen_unique_gap(3))
p1, p2, c1, c2 = rep.counterexample
print("general n=3:", [v + 1 for v in p1], "costs", c1, "but", [v + 1 for v in p2], "costs", c2)
