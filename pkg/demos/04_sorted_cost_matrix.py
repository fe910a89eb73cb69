"""Where the optimal tour's edges sit in each vertex's sorted edge list."""

from tspgaplab import build_scm, compute_frontier, gen_random_points, points_to_costs, solve_exact
from tspgaplab.reduction import restrict_to_edges, triangulate_around_tour
from tspgaplab.scm import near_optimal_set, occupied_columns, render_scm, scm_pixels

ps = gen_random_points(10, seed=7)
cm = points_to_costs(ps)
sol = solve_exact(cm)
tour = sol.opt_tours[0]
near = near_optimal_set(cm, sol, epsilon=0.05)
print(f"{len(near)} other tours within 5% of the optimum")

full = build_scm(cm)
fr = compute_frontier(full, tour)
print("complete graph frontier ranks:", fr.ranks, "elongation", round(fr.elongation, 3))

mask = restrict_to_edges(cm, triangulate_around_tour(ps, tour))
reduced = build_scm(cm, mask)
rfr = compute_frontier(reduced, tour)
print("reduced graph frontier ranks: ", rfr.ranks, "elongation", round(rfr.elongation, 3))

print("occupied columns:", occupied_columns(scm_pixels(full, fr, near)), "->",
      occupied_columns(scm_pixels(reduced, rfr, near)))
render_scm(full, fr, near, "scm_full.ppm")
render_scm(reduced, rfr, near, "scm_reduced.ppm")
print("wrote scm_full.ppm and scm_reduced.ppm")
