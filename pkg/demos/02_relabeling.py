"""Renaming vertices so that the optimum becomes the descending tour."""

from tspgaplab import apply_relabeling, gen_random_gap, relabel_to_descent, solve_exact
from tspgaplab.exact import descent_cycle, format_tour

cm = gen_random_gap(7, seed=11)
sol = solve_exact(cm)
print("original optimum:", format_tour(sol.opt_tours[0]), sol.opt_cost)

m = relabel_to_descent(sol.opt_tours[0], cm.n)
print("vertex k becomes", (m.forward + 1).tolist())

renamed = solve_exact(apply_relabeling(cm, m))
print("renamed optimum:", format_tour(renamed.opt_tours[0]), renamed.opt_cost)
assert renamed.opt_tours == [descent_cycle(cm.n)]
