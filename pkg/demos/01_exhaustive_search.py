"""Exhaustive search on a weighted instance with a single, isolated optimum."""

from tspgaplab import enumerate_cycles, gen_unique_gap, solve_exact
from tspgaplab.exact import format_tour, max_coincidence

for n in range(3, 9):
    print(f"n={n}: {sum(1 for _ in enumerate_cycles(n))} tours")

cm = gen_unique_gap(6)
print(cm.cost)

sol = solve_exact(cm, workers=4)
print("optimum", sol.opt_cost, "via", format_tour(sol.opt_tours[0]))
print("every tour has its own cost:", sol.distinct_costs)

# Two different tours never share more than n-3 directed edges.
for n in range(4, 8):
    print(f"n={n}: most shared edges between distinct tours = {max_coincidence(n)}")
