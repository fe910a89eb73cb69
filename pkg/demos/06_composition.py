"""Glue a planar block to a general block and see what survives."""

from tspgaplab import compose_instances, gen_random_gap, gen_random_points, preservation_search
from tspgaplab.reduction import triangle_audit

a, b = gen_random_points(4, seed=0), gen_random_gap(4, seed=1)
comp = compose_instances(a, b, seed=0)
audit = triangle_audit(comp.cm)
print("fill range", comp.fill_range, "triangle violations", audit.violations)
for i, k, j, direct, hop in audit.witnesses[:3]:
    print(f"  {i + 1}->{j + 1} costs {direct:.3f} but {i + 1}->{k + 1}->{j + 1} costs {hop:.3f}")

summary = preservation_search(a, b, range(200))
print(summary.format())
