"""How often does a uniformly random tour land on the optimum?"""

from tspgaplab import bounds_report, estimate_hit_rate, gen_unique_gap

cm = gen_unique_gap(5)
for seed in range(5):
    est = estimate_hit_rate(cm, 100_000, seed, workers=4)
    print(f"seed {seed}: p_hat={est.p_hat:.5f}  CI=[{est.ci_low:.5f}, {est.ci_high:.5f}]  "
          f"exact={est.theoretical}  covered={est.covers_theory}")

print(bounds_report(10).format())
# at n=4 the same formula gives a "probability" above one; it is flagged
print(bounds_report(4).flags)
