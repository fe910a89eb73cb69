"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Each test prints its verdict; the lines are repeated in a summary section at
the end of the pytest run.
"""

import time

import numpy as np
import pytest

from oracles import brute_force_cycle_costs
from tspgaplab.cli import deterministic_part, run_command
from tspgaplab.compose import preservation_search
from tspgaplab.exact import (
    VertexRelabeling,
    apply_relabeling,
    block_costs,
    descent_cycle,
    enumerate_cycles,
    max_coincidence,
    monotonicity_check,
    relabel_to_descent,
    solve_exact,
    tour_blocks,
)
from tspgaplab.instances import gen_random_gap, gen_random_points, gen_unique_gap, points_to_costs
from tspgaplab.reduction import (
    containment_check,
    delaunay_containment_batch,
    restrict_to_edges,
    triangulate_around_tour,
)
from tspgaplab.stochastic import bounds_report, estimate_hit_rate

pytestmark = pytest.mark.acceptance


def test_01_cycle_counting(verdict):
    start = time.perf_counter()
    counts = []
    for n in range(3, 9):
        tours = list(enumerate_cycles(n))
        assert len(set(tours)) == len(tours)
        counts.append(len(tours))
    elapsed = time.perf_counter() - start
    ok = counts == [2, 6, 24, 120, 720, 5040] and elapsed < 5
    assert verdict(1, ok, f"counts {counts} in {elapsed:.2f}s (limit 5s)")


def test_02_unique_generator(verdict):
    details, ok = [], True
    for n in range(3, 7):
        start = time.perf_counter()
        sol = solve_exact(gen_unique_gap(n))
        elapsed = time.perf_counter() - start
        costs = brute_force_cycle_costs(gen_unique_gap(n).cost.tolist())
        all_int = all(isinstance(c, int) for c in costs.values())
        distinct = len(set(costs.values())) == len(costs)
        good = sol.unique and sol.distinct_costs and distinct and all_int and sol.opt_cost == min(costs.values())
        if n == 6:
            good = good and elapsed < 1
            details.append(f"n=6 in {elapsed:.3f}s")
        ok = ok and good
    assert verdict(2, ok, "distinct integer costs and one optimum for n=3..6; " + details[0])


def test_03_coincidence_bound(verdict):
    start = time.perf_counter()
    found = {n: max_coincidence(n) for n in range(4, 8)}
    elapsed = time.perf_counter() - start
    ok = all(v == n - 3 for n, v in found.items()) and elapsed < 10
    assert verdict(3, ok, f"max shared edges {found} in {elapsed:.2f}s (limit 10s)")


def test_04_relabeling_invariance(verdict):
    rng = np.random.default_rng(20240404)
    worst_rel, mismatched, not_descent = 0.0, 0, 0
    for trial in range(1000):
        n = int(rng.integers(3, 9))
        kind = trial % 3
        if kind == 0:
            cm = gen_unique_gap(n)
        elif kind == 1:
            cm = gen_random_gap(n, trial)
        else:
            cm = points_to_costs(gen_random_points(n, trial))
        m = VertexRelabeling(rng.permutation(n))
        rcm = apply_relabeling(cm, m)
        for block in tour_blocks(n):
            before = block_costs(cm, block)
            after = block_costs(rcm, m.forward[block])
            if cm.exact:
                mismatched += int((before != after).sum())
            else:
                rel = np.abs(after - before) / np.abs(before)
                worst_rel = max(worst_rel, float(rel.max()))
        sol = solve_exact(cm)
        rel_opt = solve_exact(apply_relabeling(cm, relabel_to_descent(sol.opt_tours[0], n)))
        not_descent += descent_cycle(n) not in rel_opt.opt_tours
    ok = mismatched == 0 and worst_rel <= 1e-9 and not_descent == 0
    assert verdict(
        4, ok,
        f"1000 pairs: {mismatched} integer mismatches, worst float rel error {worst_rel:.1e}, "
        f"{not_descent} optima not the descent cycle",
    )


def test_05_triangle_reducibility(verdict):
    start = time.perf_counter()
    contained = same = 0
    for seed in range(200):
        ps = gen_random_points(6 + seed % 4, seed)
        cm = points_to_costs(ps)
        full = solve_exact(cm)
        tr = triangulate_around_tour(ps, full.opt_tours[0])
        contained += containment_check(full.opt_tours[0], tr)
        same += solve_exact(cm, restrict_to_edges(cm, tr)).opt_cost == full.opt_cost
    elapsed = time.perf_counter() - start
    ok = contained == same == 200 and elapsed < 120
    assert verdict(5, ok, f"contained {contained}/200, same optimum {same}/200 in {elapsed:.1f}s (limit 120s)")


def test_06_delaunay_containment(verdict):
    seeds = range(200)
    first = delaunay_containment_batch(9, seeds)
    again = delaunay_containment_batch(9, seeds, workers=8)
    ok = first.format() == again.format() and len(first.contained) == 200
    assert verdict(6, ok, f"n=9, 200 seeds, contained fraction {first.fraction:.3f}, identical on rerun: {ok}")


def test_07_monotonicity_contrast(verdict):
    checked = violations = 0
    for seed in range(40):
        n = 4 + seed % 4
        rep = monotonicity_check(points_to_costs(gen_random_points(n, seed)))
        assert rep.exhaustive
        checked += rep.pairs_checked
        violations += rep.violations
    witness = monotonicity_check(gen_unique_gap(3)).counterexample
    ok = violations == 0 and witness == ((1, 2), (1, 0, 2), 6, 5)
    assert verdict(
        7, ok,
        f"Euclidean n=4..7: {violations} violations in {checked} pairs; unique n=3 witness "
        "(2 3) cost 6 vs (2 1 3) cost 5",
    )


def test_08_sampling_law(verdict):
    cm = gen_unique_gap(5)
    sol = solve_exact(cm)
    start = time.perf_counter()
    covered = sum(estimate_hit_rate(cm, 100_000, seed, solution=sol).covers_theory for seed in range(100))
    elapsed = time.perf_counter() - start
    ok = covered >= 98 and elapsed < 30
    assert verdict(8, ok, f"Wilson 95% interval covers 1/24 in {covered}/100 seeds (need 98) in {elapsed:.1f}s")


def test_09_bound_arithmetic(verdict):
    from fractions import Fraction

    r10, r4 = bounds_report(10), bounds_report(4)
    ok = (
        r10.pJ == Fraction(1000, 3628800)
        and r10.A_star == Fraction(25, 18)
        and 1 < r10.A_star < 8
        and 1 - r10.pJ > Fraction(999, 1000)
        and any("exceeds 1" in f for f in r4.flags)
    )
    assert verdict(9, ok, f"pJ={r10.pJ}, A_star={r10.A_star}, 1-pJ={float(1 - r10.pJ):.6f}; n=4 flags: {len(r4.flags)}")


def test_10_composition_destruction(verdict, tmp_path, capsys):
    start = time.perf_counter()
    summary = preservation_search(gen_random_points(4, 0), gen_random_gap(4, 1), range(1000))
    elapsed = time.perf_counter() - start
    archive = tmp_path / "preservation.txt"
    code = run_command(["sweep", "preservation", "--n", "4", "--m", "4", "--k", "1000",
                        "--out", str(archive), "--csv", str(tmp_path / "preservation.csv")])
    capsys.readouterr()
    archived = code == 0 and "first_non_preserved_seed" in archive.read_text()
    broken, violating = summary.first_broken_seed, summary.first_violating_seed
    ok = broken is not None and violating is not None and archived and elapsed < 300
    assert verdict(
        10, ok,
        f"first seed with triangle violations {violating}, first non-preserved seed {broken}, "
        f"preserved {summary.preserved_fraction:.3f} in {elapsed:.1f}s, archived: {archived}",
    )


def _scm_run(tmp_path, capsys, instance, tag, method=None):
    ppm, csv = tmp_path / f"{tag}.ppm", tmp_path / f"{tag}.csv"
    argv = ["scm", str(instance), "--ppm", str(ppm), "--csv", str(csv)]
    if method:
        argv += ["--method", method]
    assert run_command(argv) == 0
    out = capsys.readouterr().out
    cols = int(next(ln.split(": ")[1] for ln in out.splitlines() if ln.startswith("occupied_columns")))
    return ppm.read_bytes() + csv.read_bytes(), cols


def test_11_figure_reproduction(verdict, tmp_path, capsys):
    inst = tmp_path / "pts.txt"
    run_command(["gen", "--kind", "random-e2d", "--n", "10", "--seed", "7", "--out", str(inst)])
    capsys.readouterr()
    full_a, full_cols = _scm_run(tmp_path, capsys, inst, "full_a")
    full_b, _ = _scm_run(tmp_path, capsys, inst, "full_b")
    red_a, red_cols = _scm_run(tmp_path, capsys, inst, "red_a", "constrained")
    red_b, _ = _scm_run(tmp_path, capsys, inst, "red_b", "constrained")
    ok = full_a == full_b and red_a == red_b and red_cols < full_cols
    assert verdict(11, ok, f"byte-identical reruns; occupied columns complete {full_cols} vs reduced {red_cols}")


def test_12_threads_determinism(verdict, tmp_path, capsys):
    e2d, gap = tmp_path / "pts.txt", tmp_path / "gap.txt"
    run_command(["gen", "--kind", "random-e2d", "--n", "9", "--seed", "2", "--out", str(e2d)])
    run_command(["gen", "--kind", "unique", "--n", "8", "--out", str(gap)])
    capsys.readouterr()
    commands = [
        ["solve", str(gap)],
        ["solve", str(e2d)],
        ["reduce", str(e2d), "--method", "constrained"],
        ["reduce", str(e2d), "--method", "delaunay"],
        ["scm", str(e2d), "--method", "constrained", "--ppm", "{d}/s.ppm", "--csv", "{d}/s.csv"],
        ["sample", str(gap), "--k", "100000", "--seed", "3", "--csv", "{d}/c.csv"],
        ["audit", str(e2d), "--k", "2000"],
        ["sweep", "containment", "--k", "50", "--csv", "{d}/w.csv"],
        ["sweep", "reducibility", "--k", "20", "--csv", "{d}/w.csv"],
        ["sweep", "preservation", "--k", "50", "--csv", "{d}/w.csv"],
        ["sweep", "hitrate", "--k", "10", "--csv", "{d}/w.csv"],
    ]
    differing = []
    for argv in commands:
        outputs = []
        for threads in ("1", "8"):
            d = tmp_path / f"t{threads}"
            d.mkdir(exist_ok=True)
            args = [a.format(d=d) for a in argv]
            threaded = args + (["--threads", threads] if argv[0] != "audit" else [])
            assert run_command(threaded) == 0
            files = sorted(p for p in d.iterdir())
            outputs.append((deterministic_part(capsys.readouterr().out), [p.read_bytes() for p in files]))
            for p in files:
                p.unlink()
        if outputs[0] != outputs[1]:
            differing.append(" ".join(argv[:2]))
    ok = not differing
    assert verdict(12, ok, f"{len(commands)} commands compared at 1 vs 8 threads; differing: {differing or 'none'}")
