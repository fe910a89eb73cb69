"""``tspgaplab`` command line.

Every subcommand prints a ``key: value`` report to stdout. ``--out`` writes
the main artifact: the instance for ``gen`` and ``compose``, the
triangulation for ``reduce``, and a copy of the report otherwise.

Exit codes: 0 success, 1 other failure, 2 usage, 3 missing file,
4 invalid input, 5 enumeration guard exceeded.
"""

from __future__ import annotations

import argparse
import shlex
import sys
import time
from dataclasses import dataclass, field
from typing import Optional


from . import compose as cmp
from . import exact, reduction, scm, stochastic
from .instances import (
    InstanceError,
    InstanceFile,
    gen_random_gap,
    gen_random_points,
    gen_unique_gap,
    read_instance,
    write_instance,
)
from .svg import render_svg

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_MISSING, EXIT_INVALID, EXIT_GUARD = 0, 1, 2, 3, 4, 5


@dataclass
class RunReport:
    command: str
    payload: str
    seeds: list = field(default_factory=list)
    provenance: str = ""
    elapsed: float = 0.0

    def text(self) -> str:
        lines = [f"command: {self.command}"]
        if self.seeds:
            lines.append("seed: " + " ".join(str(s) for s in self.seeds))
        if self.provenance:
            lines.append(f"provenance: {self.provenance}")
        lines.append(f"elapsed_seconds: {self.elapsed:.6f}")
        return "\n".join(lines) + "\n" + self.payload


def write_report(rr: RunReport, path) -> None:
    with open(path, "w") as fh:
        fh.write(rr.text())


def deterministic_part(report_text: str) -> str:
    """Report text without the lines allowed to vary between identical runs."""
    skip = ("command:", "elapsed_seconds:")
    return "".join(ln for ln in report_text.splitlines(True) if not ln.startswith(skip))


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _load(path) -> InstanceFile:
    return read_instance(path)


def _load_tour(path, n):
    with open(path) as fh:
        return exact.parse_tour(fh.read(), n)


def _load_mask(path, n):
    with open(path) as fh:
        tr = reduction.parse_triangulation(fh.read())
    return reduction.restrict_to_edges(n, tr)


# ------------------------------------------------------------- subcommands


def cmd_gen(args):
    if args.kind == "unique":
        inst = InstanceFile("gap", gen_unique_gap(args.n), f"unique n={args.n}")
        seeds = []
    elif args.kind == "random-gap":
        lo, hi = _range(args, 0.0, 1.0)
        inst = InstanceFile("gap", gen_random_gap(args.n, args.seed, lo, hi),
                            f"random-gap n={args.n} seed={args.seed} lo={lo!r} hi={hi!r}")
        seeds = [args.seed]
    else:
        inst = InstanceFile("e2d", gen_random_points(args.n, args.seed),
                            f"random-e2d n={args.n} seed={args.seed}")
        seeds = [args.seed]
    if args.out:
        write_instance(inst, args.out)
    payload = f"kind: {inst.kind}\nn: {inst.payload.n}\n"
    if args.out:
        payload += f"written: {args.out}\n"
    return RunReport("", payload, seeds, inst.provenance), False


def _range(args, lo, hi):
    return (lo if args.lo is None else args.lo), (hi if args.hi is None else args.hi)


def cmd_solve(args):
    inst = _load(args.file)
    cm = inst.costs()
    mask = _load_mask(args.mask, cm.n) if args.mask else None
    sol = exact.solve_exact(cm, mask, workers=args.threads, force=args.force)
    if args.csv:
        lines = ["tour,cost"]
        lines += [f"{exact.format_tour(t)},{exact.format_cost(exact.tour_cost(cm, t))}" for t in sol.opt_tours]
        _write(args.csv, "\n".join(lines) + "\n")
    return RunReport("", exact.format_solution(sol), [], inst.provenance), True


def cmd_reduce(args):
    inst = _load(args.file)
    if inst.kind != "e2d":
        raise InstanceError("reduce needs an e2d instance")
    ps = inst.payload
    tour = _load_tour(args.tour, ps.n) if args.tour else None
    res = reduction.reduce_and_resolve(ps, args.method, tour, workers=args.threads)
    reference = tour if tour is not None else res.full.opt_tours[0]
    if args.out:
        _write(args.out, reduction.serialize_triangulation(res.tri))
    if args.svg:
        render_svg(ps, res.tri, reference, args.svg)
    n = ps.n
    payload = "\n".join([
        f"method: {args.method}",
        f"edges: {len(res.tri.edges)}",
        f"directed_mask_edges: {2 * len(res.tri.edges)}",
        f"complete_edges: {n * (n - 1)}",
        f"jittered: {str(res.tri.jittered).lower()}",
        f"jitter_seed: {'none' if res.tri.jitter_seed is None else res.tri.jitter_seed}",
        f"tour: {exact.format_tour(reference)}",
        f"contained: {str(res.contained).lower()}",
        f"full_opt_cost: {exact.format_cost(res.full.opt_cost)}",
        f"reduced_opt_cost: {exact.format_cost(res.restricted.opt_cost)}",
        f"reduced_feasible_cycles: {res.restricted.feasible_cycles}",
        f"same_opt_cost: {str(res.same_cost).lower()}",
    ]) + "\n"
    return RunReport("", payload, [], inst.provenance), False


def cmd_scm(args):
    inst = _load(args.file)
    cm = inst.costs()
    mask = None
    label = "complete"
    if args.mask:
        mask = _load_mask(args.mask, cm.n)
        label = f"mask {args.mask}"
    elif args.method:
        if inst.kind != "e2d":
            raise InstanceError("--method needs an e2d instance")
        res = reduction.reduce_and_resolve(inst.payload, args.method, workers=args.threads)
        mask = reduction.restrict_to_edges(cm, res.tri)
        label = args.method
    sol = exact.solve_exact(cm, workers=args.threads, force=args.force)
    tour = _load_tour(args.tour, cm.n) if args.tour else sol.opt_tours[0]
    table = scm.build_scm(cm, mask)
    near = scm.near_optimal_set(cm, sol, args.eps, force=args.force)
    try:
        frontier = scm.compute_frontier(table, tour)
    except ValueError:
        frontier = None
    img = scm.scm_pixels(table, frontier, near)
    if args.ppm:
        _write(args.ppm, scm.ppm_text(img))
    if args.csv:
        scm.scm_csv(table, frontier, near, args.csv)
    lines = [
        f"graph: {label}",
        f"tour: {exact.format_tour(tour)}",
        f"max_row_length: {max(table.mask_size)}",
        f"occupied_columns: {scm.occupied_columns(img)}",
        f"near_optimal_tours: {len(near)}",
        f"epsilon: {args.eps!r}",
    ]
    if frontier is None:
        lines.append("frontier: absent (tour edge outside the mask)")
    else:
        lines += [
            "frontier: " + " ".join(str(r) for r in frontier.ranks),
            f"elongation: {frontier.elongation!r}",
            f"mean_rank: {frontier.mean_rank!r}",
        ]
    return RunReport("", "\n".join(lines) + "\n", [], inst.provenance), True


def cmd_sample(args):
    inst = _load(args.file)
    est = stochastic.estimate_hit_rate(inst.costs(), args.k, args.seed, workers=args.threads, force=args.force)
    if args.csv:
        _write(args.csv, stochastic.counts_csv(est))
    return RunReport("", est.format(), [args.seed], inst.provenance), True


def cmd_compose(args):
    if args.files and len(args.files) != 2:
        raise InstanceError("compose takes either two instance files or none")
    if args.files:
        a, b = (_load(f) for f in args.files)
        if b.kind != "gap":
            raise InstanceError("second compose block must be a gap instance")
        block_a, block_b = a.payload, b.payload
        source = f"{args.files[0]} + {args.files[1]}"
    else:
        block_a = gen_random_points(args.n, args.seed)
        block_b = gen_random_gap(args.m, args.seed + 1)
        source = f"random-e2d n={args.n} seed={args.seed} + random-gap m={args.m} seed={args.seed + 1}"
    comp = cmp.compose_instances(block_a, block_b, args.seed, args.lo, args.hi)
    lo, hi = comp.fill_range
    prov = f"compose {source} fill_seed={args.seed} lo={lo!r} hi={hi!r}"
    if args.out:
        write_instance(InstanceFile("gap", comp.cm, prov), args.out)
    audit = reduction.triangle_audit(comp.cm)
    n, m = len(comp.block_a), len(comp.block_b)
    payload = "\n".join([
        f"n: {n}",
        f"m: {m}",
        f"total_edges: {(n + m) * (n + m - 1)}",
        f"inherited_edges: {n * (n - 1) + m * (m - 1)}",
        f"random_edges: {2 * n * m}",
        f"fill_lo: {lo!r}",
        f"fill_hi: {hi!r}",
        f"triangle_violations: {audit.violations}",
    ]) + "\n"
    return RunReport("", payload, [args.seed], prov), False


def cmd_audit(args):
    inst = _load(args.file)
    cm = inst.costs()
    audit = reduction.triangle_audit(cm)
    mono = exact.monotonicity_check(cm, trials=args.k, seed=args.seed)
    lines = [
        f"triples_checked: {audit.triples_checked}",
        f"violations: {audit.violations}",
        f"worst_ratio: {audit.worst_ratio!r}",
    ]
    for i, k, j, direct, hop in audit.witnesses:
        lines.append(f"witness: {i + 1} {k + 1} {j + 1} {exact.format_cost(direct)} > {exact.format_cost(hop)}")
    lines += [
        f"monotonicity_mode: {'exhaustive' if mono.exhaustive else 'sampled'}",
        f"monotonicity_pairs: {mono.pairs_checked}",
        f"monotonicity_violations: {mono.violations}",
    ]
    if mono.counterexample:
        p1, p2, c1, c2 = mono.counterexample
        lines.append(
            f"counterexample: ({exact.format_tour(p1)}) cost {exact.format_cost(c1)} > "
            f"({exact.format_tour(p2)}) cost {exact.format_cost(c2)}"
        )
    seeds = [] if mono.exhaustive else [args.seed]
    return RunReport("", "\n".join(lines) + "\n", seeds, inst.provenance), True


SWEEP_DEFAULT_N = {"containment": 9, "reducibility": 8, "preservation": 4, "hitrate": 5}


def cmd_sweep(args):
    if args.n is None:
        args.n = SWEEP_DEFAULT_N[args.experiment]
    seeds = list(range(args.seed, args.seed + args.k))
    if args.experiment == "containment":
        batch = reduction.delaunay_containment_batch(args.n, seeds, workers=args.threads)
        payload = "experiment: delaunay containment\n" + batch.format()
        rows = ["seed,contained"] + [f"{s},{str(c).lower()}" for s, c in zip(batch.seeds, batch.contained)]
        csv_text = "\n".join(rows) + "\n"
    elif args.experiment == "reducibility":
        rows = ["seed,n,contained,full_opt_cost,reduced_opt_cost,same_opt_cost"]
        ok = 0
        for s in seeds:
            res = reduction.reduce_and_resolve(gen_random_points(args.n, s), "constrained", workers=args.threads)
            ok += res.contained and res.same_cost
            rows.append(",".join([
                str(s), str(args.n), str(res.contained).lower(),
                exact.format_cost(res.full.opt_cost), exact.format_cost(res.restricted.opt_cost),
                str(res.same_cost).lower(),
            ]))
        payload = f"experiment: constrained reducibility\nn: {args.n}\nseeds: {len(seeds)}\npreserved: {ok}\n"
        csv_text = "\n".join(rows) + "\n"
    elif args.experiment == "preservation":
        a = gen_random_points(args.n, args.seed)
        b = gen_random_gap(args.m, args.seed + 1)
        summary = cmp.preservation_search(a, b, seeds, args.lo, args.hi, workers=args.threads, force=args.force)
        payload = "experiment: preservation\n" + summary.format()
        csv_text = summary.csv()
    else:
        cm = gen_unique_gap(args.n)
        sol = exact.solve_exact(cm, workers=args.threads, force=args.force)
        rows = ["seed,hits,ci_low,ci_high,covers_theory"]
        covered = 0
        for s in seeds:
            est = stochastic.estimate_hit_rate(cm, args.samples, s, workers=args.threads, solution=sol)
            covered += est.covers_theory
            rows.append(f"{s},{est.hits},{est.ci_low!r},{est.ci_high!r},{str(est.covers_theory).lower()}")
        payload = (
            f"experiment: hit rate\nn: {args.n}\nsamples_per_seed: {args.samples}\n"
            f"theoretical: {est.theoretical}\nseeds: {len(seeds)}\ncovered: {covered}\n"
        )
        csv_text = "\n".join(rows) + "\n"
    if args.csv:
        _write(args.csv, csv_text)
    return RunReport("", payload, seeds[:1] + seeds[-1:], ""), True


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tspgaplab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, threads=True):
        if threads:
            sp.add_argument("--threads", type=int, default=1)
            sp.add_argument("--force", action="store_true", help="override the enumeration guard")
        sp.add_argument("--out")

    sp = sub.add_parser("gen", help="generate an instance")
    sp.add_argument("--kind", choices=["unique", "random-gap", "random-e2d"], required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--lo", type=float)
    sp.add_argument("--hi", type=float)
    common(sp, threads=False)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("solve", help="exhaustive optimum")
    sp.add_argument("file")
    sp.add_argument("--mask", help="triangulation file restricting the edges")
    sp.add_argument("--csv")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("reduce", help="triangle reduction and restricted re-solve")
    sp.add_argument("file")
    sp.add_argument("--method", choices=["delaunay", "constrained"], default="constrained")
    sp.add_argument("--tour")
    sp.add_argument("--svg")
    common(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("scm", help="sorted cost matrix, frontier and pixmap")
    sp.add_argument("file")
    sp.add_argument("--method", choices=["delaunay", "constrained"])
    sp.add_argument("--mask")
    sp.add_argument("--tour")
    sp.add_argument("--eps", type=float, default=0.05)
    sp.add_argument("--ppm")
    sp.add_argument("--csv")
    common(sp)
    sp.set_defaults(func=cmd_scm)

    sp = sub.add_parser("sample", help="uniform random search hit rate")
    sp.add_argument("file")
    sp.add_argument("--k", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv")
    common(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("compose", help="glue an e2d block and a gap block")
    sp.add_argument("files", nargs="*")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--m", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--lo", type=float)
    sp.add_argument("--hi", type=float)
    common(sp, threads=False)
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("audit", help="triangle inequality and monotonicity audit")
    sp.add_argument("file")
    sp.add_argument("--k", type=int, default=10_000, help="monotonicity samples when n > 7")
    sp.add_argument("--seed", type=int, default=0)
    common(sp, threads=False)
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("sweep", help="batch experiments over consecutive seeds")
    sp.add_argument("experiment", choices=["containment", "reducibility", "preservation", "hitrate"])
    sp.add_argument("--n", type=int, help="instance size (default depends on the experiment)")
    sp.add_argument("--m", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0, help="first seed")
    sp.add_argument("--k", type=int, default=200, help="number of seeds")
    sp.add_argument("--samples", type=int, default=100_000, help="draws per seed (hitrate)")
    sp.add_argument("--lo", type=float)
    sp.add_argument("--hi", type=float)
    sp.add_argument("--csv")
    common(sp)
    sp.set_defaults(func=cmd_sweep)
    return p


def run_command(argv: Optional[list] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        report, copy_to_out = args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_MISSING
    except exact.GuardError as exc:
        print(f"error: guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report.command = "tspgaplab " + shlex.join(argv)
    report.elapsed = time.perf_counter() - start
    text = report.text()
    sys.stdout.write(text)
    if copy_to_out and args.out:
        write_report(report, args.out)
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
