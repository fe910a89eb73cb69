"""Gluing a Euclidean block and a general block into one larger instance.

Block A occupies vertices ``0..n-1`` and block B ``n..n+m-1``. Costs inside
each block are copied verbatim; every cross edge is drawn uniformly from
``[lo, hi]`` with ``default_rng(seed)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .exact import Solution, format_cost, solve_exact, tour_edges
from .instances import CostMatrix, InstanceError, PointSet, as_costs
from .reduction import triangle_audit


@dataclass(frozen=True)
class Composition:
    cm: CostMatrix
    block_a: range
    block_b: range
    fill_seed: int
    fill_range: tuple

    def block(self, which: str) -> CostMatrix:
        r = self.block_a if which == "a" else self.block_b
        return CostMatrix(self.cm.cost[r.start:r.stop, r.start:r.stop], exact=False)


def default_fill_range(a: CostMatrix, b: CostMatrix) -> tuple:
    """``[0, largest within-block cost]``."""
    top = max(a.off_diagonal().max().item(), b.off_diagonal().max().item())
    return 0.0, float(top)


def compose_instances(
    a: Union[PointSet, CostMatrix],
    b: CostMatrix,
    seed: int,
    lo: Optional[float] = None,
    hi: Optional[float] = None,
) -> Composition:
    ca, cb = as_costs(a), as_costs(b)
    if lo is None or hi is None:
        dlo, dhi = default_fill_range(ca, cb)
        lo = dlo if lo is None else lo
        hi = dhi if hi is None else hi
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise InstanceError(f"invalid fill range [{lo}, {hi}]")
    n, m = ca.n, cb.n
    rng = np.random.default_rng(seed)
    cost = rng.uniform(lo, hi, size=(n + m, n + m))
    cost[:n, :n] = ca.cost
    cost[n:, n:] = cb.cost
    return Composition(CostMatrix(cost), range(0, n), range(n, n + m), seed, (lo, hi))


@dataclass
class PreservationReport:
    """Whether block A's own optimal cycle survives inside the composed optimum.

    It survives when all but one of its edges (taken in either direction
    for a symmetric block) are edges of the composed optimum.
    """

    seed: int
    composed_opt: Solution
    sub_preserved: bool
    triangle_violations: int
    shared_edges: int


def block_preserved(block_tours, composed_tour, offset: int = 0) -> tuple:
    """(preserved, best shared edge count) over all optimal tours of the block."""
    composed = set(tour_edges(composed_tour))
    best = 0
    for t in block_tours:
        edges = [(u + offset, v + offset) for u, v in tour_edges(t)]
        best = max(best, sum(e in composed for e in edges))
    size = len(block_tours[0])
    return best >= size - 1, best


@dataclass
class PreservationSummary:
    reports: list
    block_opt: Solution

    @property
    def preserved_fraction(self) -> float:
        return sum(r.sub_preserved for r in self.reports) / len(self.reports)

    @property
    def first_broken_seed(self) -> Optional[int]:
        return next((r.seed for r in self.reports if not r.sub_preserved), None)

    @property
    def first_violating_seed(self) -> Optional[int]:
        return next((r.seed for r in self.reports if r.triangle_violations > 0), None)

    def format(self) -> str:
        broken = self.first_broken_seed
        violating = self.first_violating_seed
        return "\n".join([
            f"seeds: {len(self.reports)}",
            f"block_opt_cost: {format_cost(self.block_opt.opt_cost)}",
            f"preserved: {sum(r.sub_preserved for r in self.reports)}",
            f"preserved_fraction: {self.preserved_fraction!r}",
            f"first_non_preserved_seed: {'none' if broken is None else broken}",
            f"with_triangle_violations: {sum(r.triangle_violations > 0 for r in self.reports)}",
            f"first_violating_seed: {'none' if violating is None else violating}",
        ]) + "\n"

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed", "composed_opt_cost", "sub_preserved", "triangle_violations"])
        for r in self.reports:
            w.writerow([r.seed, format_cost(r.composed_opt.opt_cost), str(r.sub_preserved).lower(), r.triangle_violations])
        return buf.getvalue()


def preservation_search(a, b, seeds, lo=None, hi=None, workers: int = 1, force: bool = False) -> PreservationSummary:
    """Solve one composition per seed and record whether block A's optimum survives."""
    ca = as_costs(a)
    block_opt = solve_exact(ca, workers=workers, force=force)
    reports = []
    for seed in seeds:
        comp = compose_instances(a, b, seed, lo, hi)
        sol = solve_exact(comp.cm, workers=workers, force=force)
        kept, shared = block_preserved(block_opt.opt_tours, sol.opt_tours[0])
        audit = triangle_audit(comp.cm, max_witnesses=0)
        reports.append(PreservationReport(seed, sol, kept, audit.violations, shared))
    return PreservationSummary(reports, block_opt)
