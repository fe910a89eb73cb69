"""Uniform random search over complete cycles and the probability bookkeeping.

Sampling is split into fixed blocks of ``BLOCK`` draws. Block ``b`` of a
run seeded with ``seed`` uses ``SeedSequence(seed, spawn_key=(b,))``, so a
sample does not depend on how many workers produced it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist

import numpy as np

from .exact import block_costs, check_guard, solve_exact, tie_threshold
from .instances import CostMatrix

BLOCK = 10_000
Z95 = NormalDist().inv_cdf(0.975)


def _sample_block(n: int, size: int, seed: int, index: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    rest = rng.permuted(np.tile(np.arange(1, n, dtype=np.intp), (size, 1)), axis=1)
    out = np.zeros((size, n), dtype=np.intp)
    out[:, 1:] = rest
    return out


def sample_cycles(n: int, k: int, seed: int, workers: int = 1) -> np.ndarray:
    """``k`` uniform tours (rows, starting at vertex 0) by shuffling vertices ``1..n-1``."""
    if n < 3 or k < 1:
        raise ValueError("need n >= 3 and k >= 1")
    sizes = [min(BLOCK, k - start) for start in range(0, k, BLOCK)]

    def task(index):
        return _sample_block(n, sizes[index], seed, index)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(task, range(len(sizes))))
    else:
        blocks = [task(i) for i in range(len(sizes))]
    return np.concatenate(blocks)


def wilson_interval(hits: int, k: int, z: float = Z95):
    p = hits / k
    denom = 1 + z * z / k
    centre = (p + z * z / (2 * k)) / denom
    half = z * math.sqrt(p * (1 - p) / k + z * z / (4 * k * k)) / denom
    lo = 0.0 if hits == 0 else max(0.0, centre - half)
    hi = 1.0 if hits == k else min(1.0, centre + half)
    return lo, hi


@dataclass
class HitEstimate:
    samples: int
    hits: int
    ci_low: float
    ci_high: float
    theoretical: Fraction
    seed: int
    counts: dict = field(default_factory=dict, repr=False)

    @property
    def p_hat(self) -> float:
        return self.hits / self.samples

    @property
    def covers_theory(self) -> bool:
        return self.ci_low <= float(self.theoretical) <= self.ci_high

    def format(self) -> str:
        return "\n".join([
            f"samples: {self.samples}",
            f"hits: {self.hits}",
            f"p_hat: {self.p_hat!r}",
            f"ci_low: {self.ci_low!r}",
            f"ci_high: {self.ci_high!r}",
            f"theoretical: {self.theoretical}",
            f"theoretical_float: {float(self.theoretical)!r}",
            f"covers_theory: {str(self.covers_theory).lower()}",
        ]) + "\n"


def sample_counts(tours: np.ndarray) -> dict:
    """Number of draws per distinct tour, keyed by tuple."""
    uniq, counts = np.unique(tours, axis=0, return_counts=True)
    return {tuple(t): int(c) for t, c in zip(uniq.tolist(), counts.tolist())}


def estimate_hit_rate(
    cm: CostMatrix, k: int, seed: int, workers: int = 1, force: bool = False, solution=None
) -> HitEstimate:
    """How often a uniform random tour is optimal, against the exact rate.

    The exact rate is the number of optimal tours over ``(n-1)!``.
    """
    check_guard(cm.n, force)
    sol = solution if solution is not None else solve_exact(cm, workers=workers, force=force)
    tours = sample_cycles(cm.n, k, seed, workers)
    costs = block_costs(cm, tours)
    hits = int((costs <= tie_threshold(sol.opt_cost, cm.exact)).sum())
    lo, hi = wilson_interval(hits, k)
    theory = Fraction(len(sol.opt_tours), math.factorial(cm.n - 1))
    return HitEstimate(k, hits, lo, hi, theory, seed, sample_counts(tours))


@dataclass
class BoundsReport:
    """Exact arithmetic for a polynomial-size set of ``n**3`` cycles.

    ``n`` follows the ``n + 1`` vertex convention: the instance has
    ``n + 1`` vertices and ``n!`` cycles. ``flags`` lists every stated
    inequality that fails at this ``n``.
    """

    n: int
    pJ: Fraction
    A_star: Fraction
    lower: Fraction
    complement: Fraction
    complement_lower: Fraction
    complement_upper: Fraction
    flags: list

    @property
    def vertices(self) -> int:
        return self.n + 1

    def format(self) -> str:
        lines = [
            f"n: {self.n}",
            f"vertices: {self.vertices}",
            f"pJ: {self.pJ}",
            f"pJ_float: {float(self.pJ)!r}",
            f"A_star: {self.A_star}",
            f"A_star_float: {float(self.A_star)!r}",
            f"lower: {self.lower}",
            f"complement: {self.complement}",
            f"complement_float: {float(self.complement)!r}",
            f"complement_lower: {self.complement_lower}",
            f"complement_upper: {self.complement_upper}",
            f"flags: {len(self.flags)}",
        ]
        lines += [f"flag: {f}" for f in self.flags]
        return "\n".join(lines) + "\n"


def bounds_report(n: int) -> BoundsReport:
    if n < 4:
        raise ValueError(f"bounds need n >= 4, got {n}")
    fact = math.factorial(n)
    f3 = math.factorial(n - 3)
    pJ = Fraction(n**3, fact)
    a_star = Fraction(n * n, (n - 1) * (n - 2))
    assert pJ == a_star / f3
    lower = 1 / (a_star * f3)
    comp = 1 - pJ
    comp_lo = Fraction(f3 - 1, f3)
    comp_hi = (a_star * f3 - 1) / (a_star * f3)

    flags = []
    if pJ > 1:
        flags.append(f"pJ = {pJ} exceeds 1 and is not a probability")
    if not 1 < a_star < 8:
        flags.append(f"A_star = {a_star} outside (1, 8)")
    if not lower <= pJ:
        flags.append("lower bound 1/(A (n-3)!) <= pJ fails")
    if not pJ <= Fraction(1, fact):
        flags.append(f"pJ <= 1/n! fails ({pJ} > 1/{fact})")
    if not comp_lo <= comp:
        flags.append("complement lower bound ((n-3)!-1)/(n-3)! <= P(J^c) fails")
    if not comp <= comp_hi:
        flags.append("complement upper bound P(J^c) <= (A (n-3)!-1)/(A (n-3)!) fails")
    return BoundsReport(n, pJ, a_star, lower, comp, comp_lo, comp_hi, flags)


def counts_csv(est: HitEstimate) -> str:
    lines = ["tour,count"]
    lines += [" ".join(str(v + 1) for v in t) + f",{c}" for t, c in sorted(est.counts.items())]
    return "\n".join(lines) + "\n"
