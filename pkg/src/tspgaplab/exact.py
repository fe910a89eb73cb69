"""Exhaustive cycle enumeration and everything built directly on it.

A tour is a tuple of 0-based vertex labels starting at vertex 0; the edge
back to the start is implicit. Each directed complete cycle has exactly one
such representative, so ``n`` vertices give ``(n-1)!`` tours.

Enumeration is lexicographic in ``tour[1:]`` and is partitioned by the
second vertex. Workers handle whole partitions and results are merged by
(cost, tour), so the thread count never changes any output.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from .instances import CostMatrix

ENUM_GUARD_N = 12
# largest cycle count for which every cost is kept to decide distinctness
DISTINCT_LIMIT = math.factorial(10)
REL_TOL = 1e-9
_TABLE_K = 8


class GuardError(ValueError):
    """Raised when an exhaustive operation is asked to exceed its size guard."""


def check_guard(n: int, force: bool = False) -> None:
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if n > ENUM_GUARD_N and not force:
        raise GuardError(
            f"n={n} exceeds the enumeration guard ({ENUM_GUARD_N}); pass force=True to override"
        )


# ------------------------------------------------------------------ tours


def canonical(seq: Sequence[int]) -> tuple:
    """Rotate a closed tour so it starts at vertex 0."""
    seq = [int(v) for v in seq]
    k = seq.index(0)
    return tuple(seq[k:] + seq[:k])


def check_tour(t: Sequence[int], n: int) -> tuple:
    t = tuple(int(v) for v in t)
    if len(t) != n or sorted(t) != list(range(n)):
        raise ValueError(f"{t} is not a complete cycle on {n} vertices")
    return t


def tour_edges(t: Sequence[int]) -> list:
    return [(t[k], t[(k + 1) % len(t)]) for k in range(len(t))]


def descent_cycle(n: int) -> tuple:
    """The cycle n, n-1, ..., 1 (1-based), written from vertex 0."""
    return canonical(range(n - 1, -1, -1))


def path_cost(cm: CostMatrix, seq: Sequence[int], closed: bool = False):
    """Sum of consecutive edge costs, left to right.

    With ``closed`` the edge from the last vertex back to the first is
    added last. Returns an ``int`` for exact matrices, else a ``float``.
    """
    n = cm.n
    seq = [int(v) for v in seq]
    if len(seq) < 2:
        raise ValueError("a path needs at least two vertices")
    for v in seq:
        if not 0 <= v < n:
            raise ValueError(f"vertex {v + 1} out of range 1..{n}")
    pairs = list(zip(seq, seq[1:]))
    if closed:
        pairs.append((seq[-1], seq[0]))
    total = 0 if cm.exact else 0.0
    for a, b in pairs:
        if a == b:
            raise ValueError(f"self-loop at vertex {a + 1}")
        total += cm.cost[a, b].item()
    return total


def tour_cost(cm: CostMatrix, t: Sequence[int]):
    return path_cost(cm, t, closed=True)


# ------------------------------------------------------------ enumeration


@lru_cache(maxsize=None)
def _perm_table(k: int) -> np.ndarray:
    table = np.array(list(itertools.permutations(range(k))), dtype=np.intp)
    table.setflags(write=False)
    return table


def _blocks_with_prefix(n: int, prefix: list) -> Iterator[np.ndarray]:
    remaining = [v for v in range(n) if v not in prefix]
    if len(remaining) <= _TABLE_K:
        table = _perm_table(len(remaining))
        block = np.empty((table.shape[0], n), dtype=np.intp)
        block[:, : len(prefix)] = prefix
        block[:, len(prefix):] = np.asarray(remaining, dtype=np.intp)[table]
        yield block
    else:
        for v in remaining:
            yield from _blocks_with_prefix(n, prefix + [v])


def tour_blocks(n: int, second: Optional[int] = None, force: bool = False) -> Iterator[np.ndarray]:
    """Yield arrays of tours (one per row) in lexicographic order.

    ``second`` restricts to the partition whose tours visit ``second`` right
    after vertex 0.
    """
    check_guard(n, force)
    seconds = range(1, n) if second is None else [second]
    for s in seconds:
        yield from _blocks_with_prefix(n, [0, s])


def enumerate_cycles(n: int, force: bool = False) -> Iterator[tuple]:
    for block in tour_blocks(n, force=force):
        for row in block.tolist():
            yield tuple(row)


def block_costs(cm: CostMatrix, block: np.ndarray) -> np.ndarray:
    """Tour costs for each row, accumulated in the same order as ``tour_cost``."""
    c = cm.cost
    total = c[block[:, 0], block[:, 1]].copy()
    for k in range(1, block.shape[1] - 1):
        total += c[block[:, k], block[:, k + 1]]
    total += c[block[:, -1], block[:, 0]]
    return total


def block_feasible(mask: np.ndarray, block: np.ndarray) -> np.ndarray:
    ok = mask[block[:, -1], block[:, 0]].copy()
    for k in range(block.shape[1] - 1):
        ok &= mask[block[:, k], block[:, k + 1]]
    return ok


def tie_threshold(best, exact: bool):
    if exact:
        return best
    return best + REL_TOL * abs(best)


def distinct_values(costs: np.ndarray, exact: bool) -> bool:
    if costs.size < 2:
        return True
    s = np.sort(costs)
    if exact:
        return bool(np.all(s[1:] != s[:-1]))
    gaps = s[1:] - s[:-1]
    scale = np.maximum(np.abs(s[1:]), np.abs(s[:-1]))
    return bool(np.all(gaps > REL_TOL * scale))


# ---------------------------------------------------------------- solving


@dataclass
class Solution:
    opt_cost: object
    opt_tours: list
    distinct_costs: Optional[bool]
    cycles_evaluated: int
    feasible_cycles: int

    @property
    def feasible(self) -> bool:
        return self.opt_cost is not None

    @property
    def unique(self) -> bool:
        return len(self.opt_tours) == 1


@dataclass
class _Partial:
    evaluated: int = 0
    feasible: int = 0
    best: object = None
    candidates: list = field(default_factory=list)  # (cost, tour) pairs
    costs: list = field(default_factory=list)


def _solve_partition(cm, mask, second, keep_costs, force) -> _Partial:
    part = _Partial()
    for block in tour_blocks(cm.n, second, force):
        part.evaluated += block.shape[0]
        if mask is not None:
            block = block[block_feasible(mask, block)]
            if block.shape[0] == 0:
                continue
        costs = block_costs(cm, block)
        part.feasible += costs.size
        if keep_costs:
            part.costs.append(costs)
        low = costs.min().item()
        if part.best is None or low < part.best:
            part.best = low
        keep = costs <= tie_threshold(part.best, cm.exact)
        part.candidates.extend(zip(costs[keep].tolist(), map(tuple, block[keep].tolist())))
        thr = tie_threshold(part.best, cm.exact)
        part.candidates = [c for c in part.candidates if c[0] <= thr]
    return part


def normalize_mask(mask, n: int) -> np.ndarray:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (n, n):
        raise ValueError(f"edge mask must have shape ({n}, {n})")
    mask = mask.copy()
    np.fill_diagonal(mask, False)
    return mask


def solve_exact(
    cm: CostMatrix,
    edge_mask=None,
    workers: int = 1,
    force: bool = False,
) -> Solution:
    """Minimum-cost complete cycle by exhaustive enumeration.

    With ``edge_mask`` (boolean ``n x n``) only cycles whose every directed
    edge is allowed are considered. If none exists the returned solution has
    ``opt_cost is None``. All co-optimal tours are returned, sorted.
    """
    n = cm.n
    check_guard(n, force)
    mask = None if edge_mask is None else normalize_mask(edge_mask, n)
    keep_costs = math.factorial(n - 1) <= DISTINCT_LIMIT

    def task(second):
        return _solve_partition(cm, mask, second, keep_costs, force)

    seconds = list(range(1, n))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(task, seconds))
    else:
        parts = [task(s) for s in seconds]
    return _merge(parts, cm.exact, keep_costs)


def _merge(parts, exact: bool, keep_costs: bool) -> Solution:
    evaluated = sum(p.evaluated for p in parts)
    feasible = sum(p.feasible for p in parts)
    bests = [p.best for p in parts if p.best is not None]
    if not bests:
        return Solution(None, [], None, evaluated, 0)
    best = min(bests)
    thr = tie_threshold(best, exact)
    tours = sorted(t for p in parts for c, t in p.candidates if c <= thr)
    distinct = None
    if keep_costs:
        chunks = [c for p in parts for c in p.costs]
        distinct = distinct_values(np.concatenate(chunks), exact)
    return Solution(best, tours, distinct, evaluated, feasible)


def all_cycle_costs(cm: CostMatrix, force: bool = False) -> np.ndarray:
    """Costs of every tour, in enumeration order."""
    return np.concatenate([block_costs(cm, b) for b in tour_blocks(cm.n, force=force)])


def format_solution(sol: Solution) -> str:
    """Plain-text report: ``key: value`` lines then one 1-based tour per line."""
    lines = [
        f"feasible: {str(sol.feasible).lower()}",
        f"opt_cost: {format_cost(sol.opt_cost)}",
        f"num_opt_tours: {len(sol.opt_tours)}",
        "distinct_costs: " + ("n/a" if sol.distinct_costs is None else str(sol.distinct_costs).lower()),
        f"cycles_evaluated: {sol.cycles_evaluated}",
        f"feasible_cycles: {sol.feasible_cycles}",
    ]
    lines += [format_tour(t) for t in sol.opt_tours]
    return "\n".join(lines) + "\n"


def format_cost(c) -> str:
    if c is None:
        return "none"
    if isinstance(c, int):
        return str(c)
    return repr(float(c))


def format_tour(t: Sequence[int]) -> str:
    return " ".join(str(v + 1) for v in t)


def parse_tour(text: str, n: Optional[int] = None) -> tuple:
    """Read a tour line of 1-based labels; returns the canonical 0-based tour."""
    toks = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(toks) != 1:
        raise ValueError("tour text must hold exactly one line of labels")
    try:
        seq = [int(tok) - 1 for tok in toks[0].split()]
    except ValueError:
        raise ValueError("tour labels must be integers") from None
    check_tour(seq, len(seq) if n is None else n)
    return canonical(seq)


# -------------------------------------------------------------- relabeling


@dataclass(frozen=True, eq=False)
class VertexRelabeling:
    """Bijection ``i -> forward[i]`` on 0-based vertex labels."""

    forward: np.ndarray

    def __post_init__(self):
        fwd = np.array(self.forward, dtype=np.intp)
        if sorted(fwd.tolist()) != list(range(fwd.size)):
            raise ValueError("relabeling must be a bijection")
        fwd.setflags(write=False)
        object.__setattr__(self, "forward", fwd)

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.forward)
        inv[self.forward] = np.arange(self.forward.size)
        return inv

    def __call__(self, v: int) -> int:
        return int(self.forward[v])

    def __eq__(self, other):
        return isinstance(other, VertexRelabeling) and np.array_equal(self.forward, other.forward)

    def apply_to_tour(self, t: Sequence[int]) -> tuple:
        return canonical(self.forward[list(t)].tolist())


def relabel_to_descent(t: Sequence[int], n: int) -> VertexRelabeling:
    """The unique relabeling taking ``t`` to the descent cycle n, n-1, ..., 1.

    The k-th vertex of ``t`` (counting from 1) gets label ``n - k + 1``.
    """
    t = check_tour(t, n)
    fwd = np.empty(n, dtype=np.intp)
    fwd[list(t)] = np.arange(n - 1, -1, -1)
    return VertexRelabeling(fwd)


def apply_relabeling(cm: CostMatrix, m: VertexRelabeling) -> CostMatrix:
    """Matrix with ``new[m(i), m(j)] == old[i, j]``."""
    if m.forward.size != cm.n:
        raise ValueError("relabeling size does not match the instance")
    inv = m.inverse
    return CostMatrix(cm.cost[np.ix_(inv, inv)], exact=cm.exact)


# ------------------------------------------------------- coincident edges


def coincident_edge_count(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ValueError("tours must have the same length")
    return len(set(tour_edges(a)) & set(tour_edges(b)))


def max_coincidence(n: int, force: bool = False) -> int:
    """Largest number of shared directed edges over all pairs of distinct tours."""
    check_guard(n, force)
    tours = np.concatenate(list(tour_blocks(n, force=force)))
    succ = np.empty_like(tours)
    rows = np.arange(tours.shape[0])[:, None]
    succ[rows, tours] = np.roll(tours, -1, axis=1)
    best = 0
    for i in range(succ.shape[0] - 1):
        shared = (succ[i + 1:] == succ[i]).sum(axis=1)
        best = max(best, int(shared.max()))
    return best


# ------------------------------------------------------------ monotonicity


@dataclass
class MonotonicityReport:
    """Result of comparing paths against their endpoint-preserving subsequences.

    A violation is a pair where the shorter path ``p1`` costs more than
    the longer ``p2`` it was cut from.
    """

    pairs_checked: int
    violations: int
    exhaustive: bool
    counterexample: Optional[tuple] = None  # (p1, p2, cost1, cost2)


def _violates(c1, c2, exact: bool) -> bool:
    if exact:
        return c1 > c2
    return c1 > c2 + REL_TOL * max(abs(c1), abs(c2))


def _subsequence_pairs_exhaustive(n):
    for length in range(3, n + 1):
        inner = length - 2
        for p2 in itertools.permutations(range(n), length):
            for drop in range(1, 2**inner):
                kept = [p2[k + 1] for k in range(inner) if not drop >> k & 1]
                yield (p2[0], *kept, p2[-1]), p2


def _subsequence_pairs_sampled(n, trials, seed):
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        length = int(rng.integers(3, n + 1))
        p2 = tuple(rng.permutation(n)[:length].tolist())
        inner = length - 2
        drop = int(rng.integers(1, 2**inner))
        kept = [p2[k + 1] for k in range(inner) if not drop >> k & 1]
        yield (p2[0], *kept, p2[-1]), p2


def monotonicity_check(
    cm: CostMatrix,
    trials: int = 10000,
    seed: int = 0,
    exhaustive: Optional[bool] = None,
    stop_at_first: bool = False,
) -> MonotonicityReport:
    """Search for a path that gets cheaper when interior vertices are added.

    Exhaustive over all paths when ``n <= 7`` (unless told otherwise);
    otherwise ``trials`` random pairs drawn with ``seed``.
    """
    n = cm.n
    if exhaustive is None:
        exhaustive = n <= 7
    pairs = (
        _subsequence_pairs_exhaustive(n)
        if exhaustive
        else _subsequence_pairs_sampled(n, trials, seed)
    )
    c = cm.cost.tolist()

    def cost(p):
        total = 0 if cm.exact else 0.0
        for a, b in zip(p, p[1:]):
            total += c[a][b]
        return total

    checked = violations = 0
    first = None
    for p1, p2 in pairs:
        checked += 1
        c1, c2 = cost(p1), cost(p2)
        if _violates(c1, c2, cm.exact):
            violations += 1
            if first is None:
                first = (p1, p2, c1, c2)
                if stop_at_first:
                    break
    return MonotonicityReport(checked, violations, exhaustive, first)
