"""Sorted cost matrices, solution frontiers and their pixmap rendering.

Row ``v`` of a sorted cost matrix lists the outgoing edges of ``v`` by
ascending cost (ties by neighbour label). The frontier is where a tour's
edges sit in those rows: a tour that only uses low-ranked edges gives a
short, "elongated" matrix that is cheap to check.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exact import (
    Solution,
    block_costs,
    check_guard,
    format_cost,
    tour_blocks,
    tour_edges,
)
from .instances import CostMatrix

BACKGROUND = (255, 255, 255)
SOLUTION = (0, 255, 0)
NEAR = (255, 0, 0)
GREY_LO, GREY_HI = 32, 200


@dataclass(frozen=True)
class SortedCostMatrix:
    n: int
    rows: tuple  # rows[v] = ((neighbor, cost), ...) ascending

    @property
    def mask_size(self) -> list:
        return [len(r) for r in self.rows]

    def rank(self, v: int, w: int) -> int:
        """1-based position of edge ``v -> w`` in row ``v``."""
        for k, (u, _) in enumerate(self.rows[v], start=1):
            if u == w:
                return k
        raise KeyError(f"edge {v + 1}->{w + 1} is not in the sorted cost matrix")


@dataclass(frozen=True)
class Frontier:
    ranks: tuple

    @property
    def n(self) -> int:
        return len(self.ranks)

    @property
    def elongation(self) -> float:
        return max(self.ranks) / (self.n - 1)

    @property
    def mean_rank(self) -> float:
        return sum(self.ranks) / self.n


def build_scm(cm: CostMatrix, mask=None) -> SortedCostMatrix:
    n = cm.n
    vals = cm.cost.tolist()
    rows = []
    for v in range(n):
        row = [
            (w, vals[v][w])
            for w in range(n)
            if w != v and (mask is None or mask[v][w])
        ]
        if not row:
            raise ValueError(f"isolated vertex {v + 1}")
        row.sort(key=lambda e: (e[1], e[0]))
        rows.append(tuple(row))
    return SortedCostMatrix(n, tuple(rows))


def compute_frontier(scm: SortedCostMatrix, tour: Sequence[int]) -> Frontier:
    if len(tour) != scm.n:
        raise ValueError("tour size does not match the sorted cost matrix")
    ranks = [0] * scm.n
    for v, w in tour_edges(tour):
        try:
            ranks[v] = scm.rank(v, w)
        except KeyError as exc:
            raise ValueError(f"tour edge {v + 1}->{w + 1} absent from the edge mask") from exc
    return Frontier(tuple(ranks))


def near_optimal_set(cm: CostMatrix, sol: Solution, epsilon: float = 0.05, force: bool = False) -> list:
    """Non-optimal tours costing at most ``(1 + epsilon) * opt_cost``, cheapest first."""
    check_guard(cm.n, force)
    if not sol.feasible:
        raise ValueError("solution is infeasible")
    limit = sol.opt_cost + epsilon * abs(sol.opt_cost)
    optimal = set(sol.opt_tours)
    found = []
    for block in tour_blocks(cm.n, force=force):
        costs = block_costs(cm, block)
        keep = costs <= limit
        for c, t in zip(costs[keep].tolist(), block[keep].tolist()):
            t = tuple(t)
            if t not in optimal:
                found.append((c, t))
    found.sort()
    return [t for _, t in found]


# --------------------------------------------------------------- rendering


def _tag_grid(scm: SortedCostMatrix, frontier, near):
    tags = {}
    for t in near or ():
        for v, w in tour_edges(t):
            try:
                tags[(v, scm.rank(v, w))] = "near"
            except KeyError:
                pass
    if frontier is not None:
        for v, r in enumerate(frontier.ranks):
            tags[(v, r)] = "solution"
    return tags


def scm_pixels(scm: SortedCostMatrix, frontier: Optional[Frontier] = None, near=None) -> np.ndarray:
    """RGB image of shape ``(n, n - 1, 3)``; one pixel per (vertex, rank)."""
    n = scm.n
    img = np.empty((n, n - 1, 3), dtype=np.uint8)
    img[:] = BACKGROUND
    costs = [c for row in scm.rows for _, c in row]
    lo, hi = min(costs), max(costs)
    span = hi - lo
    tags = _tag_grid(scm, frontier, near)
    for v, row in enumerate(scm.rows):
        for r, (_, c) in enumerate(row, start=1):
            tag = tags.get((v, r))
            if tag == "solution":
                img[v, r - 1] = SOLUTION
            elif tag == "near":
                img[v, r - 1] = NEAR
            else:
                t = (c - lo) / span if span > 0 else 0.0
                g = int(round(GREY_LO + (GREY_HI - GREY_LO) * t))
                img[v, r - 1] = (g, g, g)
    return img


def occupied_columns(img: np.ndarray) -> int:
    return int(np.any(np.any(img != BACKGROUND, axis=2), axis=0).sum())


def ppm_text(img: np.ndarray) -> str:
    h, w, _ = img.shape
    out = io.StringIO()
    out.write(f"P3\n{w} {h}\n255\n")
    for row in img.tolist():
        out.write("\n".join(f"{r} {g} {b}" for r, g, b in row))
        out.write("\n")
    return out.getvalue()


def render_scm(scm: SortedCostMatrix, frontier=None, near=None, path=None) -> str:
    """Write the sorted cost matrix as an ASCII ``P3`` pixmap.

    Cells are grey by cost (darker is cheaper), green on the frontier and
    red where a near-optimal tour leaves the vertex. Ranks beyond a row's
    length stay white. Returns the pixmap text.
    """
    text = ppm_text(scm_pixels(scm, frontier, near))
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def scm_csv(scm: SortedCostMatrix, frontier=None, near=None, path=None) -> str:
    tags = _tag_grid(scm, frontier, near)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "rank", "neighbor", "cost", "tag"])
    for v, row in enumerate(scm.rows):
        for r, (u, c) in enumerate(row, start=1):
            w.writerow([v + 1, r, u + 1, format_cost(c), tags.get((v, r), "plain")])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
