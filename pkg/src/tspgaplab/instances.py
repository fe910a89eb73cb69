"""Instance model, generators and the line-oriented instance file format.

Two instance kinds are supported:

* ``gap``: an arbitrary directed cost matrix on ``n`` vertices.
* ``e2d``: planar points whose costs are Euclidean distances.

Vertices are 0-based inside the library and 1-based in every file and
report. The diagonal of a cost matrix is not an edge; it is stored as 0
and never read by any cost evaluation. Files spell it ``inf``.

All randomness uses numpy's ``default_rng`` (PCG64) seeded explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

# n**(n-1) * (n-1) and every tour sum stay inside int64 up to this n
UNIQUE_GAP_MAX_N = 15


class InstanceError(ValueError):
    """Raised for invalid instance data."""


class ParseError(InstanceError):
    """Raised for malformed instance text. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Directed edge costs of a complete graph on ``n`` vertices.

    ``cost`` is int64 when ``exact`` is set, float64 otherwise.
    """

    cost: np.ndarray
    exact: bool = False

    def __post_init__(self):
        raw = np.array(self.cost)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
            raise InstanceError("cost matrix must be square")
        if raw.shape[0] < 3:
            raise InstanceError("need at least 3 vertices")
        if raw.dtype.kind not in "iuf":
            raise InstanceError("costs must be numeric")
        raw = raw.copy()
        np.fill_diagonal(raw, 0)
        if raw.dtype.kind == "f" and not np.all(np.isfinite(raw)):
            raise InstanceError("off-diagonal costs must be finite")
        if self.exact:
            cost = raw.astype(np.int64)
            if not np.array_equal(cost, raw):
                raise InstanceError("exact costs must be integers")
        else:
            cost = raw.astype(np.float64)
        cost.setflags(write=False)
        object.__setattr__(self, "cost", cost)

    @property
    def n(self) -> int:
        return self.cost.shape[0]

    def __eq__(self, other):
        if not isinstance(other, CostMatrix):
            return NotImplemented
        return self.exact == other.exact and np.array_equal(self.cost, other.cost)

    def __repr__(self):
        return f"CostMatrix(n={self.n}, exact={self.exact})"

    def off_diagonal(self) -> np.ndarray:
        return self.cost[~np.eye(self.n, dtype=bool)]

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.cost, self.cost.T))


@dataclass(frozen=True, eq=False)
class PointSet:
    """Pairwise distinct planar points, shape ``(n, 2)``."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InstanceError("points must have shape (n, 2)")
        if pts.shape[0] < 3:
            raise InstanceError("need at least 3 points")
        if not np.all(np.isfinite(pts)):
            raise InstanceError("coordinates must be finite")
        dup = _first_duplicate(pts)
        if dup is not None:
            raise InstanceError(f"duplicate points {dup[0] + 1} and {dup[1] + 1}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    def __repr__(self):
        return f"PointSet(n={self.n})"


def _first_duplicate(pts):
    seen = {}
    for i, (x, y) in enumerate(pts.tolist()):
        key = (x + 0.0, y + 0.0)  # folds -0.0 into 0.0
        if key in seen:
            return seen[key], i
        seen[key] = i
    return None


@dataclass(frozen=True)
class InstanceFile:
    kind: str
    payload: Union[CostMatrix, PointSet]
    provenance: str = ""

    def __post_init__(self):
        expected = {"gap": CostMatrix, "e2d": PointSet}.get(self.kind)
        if expected is None:
            raise InstanceError(f"unknown instance kind {self.kind!r}")
        if not isinstance(self.payload, expected):
            raise InstanceError(f"kind {self.kind!r} needs a {expected.__name__}")

    def costs(self) -> CostMatrix:
        if self.kind == "e2d":
            return points_to_costs(self.payload)
        return self.payload


def as_costs(obj) -> CostMatrix:
    """Coerce a CostMatrix, PointSet or InstanceFile to a CostMatrix."""
    if isinstance(obj, InstanceFile):
        return obj.costs()
    if isinstance(obj, PointSet):
        return points_to_costs(obj)
    if isinstance(obj, CostMatrix):
        return obj
    raise TypeError(f"cannot derive costs from {type(obj).__name__}")


# ---------------------------------------------------------------- generators


def points_to_costs(ps: PointSet) -> CostMatrix:
    diff = ps.points[:, None, :] - ps.points[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    return CostMatrix(dist)


def gen_unique_gap(n: int) -> CostMatrix:
    """Row ``i`` (1-based) holds ``n**(i-1) * r`` for ranks ``r = 1..n-1``.

    Every complete cycle of this matrix has a distinct cost, so the optimum
    is unique.
    """
    if not 3 <= n <= UNIQUE_GAP_MAX_N:
        raise InstanceError(f"gen_unique_gap needs 3 <= n <= {UNIQUE_GAP_MAX_N}, got {n}")
    cost = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        scale = n**i
        for j in range(n):
            if j != i:
                rank = j + 1 if j < i else j
                cost[i, j] = scale * rank
    return CostMatrix(cost, exact=True)


def gen_random_gap(n: int, seed: int, lo: float = 0.0, hi: float = 1.0) -> CostMatrix:
    if n < 3:
        raise InstanceError("need at least 3 vertices")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise InstanceError(f"invalid cost range [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    return CostMatrix(rng.uniform(lo, hi, size=(n, n)))


def gen_random_points(n: int, seed: int, box=(0.0, 0.0, 1.0, 1.0)) -> PointSet:
    """``n`` distinct points uniform in ``box = (xmin, ymin, xmax, ymax)``."""
    if n < 3:
        raise InstanceError("need at least 3 points")
    xmin, ymin, xmax, ymax = map(float, box)
    if not (xmin < xmax and ymin < ymax):
        raise InstanceError(f"degenerate box {box}")
    rng = np.random.default_rng(seed)
    pts = []
    seen = set()
    while len(pts) < n:
        p = (float(rng.uniform(xmin, xmax)), float(rng.uniform(ymin, ymax)))
        if p not in seen:
            seen.add(p)
            pts.append(p)
    return PointSet(np.array(pts))


# ---------------------------------------------------------------- text format


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def serialize_instance(inst: InstanceFile) -> str:
    lines = []
    if inst.provenance:
        lines.append(f"# provenance: {inst.provenance}")
    p = inst.payload
    lines.append(f"{inst.kind} {p.n}")
    if inst.kind == "gap":
        vals = p.cost.tolist()
        for i, row in enumerate(vals):
            lines.append(" ".join("inf" if j == i else _fmt(v) for j, v in enumerate(row)))
    else:
        for x, y in p.points.tolist():
            lines.append(f"{_fmt(x)} {_fmt(y)}")
    return "\n".join(lines) + "\n"


def _number(tok: str, lineno: int):
    try:
        return int(tok), True
    except ValueError:
        pass
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"non-numeric entry {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise ParseError(f"entry {tok!r} must be finite", lineno)
    return v, False


def parse_instance(text: str) -> InstanceFile:
    provenance = ""
    body = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tag = line[1:].strip()
            if tag.startswith("provenance:"):
                provenance = tag[len("provenance:"):].strip()
            continue
        body.append((lineno, line.split()))
    if not body:
        raise ParseError("empty instance")

    lineno, header = body[0]
    if len(header) != 2 or header[0] not in ("gap", "e2d"):
        raise ParseError("header must be 'gap <n>' or 'e2d <n>'", lineno)
    kind = header[0]
    try:
        n = int(header[1])
    except ValueError:
        raise ParseError(f"bad vertex count {header[1]!r}", lineno) from None
    if n < 3:
        raise ParseError(f"n must be >= 3, got {n}", lineno)
    rows = body[1:]
    if len(rows) != n:
        last = rows[-1][0] if rows else lineno
        raise ParseError(f"expected {n} data lines, found {len(rows)}", last)

    if kind == "gap":
        cost = [[0] * n for _ in range(n)]
        exact = True
        for i, (ln, toks) in enumerate(rows):
            if len(toks) != n:
                raise ParseError(f"expected {n} entries, found {len(toks)}", ln)
            for j, tok in enumerate(toks):
                if j == i:
                    if tok.lower() != "inf":
                        raise ParseError("diagonal must be inf", ln)
                    continue
                if tok.lower().lstrip("+-") in ("inf", "infinity", "nan"):
                    raise ParseError("off-diagonal entries must be finite", ln)
                v, is_int = _number(tok, ln)
                exact = exact and is_int
                cost[i][j] = v
        if exact and max(abs(v) for row in cost for v in row) >= 2**62:
            exact = False
        payload = CostMatrix(np.array(cost, dtype=np.int64 if exact else np.float64), exact=exact)
    else:
        pts = []
        seen = {}
        for ln, toks in rows:
            if len(toks) != 2:
                raise ParseError("expected '<x> <y>'", ln)
            x, _ = _number(toks[0], ln)
            y, _ = _number(toks[1], ln)
            key = (float(x) + 0.0, float(y) + 0.0)
            if key in seen:
                raise ParseError(f"duplicate point (same as line {seen[key]})", ln)
            seen[key] = ln
            pts.append(key)
        payload = PointSet(np.array(pts))
    return InstanceFile(kind, payload, provenance)


def read_instance(path) -> InstanceFile:
    with open(path) as fh:
        return parse_instance(fh.read())


def write_instance(inst: InstanceFile, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_instance(inst))
