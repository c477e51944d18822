"""Accelerated random access: K-level unwinding plus per-rule grids.

Plain traversal visits one production per derivation level.  Here every rule
is unwound K levels ahead of time, so its expansion splits into at most 2^K
regions — rectangles for ground descendants, frames (a rectangle minus its
hole) for context descendants.  Cutting the bounding box along every region
side yields a small grid; two predecessor lookups then jump straight to the
region owning a cell, descending K levels per visit instead of one.

The predecessor structure is deliberately a thin wrapper over a sorted array
(the theoretical alternative is a word-RAM device with the same interface);
it is kept behind a tiny class so something cleverer can be swapped in.
"""

from __future__ import annotations

import json
import math
import random
import time
from bisect import bisect_left, bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .access import access_plain, access_tslp
from .geometry import GeometryTable, compute_geometry
from .grammar import (
    Grammar2D,
    InternalHoleHit,
    OutOfBounds,
    ParameterError,
    PLAIN_KINDS,
    Tslp2D,
    reachable_topo,
)


@dataclass(frozen=True)
class PredecessorSet:
    """Sorted distinct keys answering 'largest key ≤ x' queries."""

    keys: tuple[int, ...]

    def pred(self, x: int) -> int | None:
        i = bisect_right(self.keys, x)
        return self.keys[i - 1] if i else None

    def rank(self, x: int) -> int:
        """Index of the predecessor key (-1 when every key exceeds x)."""
        return bisect_right(self.keys, x) - 1

    def __len__(self) -> int:
        return len(self.keys)


def predecessor(s: PredecessorSet, x: int) -> int | None:
    """The largest key of ``s`` that is ≤ x, or None."""
    return s.pred(x)


@dataclass(frozen=True)
class FastParams:
    """Unwinding parameters derived from ε and the expansion area."""

    epsilon: float
    levels: int
    b_bound: int
    area: int

    @classmethod
    def from_area(cls, area: int, epsilon: float) -> "FastParams":
        if epsilon <= 0:
            raise ParameterError(f"epsilon must be positive, got {epsilon}")
        if area <= 2:
            k = 1
        else:
            k = max(1, math.floor((epsilon / 3.0) * math.log2(math.log2(area))))
        return cls(epsilon=epsilon, levels=k, b_bound=1 << k, area=area)


#: Region shapes inside an unwound rule's bounding box (1-based, inclusive).
#: ("rect", x1, y1, x2, y2) or ("frame", x1, y1, x2, y2, hx1, hy1, hx2, hy2).
Region = tuple


@dataclass(frozen=True)
class FrontierEntry:
    """One K-level descendant: where it sits and how coordinates shift."""

    symbol: int | None  # None for a terminal resolved during unwinding
    char: str | None
    region: Region


@dataclass(frozen=True)
class UnwoundRule:
    """The ≤ 2^K regions tiling one symbol's expansion."""

    owner: int
    frontier: tuple[FrontierEntry, ...]
    hole_region: tuple[int, int, int, int] | None


@dataclass(frozen=True)
class RuleGrid:
    """Cut lines and the cell → frontier table for one unwound rule.

    Cell values: ("T", char) resolves inline, (symbol, dx, dy) descends with
    local coordinates (x - dx, y - dy), and None marks the owner's own hole.
    """

    xs: PredecessorSet
    ys: PredecessorSet
    cells: tuple[tuple, ...]


@dataclass(frozen=True)
class FastAccessIndex:
    """Immutable query structure: one grid per reachable symbol."""

    grammar: Grammar2D
    params: FastParams
    geo: GeometryTable
    rules: dict[int, UnwoundRule]
    grids: dict[int, RuleGrid]
    cell_counts: dict[int, int] = field(repr=False, default_factory=dict)

    @property
    def total_cells(self) -> int:
        return sum(self.cell_counts.values())


def _unwind(g: Grammar2D, sym: int, geo: GeometryTable, k: int) -> UnwoundRule:
    """Truncate sym's derivation k levels down into a region tiling."""
    rules = g.rules
    H, W = geo.heights, geo.widths
    hole = geo.holes[sym]
    h, w = H[sym], W[sym]
    owner_hole = None
    if hole is not None:
        p, q, r, c = hole
        owner_hole = (r, c, r + p - 1, c + q - 1)
    entries: list[FrontierEntry] = []

    def emit(s: int, box, hole_rect) -> None:
        x1, y1, x2, y2 = box
        if hole_rect is None:
            region: Region = ("rect", x1, y1, x2, y2)
        else:
            region = ("frame", x1, y1, x2, y2, *hole_rect)
        entries.append(FrontierEntry(symbol=s, char=None, region=region))

    def walk(s: int, box, hole_rect, level: int) -> None:
        r = rules[s]
        x1, y1, x2, y2 = box
        if r.kind == "term":
            entries.append(
                FrontierEntry(symbol=None, char=r.char, region=("rect", *box))
            )
            return
        if level == k:
            emit(s, box, hole_rect)
            return
        if r.kind == "h":
            cut = y1 + W[r.left] - 1
            walk(r.left, (x1, y1, x2, cut), None, level + 1)
            walk(r.right, (x1, cut + 1, x2, y2), None, level + 1)
        elif r.kind == "v":
            cut = x1 + H[r.top] - 1
            walk(r.top, (x1, y1, cut, y2), None, level + 1)
            walk(r.bottom, (cut + 1, y1, x2, y2), None, level + 1)
        elif r.kind == "hole":
            # The bare hole is either the owner's hole or a region some
            # sibling plug branch already covers; only the ground recurses.
            if r.axis == "H":
                if r.hole_side == "first":
                    gbox = (x1, y1 + r.hole_w, x2, y2)
                else:
                    gbox = (x1, y1, x2, y2 - r.hole_w)
            else:
                if r.hole_side == "first":
                    gbox = (x1 + r.hole_h, y1, x2, y2)
                else:
                    gbox = (x1, y1, x2 - r.hole_h, y2)
            walk(r.ground, gbox, None, level + 1)
        elif r.kind == "ctxcat":
            ch, cw = H[r.ctx], W[r.ctx]
            if r.axis == "H":
                cut = y1 + (cw if r.ctx_side == "first" else W[r.ground]) - 1
                left, right = (x1, y1, x2, cut), (x1, cut + 1, x2, y2)
                cbox, gbox = (left, right) if r.ctx_side == "first" else (right, left)
            else:
                cut = x1 + (ch if r.ctx_side == "first" else H[r.ground]) - 1
                top, bot = (x1, y1, cut, y2), (cut + 1, y1, x2, y2)
                cbox, gbox = (top, bot) if r.ctx_side == "first" else (bot, top)
            walk(r.ctx, cbox, hole_rect, level + 1)
            walk(r.ground, gbox, None, level + 1)
        elif r.kind == "compose":
            p, q, hr, hc = geo.holes[r.outer]
            inner_box = (x1 + hr - 1, y1 + hc - 1, x1 + hr - 1 + p - 1, y1 + hc - 1 + q - 1)
            walk(r.outer, box, inner_box, level + 1)
            walk(r.inner, inner_box, hole_rect, level + 1)
        else:  # apply
            p, q, hr, hc = geo.holes[r.ctx]
            arg_box = (x1 + hr - 1, y1 + hc - 1, x1 + hr - 1 + p - 1, y1 + hc - 1 + q - 1)
            walk(r.ctx, box, arg_box, level + 1)
            walk(r.arg, arg_box, None, level + 1)

    walk(sym, (1, 1, h, w), owner_hole, 0)
    return UnwoundRule(owner=sym, frontier=tuple(entries), hole_region=owner_hole)


def _build_grid(rule: UnwoundRule, h: int, w: int) -> RuleGrid:
    """Cut along every region side and paint cells outermost-first."""
    xs = {1, h + 1}
    ys = {1, w + 1}
    for e in rule.frontier:
        x1, y1, x2, y2 = e.region[1:5]
        xs.update((x1, x2 + 1))
        ys.update((y1, y2 + 1))
        if e.region[0] == "frame":
            hx1, hy1, hx2, hy2 = e.region[5:]
            xs.update((hx1, hx2 + 1))
            ys.update((hy1, hy2 + 1))
    if rule.hole_region is not None:
        hx1, hy1, hx2, hy2 = rule.hole_region
        xs.update((hx1, hx2 + 1))
        ys.update((hy1, hy2 + 1))
    xlines = sorted(xs)
    ylines = sorted(ys)
    rows, cols = len(xlines) - 1, len(ylines) - 1
    cells = [[None] * cols for _ in range(rows)]

    def paint(box, value) -> None:
        x1, y1, x2, y2 = box
        for i in range(bisect_left(xlines, x1), bisect_left(xlines, x2 + 1)):
            row = cells[i]
            for j in range(bisect_left(ylines, y1), bisect_left(ylines, y2 + 1)):
                row[j] = value

    def area(e: FrontierEntry) -> int:
        x1, y1, x2, y2 = e.region[1:5]
        return (x2 - x1 + 1) * (y2 - y1 + 1)

    # Outer boxes first: nested pieces repaint the frame holes they tile.
    for e in sorted(rule.frontier, key=area, reverse=True):
        x1, y1, x2, y2 = e.region[1:5]
        if e.symbol is None:
            paint((x1, y1, x2, y2), ("T", e.char))
        else:
            paint((x1, y1, x2, y2), (e.symbol, x1 - 1, y1 - 1))
    if rule.hole_region is not None:
        paint(rule.hole_region, None)
    return RuleGrid(
        xs=PredecessorSet(tuple(xlines)),
        ys=PredecessorSet(tuple(ylines)),
        cells=tuple(tuple(row) for row in cells),
    )


def build_fast(
    t: Grammar2D | Tslp2D, epsilon: float = 3.0, geo: GeometryTable | None = None
) -> FastAccessIndex:
    """Index every reachable symbol for K-level-at-a-time descent."""
    if geo is None:
        geo = compute_geometry(t)
    area = geo.heights[t.start] * geo.widths[t.start]
    params = FastParams.from_area(area, epsilon)
    rules: dict[int, UnwoundRule] = {}
    grids: dict[int, RuleGrid] = {}
    counts: dict[int, int] = {}
    for sym in reachable_topo(t.rules, t.start):
        rule = _unwind(t, sym, geo, params.levels)
        grid = _build_grid(rule, geo.heights[sym], geo.widths[sym])
        rules[sym] = rule
        grids[sym] = grid
        counts[sym] = len(grid.cells) * (len(grid.cells[0]) if grid.cells else 0)
    return FastAccessIndex(
        grammar=t, params=params, geo=geo, rules=rules, grids=grids,
        cell_counts=counts,
    )


def access_fast(idx: FastAccessIndex, x: int, y: int) -> tuple[str, int]:
    """The character at (x, y), descending ≥ K derivation levels per visit."""
    geo = idx.geo
    start = idx.grammar.start
    h, w = geo.heights[start], geo.widths[start]
    if not (1 <= x <= h and 1 <= y <= w):
        raise OutOfBounds(f"position ({x},{y}) outside {h}x{w} expansion")
    grids = idx.grids
    sym = start
    visits = 0
    while True:
        grid = grids[sym]
        visits += 1
        cell = grid.cells[grid.xs.rank(x)][grid.ys.rank(y)]
        if cell is None:
            raise InternalHoleHit(
                f"position maps into the hole of symbol {idx.grammar.label(sym)}"
            )
        if cell[0] == "T":
            return cell[1], visits
        sym, dx, dy = cell
        x -= dx
        y -= dy


@dataclass(frozen=True)
class PathStats:
    """Visit counts and timing for one access path."""

    path: str
    mean_visits: float
    max_visits: int
    nanos_per_query: float

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "meanVisits": self.mean_visits,
            "maxVisits": self.max_visits,
            "nanosPerQuery": self.nanos_per_query,
        }


@dataclass(frozen=True)
class BenchReport:
    """Per-path aggregates over one batch of sampled positions."""

    queries: int
    seed: int
    height: int
    width: int
    paths: tuple[PathStats, ...]

    def to_dict(self) -> dict:
        return {
            "queries": self.queries,
            "seed": self.seed,
            "height": self.height,
            "width": self.width,
            "paths": [p.to_dict() for p in self.paths],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _run_path(fn, positions, threads: int) -> tuple[float, int, float]:
    if not positions:
        return 0.0, 0, 0.0
    t0 = time.perf_counter_ns()
    if threads > 1:
        chunk = (len(positions) + threads - 1) // threads
        parts = [positions[i : i + chunk] for i in range(0, len(positions), chunk)]

        def run(part):
            vs = [fn(x, y)[1] for x, y in part]
            return sum(vs), max(vs)

        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, parts))
        total = sum(s for s, _ in results)
        worst = max(m for _, m in results)
    else:
        total, worst = 0, 0
        for x, y in positions:
            v = fn(x, y)[1]
            total += v
            if v > worst:
                worst = v
    dt = time.perf_counter_ns() - t0
    return total / len(positions), worst, dt / len(positions)


def bench_access(
    g: Grammar2D | Tslp2D,
    idx: FastAccessIndex,
    queries: int,
    seed: int,
    threads: int = 1,
) -> BenchReport:
    """Time plain/tslp/fast access over the same sampled positions."""
    geo = compute_geometry(g)
    h, w = geo.dims(g.start)
    rng = random.Random(seed)
    positions = [
        (rng.randrange(1, h + 1), rng.randrange(1, w + 1)) for _ in range(queries)
    ]
    plain_ok = all(
        r is None or r.kind in PLAIN_KINDS for r in g.rules
    )

    paths = []
    if plain_ok:
        mean, worst, nanos = _run_path(
            lambda x, y: access_plain(g, x, y, geo=geo), positions, threads
        )
        paths.append(PathStats("plain", mean, worst, nanos))
    mean, worst, nanos = _run_path(
        lambda x, y: access_tslp(g, x, y, geo=geo), positions, threads
    )
    paths.append(PathStats("tslp", mean, worst, nanos))
    mean, worst, nanos = _run_path(
        lambda x, y: access_fast(idx, x, y), positions, threads
    )
    paths.append(PathStats("fast", mean, worst, nanos))
    return BenchReport(
        queries=queries, seed=seed, height=h, width=w, paths=tuple(paths)
    )
