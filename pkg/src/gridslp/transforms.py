"""Structure-preserving transforms on plain grammars.

The workhorses here rearrange derivations without ever materializing the
matrix: balanced concatenation gadgets, clockwise rotation by production
rewriting, margin extraction, substring decomposition inside 1D grammars, row
linearization of a 2D grammar, and the full rebalancing pipeline that chains
them (linearize, balance the 1D string, reassemble rows with gadgets).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grammar import (
    Grammar1D,
    Grammar2D,
    GrammarBuilder,
    HConcat,
    OutOfBounds,
    PLAIN_KINDS,
    ParameterError,
    Terminal,
    VConcat,
    reachable_topo,
)
from .geometry import GeometryTable, compute_geometry


def _balanced_chain(b: GrammarBuilder, axis: str, parts: list[int]) -> int:
    """Complete binary concatenation tree over ``parts`` (index halving)."""
    if not parts:
        raise ParameterError("cannot concatenate zero parts")
    op = b.h if axis == "H" else b.v

    def build(lo: int, hi: int) -> int:
        if hi - lo == 1:
            return parts[lo]
        mid = lo + (hi - lo + 1) // 2
        return op(build(lo, mid), build(mid, hi))

    return build(0, len(parts))


def concat_gadget(
    g: Grammar2D, parts: list[int], axis: str
) -> tuple[Grammar2D, int]:
    """Extend ``g`` with a balanced binary tree concatenating ``parts``.

    Adds at most ``len(parts) - 1`` new symbols (hash-consed, so repeated
    subtrees are shared) and increases depth over the parts by at most
    ceil(log2 k).  Returns the extended grammar and the tree's root.
    """
    if axis not in ("H", "V"):
        raise ParameterError(f"axis must be 'H' or 'V', got {axis!r}")
    b = GrammarBuilder.seeded(g, dedup=True)
    root = _balanced_chain(b, axis, list(parts))
    return b.finish(root), root


def rotate_cw(g: Grammar2D) -> Grammar2D:
    """The grammar deriving exp(g) rotated 90 degrees clockwise.

    Purely a production rewrite: horizontal concats become vertical ones in
    the same order (left column turns into top rows), vertical concats become
    horizontal ones with operands swapped (top rows turn into right columns).
    Symbol count and ids are unchanged.
    """
    new_rules = []
    for r in g.rules:
        if r is None or r.kind == "term":
            new_rules.append(r)
        elif r.kind == "h":
            new_rules.append(VConcat(r.left, r.right))
        elif r.kind == "v":
            new_rules.append(HConcat(r.bottom, r.top))
        else:
            raise ParameterError("rotation is defined for plain grammars only")
    return Grammar2D(rules=tuple(new_rules), start=g.start, labels=g.labels)


def margin_slp(g: Grammar2D, side: str) -> Grammar1D:
    """A 1D grammar for one margin of exp(g) (size never exceeds |g|).

    ``side`` is ``top``/``bottom``/``left``/``right``.  Column margins are
    returned as height-1 strings read top to bottom.  Each production either
    survives with both children (when the margin crosses it) or collapses to
    the single child that contains the margin, so the output has at most one
    production per reachable input symbol.
    """
    if side not in ("top", "bottom", "left", "right"):
        raise ParameterError(f"unknown side {side!r}")
    rules = g.rules
    b = GrammarBuilder(dedup=True)
    out: dict[int, int] = {}
    for sym in reachable_topo(rules, g.start):
        r = rules[sym]
        if r.kind == "term":
            out[sym] = b.terminal(r.char)
        elif r.kind == "h":
            if side == "left":
                out[sym] = out[r.left]
            elif side == "right":
                out[sym] = out[r.right]
            else:
                out[sym] = b.h(out[r.left], out[r.right])
        elif r.kind == "v":
            if side == "top":
                out[sym] = out[r.top]
            elif side == "bottom":
                out[sym] = out[r.bottom]
            else:
                out[sym] = b.h(out[r.top], out[r.bottom])
        else:
            raise ParameterError("margins are defined for plain grammars only")
    return b.finish(out[g.start])


@dataclass(frozen=True)
class SubstringDecomposition:
    """Symbols whose expansions concatenate to one substring of a 1D string."""

    symbols: tuple[int, ...]
    source_range: tuple[int, int]


def decompose_substring(
    g: Grammar1D, i: int, j: int, geo: GeometryTable | None = None
) -> SubstringDecomposition:
    """Cover S[i..j] by at most 2·depth + 2 whole-symbol expansions.

    Descends to the lowest production whose expansion contains the range,
    then peels a suffix of its left child and a prefix of its right child.
    """
    if geo is None:
        geo = compute_geometry(g)
    rules = g.rules
    W = geo.widths
    length = W[g.start]
    if not (1 <= i <= j <= length):
        raise OutOfBounds(f"range [{i},{j}] outside string of length {length}")
    src = (i, j)

    # Find the lowest symbol containing the whole range.
    cur = g.start
    while True:
        r = rules[cur]
        if r.kind == "term":
            return SubstringDecomposition((cur,), src)
        lw = W[r.left]
        if j <= lw:
            cur = r.left
        elif i > lw:
            i -= lw
            j -= lw
            cur = r.right
        else:
            break
    if i == 1 and j == W[cur]:
        return SubstringDecomposition((cur,), src)

    r = rules[cur]
    lw = W[r.left]

    # Suffix of the left child starting at i.
    suffix: list[int] = []
    rights: list[int] = []
    node = r.left
    pos = i
    while True:
        if pos == 1:
            suffix.append(node)
            break
        rr = rules[node]
        if rr.kind == "term":
            suffix.append(node)
            break
        w = W[rr.left]
        if pos <= w:
            rights.append(rr.right)
            node = rr.left
        else:
            pos -= w
            node = rr.right
    suffix.extend(reversed(rights))

    # Prefix of the right child ending at j - lw.
    prefix: list[int] = []
    node = r.right
    pos = j - lw
    while True:
        rr = rules[node]
        if pos == W[node]:
            prefix.append(node)
            break
        w = W[rr.left]
        if pos <= w:
            node = rr.left
        else:
            prefix.append(rr.left)
            pos -= w
            node = rr.right
    return SubstringDecomposition(tuple(suffix + prefix), src)


def linearize_rows(g: Grammar2D, geo: GeometryTable | None = None) -> Grammar1D:
    """A 1D grammar deriving the row-major flattening of exp(g).

    For every symbol crossed by row i a per-row symbol derives exactly that
    row slice; vertical concats collapse to whichever child owns the row, so
    only terminals and horizontal concats materialize (at most N per input
    symbol).  The N row strings are then joined with a balanced gadget.
    """
    if geo is None:
        geo = compute_geometry(g)
    rules = g.rules
    H = geo.heights
    N, M = geo.dims(g.start)
    if N * M > (1 << 62):
        raise OverflowError(f"flattened length {N}*{M} exceeds 2**62")

    b = GrammarBuilder(dedup=True)
    memo: dict[tuple[int, int], int] = {}

    def resolve(sym: int, row: int) -> tuple[int, int]:
        r = rules[sym]
        while r.kind == "v":
            th = H[r.top]
            if row <= th:
                sym = r.top
            else:
                row -= th
                sym = r.bottom
            r = rules[sym]
        return sym, row

    def build(key: tuple[int, int]) -> int:
        stack = [key]
        while stack:
            top = stack[-1]
            if top in memo:
                stack.pop()
                continue
            sym, row = top
            r = rules[sym]
            if r.kind == "term":
                memo[top] = b.terminal(r.char)
                stack.pop()
                continue
            lk = resolve(r.left, row)
            rk = resolve(r.right, row)
            ready = True
            for k in (lk, rk):
                if k not in memo:
                    stack.append(k)
                    ready = False
            if ready:
                memo[top] = b.h(memo[lk], memo[rk])
                stack.pop()
        return memo[key]

    parts = [build(resolve(g.start, row)) for row in range(1, N + 1)]
    return b.finish(_balanced_chain(b, "H", parts))


@dataclass(frozen=True)
class RebalanceStats:
    """Measured sizes around the 2D rebalancing pipeline."""

    rows: int
    cols: int
    input_size: int
    input_depth: int
    output_size: int
    output_depth: int

    @property
    def size_constant(self) -> float:
        """output size / (input size · rows) — the C of the size budget."""
        return self.output_size / (self.input_size * self.rows)

    @property
    def depth_constant(self) -> float:
        """output depth / log2(rows · cols) — the C of the depth budget."""
        return self.output_depth / math.log2(max(2, self.rows * self.cols))


def rebalance_plain_2d(
    g: Grammar2D, geo: GeometryTable | None = None
) -> tuple[Grammar2D, RebalanceStats]:
    """Equivalent plain grammar of depth O(log area) for a wide input.

    Pipeline: flatten to one row-major string, balance that 1D grammar, cut
    it back into the N row substrings (each a short decomposition over the
    balanced grammar), and reassemble with balanced concatenation gadgets.
    Requires N ≤ M — rotate first otherwise, or the size bound degrades.
    Grammars with holes are ground-ified (contexts inlined) up front.
    """
    # Deferred: balance builds on this module.
    from .balance import _inline_contexts, balance_1d

    if any(r is not None and r.kind not in PLAIN_KINDS for r in g.rules):
        g = _inline_contexts(g)
        geo = None
    if geo is None:
        geo = compute_geometry(g)
    N, M = geo.dims(g.start)
    if N > M:
        raise ParameterError(
            f"input is {N}x{M}; rebalancing expects N ≤ M (rotate_cw first)"
        )
    lin = linearize_rows(g, geo)
    bal = balance_1d(lin)
    bal_geo = compute_geometry(bal)

    b = GrammarBuilder.seeded(bal, dedup=True)
    rows = []
    for r in range(1, N + 1):
        dec = decompose_substring(bal, (r - 1) * M + 1, r * M, bal_geo)
        rows.append(_balanced_chain(b, "H", list(dec.symbols)))
    out = b.finish(_balanced_chain(b, "V", rows))
    out_geo = compute_geometry(out)
    stats = RebalanceStats(
        rows=N,
        cols=M,
        input_size=g.size,
        input_depth=geo.depths[g.start],
        output_size=out.size,
        output_depth=out_geo.depths[out.start],
    )
    return out, stats
