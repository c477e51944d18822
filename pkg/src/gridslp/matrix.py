"""Materializing derived matrices.

Matrices are numpy arrays of dtype ``'<U1'`` (one Unicode scalar per cell,
row-major), which is exactly the height/width/payload contract the rest of the
package assumes; helpers convert to and from the text form used by the CLI
(one row per line, characters unseparated).

Expansion works bottom-up: every reachable symbol small enough to be worth
caching is materialized once, larger symbols are filled by blitting the cached
blocks, so repeated substructure (which is the whole point of grammar
compression) costs one copy per occurrence instead of one descent per cell.
Context symbols materialize with the hole filled by a marker character.
"""

from __future__ import annotations

import os

import numpy as np

from .grammar import AreaLimitExceeded, Grammar2D, reachable_topo
from .geometry import GeometryTable, compute_geometry

#: Default ceiling on materialized cells (2**26 ~= 67M cells).
DEFAULT_MAX_CELLS = 1 << 26

#: Symbols at most this many cells get a cached block during expansion.
_MEMO_CELLS = 1 << 15


def max_cells_default() -> int:
    """The configured expansion ceiling (``GRIDSLP_MAX_CELLS`` overrides)."""
    env = os.environ.get("GRIDSLP_MAX_CELLS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise AreaLimitExceeded(f"GRIDSLP_MAX_CELLS is not an integer: {env!r}")
    return DEFAULT_MAX_CELLS


def matrix_to_text(m: np.ndarray) -> str:
    """Render a matrix as one line per row, characters unseparated."""
    return "\n".join("".join(row) for row in m)


def matrix_from_text(text: str) -> np.ndarray:
    """Parse the row-per-line form; lines must have equal length."""
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError("empty matrix text")
    width = len(lines[0])
    if any(len(line) != width for line in lines):
        raise ValueError("ragged matrix text")
    out = np.empty((len(lines), width), dtype="<U1")
    for i, line in enumerate(lines):
        out[i, :] = list(line)
    return out


def expand(
    g: Grammar2D,
    sym: int | None = None,
    *,
    max_cells: int | None = None,
    hole_marker: str = "#",
    geo: GeometryTable | None = None,
) -> np.ndarray:
    """Materialize the matrix derived by ``sym`` (default: the start symbol).

    Context symbols yield their frame with hole cells holding ``hole_marker``.
    Raises :class:`AreaLimitExceeded` if the result (or the area bookkeeping
    for it) would exceed ``max_cells``.
    """
    if sym is None:
        sym = g.start
    if geo is None:
        geo = compute_geometry(g)
    if max_cells is None:
        max_cells = max_cells_default()

    rules = g.rules
    H, W, HOLES = geo.heights, geo.widths, geo.holes
    h, w = H[sym], W[sym]
    if h * w > max_cells:
        raise AreaLimitExceeded(
            f"{h}x{w} = {h * w} cells exceeds the limit of {max_cells}"
        )

    # Pass 1: cache small reachable symbols bottom-up.  A cached entry holds
    # the fully materialized block (hole cells already marked for contexts).
    memo: dict[int, np.ndarray] = {}
    for s in reachable_topo(rules, sym):
        if H[s] * W[s] > _MEMO_CELLS:
            continue
        r = rules[s]
        k = r.kind
        if k == "term":
            block = np.full((1, 1), r.char, dtype="<U1")
        elif k == "h":
            block = np.concatenate((memo[r.left], memo[r.right]), axis=1)
        elif k == "v":
            block = np.concatenate((memo[r.top], memo[r.bottom]), axis=0)
        elif k == "apply":
            block = memo[r.ctx].copy()
            p, q, hr, hc = HOLES[r.ctx]
            block[hr - 1 : hr - 1 + p, hc - 1 : hc - 1 + q] = memo[r.arg]
        elif k == "hole":
            gh, gw = memo[r.ground].shape
            block = np.full((H[s], W[s]), hole_marker, dtype="<U1")
            if r.axis == "H":
                col = 0 if r.hole_side == "second" else r.hole_w
                block[:, col : col + gw] = memo[r.ground]
            else:
                row = 0 if r.hole_side == "second" else r.hole_h
                block[row : row + gh, :] = memo[r.ground]
        elif k == "ctxcat":
            a, b = memo[r.ctx], memo[r.ground]
            if r.ctx_side == "second":
                a, b = b, a
            axis = 1 if r.axis == "H" else 0
            block = np.concatenate((a, b), axis=axis)
        else:  # compose
            block = memo[r.outer].copy()
            p, q, hr, hc = HOLES[r.outer]
            block[hr - 1 : hr - 1 + p, hc - 1 : hc - 1 + q] = memo[r.inner]
        memo[s] = block

    # Pass 2: fill the output buffer, descending only through uncached symbols.
    buf = np.empty((h, w), dtype="<U1")
    stack: list[tuple[int, int, int]] = [(sym, 0, 0)]
    while stack:
        s, ox, oy = stack.pop()
        block = memo.get(s)
        if block is not None:
            bh, bw = block.shape
            buf[ox : ox + bh, oy : oy + bw] = block
            continue
        r = rules[s]
        k = r.kind
        if k == "h":
            stack.append((r.left, ox, oy))
            stack.append((r.right, ox, oy + W[r.left]))
        elif k == "v":
            stack.append((r.top, ox, oy))
            stack.append((r.bottom, ox + H[r.top], oy))
        elif k == "apply":
            # The argument must be filled after the context (whose descent
            # paints hole cells with the marker), so it goes deeper in the
            # LIFO stack: everything the context pushes pops first.
            p, q, hr, hc = HOLES[r.ctx]
            stack.append((r.arg, ox + hr - 1, oy + hc - 1))
            stack.append((r.ctx, ox, oy))
        elif k == "hole":
            p, q, hr, hc = HOLES[s]
            buf[ox + hr - 1 : ox + hr - 1 + p, oy + hc - 1 : oy + hc - 1 + q] = hole_marker
            if r.axis == "H":
                gcol = r.hole_w if r.hole_side == "first" else 0
                stack.append((r.ground, ox, oy + gcol))
            else:
                grow = r.hole_h if r.hole_side == "first" else 0
                stack.append((r.ground, ox + grow, oy))
        elif k == "ctxcat":
            ch, cw = H[r.ctx], W[r.ctx]
            gh, gw = H[r.ground], W[r.ground]
            if r.axis == "H":
                coff = 0 if r.ctx_side == "first" else gw
                goff = cw if r.ctx_side == "first" else 0
                stack.append((r.ctx, ox, oy + coff))
                stack.append((r.ground, ox, oy + goff))
            else:
                coff = 0 if r.ctx_side == "first" else gh
                goff = ch if r.ctx_side == "first" else 0
                stack.append((r.ctx, ox + coff, oy))
                stack.append((r.ground, ox + goff, oy))
        elif k == "compose":
            p, q, hr, hc = HOLES[r.outer]
            stack.append((r.inner, ox + hr - 1, oy + hc - 1))
            stack.append((r.outer, ox, oy))
        else:  # term
            buf[ox, oy] = r.char
    return buf
