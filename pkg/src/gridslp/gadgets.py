"""Structured corpus: hard-to-compress matrices and the grammars for them.

The matrices here stress different parts of the package.  ``Bin`` enumerates
all n-bit words between ``$`` markers; ``ShiftBin`` repeats it in
progressively shifted column blocks so middle rows contain many distinct
words; the ``C`` matrices stack shifted copies into two offset vertical
strips; the spiral nests rotated ``C`` strips around a shrinking square.
Every construction comes in two independent forms: a ``reference_*`` oracle
that fills a numpy matrix cell-by-cell straight from the definition, and a
``build_*`` grammar whose expansion must match it — the test suites compare
the two, so neither borrows from the other.

``random_grammar`` generates seeded, dimension-bounded plain grammars for
fuzzing the generic machinery.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .grammar import Grammar2D, GrammarBuilder, ParameterError, topo_all
from .transforms import rotate_cw

# ---------------------------------------------------------------------------
# Reference oracles (no grammar machinery)


def reference_bin(n: int) -> np.ndarray:
    """The 2^n x (n+2) matrix whose row i is the (i-1)-th n-bit word in $..$."""
    rows = 1 << n
    out = np.empty((rows, n + 2), dtype="<U1")
    for i in range(rows):
        word = format(i, f"0{n}b") if n else ""
        out[i, :] = list(f"${word}$")
    return out


def reference_shiftbin(n: int) -> np.ndarray:
    """The 2N x N(n+2) matrix of N copies of Bin, copy j shifted down j rows.

    N = 2^n.  Copy j occupies rows j+1..j+N of column block j; every other
    cell is '0'.
    """
    N = 1 << n
    blk = n + 2
    out = np.full((2 * N, N * blk), "0", dtype="<U1")
    bin_mat = reference_bin(n)
    for j in range(N):
        out[j : j + N, j * blk : (j + 1) * blk] = bin_mat
    return out


def cnm_block_exponent(M: int) -> int:
    """Largest m with 2^m (m+2) ≤ M/2 — the ShiftBin size a width-M C packs."""
    if M < 4:
        raise ParameterError(f"C matrix needs width ≥ 4 to fit two strips, got {M}")
    m = 0
    while (1 << (m + 1)) * (m + 3) <= M // 2:
        m += 1
    return m


def reference_cnm(N: int, M: int) -> np.ndarray:
    """The N x M matrix with two offset strips of stacked ShiftBin copies.

    Left strip (columns 1..W, W = M'(m+2)): ⌊N/(2M')⌋ ShiftBin copies stacked
    from the top.  Right strip (columns W+1..2W): M' zero rows, then
    ⌊(N−M')/(2M')⌋ copies.  Everything else is '0'.
    """
    m = cnm_block_exponent(M)
    mp = 1 << m
    sb = reference_shiftbin(m)
    W = mp * (m + 2)
    out = np.full((N, M), "0", dtype="<U1")
    for i in range(N // (2 * mp)):
        out[2 * mp * i : 2 * mp * (i + 1), 0:W] = sb
    for i in range((N - mp) // (2 * mp)):
        out[mp + 2 * mp * i : mp + 2 * mp * (i + 1), W : 2 * W] = sb
    return out


def distinct_blocks(row: str, n: int) -> int:
    """Number of distinct n-bit words b such that ``$b$`` occurs in ``row``."""
    words = set()
    bits = {"0", "1"}
    for i in range(max(0, len(row) - n - 1)):
        if row[i] == "$" and row[i + n + 1] == "$":
            middle = row[i + 1 : i + n + 1]
            if all(ch in bits for ch in middle):
                words.add(middle)
    return len(words)


# ---------------------------------------------------------------------------
# Shared construction helpers (all take an open builder so gadgets can share
# structure through deduplication)


def _zero_row(b: GrammarBuilder, zero: int, width: int) -> int:
    """A 1 x width row of zeros as a plain chain (keeps symbol counts exact)."""
    acc = zero
    for _ in range(width - 1):
        acc = b.h(acc, zero)
    return acc


def _zero_rect(b: GrammarBuilder, zero: int, h: int, w: int) -> int:
    """An all-zero h x w block in O(log h + log w) symbols."""
    if h < 1 or w < 1:
        raise ParameterError(f"zero block needs positive dims, got {h}x{w}")
    pieces = []
    cell = zero
    rest = w
    while rest:
        if rest & 1:
            pieces.append(cell)
        rest >>= 1
        if rest:
            cell = b.h(cell, cell)
    row = pieces[0]
    for p in pieces[1:]:
        row = b.h(row, p)
    pieces = []
    strip = row
    rest = h
    while rest:
        if rest & 1:
            pieces.append(strip)
        rest >>= 1
        if rest:
            strip = b.v(strip, strip)
    block = pieces[0]
    for p in pieces[1:]:
        block = b.v(block, p)
    return block


def _vstack_copies(b: GrammarBuilder, sym: int, count: int) -> int:
    """``count`` copies of ``sym`` stacked vertically, O(log count) symbols."""
    pieces = []
    cur = sym
    rest = count
    while rest:
        if rest & 1:
            pieces.append(cur)
        rest >>= 1
        if rest:
            cur = b.v(cur, cur)
    acc = pieces[0]
    for p in pieces[1:]:
        acc = b.v(acc, p)
    return acc


def _vchain(b: GrammarBuilder, *parts) -> int | None:
    live = [p for p in parts if p is not None]
    if not live:
        return None
    acc = live[0]
    for p in live[1:]:
        acc = b.v(acc, p)
    return acc


def _hchain(b: GrammarBuilder, *parts) -> int | None:
    live = [p for p in parts if p is not None]
    if not live:
        return None
    acc = live[0]
    for p in live[1:]:
        acc = b.h(acc, p)
    return acc


# ---------------------------------------------------------------------------
# Bin and ShiftBin


def _bin_into(b: GrammarBuilder, n: int) -> int:
    """Add the Bin construction for 2^n rows; returns the root symbol."""
    dollar = b.terminal("$")
    if n == 0:
        return b.h(dollar, dollar)
    zero = b.terminal("0")
    one = b.terminal("1")
    # Constant-bit columns; index i has height 2^(i-1).
    zcol = [None, zero]
    ocol = [None, one]
    for i in range(2, n + 1):
        zcol.append(b.v(zcol[i - 1], zcol[i - 1]))
        ocol.append(b.v(ocol[i - 1], ocol[i - 1]))
    # s derives all i-bit words stacked in numeric order; extending to i+1
    # bits prefixes a constant column to each half.
    s = b.v(zero, one)
    for i in range(1, n):
        s0 = b.h(zcol[i + 1], s)
        s1 = b.h(ocol[i + 1], s)
        s = b.v(s0, s1)
    dcol = dollar
    for _ in range(n):
        dcol = b.v(dcol, dcol)
    return b.h(b.h(dcol, s), dcol)


def build_bin(n: int) -> Grammar2D:
    """Grammar of O(n) symbols deriving the 2^n x (n+2) Bin matrix."""
    if not (0 <= n <= 20):
        raise ParameterError(f"bit width n must be in [0, 20], got {n}")
    b = GrammarBuilder(dedup=True)
    return b.finish(_bin_into(b, n))


def _shiftbin_into(b: GrammarBuilder, n: int) -> int:
    """Add the ShiftBin construction for block size 2^n; returns the root."""
    a = _bin_into(b, n)  # block 0: Bin at the top of its column block
    zero = b.terminal("0")
    zrow = _zero_row(b, zero, n + 2)
    # Doubling step: the left half keeps the shifts, the right half gets the
    # same blocks pushed a further 2^(i-1) rows down.
    zi = zrow  # zeros, 2^(i-1) x 2^(i-1)(n+2)
    for i in range(1, n + 1):
        a = b.h(b.v(a, zi), b.v(zi, a))
        if i < n:
            tall = b.v(zi, zi)
            zi = b.h(tall, tall)
    bottom = zrow
    for _ in range(n):
        bottom = b.h(bottom, bottom)
    return b.v(a, bottom)


def build_shiftbin(n: int) -> Grammar2D:
    """Grammar of O(n) symbols deriving the 2^(n+1) x 2^n(n+2) ShiftBin."""
    if not (0 <= n <= 20):
        raise ParameterError(f"bit width n must be in [0, 20], got {n}")
    b = GrammarBuilder(dedup=True)
    return b.finish(_shiftbin_into(b, n))


# ---------------------------------------------------------------------------
# The C matrices and their extension sequence


def _cnm_into(b: GrammarBuilder, N: int, M: int) -> int:
    m = cnm_block_exponent(M)
    mp = 1 << m
    W = mp * (m + 2)
    if N < mp:
        raise ParameterError(f"C matrix needs height ≥ M'={mp}, got {N}")
    sb = _shiftbin_into(b, m)
    zero = b.terminal("0")
    wide = M - W
    # The right strip widened with the trailing zeros (columns 2W+1..M), so
    # the whole matrix is exactly two columns of stacked blocks.
    wsb = b.h(sb, _zero_rect(b, zero, 2 * mp, M - 2 * W)) if M > 2 * W else sb
    k_left = N // (2 * mp)
    pad_left = N - 2 * mp * k_left
    k_right = (N - mp) // (2 * mp)
    pad_right = (N - mp) - 2 * mp * k_right

    left = _vchain(
        b,
        _vstack_copies(b, sb, k_left) if k_left else None,
        _zero_rect(b, zero, pad_left, W) if pad_left else None,
    )
    right = _vchain(
        b,
        _zero_rect(b, zero, mp, wide),
        _vstack_copies(b, wsb, k_right) if k_right else None,
        _zero_rect(b, zero, pad_right, wide) if pad_right else None,
    )
    return b.h(left, right)


def build_cnm(N: int, M: int) -> Grammar2D:
    """Grammar of O(log N + log M) symbols deriving the N x M C matrix."""
    if M < 8:
        raise ParameterError(f"C matrix width must be ≥ 8, got {M}")
    b = GrammarBuilder(dedup=True)
    return b.finish(_cnm_into(b, N, M))


def build_cnm_sequence(
    N: int, M: int, b_step: int, k: int
) -> tuple[Grammar2D, list[int]]:
    """One grammar with roots deriving C(N + i·b_step, M) for i = 0..k.

    Growing a C matrix by a whole number of 2M'-row block periods appends
    that many more ShiftBin copies to each strip and keeps the padding rows
    unchanged, so consecutive roots share everything but a constant number
    of productions; the grammar totals O(log N + log M + k) symbols.
    ``b_step`` must be a positive multiple of M' and at most N.  The
    returned grammar's start symbol is the last root.
    """
    m = cnm_block_exponent(M)
    mp = 1 << m
    W = mp * (m + 2)
    if b_step <= 0 or b_step % mp:
        raise ParameterError(f"step {b_step} is not a positive multiple of M'={mp}")
    if b_step > N:
        raise ParameterError(f"step {b_step} exceeds the base height {N}")
    if k < 0:
        raise ParameterError(f"sequence length k must be ≥ 0, got {k}")
    if N < mp:
        raise ParameterError(f"C matrix needs height ≥ M'={mp}, got {N}")

    b = GrammarBuilder(dedup=True)
    sb = _shiftbin_into(b, m)
    zero = b.terminal("0")
    wide = M - W
    wsb = b.h(sb, _zero_rect(b, zero, 2 * mp, M - 2 * W)) if M > 2 * W else sb
    top_zeros = _zero_rect(b, zero, mp, wide)

    # When the step is a whole number of block periods the paddings agree for
    # every root and one growing chain serves them all; an odd multiple of M'
    # alternates between two padding patterns, so two chains interleave.
    stride = 1 if b_step % (2 * mp) == 0 else 2
    copies = stride * b_step // (2 * mp)
    grow_l = _vstack_copies(b, sb, copies)
    grow_r = _vstack_copies(b, wsb, copies)

    roots: list[int | None] = [None] * (k + 1)
    for parity in range(stride):
        if parity > k:
            break
        base = N + parity * b_step
        k_left = base // (2 * mp)
        pad_left = base - 2 * mp * k_left
        k_right = (base - mp) // (2 * mp)
        pad_right = (base - mp) - 2 * mp * k_right
        pads_left = _zero_rect(b, zero, pad_left, W) if pad_left else None
        pads_right = _zero_rect(b, zero, pad_right, wide) if pad_right else None

        stack_left = _vstack_copies(b, sb, k_left) if k_left else None
        tops = _vchain(
            b, top_zeros, _vstack_copies(b, wsb, k_right) if k_right else None
        )

        i = parity
        while True:
            left = _vchain(b, stack_left, pads_left)
            right = _vchain(b, tops, pads_right)
            roots[i] = b.h(left, right)
            i += stride
            if i > k:
                break
            stack_left = grow_l if stack_left is None else b.v(stack_left, grow_l)
            tops = b.v(tops, grow_r)

    final_roots = [r for r in roots if r is not None]
    assert len(final_roots) == k + 1
    g = b.finish(final_roots[-1])
    return g, final_roots


# ---------------------------------------------------------------------------
# The spiral family


@dataclass(frozen=True)
class SpiralParams:
    """Derived layer parameters for the N x N spiral at depth constant c.

    ``delta_prime`` is the ideal layer thickness N/(8c·log2 N); ``delta``
    rounds it down to a multiple of the full block period 2·m_prime (where
    ``m_prime`` is the largest power of two with M'(log2 M' + 2) ≤
    delta_prime/2), staying within a factor two; ``lam`` is the number of
    nested layers.  The period-aligned rounding keeps every strip in the
    C sequence on the same padding pattern.
    """

    n: int
    c: int
    delta_prime: Fraction
    lam: int
    m_prime: int
    delta: int

    @property
    def center_height(self) -> int:
        return self.n - (2 * self.lam - 1) * self.delta

    @property
    def center_width(self) -> int:
        return self.n - 2 * self.lam * self.delta


def _block_exponent_for(budget: Fraction) -> int:
    """Largest m with 2^m (m+2) ≤ budget; ParameterError if even m=0 fails."""
    if budget < 2:
        raise ParameterError(f"no ShiftBin block fits a budget of {budget}")
    m = 0
    while (1 << (m + 1)) * (m + 3) <= budget:
        m += 1
    return m


def spiral_params(N: int, c: int = 1) -> SpiralParams:
    """Derive and sanity-check the spiral parameters for side length N."""
    if N < 2 or N & (N - 1):
        raise ParameterError(f"spiral side must be a power of two ≥ 2, got {N}")
    if c < 1:
        raise ParameterError(f"depth constant c must be ≥ 1, got {c}")
    logn = N.bit_length() - 1
    lam = math.ceil(2 * c * logn)
    delta_prime = Fraction(N, 8 * c * logn)
    m = _block_exponent_for(delta_prime / 2)
    mp = 1 << m
    delta = 2 * mp * math.floor(delta_prime / (2 * mp))
    params = SpiralParams(N, c, delta_prime, lam, mp, delta)
    if delta < delta_prime / 2:
        raise ParameterError(
            f"layer thickness {delta} fell below delta'/2 = {delta_prime / 2}"
        )
    if _block_exponent_for(Fraction(delta, 2)) != m:
        raise ParameterError(
            f"block size re-derived from delta={delta} disagrees with M'={mp}"
        )
    if params.center_width <= 0 or params.center_height <= 0:
        raise ParameterError(
            f"center block {params.center_height}x{params.center_width} is empty; "
            f"N={N} is too small for {lam} layers of thickness {delta}"
        )
    return params


def _import_symbols(b: GrammarBuilder, g: Grammar2D) -> list[int]:
    """Copy every symbol of a validated plain grammar into ``b``; id map."""
    idmap = [0] * len(g.rules)
    for sym in topo_all(g.rules):
        r = g.rules[sym]
        if r.kind == "term":
            idmap[sym] = b.terminal(r.char)
        elif r.kind == "h":
            idmap[sym] = b.h(idmap[r.left], idmap[r.right])
        else:
            idmap[sym] = b.v(idmap[r.top], idmap[r.bottom])
    return idmap


def build_spiral(N: int, c: int = 1) -> Grammar2D:
    """Grammar of O(log N) symbols deriving the N x N spiral matrix.

    Layer i (side N − 2iΔ) wraps C strips clockwise around layer i+1: the
    full-height strip on the right, a rotated one on the bottom, then left,
    then top; the innermost square is all zeros.  All strips come from one
    C-sequence grammar plus its clockwise rotation.
    """
    sp = spiral_params(N, c)
    lam, delta = sp.lam, sp.delta
    n_base = N - (2 * lam - 1) * delta
    seq, roots = build_cnm_sequence(n_base, delta, delta, 2 * lam - 1)
    rot = rotate_cw(seq)

    b = GrammarBuilder(dedup=True)
    gmap = _import_symbols(b, seq)
    rmap = _import_symbols(b, rot)

    def strip(m: int) -> int:
        # Vertical C strip of height N − m·delta.
        return gmap[roots[2 * lam - 1 - m]]

    def strip_rot(m: int) -> int:
        return rmap[roots[2 * lam - 1 - m]]

    zero = b.terminal("0")
    inner = _zero_rect(b, zero, sp.center_height, sp.center_width)
    for i in reversed(range(lam)):
        if i < lam - 1:
            inner = b.v(strip_rot(2 * i + 2), inner)  # top strip of layer i+1's wrap
        f2 = b.h(strip(2 * i + 1), inner)  # left strip
        f1 = b.v(f2, strip_rot(2 * i + 1))  # bottom strip
        inner = b.h(f1, strip(2 * i))  # right strip completes layer i
    return b.finish(inner)


# ---------------------------------------------------------------------------
# Fuzz corpus


def random_grammar(seed: int, g: int, max_dim: int = 64) -> Grammar2D:
    """A deterministic valid plain grammar with exactly ``g`` symbols.

    Bottom-up: each new symbol is a terminal or a concat of two existing
    symbols with compatible dimensions, never exceeding ``max_dim`` on either
    side.  The start symbol is the one with the largest derived area (ties to
    the newest), so fuzz queries exercise real structure.
    """
    if g < 1:
        raise ParameterError(f"symbol count must be ≥ 1, got {g}")
    rng = random.Random(seed)
    alphabet = "01ab"
    b = GrammarBuilder(dedup=False)
    b.terminal(rng.choice(alphabet))
    while len(b) < g:
        if rng.random() < 0.2:
            b.terminal(rng.choice(alphabet))
            continue
        axis = rng.choice("HV")
        first = rng.randrange(len(b))
        h1, w1 = b.dims(first)
        if axis == "H":
            cands = [
                s
                for s in range(len(b))
                if b.dims(s)[0] == h1 and w1 + b.dims(s)[1] <= max_dim
            ]
        else:
            cands = [
                s
                for s in range(len(b))
                if b.dims(s)[1] == w1 and h1 + b.dims(s)[0] <= max_dim
            ]
        if not cands:
            b.terminal(rng.choice(alphabet))
            continue
        second = rng.choice(cands)
        if axis == "H":
            b.h(first, second)
        else:
            b.v(first, second)
    start = max(range(len(b)), key=lambda s: (b.dims(s)[0] * b.dims(s)[1], s))
    return b.finish(start)
