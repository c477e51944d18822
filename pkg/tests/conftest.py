"""Shared fixtures: corpus grammars, chain builders, sampling helpers."""

from __future__ import annotations

import random

import numpy as np
import pytest

from gridslp import (
    GrammarBuilder,
    build_bin,
    build_cnm,
    build_cnm_sequence,
    build_shiftbin,
    build_spiral,
    compute_geometry,
    expand,
    random_grammar,
)


def caterpillar(n_links: int, text: str | None = None) -> "Grammar2D":
    """Left-leaning chain of ``n_links`` horizontal concatenations.

    With no ``text`` the string is a^(n_links+1); otherwise the chain spells
    ``text`` (one link per character after the first).  Either way the
    derivation tree is a path, so depth is linear in size — the worst case
    every balancer is supposed to fix.
    """
    b = GrammarBuilder(dedup=False)
    if text is None:
        a = b.terminal("a")
        s = a
        for _ in range(n_links):
            s = b.h(s, a)
    else:
        s = b.terminal(text[0])
        for ch in text[1:]:
            s = b.h(s, b.terminal(ch))
    return b.finish(s)


def row_caterpillar(rows: int, cols: int, seed: int = 0) -> "Grammar2D":
    """Rows chained vertically, each row an h-chain: depth Θ(rows + cols)."""
    rng = random.Random(seed)
    b = GrammarBuilder(dedup=False)
    out = None
    for _ in range(rows):
        row = b.terminal(rng.choice("01"))
        for _ in range(cols - 1):
            row = b.h(row, b.terminal(rng.choice("01")))
        out = row if out is None else b.v(out, row)
    return b.finish(out)


def example_tslp():
    """The two-by-two worked example: T = Apply(hole-over-row, row)."""
    b = GrammarBuilder(dedup=False)
    zero = b.terminal("0")
    one = b.terminal("1")
    row = b.h(zero, one)
    ctx = b.hole_concat("V", "first", row, 1, 2)
    return b.finish_tslp(b.apply(ctx, row))


def sample_positions(n_rows: int, n_cols: int, count: int, seed: int):
    """Deterministic uniform (x, y) samples, 1-based."""
    rng = random.Random(seed)
    return [(rng.randint(1, n_rows), rng.randint(1, n_cols)) for _ in range(count)]


@pytest.fixture(scope="session")
def small_corpus():
    """Grammars small enough for full-expansion comparisons everywhere."""
    return [
        ("bin3", build_bin(3)),
        ("shiftbin3", build_shiftbin(3)),
        ("cnm_32x64", build_cnm(32, 64)),
        ("cnm_64x32", build_cnm(64, 32)),
        ("spiral_256", build_spiral(256)),
        ("rand11", random_grammar(11, 40, max_dim=24)),
        ("rand12", random_grammar(12, 60, max_dim=32)),
        ("example_tslp", example_tslp()),
    ]


@pytest.fixture(scope="session")
def spiral_1024():
    return build_spiral(1024)


@pytest.fixture(scope="session")
def seq_corpus():
    g, roots = build_cnm_sequence(64, 32, 32, 4)
    return g, roots


def grids_equal(g, reference: np.ndarray) -> bool:
    got = expand(g)
    return got.shape == reference.shape and bool((got == reference).all())


def full_dims(g):
    geo = compute_geometry(g)
    return geo.heights[g.start], geo.widths[g.start]
