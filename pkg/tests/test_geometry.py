"""Dimension, hole-placement, and depth bookkeeping for every production kind."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridslp import (
    DimensionMismatch,
    GrammarBuilder,
    compute_geometry,
    expand,
    random_grammar,
)

from conftest import example_tslp


def _builder_with_block(h, w, char="x"):
    """Builder primed with an h-by-w solid block; returns (builder, symbol)."""
    b = GrammarBuilder(dedup=True)
    s = b.terminal(char)
    row = s
    for _ in range(w - 1):
        row = b.h(row, s)
    blk = row
    for _ in range(h - 1):
        blk = b.v(blk, row)
    return b, blk


class TestGroundDims:
    def test_terminal(self):
        b = GrammarBuilder(dedup=False)
        t = b.terminal("q")
        geo = compute_geometry(b.finish(t))
        assert geo.dims(t) == (1, 1)
        assert geo.holes[t] is None
        assert geo.depths[t] == 1

    def test_h_concat_adds_widths(self):
        b, blk = _builder_with_block(2, 3)
        b2, blk2 = _builder_with_block(2, 4)
        # rebuild the second block in the first builder
        other = blk
        g = b.finish(b.h(blk, blk))
        geo = compute_geometry(g)
        assert geo.dims(g.start) == (2, 6)

    def test_v_concat_adds_heights(self):
        b, blk = _builder_with_block(2, 3)
        g = b.finish(b.v(blk, blk))
        geo = compute_geometry(g)
        assert geo.dims(g.start) == (4, 3)

    def test_depth_is_one_plus_max(self):
        b = GrammarBuilder(dedup=False)
        x = b.terminal("x")
        p = b.h(x, x)       # depth 2
        q = b.h(p, x)       # depth 3
        g = b.finish(b.v(q, q))
        geo = compute_geometry(g)
        assert geo.depths[x] == 1
        assert geo.depths[p] == 2
        assert geo.depths[q] == 3
        assert geo.depths[g.start] == 4


class TestContextGeometry:
    def test_hole_concat_h_axis_hole_first(self):
        b, blk = _builder_with_block(2, 3)
        c = b.hole_concat("H", "first", blk, 2, 5)
        geo = compute_geometry(b.finish_tslp(b.apply(c, _ground(b, 2, 5))))
        assert geo.dims(c) == (2, 8)
        assert geo.holes[c] == (2, 5, 1, 1)

    def test_hole_concat_h_axis_hole_second(self):
        b, blk = _builder_with_block(2, 3)
        c = b.hole_concat("H", "second", blk, 2, 5)
        geo = compute_geometry(b.finish_tslp(b.apply(c, _ground(b, 2, 5))))
        assert geo.dims(c) == (2, 8)
        assert geo.holes[c] == (2, 5, 1, 4)

    def test_hole_concat_v_axis(self):
        b, blk = _builder_with_block(2, 3)
        top = b.hole_concat("V", "first", blk, 4, 3)
        bot = b.hole_concat("V", "second", blk, 4, 3)
        g = b.finish_tslp(b.apply(top, _ground(b, 4, 3)))
        geo = compute_geometry(g)
        assert geo.dims(top) == (6, 3)
        assert geo.holes[top] == (4, 3, 1, 1)
        assert geo.dims(bot) == (6, 3)
        assert geo.holes[bot] == (4, 3, 3, 1)

    def test_ctx_concat_shifts_hole(self):
        b, blk = _builder_with_block(2, 3)
        c = b.hole_concat("H", "first", blk, 2, 5)     # hole at col 1
        shifted = b.ctx_concat("H", "second", c, blk)  # block to the left
        g = b.finish_tslp(b.apply(shifted, _ground(b, 2, 5)))
        geo = compute_geometry(g)
        assert geo.dims(shifted) == (2, 11)
        assert geo.holes[shifted] == (2, 5, 1, 4)

    def test_compose_translates_inner_hole(self):
        b, blk = _builder_with_block(2, 3)
        outer = b.hole_concat("H", "second", blk, 2, 8)  # hole at (1, 4), 2x8
        inner = b.hole_concat("V", "second", _ground(b, 1, 8), 1, 8)  # 2x8 frame
        c = b.compose(outer, inner)
        g = b.finish_tslp(b.apply(c, _ground(b, 1, 8)))
        geo = compute_geometry(g)
        assert geo.dims(c) == (2, 11)
        # inner hole (1,8)@(2,1) inside outer hole at (1,4):
        assert geo.holes[c] == (1, 8, 2, 4)

    def test_compose_checks_frame_against_hole(self):
        b, blk = _builder_with_block(2, 3)
        outer = b.hole_concat("H", "first", blk, 2, 5)
        wrong = b.hole_concat("H", "first", blk, 2, 3)  # frame 2x6 != hole 2x5
        with pytest.raises(DimensionMismatch):
            b.compose(outer, wrong)

    def test_apply_checks_plug(self):
        b, blk = _builder_with_block(2, 3)
        c = b.hole_concat("H", "first", blk, 2, 5)
        with pytest.raises(DimensionMismatch):
            b.apply(c, blk)  # 2x3 plug into 2x5 hole

    def test_apply_dims_equal_frame(self):
        t = example_tslp()
        geo = compute_geometry(t)
        assert geo.dims(t.start) == (2, 2)
        assert geo.holes[t.start] is None


def _ground(b, h, w):
    s = b.terminal("0")
    row = s
    for _ in range(w - 1):
        row = b.h(row, s)
    blk = row
    for _ in range(h - 1):
        blk = b.v(blk, row)
    return blk


class TestAgainstExpansion:
    """Geometry must agree with the materialized matrix, trivially but totally."""

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 5_000))
    def test_dims_match_expansion(self, seed):
        g = random_grammar(seed, 30, max_dim=24)
        geo = compute_geometry(g)
        m = expand(g, geo=geo)
        assert m.shape == geo.dims(g.start)

    def test_hole_position_matches_marker(self, small_corpus):
        for name, g in small_corpus:
            geo = compute_geometry(g)
            for sym, r in enumerate(g.rules):
                if r is None or geo.holes[sym] is None:
                    continue
                if geo.area(sym) > 20_000:
                    continue
                m = expand(g, sym, geo=geo)
                p, q, hr, hc = geo.holes[sym]
                patch = m[hr - 1 : hr - 1 + p, hc - 1 : hc - 1 + q]
                assert (patch == "#").all(), (name, sym)
                assert (m == "#").sum() == p * q, (name, sym)
