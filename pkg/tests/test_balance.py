"""Balancing: TSLP output quality, context elimination, the 1D pipeline."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridslp import (
    GrammarBuilder,
    NotOneDimensional,
    Tslp2D,
    access_plain,
    access_tslp,
    balance_1d,
    balance_to_tslp,
    build_cnm,
    build_spiral,
    compute_geometry,
    eliminate_contexts_1d,
    expand,
    random_grammar,
    validate,
)
from gridslp.balance import _inline_contexts
from gridslp.grammar import PLAIN_KINDS

from conftest import caterpillar, example_tslp, sample_positions


class TestBalanceToTslp:
    def test_equivalence_small(self, small_corpus):
        for name, g in small_corpus:
            t, stats = balance_to_tslp(g)
            assert validate(t).ok, name
            assert (expand(t) == expand(g)).all(), name

    def test_depth_logarithmic_on_caterpillar(self):
        for links in (64, 256, 1024):
            g = caterpillar(links)
            t, stats = balance_to_tslp(g)
            assert (expand(t) == expand(g)).all()
            assert stats.output_depth <= 3 * math.log2(links + 1) + 10, links

    def test_varied_caterpillar_no_dedup_shortcut(self):
        rng = random.Random(6)
        text = "".join(rng.choice("abcd") for _ in range(600))
        g = caterpillar(len(text) - 1, text)
        t, stats = balance_to_tslp(g)
        assert "".join(expand(t)[0]) == text
        assert stats.output_depth <= 3 * math.log2(len(text)) + 10
        assert stats.output_size <= 16 * g.size

    def test_start_terminal(self):
        b = GrammarBuilder(dedup=False)
        g = b.finish(b.terminal("z"))
        t, _ = balance_to_tslp(g)
        assert expand(t).tolist() == [["z"]]

    def test_tslp_input_inlined_first(self):
        t0 = example_tslp()
        t, stats = balance_to_tslp(t0)
        assert validate(t).ok
        assert expand(t).tolist() == [["0", "1"], ["0", "1"]]
        assert stats.inlined_size >= 1

    def test_stats_fields(self):
        g = build_cnm(32, 32)
        t, stats = balance_to_tslp(g)
        assert stats.input_size == g.size
        assert stats.output_size == t.size
        geo = compute_geometry(t)
        assert stats.output_depth == geo.depths[t.start]
        assert stats.area == 32 * 32
        assert 0 < stats.path_count <= stats.request_count

    def test_output_is_tslp(self):
        g = build_cnm(16, 16)
        t, _ = balance_to_tslp(g)
        assert isinstance(t, Tslp2D)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 4_000), size=st.integers(2, 70))
    def test_random_equivalence(self, seed, size):
        g = random_grammar(seed, size, max_dim=24)
        t, _ = balance_to_tslp(g)
        assert validate(t).ok
        assert (expand(t) == expand(g)).all()

    def test_sampled_equivalence_spiral(self):
        g = build_spiral(512)
        geo = compute_geometry(g)
        t, _ = balance_to_tslp(g, geo)
        tgeo = compute_geometry(t)
        n, m = geo.dims(g.start)
        for x, y in sample_positions(n, m, 500, 31):
            assert (
                access_plain(g, x, y, geo=geo)[0]
                == access_tslp(t, x, y, geo=tgeo)[0]
            )


class TestInlineContexts:
    def test_plain_grammar_unchanged_semantics(self):
        g = build_cnm(16, 16)
        flat = _inline_contexts(g)
        assert (expand(flat) == expand(g)).all()

    def test_balanced_output_inlines_linearly(self):
        g = build_spiral(256)
        t, _ = balance_to_tslp(g)
        flat = _inline_contexts(t)
        assert all(
            r.kind in PLAIN_KINDS for r in flat.rules if r is not None
        )
        assert (expand(flat) == expand(g)).all()
        # each (context, plug) pair is materialized at most once
        assert flat.symbols <= 4 * t.symbols


class TestEliminateContexts1D:
    def test_round_trip_through_balancer(self):
        rng = random.Random(40)
        text = "".join(rng.choice("xyz") for _ in range(300))
        g = caterpillar(len(text) - 1, text)
        t, _ = balance_to_tslp(g)
        out = eliminate_contexts_1d(t)
        assert validate(out).ok
        assert all(r.kind in ("term", "h") for r in out.rules if r is not None)
        assert "".join(expand(out)[0]) == text

    def test_depth_increase_bounded(self):
        g = caterpillar(800)
        t, stats = balance_to_tslp(g)
        out = eliminate_contexts_1d(t)
        ogeo = compute_geometry(out)
        assert ogeo.depths[out.start] <= 3 * stats.output_depth + 3

    def test_size_linear_in_input(self):
        rng = random.Random(41)
        text = "".join(rng.choice("ab01") for _ in range(500))
        g = caterpillar(len(text) - 1, text)
        t, _ = balance_to_tslp(g)
        out = eliminate_contexts_1d(t)
        assert out.size <= 3 * t.size

    def test_rejects_two_dimensional(self):
        t, _ = balance_to_tslp(build_cnm(16, 16))
        with pytest.raises(NotOneDimensional):
            eliminate_contexts_1d(t)


class TestBalance1D:
    def test_budgets_on_uniform_caterpillars(self):
        for e in (6, 8, 10):
            links = 1 << e
            g = caterpillar(links)
            out = balance_1d(g)
            assert validate(out).ok
            geo = compute_geometry(out)
            assert geo.dims(out.start) == (1, links + 1)
            assert "".join(expand(out)[0]) == "a" * (links + 1)
            assert geo.depths[out.start] <= 3 * math.log2(links + 1) + 10
            assert out.size <= 16 * links

    def test_rejects_tall_input(self):
        with pytest.raises(NotOneDimensional):
            balance_1d(build_cnm(16, 16))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2_000), n=st.integers(2, 400))
    def test_random_strings(self, seed, n):
        rng = random.Random(seed)
        text = "".join(rng.choice("ab") for _ in range(n))
        g = caterpillar(n - 1, text)
        out = balance_1d(g)
        assert "".join(expand(out)[0]) == text
        geo = compute_geometry(out)
        assert geo.depths[out.start] <= 3 * math.log2(n) + 10
