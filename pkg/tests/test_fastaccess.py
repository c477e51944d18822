"""Accelerated access: predecessor sets, unwinding, and the query loop."""

from __future__ import annotations

import json
import math
from bisect import bisect_right

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridslp import (
    FastParams,
    OutOfBounds,
    ParameterError,
    access_fast,
    access_plain,
    access_tslp,
    balance_to_tslp,
    bench_access,
    build_fast,
    build_shiftbin,
    build_spiral,
    compute_geometry,
    expand,
    random_grammar,
)
from gridslp.fastaccess import PredecessorSet, predecessor

from conftest import sample_positions


def _linear_pred(keys, x):
    best = None
    for k in keys:
        if k <= x and (best is None or k > best):
            best = k
    return best


class TestPredecessorSet:
    def test_against_linear_scan(self):
        keys = (1, 4, 9, 9 + 7, 100, 1_000_003)
        s = PredecessorSet(keys)
        for x in range(-2, 120):
            assert s.pred(x) == _linear_pred(keys, x), x
        assert s.pred(10**9) == 1_000_003

    def test_rank_indexes_keys(self):
        s = PredecessorSet((5, 10, 20))
        assert s.rank(4) == -1
        assert s.rank(5) == 0
        assert s.rank(19) == 1
        assert s.rank(10**6) == 2
        assert len(s) == 3

    def test_module_level_helper(self):
        s = PredecessorSet((3, 8))
        assert predecessor(s, 7) == 3
        assert predecessor(s, 2) is None

    @settings(max_examples=80, deadline=None)
    @given(
        keys=st.lists(st.integers(0, 10_000), min_size=1, max_size=60, unique=True),
        x=st.integers(-5, 10_005),
    )
    def test_random_keys(self, keys, x):
        s = PredecessorSet(tuple(sorted(keys)))
        assert s.pred(x) == _linear_pred(keys, x)
        assert s.rank(x) == bisect_right(s.keys, x) - 1


class TestFastParams:
    def test_levels_grow_with_area(self):
        p20 = FastParams.from_area(1 << 20, 3.0)
        assert (p20.levels, p20.b_bound) == (4, 16)
        p8 = FastParams.from_area(1 << 8, 3.0)
        assert p8.levels == 3
        assert FastParams.from_area(1 << 40, 3.0).levels == 5

    def test_epsilon_scales_levels(self):
        area = 1 << 20
        lo = FastParams.from_area(area, 1.0)
        hi = FastParams.from_area(area, 9.0)
        assert lo.levels <= FastParams.from_area(area, 3.0).levels <= hi.levels
        assert hi.levels == 3 * FastParams.from_area(area, 3.0).levels

    def test_tiny_area_floor(self):
        assert FastParams.from_area(1, 3.0).levels == 1
        assert FastParams.from_area(2, 0.01).levels == 1

    def test_rejects_nonpositive_epsilon(self):
        with pytest.raises(ParameterError):
            FastParams.from_area(100, 0.0)
        with pytest.raises(ParameterError):
            FastParams.from_area(100, -1.5)


def _region_area(region):
    if region[0] == "rect":
        _, x1, y1, x2, y2 = region
        return (x2 - x1 + 1) * (y2 - y1 + 1)
    _, x1, y1, x2, y2, hx1, hy1, hx2, hy2 = region
    return (x2 - x1 + 1) * (y2 - y1 + 1) - (hx2 - hx1 + 1) * (hy2 - hy1 + 1)


class TestIndexStructure:
    def test_frontier_tiles_each_symbol(self, small_corpus):
        for name, g in small_corpus:
            t, _ = balance_to_tslp(g)
            idx = build_fast(t)
            for sym, rule in idx.rules.items():
                h, w = idx.geo.dims(sym)
                covered = sum(_region_area(e.region) for e in rule.frontier)
                hole = 0
                if rule.hole_region is not None:
                    hx1, hy1, hx2, hy2 = rule.hole_region
                    hole = (hx2 - hx1 + 1) * (hy2 - hy1 + 1)
                assert covered + hole == h * w, (name, sym)
                assert len(rule.frontier) <= idx.params.b_bound

    def test_total_cells_bound(self, small_corpus):
        for name, g in small_corpus:
            t, _ = balance_to_tslp(g)
            idx = build_fast(t)
            bound = len(idx.rules) * (idx.params.b_bound + 2) ** 2
            assert idx.total_cells <= bound, name

    def test_frontier_entries_resolve(self):
        t, _ = balance_to_tslp(build_shiftbin(3))
        idx = build_fast(t)
        for rule in idx.rules.values():
            for entry in rule.frontier:
                assert (entry.symbol is None) != (entry.char is None)


class TestAccessFast:
    def test_agrees_with_other_paths(self, small_corpus):
        for name, g in small_corpus:
            t, _ = balance_to_tslp(g)
            idx = build_fast(t)
            m = expand(g)
            n, mm = m.shape
            for x, y in sample_positions(n, mm, 200, seed=5):
                c, visits = access_fast(idx, x, y)
                assert c == m[x - 1, y - 1], (name, x, y)
                assert visits >= 1

    def test_visit_bound(self, spiral_1024):
        t, stats = balance_to_tslp(spiral_1024)
        idx = build_fast(t)
        k = idx.params.levels
        limit = math.ceil(stats.output_depth / k) + 1
        tgeo = compute_geometry(t)
        n, m = tgeo.dims(t.start)
        for x, y in sample_positions(n, m, 600, seed=6):
            c, visits = access_fast(idx, x, y)
            assert visits <= limit, (x, y, visits, limit)
            assert c == access_tslp(t, x, y, geo=tgeo)[0]

    def test_fewer_visits_than_tslp_on_deep_input(self, spiral_1024):
        t, _ = balance_to_tslp(spiral_1024)
        idx = build_fast(t, epsilon=3.0)
        tgeo = compute_geometry(t)
        n, m = tgeo.dims(t.start)
        positions = sample_positions(n, m, 400, seed=7)
        fast = sum(access_fast(idx, x, y)[1] for x, y in positions)
        slow = sum(access_tslp(t, x, y, geo=tgeo)[1] for x, y in positions)
        assert fast < slow

    def test_out_of_bounds(self):
        t, _ = balance_to_tslp(build_shiftbin(2))
        idx = build_fast(t)
        h, w = idx.geo.dims(t.start)
        for x, y in ((0, 1), (1, 0), (h + 1, 1), (1, w + 1)):
            with pytest.raises(OutOfBounds):
                access_fast(idx, x, y)

    def test_plain_grammar_indexable(self):
        g = build_shiftbin(2)
        idx = build_fast(g)
        m = expand(g)
        for x, y in sample_positions(*m.shape, 100, seed=8):
            assert access_fast(idx, x, y)[0] == m[x - 1, y - 1]

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 3_000))
    def test_random_grammars(self, seed):
        g = random_grammar(seed, 50, max_dim=24)
        t, _ = balance_to_tslp(g)
        idx = build_fast(t)
        m = expand(g)
        n, mm = m.shape
        for x, y in sample_positions(n, mm, 25, seed=seed):
            assert access_fast(idx, x, y)[0] == m[x - 1, y - 1]


class TestBench:
    def test_report_shape(self):
        g = build_spiral(256)
        t, _ = balance_to_tslp(g)
        idx = build_fast(t)
        report = bench_access(t, idx, queries=64, seed=3)
        d = report.to_dict()
        assert d["queries"] == 64
        assert d["seed"] == 3
        assert (d["height"], d["width"]) == (256, 256)
        names = [p["path"] for p in d["paths"]]
        assert names == ["tslp", "fast"]
        for p in d["paths"]:
            assert p["meanVisits"] <= p["maxVisits"]
            assert p["nanosPerQuery"] > 0
        json.loads(report.to_json())

    def test_plain_path_included_for_plain_grammars(self):
        g = build_spiral(256)
        idx = build_fast(g)
        report = bench_access(g, idx, queries=32, seed=4)
        assert [p.path for p in report.paths] == ["plain", "tslp", "fast"]

    def test_threads_consistent(self):
        g = build_spiral(256)
        t, _ = balance_to_tslp(g)
        idx = build_fast(t)
        one = bench_access(t, idx, queries=50, seed=9, threads=1)
        two = bench_access(t, idx, queries=50, seed=9, threads=2)
        for a, b in zip(one.paths, two.paths):
            assert a.mean_visits == b.mean_visits
            assert a.max_visits == b.max_visits
