"""Fibered barcode / treegram queries: index vs linear scan vs brute force."""

from __future__ import annotations

import math
import random

import pytest

import staircode as sc

from conftest import random_line, random_space

INF = sc.INF


def fresh_stats() -> dict:
    return {"evaluated": 0, "nodes": 0, "layers": 0, "reported": 0}


def bare(bars):
    return [(b.owner, b.birth_t, b.death_t) for b in bars]


# --------------------------------------------------------------------------
# worked lines on the four-point example


def test_diagonal_line_frozen(d45):
    S = sc.compute_staircode(d45)
    idx = sc.build_index(S)
    L = sc.LineQuery((0.0, 0.0), (1.0, 1.0))
    bars = sc.query_barcode(idx, L)

    assert [b.owner for b in bars] == ["x1", "x2", "x3"]
    # crossing parameters are the line's own, so equality is exact
    assert bars[0].birth_t == L.t_of_sigma(1.0)
    assert bars[0].death_t == INF
    assert bars[0].death_grade is None
    assert bars[1].birth_t == L.t_of_sigma(2.0)
    assert bars[1].death_t == L.t_of_eps(3.0)
    assert bars[2].birth_t == L.t_of_sigma(3.0)
    assert bars[2].death_t == L.t_of_sigma(4.0)
    r2 = math.sqrt(2.0)
    assert [b.birth_t for b in bars] == pytest.approx([r2, 2 * r2, 3 * r2])
    assert [b.death_t for b in bars][1:] == pytest.approx([3 * r2, 4 * r2])
    assert bars[1].birth_grade == pytest.approx((2.0, 2.0))
    assert bars[1].death_grade == pytest.approx((3.0, 3.0))
    assert bars[2].death_grade == pytest.approx((4.0, 4.0))

    same, empty = sc.query_barcode(idx, L, verbose=True)
    assert same == bars
    assert empty == ["x4"]


def test_offset_line_frozen(d45):
    """The slope-one line through (1.5, 0.5): three bars, two dying together
    where the fourth point arrives."""
    S = sc.compute_staircode(d45)
    idx = sc.build_index(S)
    L = sc.LineQuery((1.5, 0.5), (4.5, 3.5))
    bars = sc.query_barcode(idx, L)

    assert [b.owner for b in bars] == ["x1", "x2", "x3"]
    assert bars[0].birth_t == L.t_of_sigma(1.0)
    assert bars[0].birth_t == L.t_of_eps(0.0)  # enters exactly at eps = 0
    assert bars[0].birth_grade == pytest.approx((1.0, 0.0))
    assert bars[1].death_t == bars[2].death_t == L.t_of_sigma(4.0)
    assert bars[1].death_grade == pytest.approx((4.0, 3.0))
    assert bars[2].death_grade == pytest.approx((4.0, 3.0))

    # one connected component at the joint death grade, three just before
    t_dead = bars[1].death_t
    alive_at = lambda t: sum(b.birth_t <= t < b.death_t for b in bars)
    assert alive_at(t_dead) == 1
    assert alive_at(t_dead - 1e-9) == 3
    grid = sc.grid_components(d45)
    assert grid.count_real(*L.point_at(t_dead)) == 1


def test_shallow_line_hits_everything(d45):
    S = sc.compute_staircode(d45)
    L = sc.LineQuery((5.0, 0.0), (6.0, 1.0))
    bars = sc.query_barcode(sc.build_index(S), L)
    assert [b.owner for b in bars] == ["x1", "x2", "x3", "x4"]
    assert all(b.birth_t == 0.0 for b in bars)
    assert bars[0].birth_grade == (5.0, 0.0)
    assert [b.death_t for b in bars] == [
        INF,
        L.t_of_eps(3.0),
        L.t_of_eps(2.5),
        L.t_of_eps(1.5),
    ]


def test_tangent_line_excluded_exactly(d45):
    """Envelopes are open from above: a line through two staircase top corners
    yields only the quadrant's bar, while any drop below picks them up."""
    S = sc.compute_staircode(d45)
    idx = sc.build_index(S)

    grazing = sc.LineQuery((2.0, 3.0), (3.0, 4.0))  # through both top corners
    bars = sc.query_barcode(idx, grazing)
    assert [b.owner for b in bars] == ["x1"]

    below = sc.LineQuery((2.0, 2.9), (3.0, 3.9))
    assert [b.owner for b in sc.query_barcode(idx, below)] == ["x1", "x2", "x3"]


def test_steep_line_left_of_births(d45):
    S = sc.compute_staircode(d45)
    L = sc.LineQuery((0.5, 0.0), (0.6, 1.0))
    bars = sc.query_barcode(sc.build_index(S), L)
    assert bare(bars) == [("x1", L.t_of_sigma(1.0), INF)]
    assert bars[0].birth_grade == pytest.approx((1.0, 5.0))


def test_fibered_treegram_frozen(d45):
    S = sc.compute_staircode(d45)
    idx = sc.build_index(S)
    L = sc.LineQuery((0.0, 0.0), (1.0, 1.0))
    tg = sc.query_treegram(idx, L)

    assert tg.leaves == ("x1", "x2", "x3", "x4")
    assert tg.births == tuple(L.t_of_sigma(s) for s in (1.0, 2.0, 3.0, 4.0))
    assert [(m.left, m.right) for m in tg.merges] == [
        ("x2", "x1"),
        ("x3", "x1"),
        ("x4", "x1"),
    ]
    assert [m.height for m in tg.merges] == [
        L.t_of_eps(3.0),
        L.t_of_sigma(4.0),
        L.t_of_sigma(4.0),
    ]
    assert tg.blocks_at(L.t_of_sigma(4.0)) == (frozenset({"x1", "x2", "x3", "x4"}),)

    # its one-parameter elder rule reproduces the fibered barcode, owners too
    assert bare(sc.elder_rule_barcode(tg, S.order_ids)) == bare(
        sc.query_barcode(idx, L)
    )


# --------------------------------------------------------------------------
# randomized equivalences


def test_index_scan_and_oracle_agree():
    rng = random.Random(71)
    for _ in range(30):
        X = random_space(rng)
        S = sc.compute_staircode(X)
        tree = sc.build_index(S)
        scan = sc.build_index(S, sc.QueryIndexConfig(linear_scan=True))
        order = sc.GenericOrdering(X)
        for _ in range(10):
            L = random_line(rng, X)
            bars = sc.query_barcode(tree, L)
            assert bars == sc.query_barcode(scan, L)
            assert bars == sc.oracle_line_barcode(X, order, L)


def test_treegram_restriction_matches_barcode():
    """Along any line the treegram's elder-rule barcode is the fibered
    barcode of the staircode, including owners."""
    rng = random.Random(72)
    for _ in range(25):
        X = random_space(rng)
        S = sc.compute_staircode(X)
        idx = sc.build_index(S)
        for _ in range(8):
            L = random_line(rng, X)
            tg = sc.query_treegram(idx, L)
            assert len(tg.merges) == X.n - 1
            assert bare(sc.elder_rule_barcode(tg, S.order_ids)) == bare(
                sc.query_barcode(idx, L)
            )


def test_alive_bars_count_components():
    rng = random.Random(73)
    for _ in range(15):
        X = random_space(rng)
        grid = sc.grid_components(X)
        idx = sc.build_index(sc.compute_staircode(X))
        for _ in range(6):
            L = random_line(rng, X)
            bars = sc.query_barcode(idx, L)
            # sample midpoints between consecutive endpoints: converting a
            # parameter back to (sigma, eps) rounds, so exact endpoints are
            # off limits but anything in a cell's interior is safe
            cuts = sorted(
                {L.t_of_eps(0.0)}
                | {b.birth_t for b in bars}
                | {b.death_t for b in bars if b.death_t != INF}
            )
            ts = [(a + b) / 2 for a, b in zip(cuts, cuts[1:])]
            ts.extend((cuts[0] - 0.25, cuts[-1] + 1.0))
            for t in ts:
                sigma, eps = L.point_at(t)
                alive = sum(b.birth_t <= t < b.death_t for b in bars)
                assert alive == grid.count_real(sigma, eps)


def test_all_report_paths_agree_on_large_input():
    rng = random.Random(74)
    n = 220
    coords = [(rng.uniform(0, 10), rng.uniform(0, 10)) for _ in range(n)]
    f = [round(rng.uniform(0, 5), 2) for _ in range(n)]
    X = sc.AugmentedMetricSpace.from_points(
        [f"p{i}" for i in range(n)], f, coords=coords
    )
    S = sc.compute_staircode(X, mode="euclidean")
    configs = [
        sc.QueryIndexConfig(),
        sc.QueryIndexConfig(linear_scan=True),
        sc.QueryIndexConfig(hull_cutoff=0),
        sc.QueryIndexConfig(hull_cutoff=10**6),
    ]
    indexes = [sc.build_index(S, c) for c in configs]
    for _ in range(120):
        L = random_line(rng, X)
        expected = sc.query_barcode(indexes[0], L)
        for idx in indexes[1:]:
            assert sc.query_barcode(idx, L) == expected


def test_report_stats_and_output_sensitivity():
    rng = random.Random(75)
    n = 400
    coords = [(rng.uniform(0, 10), rng.uniform(0, 10)) for _ in range(n)]
    f = [round(rng.uniform(0, 5), 2) for _ in range(n)]
    X = sc.AugmentedMetricSpace.from_points(
        [f"p{i}" for i in range(n)], f, coords=coords
    )
    idx = sc.build_index(sc.compute_staircode(X, mode="euclidean"))
    L = sc.LineQuery((-1.0, 0.5), (0.0, 1.5))  # left of every birth column
    stats = fresh_stats()
    bars = sc.query_barcode(idx, L, stats=stats)
    assert stats["reported"] >= len(bars)
    assert stats["nodes"] >= 1
    # a line meeting few staircases must not probe most of the input
    if len(bars) < n // 10:
        assert stats["evaluated"] < n // 2


def test_query_accepts_bare_staircode(d45):
    S = sc.compute_staircode(d45)
    L = sc.LineQuery((0.0, 0.0), (1.0, 1.0))
    assert sc.query_barcode(S, L) == sc.query_barcode(sc.build_index(S), L)


def test_query_input_validation(d45):
    with pytest.raises(TypeError):
        sc.query_barcode(object(), sc.LineQuery((0.0, 0.0), (1.0, 1.0)))
    undecorated = sc.oracle_staircode(d45)
    with pytest.raises(ValueError, match="decorated"):
        sc.query_treegram(undecorated, sc.LineQuery((0.0, 0.0), (1.0, 1.0)))
