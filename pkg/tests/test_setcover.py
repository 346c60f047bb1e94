from itertools import combinations

import pytest

from refview.distortion import load_tabulated
from refview.errors import ConfigError, InvalidParameters
from refview.setcover import (
    SetCoverInstance,
    build_gadget,
    decide,
    min_cover_size,
    read_setcover_csv,
)


def test_singleton_gadget():
    sc = SetCoverInstance(1, (frozenset({1}),), 1)
    g = build_gadget(sc, d_bar=10.0, delta=4.0)
    assert g.budget == 3
    assert g.target == pytest.approx(6.0)
    # forced views 1 and 2, one gadget view 3 (ticks doubled on the half lattice)
    assert g.scenario.grid.cameras == (2, 4, 6)
    answer, sel = decide(g)
    assert answer
    assert {2, 4} <= set(sel.refs)


def test_figure_shape_counts():
    subsets = (frozenset({1, 2}), frozenset({2, 3}), frozenset({4}), frozenset({3, 4, 5}))
    sc = SetCoverInstance(5, subsets, 2)
    g = build_gadget(sc, 10.0, 4.0)
    assert len(g.scenario.grid.cameras) == 6 + 4
    assert g.budget == 5 + 1 + 2


def test_build_gadget_validation():
    sc = SetCoverInstance(2, (frozenset({1, 2}),), 1)
    with pytest.raises(InvalidParameters):
        build_gadget(sc, 10.0, 10.0)
    with pytest.raises(InvalidParameters):
        build_gadget(sc, 10.0, 0.0)
    with pytest.raises(InvalidParameters):
        SetCoverInstance(2, (), 1)
    with pytest.raises(InvalidParameters):
        SetCoverInstance(2, (frozenset(),), 1)
    with pytest.raises(InvalidParameters):
        SetCoverInstance(2, (frozenset({3}),), 1)


def test_decide_two_cover_exists():
    subsets = (frozenset({1, 2}), frozenset({3}), frozenset({2, 3}))
    assert decide(build_gadget(SetCoverInstance(3, subsets, 2), 10.0, 4.0))[0]
    assert not decide(build_gadget(SetCoverInstance(3, subsets, 1), 10.0, 4.0))[0]


def test_forced_views_present_whenever_target_met():
    subsets = (frozenset({1, 3}), frozenset({2}), frozenset({1, 2}))
    sc = SetCoverInstance(3, subsets, 2)
    g = build_gadget(sc, 8.0, 3.0)
    answer, sel = decide(g)
    assert answer
    forced = {2 * v for v in range(1, 5)}  # items 1..3 plus the default right
    assert forced <= set(sel.refs)


def test_gadget_table_round_trip():
    subsets = (frozenset({1}), frozenset({1, 2}))
    sc = SetCoverInstance(2, subsets, 1)
    g = build_gadget(sc, 9.0, 2.0)
    ev = load_tabulated((u, vl, vr, d) for (u, vl, vr), d in g.scenario.evaluator.table.items())
    default_right = 2 * 3
    for item in (1, 2):
        u = 2 * item + 1
        assert ev.value(u, 2 * item, default_right, 0.0, 0.0) == 9.0
        for j, subset in enumerate(subsets, start=1):
            want = 7.0 if item in subset else 9.0
            assert ev.value(u, 2 * item, default_right + 2 * j, 0.0, 0.0) == want
    assert ev.value(3, 2, 4, 0.0, 0.0) == float("inf")


def test_equivalence_small_family():
    items = range(1, 4)
    all_subsets = [frozenset(c) for r in (1, 2, 3) for c in combinations(items, r)]
    checked = 0
    for m in (1, 2, 3):
        for combo in combinations(all_subsets, m):
            for k in range(1, m + 1):
                sc = SetCoverInstance(3, tuple(combo), k)
                answer, _ = decide(build_gadget(sc, 10.0, 4.0))
                mc = min_cover_size(sc)
                assert answer == (mc is not None and mc <= k)
                checked += 1
    assert checked > 100


def test_read_setcover_csv(tmp_path):
    path = tmp_path / "cover.csv"
    path.write_text("subset_id,item\n1,1\n1,2\n2,3\n", encoding="utf-8")
    sc = read_setcover_csv(path, budget=2)
    assert sc.universe_size == 3
    assert sc.subsets == (frozenset({1, 2}), frozenset({3}))
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_setcover_csv(bad, budget=1)
