import numpy as np
import pytest

from refview.errors import EmptyCameraSet, NonIntegralPosition
from refview.grid import (
    NavigationWindow,
    ViewTick,
    build_grid,
    format_units,
    window_from_request,
)


def test_build_grid_canonical_lattice():
    g = build_grid(8, 10.0, 6, [0, 1, 2, 3, 4, 5, 6])
    assert len(list(g.ticks())) == 49
    assert g.cameras == (0, 8, 16, 24, 32, 40, 48)


def test_build_grid_minimal_two_cameras():
    g = build_grid(1, 50.0, 4, [0, 4])
    assert len(list(g.ticks())) == 5
    assert g.cameras == (0, 4)


def test_build_grid_uneven_cameras():
    g = build_grid(4, 25.0, 6, [0, 1.5, 2, 2.75, 4, 5, 6])
    assert g.cameras == (0, 6, 8, 11, 16, 20, 24)


def test_build_grid_rejects_off_lattice():
    with pytest.raises(NonIntegralPosition):
        build_grid(4, 25.0, 6, [0, "1.3", 6])
    with pytest.raises(NonIntegralPosition):
        build_grid(10, 25.0, 6, [0, 0.15, 6])


def test_build_grid_accepts_decimal_strings_exactly():
    # 0.1 on a tenth lattice must be accepted (decimal, not binary, reading)
    g = build_grid(10, 25.0, 2, [0, "0.1", 2])
    assert g.cameras == (0, 1, 20)


def test_build_grid_needs_two_cameras():
    with pytest.raises(EmptyCameraSet):
        build_grid(1, 10.0, 4, [2])


def test_build_grid_rejects_unsorted():
    with pytest.raises(NonIntegralPosition):
        build_grid(1, 10.0, 4, [3, 1])


def test_window_from_request_direct():
    g = build_grid(8, 10.0, 6, [0, 6])
    w = window_from_request(g.tick(2), rho_units_per_s=0.25, t_s=1.0, grid=g)
    assert (w.left, w.right) == (14, 18)


def test_window_from_request_clamps():
    g = build_grid(8, 10.0, 6, [0, 6])
    w = window_from_request(g.tick("0.125"), rho_units_per_s=0.5, t_s=1.0, grid=g)
    assert w.left == g.min_tick
    assert w.right == 1 + 4


def test_window_from_request_fractional_reach():
    g = build_grid(10, 10.0, 6, [0, 6])
    w = window_from_request(g.tick("2.5"), rho_units_per_s=0.2, t_s=1.0, grid=g)
    assert (w.left, w.right) == (23, 27)


def test_window_invariants():
    with pytest.raises(NonIntegralPosition):
        NavigationWindow(ViewTick(5), ViewTick(3))
    w = NavigationWindow(ViewTick(3), ViewTick(3))  # degenerate single tick allowed
    assert w.tick_count() == 1


def test_round_trip_and_distance_properties():
    rng = np.random.default_rng(3)
    for _ in range(20):
        L = int(rng.integers(1, 9))
        span = int(rng.integers(2, 8))
        g = build_grid(L, float(rng.uniform(1, 60)), span, [0, span])
        for t in g.ticks():
            assert g.tick(g.unit_index(t)) == t
        a, b, c = sorted(rng.integers(0, span * L + 1, size=3).tolist())
        assert g.dist_mm(a, b) == g.dist_mm(b, a)
        assert (g.dist_mm(a, b) == 0) == (a == b)
        assert g.dist_mm(a, c) == pytest.approx(g.dist_mm(a, b) + g.dist_mm(b, c), abs=1e-12)


def test_window_from_request_always_valid():
    rng = np.random.default_rng(4)
    for _ in range(50):
        L = int(rng.integers(1, 9))
        span = int(rng.integers(2, 8))
        g = build_grid(L, 10.0, span, [0, span])
        u = ViewTick(int(rng.integers(0, span * L + 1)))
        w = window_from_request(u, float(rng.uniform(0, 2)), float(rng.uniform(0, 2)), g)
        assert g.min_tick <= w.left <= w.right <= g.max_tick


def test_format_units():
    g = build_grid(8, 10.0, 6, [0, 6])
    assert format_units(g, [6, 16, 42]) == "0.75;2;5.25"
