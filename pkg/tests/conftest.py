"""Shared scenario builders for the test suite."""

from dataclasses import replace

import numpy as np
import pytest

from refview.distortion import ClosedFormEvaluator, SynthParams, TabulatedEvaluator
from refview.grid import NavigationWindow, ViewTick, build_grid
from refview.scenario import Scenario


def make_scenario(L, d_mm, span_units, camera_ticks, wl, wr, capacity, params, seed=0, evaluator=None):
    grid = replace(
        build_grid(L, d_mm, span_units, [0, span_units]),
        cameras=tuple(ViewTick(int(t)) for t in camera_ticks),
    )
    if evaluator is None:
        evaluator = ClosedFormEvaluator(grid, params)
    return Scenario(
        grid=grid,
        window=NavigationWindow(ViewTick(int(wl)), ViewTick(int(wr))),
        capacity=capacity,
        params=params,
        evaluator=evaluator,
        seed=seed,
    )


def canonical_scenario(L=8, capacity=2, gamma=0.2, d_inpaint=200.0, d_camera=0.0, d_mm=25.0):
    """Equal-spacing seven-camera line with the window pulled in by 3/4 view."""
    grid = build_grid(L, d_mm, 6, [0, 1, 2, 3, 4, 5, 6])
    params = SynthParams(gamma=gamma, d_inpaint=d_inpaint, d_camera=d_camera)
    return Scenario(
        grid=grid,
        window=NavigationWindow(grid.tick("0.75"), grid.tick("5.25")),
        capacity=capacity,
        params=params,
        evaluator=ClosedFormEvaluator(grid, params),
    )


def dense_random_scenario(seed, max_ticks=25):
    """Random dense-camera scenario; the population used by the optimality gate.

    Cameras sit every one or two ticks inside a random block, so the
    candidate reference qualities stay near-homogeneous and the structural
    checkers have a real chance to pass.
    """
    rng = np.random.default_rng((20260808, seed))
    L = int(rng.choice([1, 1, 2]))
    span_units = max(4, int(rng.integers(8, max_ticks + 1)) // L)
    span_ticks = span_units * L
    step = int(rng.choice([1, 2])) if L == 1 else 2
    a = int(rng.integers(0, max(1, span_ticks - 6)))
    b = int(rng.integers(a + 5, span_ticks + 1))
    cams = list(range(a, b + 1, step))
    if cams[-1] != b:
        cams.append(b)
    cams = cams[:6]
    b = cams[-1]
    if len(cams) < 2 or b - a < 4:
        return None
    wl = int(rng.integers(a, b - 2))
    wr = int(rng.integers(wl + 2, b + 1))
    params = SynthParams(
        gamma=float(rng.uniform(0.05, 0.5)),
        d_inpaint=float(rng.uniform(50, 500)),
        d_camera=float(rng.choice([0.0, 10.0, 50.0])),
    )
    return make_scenario(
        L, float(rng.choice([10.0, 25.0])), span_units, cams, wl, wr,
        int(rng.integers(2, 6)), params, seed=seed,
    )


def sparse_random_scenario(rng, max_span=12):
    """Small random scenario with arbitrary camera placement (may violate the
    structural assumptions); meant for the assumption-free oracles."""
    span = int(rng.integers(6, max_span + 1))
    ncam = int(rng.integers(2, 5))
    cams = sorted(rng.choice(np.arange(0, span + 1), size=ncam, replace=False).tolist())
    if len(cams) < 2 or cams[-1] - cams[0] < 3:
        return None
    wl = int(rng.integers(cams[0], cams[-1] - 2))
    wr = int(rng.integers(wl + 2, cams[-1] + 1))
    params = SynthParams(
        gamma=float(rng.uniform(0.05, 0.5)),
        d_inpaint=float(rng.uniform(50, 500)),
        d_camera=float(rng.choice([0.0, 10.0])),
    )
    return make_scenario(1, 10.0, span, cams, wl, wr, int(rng.integers(2, 5)), params)


def tabulated_random_scenario(rng, max_span=10):
    """Random tabulated instance over a two-camera line; generally violates
    both structural assumptions."""
    span = int(rng.integers(6, max_span + 1))
    table = {}
    for v in range(1, span):
        table[(v, 0, span)] = float(rng.uniform(0.0, 80.0))
    for u in range(0, span + 1):
        for vl in range(0, u):
            for vr in range(u + 1, span + 1):
                if rng.random() < 0.75:
                    table[(u, vl, vr)] = float(rng.uniform(0.0, 300.0))
    params = SynthParams(gamma=0.0, d_inpaint=0.0, d_camera=float(rng.choice([0.0, 5.0])))
    wl = int(rng.integers(0, span - 2))
    wr = int(rng.integers(wl + 2, span + 1))
    return make_scenario(
        1, 10.0, span, [0, span], wl, wr, int(rng.integers(2, 5)), params,
        evaluator=TabulatedEvaluator(table),
    )


@pytest.fixture
def canonical_grid():
    return build_grid(8, 25.0, 6, [0, 1, 2, 3, 4, 5, 6])
