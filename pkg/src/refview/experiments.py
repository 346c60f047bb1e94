"""Experiment sweeps over capacity, window geometry, camera placement, and
camera density, with PSNR aggregation and deterministic CSV emission.

Randomized sweeps derive one RNG stream per (seed, run index), so results
are independent of execution order, reproducible byte-for-byte for a fixed
scenario and seed, and every sweep value sees the same draws (common random
numbers across the sweep axis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dp import Selection, solve
from .errors import ConfigError, Infeasible
from .grid import NavigationWindow, ViewGrid, ViewTick, format_units
from .scenario import CandidateMode, Scenario

PSNR_FLOOR_MSE = 1e-12


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    psnr_synth_db: float
    psnr_nosynth_db: float
    refs_synth: str
    refs_nosynth: str


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def gaps(self) -> list[float]:
        return [r.psnr_synth_db - r.psnr_nosynth_db for r in self.rows]


def psnr_of(selection: Selection, window_tick_count: int, peak: float = 255.0) -> float:
    """PSNR of the window-mean distortion; a zero objective is floored, not
    reported as infinite."""
    if window_tick_count < 1 or peak <= 0:
        raise ConfigError("window tick count must be >= 1 and peak > 0")
    mean = max(selection.objective / window_tick_count, PSNR_FLOOR_MSE)
    return 10.0 * math.log10(peak * peak / mean)


def _solve_mode(scenario: Scenario, mode: CandidateMode) -> Selection | None:
    try:
        return solve(scenario.with_(candidate_mode=mode))
    except Infeasible:
        return None


def _row(scenario: Scenario, sweep_value: float, peak: float) -> SweepRow:
    n = scenario.window.tick_count()
    sel_s = _solve_mode(scenario, CandidateMode.ALL_VIEWS)
    sel_ns = _solve_mode(scenario, CandidateMode.CAMERAS_ONLY)
    return SweepRow(
        sweep_value=float(sweep_value),
        psnr_synth_db=psnr_of(sel_s, n, peak) if sel_s else float("nan"),
        psnr_nosynth_db=psnr_of(sel_ns, n, peak) if sel_ns else float("nan"),
        refs_synth=format_units(scenario.grid, sel_s.refs) if sel_s else "",
        refs_nosynth=format_units(scenario.grid, sel_ns.refs) if sel_ns else "",
    )


def sweep_capacity(base: Scenario, c_values, peak: float = 255.0) -> SweepResult:
    """Solve both candidate modes at each capacity."""
    rows = []
    for c in c_values:
        if int(c) < 2:
            raise ConfigError(f"capacity values must be >= 2, got {c}")
        rows.append(_row(base.with_(capacity=int(c)), float(c), peak))
    return SweepResult(tuple(rows))


def sweep_window_left(base: Scenario, ul_values, peak: float = 255.0) -> SweepResult:
    """Slide the window's left edge, keeping its right edge fixed."""
    rows = []
    for ul in ul_values:
        left = base.grid.tick(ul)
        window = NavigationWindow(left, base.window.right)
        rows.append(_row(base.with_(window=window), float(left) / base.grid.ticks_per_unit, peak))
    return SweepResult(tuple(rows))


def sweep_window_size(base: Scenario, delta_values, n_trials: int = 64, peak: float = 255.0) -> SweepResult:
    """Mean PSNR of both modes over window placements, per window size.

    All valid start ticks are enumerated when there are at most n_trials of
    them; otherwise n_trials starts are sampled without replacement.
    """
    grid = base.grid
    rows = []
    for si, delta in enumerate(delta_values):
        width = int(grid.tick(delta))
        starts = np.arange(grid.min_tick, grid.max_tick - width + 1)
        if len(starts) > n_trials:
            rng = np.random.default_rng((base.seed, si))
            starts = np.sort(rng.choice(starts, size=n_trials, replace=False))
        acc_s, acc_ns, used = 0.0, 0.0, 0
        for s in starts:
            window = NavigationWindow(ViewTick(int(s)), ViewTick(int(s) + width))
            scn = base.with_(window=window)
            sel_s = _solve_mode(scn, CandidateMode.ALL_VIEWS)
            sel_ns = _solve_mode(scn, CandidateMode.CAMERAS_ONLY)
            if sel_s is None or sel_ns is None:
                continue
            n = window.tick_count()
            acc_s += psnr_of(sel_s, n, peak)
            acc_ns += psnr_of(sel_ns, n, peak)
            used += 1
        rows.append(
            SweepRow(
                sweep_value=float(width) / grid.ticks_per_unit,
                psnr_synth_db=acc_s / used if used else float("nan"),
                psnr_nosynth_db=acc_ns / used if used else float("nan"),
                refs_synth="",
                refs_nosynth="",
            )
        )
    return SweepResult(tuple(rows))


def _perturbed_cameras(grid: ViewGrid, window, sigma_sq: float, rng) -> ViewGrid:
    """Jitter camera positions, snap to the lattice, and redraw until the
    cameras are distinct and still bracket the window; fall back to the
    unperturbed set if no draw qualifies."""
    base_units = np.array([int(c) / grid.ticks_per_unit for c in grid.cameras])
    sd = math.sqrt(sigma_sq)
    for _ in range(500):
        pos = base_units + rng.normal(0.0, sd, size=len(base_units)) if sd > 0 else base_units
        ticks = np.floor(pos * grid.ticks_per_unit + 0.5).astype(int)
        ticks = np.clip(ticks, grid.min_tick, grid.max_tick)
        uniq = sorted(set(int(t) for t in ticks))
        if len(uniq) != len(base_units):
            continue
        if uniq[0] > window.left or uniq[-1] < window.right:
            continue
        return replace(grid, cameras=tuple(ViewTick(t) for t in uniq))
    return grid


def sweep_camera_randomness(base: Scenario, sigma_v_values, n_runs: int = 400, peak: float = 255.0) -> SweepResult:
    """Mean PSNR of both modes under Gaussian camera-placement jitter."""
    rows = []
    for sigma_sq in sigma_v_values:
        acc_s, acc_ns, used = 0.0, 0.0, 0
        for run in range(n_runs):
            # one stream per (seed, run): common draws across sweep values
            rng = np.random.default_rng((base.seed, run))
            grid = _perturbed_cameras(base.grid, base.window, float(sigma_sq), rng)
            scn = base.with_(grid=grid)
            sel_s = _solve_mode(scn, CandidateMode.ALL_VIEWS)
            sel_ns = _solve_mode(scn, CandidateMode.CAMERAS_ONLY)
            if sel_s is None or sel_ns is None:
                continue
            n = base.window.tick_count()
            acc_s += psnr_of(sel_s, n, peak)
            acc_ns += psnr_of(sel_ns, n, peak)
            used += 1
        rows.append(
            SweepRow(
                sweep_value=float(sigma_sq),
                psnr_synth_db=acc_s / used if used else float("nan"),
                psnr_nosynth_db=acc_ns / used if used else float("nan"),
                refs_synth="",
                refs_nosynth="",
            )
        )
    return SweepResult(tuple(rows))


def sweep_sampling_distance(
    base: Scenario,
    l_values,
    n_runs: int = 400,
    window_width_views: int = 20,
    peak: float = 255.0,
) -> SweepResult:
    """Mean PSNR of both modes as the camera sampling distance grows.

    The viewpoint lattice keeps the base grid's physical spacing; one view in
    every l is a camera (the span's last view is always one, so every window
    stays inside the camera hull). The window spans window_width_views views
    and is placed uniformly at random per run.
    """
    span_views = (base.grid.max_tick - base.grid.min_tick) // base.grid.ticks_per_unit
    if span_views <= window_width_views:
        raise ConfigError("grid span too small for the sampling-distance sweep window")
    rows = []
    for l_step in l_values:
        l_step = int(l_step)
        cams = sorted(set(list(range(0, span_views + 1, l_step)) + [span_views]))
        grid = ViewGrid(
            ticks_per_unit=1,
            unit_spacing_mm=base.grid.unit_spacing_mm / base.grid.ticks_per_unit,
            min_tick=ViewTick(0),
            max_tick=ViewTick(span_views),
            cameras=tuple(ViewTick(c) for c in cams),
        )
        acc_s, acc_ns, used = 0.0, 0.0, 0
        for run in range(n_runs):
            # one stream per (seed, run): every sampling distance sees the
            # same window placements
            rng = np.random.default_rng((base.seed, run))
            start = int(rng.integers(0, span_views - window_width_views + 1))
            window = NavigationWindow(ViewTick(start), ViewTick(start + window_width_views))
            scn = base.with_(grid=grid, window=window)
            sel_s = _solve_mode(scn, CandidateMode.ALL_VIEWS)
            sel_ns = _solve_mode(scn, CandidateMode.CAMERAS_ONLY)
            if sel_s is None or sel_ns is None:
                continue
            n = window.tick_count()
            acc_s += psnr_of(sel_s, n, peak)
            acc_ns += psnr_of(sel_ns, n, peak)
            used += 1
        rows.append(
            SweepRow(
                sweep_value=float(l_step),
                psnr_synth_db=acc_s / used if used else float("nan"),
                psnr_nosynth_db=acc_ns / used if used else float("nan"),
                refs_synth="",
                refs_nosynth="",
            )
        )
    return SweepResult(tuple(rows))


def threshold_capacity(base: Scenario, ur_values, gap_db: float = 1e-9, peak: float = 255.0):
    """Per window right edge, the smallest capacity beyond which in-network
    synthesis stops improving PSNR (and stays that way over the scan)."""
    out = []
    c_max = len(base.grid.cameras) + 1
    for ur in ur_values:
        window = NavigationWindow(base.window.left, base.grid.tick(ur))
        gaps = {}
        for c in range(2, c_max + 1):
            scn = base.with_(window=window, capacity=c)
            sel_s = _solve_mode(scn, CandidateMode.ALL_VIEWS)
            sel_ns = _solve_mode(scn, CandidateMode.CAMERAS_ONLY)
            if sel_s is None or sel_ns is None:
                gaps[c] = float("nan")
                continue
            n = window.tick_count()
            gaps[c] = psnr_of(sel_s, n, peak) - psnr_of(sel_ns, n, peak)
        c_star = None
        for c in range(2, c_max + 1):
            tail = [gaps[cc] for cc in range(c, c_max + 1)]
            if all(not math.isnan(g) and g <= gap_db for g in tail):
                c_star = c
                break
        out.append((float(window.right) / base.grid.ticks_per_unit, c_star))
    return out


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    if isinstance(x, float) and x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def write_sweep_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("sweep_value,psnr_synth_db,psnr_nosynth_db,refs_synth,refs_nosynth\n")
        for r in result.rows:
            fh.write(
                f"{_fmt(r.sweep_value)},{_fmt(r.psnr_synth_db)},{_fmt(r.psnr_nosynth_db)},"
                f"{r.refs_synth},{r.refs_nosynth}\n"
            )


def write_threshold_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("u_r,c_star\n")
        for ur, c_star in rows:
            fh.write(f"{_fmt(ur)},{c_star if c_star is not None else 'nan'}\n")


def write_selection_csv(selection: Selection, grid: ViewGrid, path) -> None:
    def unit(t: int) -> str:
        fr = grid.unit_index(t)
        return str(fr.numerator) if fr.denominator == 1 else repr(float(fr))

    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("u,v_left,v_right,distortion\n")
        for u in sorted(selection.assignment):
            v_l, v_r = selection.assignment[u]
            fh.write(f"{unit(u)},{unit(v_l)},{unit(v_r)},{repr(selection.per_view[u])}\n")
