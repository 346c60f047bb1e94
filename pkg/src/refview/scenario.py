"""Scenario configuration and the shared solve context.

A Scenario bundles everything one optimization run needs: grid, navigation
window, capacity, distortion model, candidate policy, and RNG seed. The
SolveContext derived from it precomputes the candidate reference list, the
per-reference delivery distortions, and cached distortion arrays that both
solvers and the assumption checkers consume.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .distortion import (
    INF,
    BetaMode,
    ClosedFormEvaluator,
    Evaluator,
    SynthParams,
    read_table_csv,
    reference_distortion,
)
from .errors import ConfigError, Unsynthesizable
from .grid import NavigationWindow, ViewGrid, ViewTick, build_grid

# Finite stand-in for +inf inside prefix sums (inf - inf poisons them with NaN).
BIG = 1e30
BIG_THRESHOLD = 1e29


class CandidateMode(Enum):
    ALL_VIEWS = "all"
    CAMERAS_ONLY = "cameras"


@dataclass(frozen=True)
class Scenario:
    grid: ViewGrid
    window: NavigationWindow
    capacity: int
    params: SynthParams
    evaluator: Evaluator
    candidate_mode: CandidateMode = CandidateMode.ALL_VIEWS
    seed: int = 0

    def __post_init__(self) -> None:
        if self.capacity < 2:
            raise ConfigError(f"capacity must be >= 2, got {self.capacity}")
        if not (self.grid.on_grid(self.window.left) and self.grid.on_grid(self.window.right)):
            raise ConfigError("window must lie within the grid")

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)


_CONFIG_KEYS = {
    "ticks_per_unit",
    "unit_spacing_mm",
    "span_units",
    "cameras",
    "window_left",
    "window_right",
    "capacity",
    "gamma",
    "d_inpaint",
    "d_camera",
    "beta_mode",
    "beta_fixed",
    "d_max_override",
    "candidate_mode",
    "seed",
    "distortion_table",
}

_REQUIRED_KEYS = (
    "ticks_per_unit",
    "unit_spacing_mm",
    "span_units",
    "cameras",
    "window_left",
    "window_right",
    "capacity",
)


def parse_config(text: str, base_dir: Path | None = None) -> Scenario:
    """Parse a line-oriented ``key = value`` scenario config.

    Blank lines and '#' comments are allowed; unknown keys are errors.
    Relative distortion_table paths resolve against base_dir.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not val:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        values[key] = val

    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    try:
        grid = build_grid(
            ticks_per_unit=int(values["ticks_per_unit"]),
            unit_spacing_mm=float(values["unit_spacing_mm"]),
            span_units=values["span_units"],
            camera_positions=[p.strip() for p in values["cameras"].split(",") if p.strip()],
        )
        window = NavigationWindow(grid.tick(values["window_left"]), grid.tick(values["window_right"]))
        beta_mode = BetaMode(values.get("beta_mode", "computed"))
        params = SynthParams(
            gamma=float(values.get("gamma", 0.0)),
            d_inpaint=float(values.get("d_inpaint", 0.0)),
            d_camera=float(values.get("d_camera", 0.0)),
            beta_mode=beta_mode,
            beta_fixed=float(values.get("beta_fixed", 0.0)),
            d_max_override=float(values["d_max_override"]) if "d_max_override" in values else None,
        )
        if "distortion_table" in values:
            table_path = Path(values["distortion_table"])
            if not table_path.is_absolute() and base_dir is not None:
                table_path = base_dir / table_path
            evaluator: Evaluator = read_table_csv(table_path)
        else:
            if "gamma" not in values or "d_inpaint" not in values:
                raise ConfigError("closed-form scenarios need gamma and d_inpaint")
            evaluator = ClosedFormEvaluator(grid, params)
        scenario = Scenario(
            grid=grid,
            window=window,
            capacity=int(values["capacity"]),
            params=params,
            evaluator=evaluator,
            candidate_mode=CandidateMode(values.get("candidate_mode", "all")),
            seed=int(values.get("seed", "0")),
        )
    except ConfigError:
        raise
    except Exception as exc:  # bad numbers, off-lattice positions, missing table file
        raise ConfigError(str(exc)) from exc
    return scenario


def load_config(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)


class SolveContext:
    """Precomputed candidate set, reference distortions, and distortion caches.

    Candidates whose delivery distortion is infinite (outside the camera
    hull, or missing from a tabulated model) are dropped: the network cannot
    construct them, so no selection may contain them.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.grid = scenario.grid
        self.window = scenario.window
        self.evaluator = scenario.evaluator
        self.wl = int(scenario.window.left)
        self.wr = int(scenario.window.right)
        self.nt = self.wr - self.wl + 1

        if scenario.candidate_mode is CandidateMode.CAMERAS_ONLY:
            raw = [int(c) for c in self.grid.cameras]
        else:
            raw = list(self.grid.ticks())
        cand, refd = [], []
        for t in raw:
            try:
                d = reference_distortion(ViewTick(t), self.grid, self.evaluator, scenario.params)
            except Unsynthesizable:
                continue
            if d == INF:
                continue
            cand.append(t)
            refd.append(d)
        self.cand = np.asarray(cand, dtype=np.int64)
        self.refd = np.asarray(refd, dtype=float)
        self.nc = len(cand)
        self.candpos = {t: i for i, t in enumerate(cand)}
        self.refd_map = {t: refd[i] for i, t in enumerate(cand)}
        self._dmat: np.ndarray | None = None

    # -- per-tick pair distortion ------------------------------------------

    def pair_d(self, u: int, v_l: int, v_r: int) -> float:
        """Distortion of window tick u under reference pair (v_l, v_r)."""
        if u == v_l:
            return self.refd_map[v_l]
        if u == v_r:
            return self.refd_map[v_r]
        return self.evaluator.value(u, v_l, v_r, self.refd_map[v_l], self.refd_map[v_r])

    def pair_col(self, v_l: int, v_r: int) -> np.ndarray:
        """pair_d over all window ticks, +inf clamped to BIG for prefix sums."""
        us = np.arange(self.wl, self.wr + 1)
        col = self.evaluator.value_array(us, v_l, v_r, self.refd_map[v_l], self.refd_map[v_r])
        return np.minimum(col, BIG)

    def dmat(self) -> np.ndarray:
        """Dense (tick, left, right) distortion tensor over candidates.

        Entry [ui, i, j] is the distortion of window tick wl+ui under pair
        (cand[i], cand[j]); the diagonal holds the direct-use distortion when
        the tick coincides with the candidate, BIG otherwise. Invalid
        orderings are BIG.
        """
        if self._dmat is None:
            nt, nc = self.nt, self.nc
            m = np.full((nt, nc, nc), BIG)
            for i in range(nc):
                for j in range(i + 1, nc):
                    m[:, i, j] = self.pair_col(int(self.cand[i]), int(self.cand[j]))
            for i in range(nc):
                ui = int(self.cand[i]) - self.wl
                if 0 <= ui < nt:
                    m[ui, i, i] = self.refd[i]
            self._dmat = m
        return self._dmat
