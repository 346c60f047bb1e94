"""Synthesized-view distortion models.

Two evaluator kinds share one call contract ``(u, v_l, v_r, d_l, d_r) -> mse``:
a closed-form exponential-decay model and a tabulated model loaded from CSV.
Both treat +inf as "this triple cannot be synthesized".
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .errors import DuplicateKey, InvalidOrdering, NegativeDistortion, Unsynthesizable
from .grid import ViewGrid, ViewTick

INF = float("inf")

TABLE_HEADER = ("u_tick", "vl_tick", "vr_tick", "distortion")


class BetaMode(Enum):
    COMPUTED = "computed"
    FIXED = "fixed"


@dataclass(frozen=True)
class SynthParams:
    """Parameters of the closed-form synthesis-distortion model.

    gamma: per-millimeter decay of the dominant-reference coverage.
    d_inpaint: MSE of inpainted (unrecoverable) regions.
    d_camera: MSE of a camera-captured reference (lossy coding).
    beta_mode: COMPUTED derives the secondary coverage from distance;
        FIXED pins it to beta_fixed and replaces the secondary reference
        distortion with d_max_override (the experimental-fit variant).
    """

    gamma: float
    d_inpaint: float
    d_camera: float = 0.0
    beta_mode: BetaMode = BetaMode.COMPUTED
    beta_fixed: float = 0.0
    d_max_override: float | None = None

    def __post_init__(self) -> None:
        if self.gamma < 0 or self.d_inpaint < 0 or self.d_camera < 0:
            raise NegativeDistortion("gamma, d_inpaint, d_camera must be >= 0")
        if not 0.0 <= self.beta_fixed <= 1.0:
            raise NegativeDistortion(f"beta_fixed must be in [0, 1], got {self.beta_fixed}")
        if self.beta_mode is BetaMode.FIXED and self.d_max_override is None:
            raise NegativeDistortion("FIXED beta mode requires d_max_override")
        if self.d_max_override is not None and self.d_max_override < 0:
            raise NegativeDistortion("d_max_override must be >= 0")


def eval_closed_form(
    u: ViewTick,
    v_l: ViewTick,
    v_r: ViewTick,
    d_l: float,
    d_r: float,
    grid: ViewGrid,
    params: SynthParams,
) -> float:
    """Closed-form distortion of view u synthesized from (v_l, v_r).

    A fraction alpha of the image comes from the dominant (lower-distortion)
    reference, a fraction (1-alpha)*beta from the other reference, and the
    remainder is inpainted. When u coincides with a reference the reference
    image is used directly.
    """
    if not (v_l <= u <= v_r):
        raise InvalidOrdering(f"need v_l <= u <= v_r, got {v_l}, {u}, {v_r}")
    if u == v_l:
        return float(d_l)
    if u == v_r:
        return float(d_r)
    if d_l <= d_r:
        d_min, v_min, d_max, v_max = d_l, v_l, d_r, v_r
    else:
        d_min, v_min, d_max, v_max = d_r, v_r, d_l, v_l
    alpha = math.exp(-params.gamma * grid.dist_mm(u, v_min))
    if params.beta_mode is BetaMode.FIXED:
        beta = params.beta_fixed
        d_max = params.d_max_override
    else:
        beta = math.exp(-params.gamma * grid.dist_mm(u, v_max))
    return alpha * d_min + (1.0 - alpha) * beta * d_max + (1.0 - alpha - (1.0 - alpha) * beta) * params.d_inpaint


class ClosedFormEvaluator:
    """Distortion evaluator backed by the closed-form model."""

    def __init__(self, grid: ViewGrid, params: SynthParams):
        self.grid = grid
        self.params = params

    def value(self, u: int, v_l: int, v_r: int, d_l: float, d_r: float) -> float:
        return eval_closed_form(u, v_l, v_r, d_l, d_r, self.grid, self.params)

    def value_array(self, us: np.ndarray, v_l: int, v_r: int, d_l: float, d_r: float) -> np.ndarray:
        """Vectorized model over a tick array; invalid orderings come back +inf."""
        p = self.params
        if d_l <= d_r:
            d_min, v_min, d_max, v_max = d_l, v_l, d_r, v_r
        else:
            d_min, v_min, d_max, v_max = d_r, v_r, d_l, v_l
        mm = self.grid.unit_spacing_mm / self.grid.ticks_per_unit
        alpha = np.exp(-p.gamma * np.abs(us - v_min) * mm)
        if p.beta_mode is BetaMode.FIXED:
            beta = p.beta_fixed
            d_max = p.d_max_override
        else:
            beta = np.exp(-p.gamma * np.abs(us - v_max) * mm)
        out = alpha * d_min + (1.0 - alpha) * beta * d_max + (1.0 - alpha - (1.0 - alpha) * beta) * p.d_inpaint
        out = np.where(us == v_l, d_l, out)
        out = np.where(us == v_r, d_r, out)
        return np.where((us < v_l) | (us > v_r), INF, out)


class TabulatedEvaluator:
    """Distortion evaluator backed by a (u, v_l, v_r) -> mse table.

    Missing triples evaluate to +inf; endpoint queries (u equal to a
    reference) pass the reference distortion through, matching the
    closed-form evaluator.
    """

    def __init__(self, table: Mapping[tuple[int, int, int], float]):
        self.table = dict(table)

    def value(self, u: int, v_l: int, v_r: int, d_l: float, d_r: float) -> float:
        if not (v_l <= u <= v_r):
            raise InvalidOrdering(f"need v_l <= u <= v_r, got {v_l}, {u}, {v_r}")
        if u == v_l:
            return float(d_l)
        if u == v_r:
            return float(d_r)
        return self.table.get((int(u), int(v_l), int(v_r)), INF)

    def value_array(self, us: np.ndarray, v_l: int, v_r: int, d_l: float, d_r: float) -> np.ndarray:
        get = self.table.get
        out = np.empty(len(us), dtype=float)
        for i, u in enumerate(us):
            u = int(u)
            if u < v_l or u > v_r:
                out[i] = INF
            elif u == v_l:
                out[i] = d_l
            elif u == v_r:
                out[i] = d_r
            else:
                out[i] = get((u, v_l, v_r), INF)
        return out


Evaluator = ClosedFormEvaluator | TabulatedEvaluator


def load_tabulated(rows: Iterable[tuple[int, int, int, float]]) -> TabulatedEvaluator:
    """Build a tabulated evaluator, rejecting duplicate keys and negative values."""
    table: dict[tuple[int, int, int], float] = {}
    for u, v_l, v_r, d in rows:
        key = (int(u), int(v_l), int(v_r))
        if key in table:
            raise DuplicateKey(f"duplicate triple {key}")
        d = float(d)
        if math.isnan(d) or d < 0:
            raise NegativeDistortion(f"distortion for {key} must be >= 0 or inf, got {d}")
        table[key] = d
    return TabulatedEvaluator(table)


def read_table_csv(path) -> TabulatedEvaluator:
    """Read a tabulated distortion CSV (header u_tick,vl_tick,vr_tick,distortion)."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TABLE_HEADER:
            raise NegativeDistortion(f"bad distortion table header in {path}: {header}")
        for rec in reader:
            if not rec:
                continue
            u, vl, vr, d = rec
            rows.append((int(u), int(vl), int(vr), float(d)))
    return load_tabulated(rows)


def write_table_csv(path, table: Mapping[tuple[int, int, int], float]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(TABLE_HEADER) + "\n")
        for (u, vl, vr), d in sorted(table.items()):
            fh.write(f"{u},{vl},{vr},{repr(d) if math.isfinite(d) else 'inf'}\n")


def reference_distortion(
    v: ViewTick,
    grid: ViewGrid,
    evaluator: Evaluator,
    params: SynthParams,
) -> float:
    """Distortion of view v when delivered as a reference.

    Cameras carry the coding distortion d_camera. A virtual view is
    synthesized in the network from the best enclosing camera pair; the
    search is exhaustive over pairs so it stays correct for tabulated
    models where the tightest pair need not win.
    """
    if grid.is_camera(v):
        return params.d_camera
    best = INF
    found = False
    for c_l, c_r in combinations(grid.cameras, 2):
        if c_l < v < c_r:
            found = True
            best = min(best, evaluator.value(v, c_l, c_r, params.d_camera, params.d_camera))
    if not found:
        raise Unsynthesizable(f"view tick {v} outside the camera hull")
    return best
