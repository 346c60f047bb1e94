"""Exact integer-tick representation of viewpoints, cameras, and navigation windows.

All view positions live on an integer lattice with ``ticks_per_unit`` ticks per
unit view index, so view identity is integer equality and solvers never compare
positions through an epsilon. Rational inputs that do not land on the lattice
are rejected, not rounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NewType, Sequence, Union

from .errors import EmptyCameraSet, NonIntegralPosition

# A view position expressed in lattice ticks (unit index times ticks_per_unit).
ViewTick = NewType("ViewTick", int)

Rational = Union[int, float, str, Fraction]


def _as_fraction(value: Rational) -> Fraction:
    """Convert a user-facing position to an exact Fraction.

    Floats are taken at their decimal repr (``0.1`` means one tenth, not the
    nearest binary double), which is what config files and CLIs mean.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class ViewGrid:
    """The discrete lattice of viewpoint positions.

    ticks_per_unit: lattice resolution (ticks per unit view index).
    unit_spacing_mm: physical distance between two consecutive unit indices.
    cameras: strictly increasing camera positions, in ticks.
    """

    ticks_per_unit: int
    unit_spacing_mm: float
    min_tick: ViewTick
    max_tick: ViewTick
    cameras: tuple[ViewTick, ...]

    def __post_init__(self) -> None:
        if self.ticks_per_unit < 1:
            raise NonIntegralPosition(f"ticks_per_unit must be >= 1, got {self.ticks_per_unit}")
        if self.unit_spacing_mm <= 0:
            raise NonIntegralPosition(f"unit_spacing_mm must be > 0, got {self.unit_spacing_mm}")
        if not (0 <= self.min_tick < self.max_tick):
            raise NonIntegralPosition(f"bad tick range [{self.min_tick}, {self.max_tick}]")
        if len(self.cameras) < 2:
            raise EmptyCameraSet(f"need at least 2 cameras, got {len(self.cameras)}")
        if any(b <= a for a, b in zip(self.cameras, self.cameras[1:])):
            raise NonIntegralPosition("camera ticks must be strictly increasing")
        if self.cameras[0] < self.min_tick or self.cameras[-1] > self.max_tick:
            raise NonIntegralPosition("cameras must lie within the grid span")

    # -- position conversions --------------------------------------------

    def tick(self, units: Rational) -> ViewTick:
        """Convert a unit-index position to its tick, rejecting off-lattice input."""
        frac = _as_fraction(units) * self.ticks_per_unit
        if frac.denominator != 1:
            raise NonIntegralPosition(f"position {units} is not on the 1/{self.ticks_per_unit} lattice")
        t = int(frac)
        if t < self.min_tick or t > self.max_tick:
            raise NonIntegralPosition(f"position {units} outside grid span")
        return ViewTick(t)

    def unit_index(self, tick: int) -> Fraction:
        """Tick back to exact unit index."""
        return Fraction(int(tick), self.ticks_per_unit)

    def on_grid(self, tick: int) -> bool:
        return self.min_tick <= tick <= self.max_tick

    def is_camera(self, tick: int) -> bool:
        return tick in self._camera_set()

    def _camera_set(self) -> frozenset:
        # cached lazily; frozen dataclass so stash via object.__setattr__
        cached = self.__dict__.get("_cams")
        if cached is None:
            cached = frozenset(self.cameras)
            object.__setattr__(self, "_cams", cached)
        return cached

    def ticks(self) -> range:
        """Every grid position, as a range of ticks."""
        return range(self.min_tick, self.max_tick + 1)

    def dist_mm(self, a: int, b: int) -> float:
        """Physical distance between two views, in millimeters."""
        return abs(int(a) - int(b)) / self.ticks_per_unit * self.unit_spacing_mm


@dataclass(frozen=True)
class NavigationWindow:
    """Contiguous range of view ticks a client may request within one round trip.

    A single-tick window (left == right) is permitted: it arises when the
    request sits at a grid boundary with a sub-tick speed-delay product.
    """

    left: ViewTick
    right: ViewTick

    def __post_init__(self) -> None:
        if self.left > self.right:
            raise NonIntegralPosition(f"window [{self.left}, {self.right}] is reversed")
        if self.left < 0:
            raise NonIntegralPosition("window left below grid origin")

    def ticks(self) -> range:
        return range(self.left, self.right + 1)

    def tick_count(self) -> int:
        return self.right - self.left + 1


def build_grid(
    ticks_per_unit: int,
    unit_spacing_mm: float,
    span_units: Rational,
    camera_positions: Sequence[Rational],
) -> ViewGrid:
    """Build a ViewGrid from unit-index camera positions.

    Every camera position times ticks_per_unit must be an exact integer;
    off-lattice positions raise NonIntegralPosition rather than being rounded.
    """
    if ticks_per_unit < 1:
        raise NonIntegralPosition(f"ticks_per_unit must be >= 1, got {ticks_per_unit}")
    if len(camera_positions) < 2:
        raise EmptyCameraSet(f"need at least 2 cameras, got {len(camera_positions)}")
    span = _as_fraction(span_units) * ticks_per_unit
    if span.denominator != 1 or span <= 0:
        raise NonIntegralPosition(f"span {span_units} is not a positive lattice multiple")
    max_tick = ViewTick(int(span))
    cams = []
    for pos in camera_positions:
        frac = _as_fraction(pos) * ticks_per_unit
        if frac.denominator != 1:
            raise NonIntegralPosition(f"camera {pos} is not on the 1/{ticks_per_unit} lattice")
        cams.append(ViewTick(int(frac)))
    return ViewGrid(
        ticks_per_unit=ticks_per_unit,
        unit_spacing_mm=float(unit_spacing_mm),
        min_tick=ViewTick(0),
        max_tick=max_tick,
        cameras=tuple(cams),
    )


def window_from_request(
    u: ViewTick,
    rho_units_per_s: float,
    t_s: float,
    grid: ViewGrid,
) -> NavigationWindow:
    """Navigation window around a requested view, clamped to the grid.

    The reach is rho * T unit indices on each side, rounded half away from
    zero to the nearest tick so the window stays lattice-exact.
    """
    if not grid.on_grid(u):
        raise NonIntegralPosition(f"request tick {u} off grid")
    reach_ticks = int(rho_units_per_s * t_s * grid.ticks_per_unit + 0.5)
    left = max(grid.min_tick, int(u) - reach_ticks)
    right = min(grid.max_tick, int(u) + reach_ticks)
    return NavigationWindow(ViewTick(left), ViewTick(right))


def format_units(grid: ViewGrid, ticks: Iterable[int]) -> str:
    """Serialize view ticks as ';'-joined unit indices (integers stay integral)."""
    parts = []
    for t in ticks:
        fr = grid.unit_index(t)
        parts.append(str(fr.numerator) if fr.denominator == 1 else repr(float(fr)))
    return ";".join(parts)
