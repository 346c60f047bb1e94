"""Constructive hardness gadget: Set Cover as a reference-view selection.

Each universe item becomes a forced, undistorted left reference with a
half-step virtual view beside it; one shared default right reference plus
one extra right reference per subset complete the instance. Selecting a
subset's reference drops the distortion of exactly its items' virtual views
by a fixed margin, so hitting the distortion target with the given budget is
the same question as covering the universe with K subsets.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations

from .distortion import SynthParams, TabulatedEvaluator
from .dp import Selection
from .errors import ConfigError, InvalidParameters
from .grid import NavigationWindow, ViewGrid, ViewTick
from .oracle import exhaustive_solve
from .scenario import CandidateMode, Scenario


@dataclass(frozen=True)
class SetCoverInstance:
    universe_size: int
    subsets: tuple[frozenset[int], ...]
    budget: int

    def __post_init__(self) -> None:
        if self.universe_size < 1:
            raise InvalidParameters("universe must have at least one item")
        if not self.subsets:
            raise InvalidParameters("subset collection is empty")
        for s in self.subsets:
            if not s:
                raise InvalidParameters("subsets must be nonempty")
            if any(i < 1 or i > self.universe_size for i in s):
                raise InvalidParameters(f"subset {sorted(s)} leaves the universe")
        if self.budget < 1:
            raise InvalidParameters("cover budget must be >= 1")


@dataclass(frozen=True)
class GadgetInstance:
    scenario: Scenario
    source: SetCoverInstance
    d_bar: float
    delta: float
    target: float

    @property
    def budget(self) -> int:
        return self.scenario.capacity


def build_gadget(sc: SetCoverInstance, d_bar: float, delta: float) -> GadgetInstance:
    """Translate a Set Cover instance into a selection instance.

    Views sit on a half-step lattice: item views 1..|S|, the default right
    view |S|+1, and one gadget view |S|+1+j per subset j, all undistorted
    primitives. The table pins every usable synthesis triple; everything
    else is unbuildable.
    """
    if not (0.0 < delta < d_bar):
        raise InvalidParameters(f"need 0 < delta < d_bar, got delta={delta}, d_bar={d_bar}")
    n_items = sc.universe_size
    n_subsets = len(sc.subsets)
    default_right = n_items + 1
    span = default_right + n_subsets
    grid = ViewGrid(
        ticks_per_unit=2,
        unit_spacing_mm=1.0,
        min_tick=ViewTick(0),
        max_tick=ViewTick(2 * span),
        cameras=tuple(ViewTick(2 * v) for v in range(1, span + 1)),
    )
    table: dict[tuple[int, int, int], float] = {}
    for item in range(1, n_items + 1):
        u = 2 * item + 1  # the half-step view beside the item
        table[(u, 2 * item, 2 * default_right)] = d_bar
        for j, subset in enumerate(sc.subsets, start=1):
            table[(u, 2 * item, 2 * (default_right + j))] = d_bar - delta if item in subset else d_bar
    window = NavigationWindow(ViewTick(2), ViewTick(2 * default_right))
    capacity = n_items + 1 + sc.budget
    scenario = Scenario(
        grid=grid,
        window=window,
        capacity=capacity,
        params=SynthParams(gamma=0.0, d_inpaint=0.0, d_camera=0.0),
        evaluator=TabulatedEvaluator(table),
        candidate_mode=CandidateMode.CAMERAS_ONLY,
    )
    return GadgetInstance(
        scenario=scenario,
        source=sc,
        d_bar=float(d_bar),
        delta=float(delta),
        target=n_items * (d_bar - delta),
    )


def decide(gadget: GadgetInstance) -> tuple[bool, Selection]:
    """Answer the budgeted-distortion decision question for a gadget.

    Uses the exhaustive oracle: the gadget tables satisfy shared optimality
    but give no independence guarantee, so the polynomial solver makes no
    promise here.
    """
    selection = exhaustive_solve(gadget.scenario)
    return selection.objective <= gadget.target + 1e-9, selection


def min_cover_size(sc: SetCoverInstance) -> int | None:
    """Smallest number of subsets covering the universe, by enumeration."""
    universe = frozenset(range(1, sc.universe_size + 1))
    for size in range(1, len(sc.subsets) + 1):
        for combo in combinations(sc.subsets, size):
            merged = frozenset().union(*combo)
            if merged >= universe:
                return size
    return None


def read_setcover_csv(path, budget: int) -> SetCoverInstance:
    """Read subset memberships from CSV (header subset_id,item)."""
    members: dict[int, set[int]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["subset_id", "item"]:
            raise ConfigError(f"bad set-cover header in {path}: {header}")
        for rec in reader:
            if not rec:
                continue
            sid, item = int(rec[0]), int(rec[1])
            members.setdefault(sid, set()).add(item)
    if not members:
        raise ConfigError(f"no memberships in {path}")
    universe_size = max(max(s) for s in members.values())
    subsets = tuple(frozenset(members[sid]) for sid in sorted(members))
    return SetCoverInstance(universe_size=universe_size, subsets=subsets, budget=budget)
