"""Decidable checkers for the two structural properties the fast solver needs.

Shared optimality: when one reference pair beats another for some window
tick, it must keep beating it at every tick both pairs enclose.
Independence: the better of two left references must not depend on which
right reference it is paired with.

Both checkers are exhaustive over the supplied candidate references and are
meant for validation on small grids, not for the production solve path. A
failed check returns a concrete witness that replays through the evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Mapping

import numpy as np

from .distortion import INF, SynthParams, read_table_csv
from .grid import NavigationWindow, ViewGrid, ViewTick, build_grid
from .scenario import Scenario

_CHUNK_ROWS = 64


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of one structural check.

    counterexample: (u, u_prime, v_l, v_r, v_l_prime, v_r_prime) ticks;
    values: the two compared distortions per side, ((antecedent_lhs,
    antecedent_rhs), (consequent_lhs, consequent_rhs)). The antecedent
    satisfies lhs <= rhs while the consequent has lhs > rhs.
    """

    holds: bool
    counterexample: tuple[int, int, int, int, int, int] | None = None
    values: tuple[tuple[float, float], tuple[float, float]] | None = None


def _pair_tensor(grid, window, evaluator, ref_d) -> tuple[np.ndarray, list[int]]:
    """dm[ui, i, j]: distortion of tick wl+ui under candidate pair (i, j), i < j.

    Endpoint ticks take the reference's own distortion; ticks outside the
    pair's span and triples the evaluator cannot build are +inf.
    """
    cand = sorted(t for t, d in ref_d.items() if d < INF)
    nc = len(cand)
    wl, wr = int(window.left), int(window.right)
    nt = wr - wl + 1
    us = np.arange(wl, wr + 1)
    dm = np.full((nt, nc, nc), INF)
    for i in range(nc):
        for j in range(i + 1, nc):
            dm[:, i, j] = evaluator.value_array(us, cand[i], cand[j], ref_d[cand[i]], ref_d[cand[j]])
    return dm, cand


def check_shared_optimality(
    grid: ViewGrid,
    window: NavigationWindow,
    evaluator,
    ref_d: Mapping[int, float],
) -> AssumptionReport:
    """Test that pair preferences transfer across every commonly enclosed tick.

    Quantifies over nested pairs of reference pairs (one span containing the
    other, the configuration the selection structure actually relies on:
    comparisons among pairs that trade distance off between their two sides
    flip around their midpoint under any distance-monotone model and carry no
    structural information). Ticks u, u' range over the window part of the
    common enclosure, endpoints included; reports the lexicographically first
    violating (u, u', v_l, v_r, v_l', v_r')."""
    dm, cand = _pair_tensor(grid, window, evaluator, ref_d)
    nt = dm.shape[0]
    wl = int(window.left)
    pairs = [(i, j) for i in range(len(cand)) for j in range(len(cand)) if i < j]
    if len(pairs) < 2:
        return AssumptionReport(holds=True)
    pi = np.array([p[0] for p in pairs])
    pj = np.array([p[1] for p in pairs])
    dvals = dm[:, pi, pj].T  # (npairs, nt)
    lo = np.asarray([cand[i] for i in pi])
    hi = np.asarray([cand[j] for j in pj])
    ticks = wl + np.arange(nt)

    best_u = None
    for start in range(0, len(pairs), _CHUNK_ROWS):
        stop = min(start + _CHUNK_ROWS, len(pairs))
        dp = dvals[start:stop, None, :]
        dq = dvals[None, :, :]
        both_inf = np.isinf(dp) & np.isinf(dq)
        with np.errstate(invalid="ignore"):
            diff = np.where(both_inf, 0.0, dp - dq)
        lo_p, hi_p = lo[start:stop, None], hi[start:stop, None]
        lo_q, hi_q = lo[None, :], hi[None, :]
        nested = ((lo_q >= lo_p) & (hi_q <= hi_p)) | ((lo_p >= lo_q) & (hi_p <= hi_q))
        enc = (
            (ticks[None, None, :] >= np.maximum(lo_p, lo_q)[:, :, None])
            & (ticks[None, None, :] <= np.minimum(hi_p, hi_q)[:, :, None])
            & nested[:, :, None]
        )
        # A tie at a tick that coincides with a reference of either pair is
        # structural (the view serves itself) and carries no preference.
        at_end = (
            (ticks[None, None, :] == lo_p[:, :, None])
            | (ticks[None, None, :] == hi_p[:, :, None])
            | (ticks[None, None, :] == lo_q[:, :, None])
            | (ticks[None, None, :] == hi_q[:, :, None])
        )
        ante = enc & ((diff < 0.0) | ((diff == 0.0) & ~at_end))
        has_le = ante.any(axis=2)
        has_gt = np.where(enc, diff, -INF).max(axis=2) > 0.0
        viol = has_le & has_gt
        if not viol.any():
            continue
        for p_off, q in zip(*np.nonzero(viol)):
            u = int(ticks[np.nonzero(ante[p_off, q])[0][0]])
            if best_u is None or u < best_u:
                best_u = u
    if best_u is None:
        return AssumptionReport(holds=True)
    return _shared_witness(dm, cand, ticks, best_u - wl)


def _shared_witness(dm, cand, ticks, u_idx) -> AssumptionReport:
    """Lexicographically smallest shared-optimality witness anchored at the
    first violating antecedent tick."""
    nc = len(cand)
    nt = len(ticks)
    pairs = [(i, j) for i in range(nc) for j in range(i + 1, nc)]
    u = int(ticks[u_idx])
    for up_idx in range(nt):
        up = int(ticks[up_idx])
        for (i, j) in pairs:
            for (i2, j2) in pairs:
                nested = (cand[i2] >= cand[i] and cand[j2] <= cand[j]) or (
                    cand[i] >= cand[i2] and cand[j] <= cand[j2]
                )
                if not nested:
                    continue
                lo = max(cand[i], cand[i2])
                hi = min(cand[j], cand[j2])
                if not (lo <= u <= hi and lo <= up <= hi):
                    continue
                a1, a2 = dm[u_idx, i, j], dm[u_idx, i2, j2]
                c1, c2 = dm[up_idx, i, j], dm[up_idx, i2, j2]
                at_end = u in (cand[i], cand[j], cand[i2], cand[j2])
                ante = _lt(a1, a2) or (_eq(a1, a2) and not at_end)
                if ante and _lt(c2, c1):
                    return AssumptionReport(
                        holds=False,
                        counterexample=(u, up, cand[i], cand[j], cand[i2], cand[j2]),
                        values=((float(a1), float(a2)), (float(c1), float(c2))),
                    )
    raise RuntimeError("violation disappeared during witness extraction")


def _eq(a: float, b: float) -> bool:
    return a == b or (np.isinf(a) and np.isinf(b))


def _lt(a: float, b: float) -> bool:
    return a < b and not (np.isinf(a) and np.isinf(b))


def _le(a: float, b: float) -> bool:
    return _lt(a, b) or _eq(a, b)


def check_independence(
    grid: ViewGrid,
    window: NavigationWindow,
    evaluator,
    ref_d: Mapping[int, float],
) -> AssumptionReport:
    """Test that the better left reference is right-reference invariant.

    For every window tick u (including ticks coinciding with a reference) and
    left references v_l != v_l' at or left of u, if (v_l, v_r) is no worse
    than (v_l', v_r) then (v_l, v_r') must be no worse than (v_l', v_r') for
    every other right reference. A tie at u == v_r compares two copies of
    that reference's own quality and is structural, so it does not qualify
    as an antecedent."""
    dm, cand = _pair_tensor(grid, window, evaluator, ref_d)
    nt = dm.shape[0]
    wl = int(window.left)
    carr = np.asarray(cand)
    for ui in range(nt):
        u = wl + ui
        lefts = np.nonzero(carr <= u)[0]
        rights = np.nonzero(carr >= u)[0]
        if len(lefts) < 2 or len(rights) < 2:
            continue
        d = dm[ui][np.ix_(lefts, rights)]  # (nl, nr)
        valid = carr[lefts][:, None] < carr[rights][None, :]
        both_inf = np.isinf(d)[:, None, :] & np.isinf(d)[None, :, :]
        with np.errstate(invalid="ignore"):
            diff = np.where(both_inf, 0.0, d[:, None, :] - d[None, :, :])  # (l, l2, r)
        pair_ok = valid[:, None, :] & valid[None, :, :]
        at_right = (carr[rights] == u)[None, None, :]
        ante = pair_ok & ((diff < 0.0) | ((diff == 0.0) & ~at_right))
        cons = pair_ok & (diff > 0.0)
        viol = ante.any(axis=2) & cons.any(axis=2)
        if not viol.any():
            continue
        for li in lefts:
            for ri in rights:
                if not carr[li] < carr[ri]:
                    continue
                for li2 in lefts:
                    if li2 == li:
                        continue
                    for ri2 in rights:
                        if ri2 == ri or not (carr[li2] < carr[ri] and carr[li] < carr[ri2] and carr[li2] < carr[ri2]):
                            continue
                        a1, a2 = dm[ui, li, ri], dm[ui, li2, ri]
                        c1, c2 = dm[ui, li, ri2], dm[ui, li2, ri2]
                        ante_ok = _lt(a1, a2) or (_eq(a1, a2) and cand[ri] != u)
                        if ante_ok and _lt(c2, c1):
                            return AssumptionReport(
                                holds=False,
                                counterexample=(u, u, cand[li], cand[ri], cand[li2], cand[ri2]),
                                values=((float(a1), float(a2)), (float(c1), float(c2))),
                            )
    return AssumptionReport(holds=True)


# ---------------------------------------------------------------------------
# Bundled counterexample fixtures
# ---------------------------------------------------------------------------

FIXTURE_NAMES = ("shared_violation", "indep_violation")


def fixture_path(name: str):
    """Filesystem path of a bundled counterexample table."""
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; have {FIXTURE_NAMES}")
    return resources.files("refview").joinpath(f"fixtures/{name}.csv")


def fixture_scenario(name: str, capacity: int = 4) -> Scenario:
    """Scenario wrapping a bundled fixture: four undistorted cameras on a
    five-view line with the tabulated distortions of the named scene."""
    grid = build_grid(1, 50.0, 4, [0, 1, 3, 4])
    with resources.as_file(fixture_path(name)) as path:
        evaluator = read_table_csv(path)
    return Scenario(
        grid=grid,
        window=NavigationWindow(ViewTick(1), ViewTick(3)),
        capacity=capacity,
        params=SynthParams(gamma=0.0, d_inpaint=0.0, d_camera=0.0),
        evaluator=evaluator,
    )


def fixture_checker_args(name: str):
    """(grid, window, evaluator, ref_d) for running the checkers on a fixture."""
    scn = fixture_scenario(name)
    ref_d = {int(c): 0.0 for c in scn.grid.cameras}
    return scn.grid, scn.window, scn.evaluator, ref_d
