"""Polynomial-time optimal reference-view selection.

The solver minimizes the aggregate synthesized-view distortion of a
navigation window subject to a budget on delivered reference views. It
walks the window left to right, keeping the current left reference and the
remaining budget, and at each step either opens a new segment under a
freshly selected right reference ("shared-left") or stacks several left
references under one common right reference ("shared-right"). Optimality
holds on instances that pass both structural checks in
:mod:`refview.assumptions`; on other instances the result is still a
feasible selection.

Two engines produce identical values: a recursive memoized form
(:func:`phi` / :func:`psi`, the definition) and a layered numpy engine that
:func:`solve` uses for closed-form scenarios. Tabulated scenarios run the
recursive engine, whose exactness does not depend on clean distortion
columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .distortion import INF, ClosedFormEvaluator, reference_distortion
from .errors import CoverageGap, Infeasible, NoValidProbe
from .grid import ViewTick
from .scenario import BIG, BIG_THRESHOLD, Scenario, SolveContext


@dataclass(frozen=True)
class Selection:
    """A delivered reference set with its per-tick synthesis assignment."""

    refs: tuple[int, ...]
    assignment: dict[int, tuple[int, int]]
    objective: float
    per_view: dict[int, float]


# ---------------------------------------------------------------------------
# Left-reference comparison
# ---------------------------------------------------------------------------

def lambda_select(v1, v2, ref_d, probe_u, probe_vr, evaluator):
    """Pick the better of two left references at a probe viewpoint.

    Compares the synthesis distortion of probe_u under (v1, probe_vr) and
    (v2, probe_vr); ties go to v1. Under the independence assumption the
    winner does not depend on the probe, so callers may use any valid one.
    """
    if v1 == v2:
        return v1
    hi = max(v1, v2)
    if not (hi < probe_u < probe_vr):
        raise NoValidProbe(f"no tick strictly between {hi} and {probe_vr} at probe {probe_u}")
    d1 = evaluator.value(probe_u, v1, probe_vr, ref_d[v1], ref_d[probe_vr])
    d2 = evaluator.value(probe_u, v2, probe_vr, ref_d[v2], ref_d[probe_vr])
    return v1 if d1 <= d2 else v2


# ---------------------------------------------------------------------------
# Recursive engine (the definition)
# ---------------------------------------------------------------------------

@dataclass
class DPContext:
    """One solve invocation's state for the recursive engine.

    Memo tables live here, so distinct invocations share nothing and may run
    concurrently.
    """

    sc: SolveContext
    use_memo: bool = True
    phi_memo: dict = field(default_factory=dict)
    psi_memo: dict = field(default_factory=dict)
    lam_memo: dict = field(default_factory=dict)

    @property
    def wl(self) -> int:
        return self.sc.wl

    @property
    def wr(self) -> int:
        return self.sc.wr

    def seg_sum(self, a: int, b_exclusive: int, v_l: int, v_r: int) -> float:
        """Sum of pair distortions over window ticks in [a, b_exclusive)."""
        hi = min(b_exclusive - 1, self.wr)
        total = 0.0
        for u in range(a, hi + 1):
            total += min(self.sc.pair_d(u, v_l, v_r), BIG)
        return total

    def seg_sum_inclusive(self, a: int, v_l: int, v_r: int) -> float:
        """Sum over the closing segment [a, window right] under (v_l, v_r)."""
        total = 0.0
        for u in range(a, self.wr + 1):
            total += min(self.sc.pair_d(u, v_l, v_r), BIG)
        return total

    def lam(self, v_l: int, v: int) -> int:
        """Canonical-probe left-reference choice for the segment starting at v.

        The probe is the first window tick past v against the farthest
        candidate. When no tick lies strictly between them (v at the window
        edge), the choice only affects tick v itself, so the comparison is
        made there directly, with v acting as its own reference.
        """
        key = (v_l, v)
        if key in self.lam_memo:
            return self.lam_memo[key]
        max_cand = int(self.sc.cand[-1])
        probe_u = v + 1
        if probe_u <= self.wr and probe_u < max_cand:
            choice = lambda_select(v_l, v, self.sc.refd_map, probe_u, max_cand, self.sc.evaluator)
        else:
            a_val = self.sc.pair_d(v, v_l, max_cand)
            choice = v_l if a_val <= self.sc.refd_map[v] else v
        self.lam_memo[key] = choice
        return choice


def make_context(scenario: Scenario, use_memo: bool = True) -> DPContext:
    return DPContext(sc=SolveContext(scenario), use_memo=use_memo)


def psi(u_l: int, v_l: int, v_r: int, n: int, ctx: DPContext) -> float:
    """Minimum aggregate distortion of window ticks in [u_l, v_r) when v_r is
    the common right reference, v_l serves u_l, and up to n further left
    references may be placed inside the span."""
    key = (u_l, v_l, v_r, n)
    if ctx.use_memo and key in ctx.psi_memo:
        return ctx.psi_memo[key]
    best = ctx.seg_sum(u_l, v_r, v_l, v_r)
    if n >= 1:
        cap = min(v_r, ctx.wr + 1)
        for v in ctx.sc.cand:
            v = int(v)
            if u_l < v < cap:
                best = min(best, ctx.seg_sum(u_l, v, v_l, v_r) + psi(v, v, v_r, n - 1, ctx))
    if ctx.use_memo:
        ctx.psi_memo[key] = best
    return best


def phi(u_l: int, v_l: int, k: int, ctx: DPContext) -> float:
    """Minimum aggregate distortion of window ticks in [u_l, window right]
    given v_l is the left reference serving u_l and k more references may be
    selected."""
    if u_l > ctx.wr:
        return 0.0
    if k <= 0:
        # Out of budget: only a window that ends exactly at its own delivered
        # reference needs nothing more.
        return ctx.sc.refd_map[v_l] if (u_l == ctx.wr and v_l == ctx.wr) else BIG
    key = (u_l, v_l, k)
    if ctx.use_memo and key in ctx.phi_memo:
        return ctx.phi_memo[key]
    best = BIG
    # Closing form: one final right reference at or beyond the window edge.
    for v in ctx.sc.cand:
        v = int(v)
        if v >= ctx.wr:
            best = min(best, ctx.seg_sum_inclusive(u_l, v_l, v))
    if k >= 2:
        for v in ctx.sc.cand:
            v = int(v)
            if v <= u_l:
                continue
            if v <= ctx.wr:
                best = min(best, ctx.seg_sum(u_l, v, v_l, v) + phi(v, ctx.lam(v_l, v), k - 1, ctx))
            for n in range(1, k):
                tail = phi(v, v, k - n - 1, ctx) if v <= ctx.wr else 0.0
                best = min(best, psi(u_l, v_l, v, n, ctx) + tail)
    if ctx.use_memo:
        ctx.phi_memo[key] = best
    return best


def _reconstruct_reference(ctx: DPContext, seed: int, capacity: int):
    """Walk the memoized recursion, re-deriving each branch value and taking
    the first one that reproduces the state's optimum exactly."""
    refs = {seed}
    assignment: dict[int, tuple[int, int]] = {}

    def assign(lo, hi, v_l, v_r):
        for u in range(max(lo, ctx.wl), min(hi, ctx.wr) + 1):
            assignment[u] = (v_l, v_r)

    def walk_psi(u_l, v_l, v_r, n):
        while True:
            val = psi(u_l, v_l, v_r, n, ctx)
            if val == ctx.seg_sum(u_l, v_r, v_l, v_r):
                assign(u_l, min(v_r - 1, ctx.wr), v_l, v_r)
                return
            cap = min(v_r, ctx.wr + 1)
            if n < 1:
                raise RuntimeError("shared-right reconstruction failed")
            for v in ctx.sc.cand:
                v = int(v)
                if u_l < v < cap and val == ctx.seg_sum(u_l, v, v_l, v_r) + psi(v, v, v_r, n - 1, ctx):
                    assign(u_l, v - 1, v_l, v_r)
                    refs.add(v)
                    u_l, v_l, n = v, v, n - 1
                    break
            else:
                raise RuntimeError("shared-right reconstruction failed")

    state = (ctx.wl, seed, capacity - 1)
    while state is not None:
        u_l, v_l, k = state
        if u_l > ctx.wr:
            break
        val = phi(u_l, v_l, k, ctx)
        if k <= 0:
            assign(ctx.wr, ctx.wr, v_l, v_l)
            break
        nxt = False
        for v in ctx.sc.cand:
            v = int(v)
            if v > u_l and v <= ctx.wr and k >= 2:
                if val == ctx.seg_sum(u_l, v, v_l, v) + phi(v, ctx.lam(v_l, v), k - 1, ctx):
                    assign(u_l, v - 1, v_l, v)
                    refs.add(v)
                    nxt = (v, ctx.lam(v_l, v), k - 1)
                    break
            if v >= ctx.wr and val == ctx.seg_sum_inclusive(u_l, v_l, v):
                assign(u_l, ctx.wr, v_l, v)
                refs.add(v)
                nxt = None
                break
            if v > u_l and k >= 2:
                hit = False
                for n in range(1, k):
                    tail = phi(v, v, k - n - 1, ctx) if v <= ctx.wr else 0.0
                    if val == psi(u_l, v_l, v, n, ctx) + tail:
                        walk_psi(u_l, v_l, v, n)
                        refs.add(v)
                        nxt = (v, v, k - n - 1) if v <= ctx.wr else None
                        hit = True
                        break
                if hit:
                    break
        if nxt is False:
            raise RuntimeError("reconstruction found no matching branch")
        state = nxt
    return refs, assignment


# ---------------------------------------------------------------------------
# Layered numpy engine
# ---------------------------------------------------------------------------

class _Engine:
    """Bottom-up table filler mirroring phi/psi, vectorized over candidates.

    Tables (float64, BIG marks unattainable states):
      pm[a][i, j]   prefix sums of d(., cand[a], cand[j]) over window ticks,
                    with ordering-invalid ticks contributing zero (they never
                    fall inside a queried segment, and keeping BIG inside a
                    cumsum would destroy the precision of later differences)
      psic[a, j, m] shared-right chains starting at their own left reference
      tab[k][a, ui] phi value for (u_l = wl + ui, v_l = cand[a], budget k)
    """

    def __init__(self, sc: SolveContext, capacity: int):
        self.sc = sc
        self.cap = capacity
        self.cand = sc.cand
        self.refd = sc.refd
        self.nc = sc.nc
        self.wl, self.wr, self.nt = sc.wl, sc.wr, sc.nt
        self.kmax = capacity - 1
        self._build_pm()
        self._build_lam()
        self._build_psic()
        self._build_phi()

    def _left_matrix(self, a: int) -> np.ndarray:
        """d(u, cand[a], cand[j]) over (window tick, candidate j)."""
        sc = self.sc
        us = np.arange(self.wl, self.wr + 1, dtype=np.int64)
        ev = sc.evaluator
        la = int(self.cand[a])
        dl = float(self.refd[a])
        if isinstance(ev, ClosedFormEvaluator):
            p = ev.params
            vr = self.cand.astype(float)
            dr = self.refd
            cond = dl <= dr
            d_min = np.where(cond, dl, dr)
            v_min = np.where(cond, float(la), vr)
            d_max = np.where(cond, dr, dl)
            v_max = np.where(cond, vr, float(la))
            mm = ev.grid.unit_spacing_mm / ev.grid.ticks_per_unit
            uu = us[:, None].astype(float)
            alpha = np.exp(-p.gamma * np.abs(uu - v_min[None, :]) * mm)
            if p.beta_mode.value == "fixed":
                beta = p.beta_fixed
                d_max = np.full(self.nc, p.d_max_override)
            else:
                beta = np.exp(-p.gamma * np.abs(uu - v_max[None, :]) * mm)
            out = (
                alpha * d_min[None, :]
                + (1.0 - alpha) * beta * d_max[None, :]
                + (1.0 - alpha - (1.0 - alpha) * beta) * p.d_inpaint
            )
            out = np.where(us[:, None] == la, dl, out)
            out = np.where(us[:, None] == self.cand[None, :], dr[None, :], out)
        else:
            out = np.empty((self.nt, self.nc))
            for j in range(self.nc):
                out[:, j] = ev.value_array(us, la, int(self.cand[j]), dl, float(self.refd[j]))
        valid = (us[:, None] >= la) & (us[:, None] <= self.cand[None, :])
        return np.where(valid, np.minimum(out, BIG), 0.0)

    def _build_pm(self) -> None:
        nc, nt = self.nc, self.nt
        self.pm = np.zeros((nc, nt + 1, nc))
        for a in range(nc):
            np.cumsum(self._left_matrix(a), axis=0, out=self.pm[a, 1:, :])
        # candidate tick -> window prefix index, clamped to [0, nt]
        self.tixc = np.clip(self.cand - self.wl, 0, nt).astype(np.int64)

    def _build_lam(self) -> None:
        """lamidx[a, j]: candidate index serving as left reference after a
        shared-left segment ends at cand[j]; defined for cand[a] < cand[j] <= wr."""
        sc = self.sc
        nc = self.nc
        max_cand = int(self.cand[-1])
        self.lamidx = np.zeros((nc, nc), dtype=np.int64)
        for j in range(nc):
            vj = int(self.cand[j])
            if vj > self.wr:
                continue
            probe_u = vj + 1
            degenerate = probe_u > self.wr or probe_u >= max_cand
            b_val = sc.refd_map[vj] if degenerate else sc.pair_d(probe_u, vj, max_cand)
            for a in range(j):
                va = int(self.cand[a])
                a_val = sc.pair_d(vj, va, max_cand) if degenerate else sc.pair_d(probe_u, va, max_cand)
                self.lamidx[a, j] = a if a_val <= b_val else j

    def _build_psic(self) -> None:
        nc, nt = self.nc, self.nt
        mmax = max(0, self.cap - 3)
        self.psic = np.full((nc, nc, mmax + 1), BIG)
        lt = self.cand[:, None] < self.cand[None, :]
        in_win = self.cand <= self.wr
        ar = np.arange(nc)
        for a in range(nc):
            base = self.pm[a][self.tixc, ar] - self.pm[a][self.tixc[a], :]
            self.psic[a, :, 0] = np.where(lt[a], base, BIG)
        for m in range(1, mmax + 1):
            prev = self.psic[:, :, m - 1]
            for a in range(nc):
                t = self.pm[a][self.tixc] + prev  # [bi, j] = pm[a][tixc[bi], j] + prev[bi, j]
                mask = lt[a][:, None] & in_win[:, None] & lt
                legs = np.where(mask, t, BIG).min(axis=0) - self.pm[a][self.tixc[a], :]
                self.psic[a, :, m] = np.minimum(prev[a], np.where(lt[a], legs, BIG))

    def _phi_diag(self, k: int) -> np.ndarray:
        """phi at the self-state (u_l = v_l = cand[j]) for budget k; zero past
        the window edge where nothing remains."""
        idx = np.clip(self.cand - self.wl, 0, self.nt - 1).astype(np.int64)
        vals = self.tab[k][np.arange(self.nc), idx]
        return np.where(self.cand > self.wr, 0.0, np.where(self.cand < self.wl, BIG, vals))

    def _build_phi(self) -> None:
        nc, nt = self.nc, self.nt
        self.tab = np.full((self.kmax + 1, nc, nt), BIG)
        at_edge = self.cand == self.wr
        self.tab[0][at_edge, nt - 1] = self.refd[at_edge]

        jr = np.nonzero(self.cand >= self.wr)[0]
        in_win = self.cand <= self.wr
        ar = np.arange(nc)
        gt = self.cand[None, :] > (self.wl + np.arange(nt))[:, None]
        tick_to_idx = {int(t): i for i, t in enumerate(self.cand)}

        for k in range(1, self.kmax + 1):
            if k >= 2:
                tails = [self._phi_diag(kk) for kk in range(k - 1)]
                g = np.full((nc, nc), BIG)
                for n in range(1, k):
                    if n - 1 < self.psic.shape[2]:
                        g = np.minimum(g, self.psic[:, :, n - 1] + tails[k - n - 1][None, :])
                bv_tail = tails[k - 2]
            for a in range(nc):
                pm = self.pm[a]
                rows = np.full((4, nt), BIG)
                if len(jr):
                    rows[0] = (pm[nt, jr][None, :] - pm[:nt, jr]).min(axis=1)
                if k >= 2:
                    prev = self.tab[k - 1]
                    slcol = pm[self.tixc, ar] + prev[self.lamidx[a], np.clip(self.tixc, 0, nt - 1)]
                    rows[1] = np.where(gt & in_win[None, :] & (ar > a)[None, :], slcol[None, :] - pm[:nt, :], BIG).min(axis=1)
                    bvcol = pm[self.tixc, ar] + bv_tail
                    rows[2] = np.where(gt, bvcol[None, :] - pm[:nt, :], BIG).min(axis=1)
                    w = pm[self.tixc] + g
                    w = np.where((self.cand[:, None] > self.cand[a]) & in_win[:, None] & (self.cand[:, None] < self.cand[None, :]), w, BIG)
                    colmin = np.empty((nt, nc))
                    running = np.full(nc, BIG)
                    for ui in range(nt - 1, -1, -1):
                        bi = tick_to_idx.get(self.wl + ui + 1)
                        if bi is not None:
                            running = np.minimum(running, w[bi])
                        colmin[ui] = running
                    rows[3] = np.where(gt, colmin - pm[:nt, :], BIG).min(axis=1)
                out = rows.min(axis=0)
                lo = int(self.cand[a]) - self.wl
                if lo > 0:
                    out[: min(lo, nt)] = BIG
                self.tab[k][a] = out

    # -- reconstruction ----------------------------------------------------

    def objective_and_seed(self) -> tuple[float, int]:
        best, seed = BIG, -1
        for a in range(self.nc):
            if int(self.cand[a]) <= self.wl and self.tab[self.kmax][a, 0] < best:
                best = float(self.tab[self.kmax][a, 0])
                seed = a
        if seed < 0 or best >= BIG_THRESHOLD:
            raise Infeasible("no covering selection within budget")
        return best, seed

    def reconstruct(self, seed: int):
        refs = {int(self.cand[seed])}
        assignment: dict[int, tuple[int, int]] = {}
        state = (0, seed, self.kmax)
        guard = 0
        while state is not None:
            guard += 1
            if guard > 4 * self.nt + 8:
                raise RuntimeError("reconstruction failed to terminate")
            state = self._step(state, refs, assignment)
        return refs, assignment

    def _assign(self, assignment, lo_tick, hi_tick, v_l, v_r) -> None:
        for u in range(max(lo_tick, self.wl), min(hi_tick, self.wr) + 1):
            assignment[u] = (v_l, v_r)

    def _step(self, state, refs, assignment):
        ui, a, k = state
        val = self.tab[k][a, ui]
        pm = self.pm[a]
        u_l = self.wl + ui
        va = int(self.cand[a])
        if k <= 0:
            self._assign(assignment, self.wr, self.wr, va, va)
            return None
        for j in range(self.nc):
            vj = int(self.cand[j])
            if vj <= u_l and vj < self.wr:
                continue
            tj = int(self.tixc[j])
            if vj > u_l and vj <= self.wr and k >= 2:
                slv = (pm[tj, j] + self.tab[k - 1][self.lamidx[a, j], min(tj, self.nt - 1)]) - pm[ui, j]
                if slv == val:
                    refs.add(vj)
                    self._assign(assignment, u_l, vj - 1, va, vj)
                    return (tj, int(self.lamidx[a, j]), k - 1)
            if vj >= self.wr and pm[self.nt, j] - pm[ui, j] == val:
                refs.add(vj)
                self._assign(assignment, u_l, self.wr, va, vj)
                return None
            if vj > u_l and k >= 2:
                nxt = self._try_shared_right(state, j, val, refs, assignment)
                if nxt is not False:
                    return nxt
        raise RuntimeError("reconstruction found no matching branch")

    def _try_shared_right(self, state, j, val, refs, assignment):
        """Match the shared-right branch for common right cand[j]; returns
        False when no sub-branch reproduces the table value."""
        ui, a, k = state
        pm = self.pm[a]
        u_l = self.wl + ui
        va, vj = int(self.cand[a]), int(self.cand[j])
        tails = [float(self._phi_diag(kk)[j]) for kk in range(k - 1)]
        bv = (pm[self.tixc[j], j] + tails[k - 2]) - pm[ui, j]
        if bv == val:
            refs.add(vj)
            self._assign(assignment, u_l, vj - 1, va, vj)
            return (int(self.tixc[j]), j, k - 2) if vj <= self.wr else None
        for bi in range(self.nc):
            vb = int(self.cand[bi])
            if not (u_l < vb <= self.wr and vb < vj):
                continue
            for n in range(1, k):
                m = n - 1
                if m >= self.psic.shape[2]:
                    continue
                w = (pm[self.tixc[bi], j] + (self.psic[bi, j, m] + tails[k - n - 1])) - pm[ui, j]
                if w == val:
                    refs.add(vj)
                    self._assign(assignment, u_l, vb - 1, va, vj)
                    self._walk_chain(bi, j, m, refs, assignment)
                    return (int(self.tixc[j]), j, k - n - 1) if vj <= self.wr else None
        return False

    def _walk_chain(self, bi, j, m, refs, assignment):
        vj = int(self.cand[j])
        while True:
            vb = int(self.cand[bi])
            refs.add(vb)
            target = self.psic[bi, j, m]
            while m > 0 and self.psic[bi, j, m - 1] == target:
                m -= 1
            if m == 0 or target == self.psic[bi, j, 0]:
                self._assign(assignment, vb, min(vj - 1, self.wr), vb, vj)
                return
            pmb = self.pm[bi]
            lo = int(self.tixc[bi])
            found = False
            for ci in range(self.nc):
                vc = int(self.cand[ci])
                if not (vb < vc <= self.wr and vc < vj):
                    continue
                if (pmb[self.tixc[ci], j] + self.psic[ci, j, m - 1]) - pmb[lo, j] == target:
                    self._assign(assignment, vb, vc - 1, vb, vj)
                    bi, m = ci, m - 1
                    found = True
                    break
            if not found:
                raise RuntimeError("shared-right chain reconstruction failed")


# ---------------------------------------------------------------------------
# Public solver entry points
# ---------------------------------------------------------------------------

def solve(scenario: Scenario, engine: str = "auto") -> Selection:
    """Optimal reference selection for a scenario.

    engine: "fast" (layered numpy tables), "reference" (the recursive
    definition), or "auto" which picks fast for closed-form models and
    reference for tabulated ones (whose tables may hold infinities that the
    prefix-sum engine cannot carry exactly).
    """
    if scenario.capacity < 2:
        raise Infeasible(f"capacity must be >= 2, got {scenario.capacity}")
    sc = SolveContext(scenario)
    if sc.nc == 0 or int(sc.cand[0]) > sc.wl:
        raise Infeasible("no reference candidate at or left of the window start")
    if engine == "auto":
        engine = "fast" if isinstance(scenario.evaluator, ClosedFormEvaluator) else "reference"
    if engine == "fast":
        eng = _Engine(sc, scenario.capacity)
        objective, seed = eng.objective_and_seed()
        refs, assignment = eng.reconstruct(seed)
    elif engine == "reference":
        ctx = DPContext(sc=sc)
        best, seed = BIG, None
        for v in sc.cand:
            v = int(v)
            if v <= sc.wl:
                val = phi(sc.wl, v, scenario.capacity - 1, ctx)
                if val < best:
                    best, seed = val, v
        if seed is None or best >= BIG_THRESHOLD:
            raise Infeasible("no covering selection within budget")
        objective = best
        refs, assignment = _reconstruct_reference(ctx, seed, scenario.capacity)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    per_view = {u: sc.pair_d(u, *assignment[u]) for u in range(sc.wl, sc.wr + 1)}
    return Selection(
        refs=tuple(sorted(refs)),
        assignment=assignment,
        objective=float(objective),
        per_view=per_view,
    )


def aggregate_distortion(refs: Iterable[int], scenario: Scenario) -> tuple[float, dict[int, tuple[int, int]]]:
    """Objective of a fixed reference set: per-tick best pair, summed over the
    window inclusive of both endpoints.

    A tick coinciding with a delivered reference may use it directly; ties
    keep that direct use, otherwise the lexicographically smallest pair.
    Raises CoverageGap when some tick has no enclosing pair at all.
    """
    refs = sorted({int(r) for r in refs})
    grid = scenario.grid
    ref_d = {
        r: reference_distortion(ViewTick(r), grid, scenario.evaluator, scenario.params)
        for r in refs
    }
    uncovered = []
    assignment: dict[int, tuple[int, int]] = {}
    total = 0.0
    for u in scenario.window.ticks():
        if u in ref_d:
            best, best_pair = ref_d[u], (u, u)
        else:
            best, best_pair = INF, None
        for v_l in refs:
            if v_l > u:
                break
            for v_r in refs:
                if v_r < u or v_l == v_r:
                    continue
                if u == v_l:
                    d = ref_d[v_l]
                elif u == v_r:
                    d = ref_d[v_r]
                else:
                    d = scenario.evaluator.value(u, v_l, v_r, ref_d[v_l], ref_d[v_r])
                if best_pair is None or d < best:
                    best, best_pair = d, (v_l, v_r)
        if best_pair is None:
            uncovered.append(u)
            continue
        assignment[u] = best_pair
        total += best
    if uncovered:
        raise CoverageGap(uncovered)
    return total, assignment


def selection_from_refs(refs: Iterable[int], scenario: Scenario) -> Selection:
    """Full Selection (assignment and per-view values) for a fixed reference set."""
    objective, assignment = aggregate_distortion(refs, scenario)
    ref_d = {
        r: reference_distortion(ViewTick(r), scenario.grid, scenario.evaluator, scenario.params)
        for r in {int(r) for r in refs}
    }
    per_view = {}
    for u, (v_l, v_r) in assignment.items():
        if u == v_l:
            per_view[u] = ref_d[v_l]
        elif u == v_r:
            per_view[u] = ref_d[v_r]
        else:
            per_view[u] = scenario.evaluator.value(u, v_l, v_r, ref_d[v_l], ref_d[v_r])
    return Selection(tuple(sorted({int(r) for r in refs})), assignment, float(objective), per_view)


def check_staircase(selection: Selection) -> bool:
    """Structural sanity of an optimal assignment's two step functions.

    Along increasing ticks (skipping ticks served by their own reference),
    both references must be non-decreasing, the right reference may only
    change after the walk passes it, and a new left reference must sit
    inside the gap where it takes over.
    """
    ticks = sorted(selection.assignment)
    prev_u = prev_l = prev_r = None
    for u in ticks:
        v_l, v_r = selection.assignment[u]
        if not (v_l <= u <= v_r):
            return False
        if v_l == u or v_r == u:
            continue
        if prev_u is not None:
            if v_l < prev_l or v_r < prev_r:
                return False
            if v_r != prev_r and prev_r > u:
                return False
            if v_l != prev_l and not (prev_u < v_l <= u):
                return False
        prev_u, prev_l, prev_r = u, v_l, v_r
    return True
