"""Assumption-free exact solvers used as ground truth.

``exhaustive_solve`` enumerates every reference subset within budget;
``treesearch_solve`` grows the selection left to right, keeping a window
prefix open while some viewpoint still prefers a right reference beyond the
current frontier and closing it otherwise. Both return the same objective on
every instance, including ones that violate the structural assumptions the
polynomial solver relies on. They exist for correctness, not speed.
"""

from __future__ import annotations

from itertools import combinations, islice
from math import comb

import numpy as np

from .dp import Selection, selection_from_refs
from .errors import Infeasible, TooLarge
from .scenario import BIG, BIG_THRESHOLD, Scenario, SolveContext

SUBSET_GUARD = 5_000_000
_CHUNK = 16384


def _guard(n_candidates: int, capacity: int) -> None:
    total = sum(comb(n_candidates, c) for c in range(1, min(capacity, n_candidates) + 1))
    if total > SUBSET_GUARD:
        raise TooLarge(f"{total} subsets exceed the {SUBSET_GUARD} enumeration guard")


def _candidates(sc: SolveContext, candidate_set) -> list[int]:
    cand = [int(c) for c in sc.cand]
    if candidate_set is not None:
        wanted = {int(c) for c in candidate_set}
        cand = [c for c in cand if c in wanted]
    return cand


def exhaustive_solve(scenario: Scenario, candidate_set=None) -> Selection:
    """Global minimum over all reference subsets of size at most the budget.

    Subsets are scanned per size in lexicographic tick order and the first
    strict minimizer wins; exact objective ties across sizes go to the
    lexicographically smaller reference sequence.
    """
    sc = SolveContext(scenario)
    cand = _candidates(sc, candidate_set)
    n = len(cand)
    if n == 0:
        raise Infeasible("no constructible reference candidates")
    _guard(n, scenario.capacity)

    dmat = _restricted_dmat(sc, cand)
    best_obj, best_refs = None, None
    for size in range(1, min(scenario.capacity, n) + 1):
        it = combinations(range(n), size)
        while True:
            chunk = list(islice(it, _CHUNK))
            if not chunk:
                break
            idx = np.asarray(chunk, dtype=np.int64)
            vals = np.full((dmat.shape[0], idx.shape[0]), BIG)
            for i in range(size):
                for j in range(i, size):
                    np.minimum(vals, dmat[:, idx[:, i], idx[:, j]], out=vals)
            obj = vals.sum(axis=0)
            pos = int(np.argmin(obj))
            val = float(obj[pos])
            if val >= BIG_THRESHOLD:
                continue
            refs = tuple(cand[i] for i in idx[pos])
            if best_obj is None or val < best_obj or (val == best_obj and refs < best_refs):
                best_obj, best_refs = val, refs
    if best_refs is None:
        raise Infeasible("no covering subset within budget")
    return selection_from_refs(best_refs, scenario)


def _restricted_dmat(sc: SolveContext, cand: list[int]) -> np.ndarray:
    full = sc.dmat()
    keep = [sc.candpos[c] for c in cand]
    return full[np.ix_(range(sc.nt), keep, keep)]


class _TreeSearch:
    """Ordered selection recursion with memoized states.

    State: (first uncovered window tick, frozen selection prefix, remaining
    budget). A candidate appended to the prefix either keeps the covered
    range open (some viewpoint still finds a strictly better right reference
    beyond the frontier) or closes the range against the prefix and recurses
    on the remainder.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.sc = SolveContext(scenario)
        self.cand = [int(c) for c in self.sc.cand]
        self.n = len(self.cand)
        _guard(self.n, scenario.capacity)
        self.wl, self.wr, self.nt = self.sc.wl, self.sc.wr, self.sc.nt
        self.dmat = self.sc.dmat()
        # suffix minima over right references: sm[u, a, r0] = min over r >= r0
        sm = np.full((self.nt, self.n, self.n + 1), BIG)
        for r0 in range(self.n - 1, -1, -1):
            sm[:, :, r0] = np.minimum(sm[:, :, r0 + 1], self.dmat[:, :, r0])
        self.sm = sm
        self.memo: dict = {}
        self.cond_memo: dict = {}

    def _pair_min(self, sel: tuple[int, ...], ui: int) -> float:
        row = self.dmat[ui]
        best = BIG
        for i in sel:
            for j in sel:
                if j < i:
                    continue
                v = row[i, j]
                if v < best:
                    best = v
        return best

    def _close_sum(self, sel: tuple[int, ...], lo_tick: int, hi_tick: int) -> float:
        total = 0.0
        for u in range(max(lo_tick, self.wl), min(hi_tick, self.wr) + 1):
            total += self._pair_min(sel, u - self.wl)
        return total

    def _pending_mask(self, sel: tuple[int, ...]) -> int:
        """Bitmask of window ticks whose best synthesis needs a right
        reference strictly beyond the selection frontier."""
        key = sel
        cached = self.cond_memo.get(key)
        if cached is not None:
            return cached
        last = sel[-1]
        mask = 0
        for ui in range(self.nt):
            have = self._pair_min(sel, ui)
            beyond = BIG
            for i in sel:
                if self.cand[i] <= self.wl + ui:
                    b = self.sm[ui, i, last + 1]
                    if b < beyond:
                        beyond = b
            if beyond < have:
                mask |= 1 << ui
        self.cond_memo[key] = mask
        return mask

    def _still_pending(self, sel: tuple[int, ...], lo_tick: int, hi_tick: int) -> bool:
        mask = self._pending_mask(sel)
        lo = max(lo_tick, self.wl) - self.wl
        hi = min(hi_tick, self.wr) - self.wl
        if hi < lo:
            return False
        span = ((1 << (hi - lo + 1)) - 1) << lo
        return bool(mask & span)

    def value(self, ul_tick: int, sel: tuple[int, ...], k: int) -> float:
        if ul_tick > self.wr:
            return 0.0
        key = (ul_tick, sel, k)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        best = BIG
        last = sel[-1] if sel else -1
        if k <= 1:
            start = last if sel else 0
            for v in range(max(start, 0), self.n):
                ext = sel if v == last else sel + (v,)
                best = min(best, self._close_sum(ext, ul_tick, self.wr))
        else:
            if sel:
                best = min(best, self._close_sum(sel, ul_tick, self.wr))
            for v in range(last + 1, self.n):
                ext = sel + (v,)
                v_tick = self.cand[v]
                if self._still_pending(ext, ul_tick, v_tick):
                    best = min(best, self.value(ul_tick, ext, k - 1))
                else:
                    seg = self._close_sum(ext, ul_tick, v_tick)
                    best = min(best, seg + self.value(v_tick + 1, ext, k - 1))
        self.memo[key] = best
        return best

    def reconstruct(self) -> tuple[int, ...]:
        self.open_steps = 0  # times the walk kept a prefix open for a later right reference
        ul, sel, k = self.wl, (), self.scenario.capacity
        while True:
            if ul > self.wr:
                return sel
            val = self.value(ul, sel, k)
            last = sel[-1] if sel else -1
            if k <= 1:
                start = last if sel else 0
                for v in range(max(start, 0), self.n):
                    ext = sel if v == last else sel + (v,)
                    if self._close_sum(ext, ul, self.wr) == val:
                        return ext
                raise RuntimeError("tree search reconstruction failed at base")
            if sel and self._close_sum(sel, ul, self.wr) == val:
                return sel
            moved = False
            for v in range(last + 1, self.n):
                ext = sel + (v,)
                v_tick = self.cand[v]
                if self._still_pending(ext, ul, v_tick):
                    if self.value(ul, ext, k - 1) == val:
                        sel, k = ext, k - 1
                        self.open_steps += 1
                        moved = True
                        break
                else:
                    seg = self._close_sum(ext, ul, v_tick)
                    if seg + self.value(v_tick + 1, ext, k - 1) == val:
                        ul, sel, k = v_tick + 1, ext, k - 1
                        moved = True
                        break
            if not moved:
                raise RuntimeError("tree search reconstruction failed")


def treesearch_solve(scenario: Scenario) -> Selection:
    """Exact solve by ordered selection with open/close segment decisions."""
    ts = _TreeSearch(scenario)
    if ts.n == 0:
        raise Infeasible("no constructible reference candidates")
    objective = ts.value(ts.wl, (), scenario.capacity)
    if objective >= BIG_THRESHOLD:
        raise Infeasible("no covering selection within budget")
    sel = ts.reconstruct()
    refs = tuple(ts.cand[i] for i in sel)
    out = selection_from_refs(refs, scenario)
    if abs(out.objective - objective) > 1e-6 * max(1.0, abs(objective)):
        raise RuntimeError(f"tree search value {objective} disagrees with its selection {out.objective}")
    return out
