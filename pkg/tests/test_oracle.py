import numpy as np
import pytest

from conftest import make_scenario, canonical_scenario, sparse_random_scenario, tabulated_random_scenario
from refview.distortion import SynthParams, TabulatedEvaluator
from refview.dp import aggregate_distortion
from refview.errors import Infeasible, TooLarge
from refview.grid import format_units
from refview.oracle import _TreeSearch, exhaustive_solve, treesearch_solve
from refview.scenario import CandidateMode


def test_exhaustive_dominates_fixed_subsets():
    scn = canonical_scenario(capacity=3)
    best = exhaustive_solve(scn)
    for refs in ([6, 42], [0, 24, 48], [6, 24, 42], [0, 16, 48]):
        obj, _ = aggregate_distortion(refs, scn)
        assert best.objective <= obj + 1e-9


def test_exhaustive_single_camera_window():
    p = SynthParams(gamma=0.2, d_inpaint=200.0, d_camera=9.0)
    scn = make_scenario(1, 25.0, 6, [0, 3, 6], 3, 3, 2, p)
    sel = exhaustive_solve(scn)
    assert sel.objective == pytest.approx(9.0, rel=1e-12)
    assert 3 in sel.refs


def test_exhaustive_canonical_capacity_three():
    scn = canonical_scenario(capacity=3)
    sel = exhaustive_solve(scn)
    assert format_units(scn.grid, sel.refs) == "0.75;3;5.25"


def test_exhaustive_guard():
    p = SynthParams(gamma=0.1, d_inpaint=200.0)
    scn = make_scenario(1, 10.0, 160, [0, 160], 10, 150, 5, p)
    with pytest.raises(TooLarge):
        exhaustive_solve(scn)
    with pytest.raises(TooLarge):
        treesearch_solve(scn)


def test_cross_oracle_equivalence_random():
    rng = np.random.default_rng(2026)
    done = 0
    while done < 40:
        scn = sparse_random_scenario(rng, max_span=10) if done % 2 == 0 else tabulated_random_scenario(rng, max_span=9)
        if scn is None:
            continue
        scn = scn.with_(capacity=min(scn.capacity, 4))
        try:
            ex = exhaustive_solve(scn)
        except Infeasible:
            with pytest.raises(Infeasible):
                treesearch_solve(scn)
            done += 1
            continue
        ts = treesearch_solve(scn)
        assert ts.objective == pytest.approx(ex.objective, rel=1e-9)
        done += 1


def test_treesearch_capacity_two_reduces_to_rightmost_scan():
    scn = canonical_scenario(capacity=2)
    assert treesearch_solve(scn).objective == pytest.approx(exhaustive_solve(scn).objective, rel=1e-12)


def _interleaved_instance():
    # six delivered views; the first off-view tick is only cheap under the
    # very last reference, so the search must keep the prefix open across
    # four straight selections before anything can close
    table = {}
    cheap = {(1, 0, 10): 1.0, (3, 2, 6): 1.0, (5, 4, 8): 1.0, (7, 6, 10): 1.0}
    for u in (1, 3, 5, 7):
        for vl in (0, 2, 4, 6):
            for vr in (2, 4, 6, 8, 10):
                if vl < u < vr:
                    table[(u, vl, vr)] = cheap.get((u, vl, vr), 50.0)
    p = SynthParams(gamma=0.0, d_inpaint=0.0, d_camera=0.0)
    scn = make_scenario(1, 10.0, 10, [0, 2, 4, 6, 8, 10], 0, 8, 6, p, evaluator=TabulatedEvaluator(table))
    return scn.with_(candidate_mode=CandidateMode.CAMERAS_ONLY)


def test_interleaved_rights_need_a_long_open_run():
    scn = _interleaved_instance()
    ex = exhaustive_solve(scn)
    ts = treesearch_solve(scn)
    assert ts.objective == pytest.approx(ex.objective, rel=1e-12)
    assert ts.objective == pytest.approx(4.0, rel=1e-12)
    walker = _TreeSearch(scn)
    walker.value(walker.wl, (), scn.capacity)
    walker.reconstruct()
    assert walker.open_steps >= 4


def test_exhaustive_candidate_set_restriction():
    scn = canonical_scenario(capacity=2)
    all_views = exhaustive_solve(scn)
    restricted = exhaustive_solve(scn, candidate_set=[0, 8, 16, 24, 32, 40, 48])
    cams_only = exhaustive_solve(scn.with_(candidate_mode=CandidateMode.CAMERAS_ONLY))
    assert restricted.objective == pytest.approx(cams_only.objective, rel=1e-12)
    assert all_views.objective <= restricted.objective


def test_cameras_only_solve_matches_oracle():
    from conftest import dense_random_scenario
    from refview.assumptions import check_independence, check_shared_optimality
    from refview.dp import solve
    from refview.scenario import SolveContext

    done = 0
    for seed in range(400):
        scn = dense_random_scenario(seed + 50_000)
        if scn is None:
            continue
        scn = scn.with_(candidate_mode=CandidateMode.CAMERAS_ONLY)
        sc = SolveContext(scn)
        if int(sc.cand[0]) > sc.wl or int(sc.cand[-1]) < sc.wr:
            continue
        ref_d = dict(sc.refd_map)
        if not (
            check_shared_optimality(scn.grid, scn.window, scn.evaluator, ref_d).holds
            and check_independence(scn.grid, scn.window, scn.evaluator, ref_d).holds
        ):
            continue
        got = solve(scn)
        want = exhaustive_solve(scn)
        assert got.objective == pytest.approx(want.objective, rel=1e-9)
        done += 1
        if done >= 40:
            break
    assert done >= 20


def test_oracles_deterministic():
    scn = canonical_scenario(capacity=3)
    a = exhaustive_solve(scn)
    b = exhaustive_solve(scn)
    assert a.refs == b.refs and a.objective == b.objective
    c = treesearch_solve(scn)
    d = treesearch_solve(scn)
    assert c.refs == d.refs and c.objective == d.objective
