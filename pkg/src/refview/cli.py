"""Command-line interface.

Exit codes: 0 on success, 2 when the instance is infeasible or beyond the
exact-solver guards, 3 on configuration errors (bad config file, bad flags).
"""

from __future__ import annotations

import argparse
import sys

from . import experiments as exp
from .assumptions import check_independence, check_shared_optimality
from .dp import solve
from .errors import ConfigError, CoverageGap, Infeasible, RefViewError, TooLarge
from .gaussmarkov import compare_synth_vs_direct
from .grid import format_units
from .oracle import exhaustive_solve, treesearch_solve
from .scenario import SolveContext, load_config
from .setcover import build_gadget, decide, read_setcover_csv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad value list {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def _rationals(text: str) -> list[str]:
    vals = [x.strip() for x in text.split(",") if x.strip()]
    if not vals:
        raise ConfigError(f"empty value list {text!r}")
    return vals


def _scenario(args):
    scn = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        scn = scn.with_(seed=args.seed)
    return scn


def _build_parser() -> _Parser:
    p = _Parser(prog="refview", description="Reference-view selection toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--out", help="output CSV path")
        sp.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        return sp

    def add_scenario(name, fig=False, **kw):
        sp = add(name, **kw)
        sp.add_argument("--config", required=True, help="scenario config file")
        sp.add_argument("--peak", type=float, default=255.0, help="PSNR peak signal value")
        if fig:
            sp.add_argument("--fig", help="also render a figure to this path")
        return sp

    sp = add_scenario("solve", help="optimal selection for one scenario")
    sp.add_argument("--engine", choices=["auto", "fast", "reference"], default="auto")

    sp = add_scenario("oracle", help="exact selection via an assumption-free solver")
    sp.add_argument("--method", choices=["exhaustive", "tree"], default="exhaustive")

    add_scenario("check-assumptions", help="run both structural checkers")

    sp = add_scenario("sweep-capacity", fig=True, help="PSNR vs channel capacity")
    sp.add_argument("--capacities", required=True, type=_ints)

    sp = add_scenario("sweep-window-left", fig=True, help="PSNR vs window left edge")
    sp.add_argument("--window-lefts", required=True, type=_rationals)

    sp = add_scenario("sweep-window-size", fig=True, help="mean PSNR gain vs window size")
    sp.add_argument("--deltas", required=True, type=_rationals)
    sp.add_argument("--trials", type=int, default=64)

    sp = add_scenario("sweep-randomness", fig=True, help="mean PSNR vs camera jitter variance")
    sp.add_argument("--sigmas", required=True, type=_floats)
    sp.add_argument("--runs", type=int, default=400)

    sp = add_scenario("sweep-sampling", fig=True, help="mean PSNR vs camera sampling distance")
    sp.add_argument("--sampling", required=True, type=_ints)
    sp.add_argument("--runs", type=int, default=400)
    sp.add_argument("--window-views", type=int, default=20)

    sp = add_scenario("threshold-capacity", fig=True, help="capacity where the synthesis gain vanishes")
    sp.add_argument("--window-rights", required=True, type=_rationals)

    sp = add("gm-compare", help="precision of synthesized vs direct reference delivery")
    sp.add_argument("--sigma2", type=float, required=True)
    sp.add_argument("--sigma3", type=float, required=True)
    sp.add_argument("--sigma4", type=float, required=True)

    sp = add("reduce-setcover", help="build and decide a set-cover gadget instance")
    sp.add_argument("--instance", required=True, help="set-cover CSV (subset_id,item)")
    sp.add_argument("--budget", type=int, required=True, help="cover budget K")
    sp.add_argument("--dbar", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    return p


def _cmd_solve(args) -> int:
    scn = _scenario(args)
    sel = solve(scn, engine=args.engine)
    _report_selection(scn, sel, args)
    return 0


def _cmd_oracle(args) -> int:
    scn = _scenario(args)
    sel = exhaustive_solve(scn) if args.method == "exhaustive" else treesearch_solve(scn)
    _report_selection(scn, sel, args)
    return 0


def _report_selection(scn, sel, args) -> None:
    n = scn.window.tick_count()
    print(f"refs: {format_units(scn.grid, sel.refs)}")
    print(f"objective: {sel.objective!r}")
    print(f"psnr_db: {exp.psnr_of(sel, n, args.peak)!r}")
    if args.out:
        exp.write_selection_csv(sel, scn.grid, args.out)


def _cmd_check(args) -> int:
    scn = _scenario(args)
    sc = SolveContext(scn)
    ref_d = {int(t): float(d) for t, d in sc.refd_map.items()}
    reports = {
        "shared_optimality": check_shared_optimality(scn.grid, scn.window, scn.evaluator, ref_d),
        "independence": check_independence(scn.grid, scn.window, scn.evaluator, ref_d),
    }
    for name, rep in reports.items():
        print(f"{name}: {'holds' if rep.holds else 'violated'}")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(
                "assumption,holds,u,u_prime,v_l,v_r,v_l_prime,v_r_prime,"
                "antecedent_lhs,antecedent_rhs,consequent_lhs,consequent_rhs\n"
            )
            for name, rep in reports.items():
                if rep.holds:
                    fh.write(f"{name},true,,,,,,,,,,\n")
                else:
                    w = ",".join(str(x) for x in rep.counterexample)
                    (a1, a2), (c1, c2) = rep.values
                    fh.write(f"{name},false,{w},{a1!r},{a2!r},{c1!r},{c2!r}\n")
    return 0


def _sweep_command(args, runner, xlabel, gain_plot=False) -> int:
    result = runner()
    if args.out:
        exp.write_sweep_csv(result, args.out)
    for r in result.rows:
        print(f"{r.sweep_value}: synth={r.psnr_synth_db} nosynth={r.psnr_nosynth_db}")
    if getattr(args, "fig", None):
        from . import plots

        if gain_plot:
            plots.render_gain(result, args.fig, xlabel)
        else:
            plots.render_sweep(result, args.fig, xlabel)
    return 0


def _cmd_threshold(args) -> int:
    scn = _scenario(args)
    rows = exp.threshold_capacity(scn, args.window_rights, peak=args.peak)
    if args.out:
        exp.write_threshold_csv(rows, args.out)
    for ur, c_star in rows:
        print(f"{ur}: c_star={c_star}")
    if getattr(args, "fig", None):
        from . import plots

        plots.render_threshold(rows, args.fig)
    return 0


def _cmd_gm(args) -> int:
    for name, v in (("sigma2", args.sigma2), ("sigma3", args.sigma3), ("sigma4", args.sigma4)):
        if v <= 0:
            raise ConfigError(f"{name} must be > 0")
    q_synth, q_direct = compare_synth_vs_direct(args.sigma2, args.sigma3, args.sigma4)
    print(f"q_synth: {q_synth!r}")
    print(f"q_direct: {q_direct!r}")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write("sigma2_sq,sigma3_sq,sigma4_sq,q_synth,q_direct\n")
            fh.write(f"{args.sigma2!r},{args.sigma3!r},{args.sigma4!r},{q_synth!r},{q_direct!r}\n")
    return 0


def _cmd_setcover(args) -> int:
    inst = read_setcover_csv(args.instance, args.budget)
    gadget = build_gadget(inst, args.dbar, args.delta)
    answer, sel = decide(gadget)
    print(f"answer: {'yes' if answer else 'no'}")
    print(f"objective: {sel.objective!r} target: {gadget.target!r}")
    print(f"refs: {format_units(gadget.scenario.grid, sel.refs)}")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write("answer,objective,target,budget,refs\n")
            fh.write(
                f"{'yes' if answer else 'no'},{sel.objective!r},{gadget.target!r},"
                f"{gadget.budget},{format_units(gadget.scenario.grid, sel.refs)}\n"
            )
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cmd = args.command
        if cmd == "solve":
            return _cmd_solve(args)
        if cmd == "oracle":
            return _cmd_oracle(args)
        if cmd == "check-assumptions":
            return _cmd_check(args)
        if cmd == "sweep-capacity":
            scn = _scenario(args)
            return _sweep_command(args, lambda: exp.sweep_capacity(scn, args.capacities, peak=args.peak), "channel capacity")
        if cmd == "sweep-window-left":
            scn = _scenario(args)
            return _sweep_command(args, lambda: exp.sweep_window_left(scn, args.window_lefts, peak=args.peak), "window left edge (view index)")
        if cmd == "sweep-window-size":
            scn = _scenario(args)
            return _sweep_command(
                args,
                lambda: exp.sweep_window_size(scn, args.deltas, n_trials=args.trials, peak=args.peak),
                "window size (view index units)",
                gain_plot=True,
            )
        if cmd == "sweep-randomness":
            scn = _scenario(args)
            return _sweep_command(
                args,
                lambda: exp.sweep_camera_randomness(scn, args.sigmas, n_runs=args.runs, peak=args.peak),
                "camera position variance",
            )
        if cmd == "sweep-sampling":
            scn = _scenario(args)
            return _sweep_command(
                args,
                lambda: exp.sweep_sampling_distance(
                    scn, args.sampling, n_runs=args.runs, window_width_views=args.window_views, peak=args.peak
                ),
                "camera sampling distance",
            )
        if cmd == "threshold-capacity":
            return _cmd_threshold(args)
        if cmd == "gm-compare":
            return _cmd_gm(args)
        if cmd == "reduce-setcover":
            return _cmd_setcover(args)
        raise ConfigError(f"unknown command {cmd!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (Infeasible, TooLarge, CoverageGap) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except RefViewError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
