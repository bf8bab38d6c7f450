"""Command-line driver: JSON configs in, CSV + JSON reports (and figures) out.

Every command is deterministic given its config and seed.  Exit codes:
0 success, 2 malformed config, 3 violated precondition, 4 a check command
found a genuine failure.  Timing is printed to stderr so output files stay
byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, LabError, NotRepresentableError, PreconditionError
from .infogain import (
    closed_form_gain_infogain_prior,
    closed_form_gain_uniform,
    solve_malus_ivp,
    verify_flatness,
)
from .inference import PriorSpec
from .measurement import outcome_probs
from .serialization import (
    complex_map_to_dict,
    dump_json,
    load_json,
    map_from_dict,
    pipeline_from_dict,
    read_runlog_csv,
    write_runlog_csv,
    write_table,
)
from .simulate import PipelineConfig, consistency_check, infer_state, run_pipeline
from .states import state_to_json_dict
from .transforms import (
    ComplexMap,
    OrthoMap,
    check_phase_shift_invariance,
    constraint_coeffs,
    embed_complex,
    recast_to_complex,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_CHECK_FAILED = 4


def _envelope(command: str, config_echo, seed, results: dict) -> dict:
    return {
        "command": command,
        "config": config_echo,
        "seed": seed,
        "version": __version__,
        "results": results,
    }


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_config(args) -> dict:
    if args.config is None:
        raise ConfigError("this command needs --config PATH")
    return load_json(args.config)


def _apply_threads(args) -> int:
    return max(1, int(getattr(args, "threads", 1) or 1))


# ---------------------------------------------------------------------------
# infogain


def cmd_infogain(args) -> int:
    cfg = _load_config(args)
    try:
        m = int(cfg["M"])
        n = int(cfg["n"])
        prior_kind = str(cfg["prior"])
        grid = cfg["grid"]
    except KeyError as exc:
        raise ConfigError(f"infogain config missing field {exc}") from exc
    if m < 2:
        raise ConfigError("need at least two outcomes (M >= 2)")
    if prior_kind == "info-gain":
        prior = PriorSpec.info_gain()
    elif prior_kind == "uniform-simplex":
        prior = PriorSpec.uniform_simplex()
    else:
        raise ConfigError(f"unknown prior kind {prior_kind!r}")
    pts = []
    for g in grid:
        if isinstance(g, (int, float)):
            if m != 2:
                raise ConfigError("scalar grid entries are only valid for M=2")
            pts.append([float(g), 1.0 - float(g)])
        else:
            if len(g) != m:
                raise ConfigError("grid entries must be probability tuples of length M")
            pts.append([float(x) for x in g])
    resolution = int(cfg.get("resolution", 1024))
    stoch = cfg.get("stochastic_seed")
    rng = np.random.default_rng(int(stoch)) if stoch is not None else None

    report = verify_flatness(prior, m, n, pts, resolution,
                             max_workers=_apply_threads(args), rng=rng)

    out = _out_dir(args)
    rows = []
    for p, gain in zip(report.grid, report.gains):
        row = [float(x) for x in p] + [float(gain)]
        if prior_kind == "uniform-simplex" and m == 2:
            row.append(closed_form_gain_uniform(n, float(p[0])))
        rows.append(row)
    header = [f"P{i + 1}" for i in range(m)] + ["delta_k"]
    if prior_kind == "uniform-simplex" and m == 2:
        header.append("closed_form")
    write_table(out, "flatness", header, rows, args.format)

    results = {
        "spread": report.spread,
        "mean": report.fitted_constant,
        "gains": report.gains,
        "chart_domain": [list(d) for d in report.chart_domain],
        "quadrature_check": report.quadrature_check,
        "prior": prior_kind,
    }
    if prior_kind == "info-gain":
        breakdown = closed_form_gain_infogain_prior(m, n)
        results["closed_form"] = {
            "leading": breakdown.leading,
            "constant": breakdown.constant,
            "total": breakdown.total,
        }
        results["mean_minus_closed_form"] = report.fitted_constant - breakdown.total
    dump_json(out / "flatness.json", _envelope("infogain", cfg, cfg.get("seed"), results))
    if args.figures:
        from .plots import flatness_figure

        flatness_figure(report, out / "flatness.png")
    return EXIT_OK


# ---------------------------------------------------------------------------
# malus


def cmd_malus(args) -> int:
    cfg = _load_config(args)
    try:
        a = float(cfg["a"])
        b = float(cfg.get("b", 0.0))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"malus config needs numeric a (and optional b): {exc}") from exc
    step = float(cfg.get("step", 1e-3))
    lams, vals = solve_malus_ivp(a, b, step)
    analytic = np.cos(a * lams + b) ** 2
    sup_gap = float(np.max(np.abs(vals - analytic)))

    out = _out_dir(args)
    write_table(out, "malus", ["lambda", "p1", "closed_form"],
                ([float(l), float(v), float(c)] for l, v, c in zip(lams, vals, analytic)),
                args.format)
    dump_json(out / "malus.json", _envelope("malus", cfg, None, {
        "a": a, "b": b, "step": step, "points": int(lams.size), "sup_gap": sup_gap,
    }))
    if args.figures:
        from .plots import malus_figure

        malus_figure(lams, vals, a, b, out / "malus.png")
    return EXIT_OK


# ---------------------------------------------------------------------------
# recast / checkshift


def _load_ortho(args) -> OrthoMap:
    data = load_json(args.map)
    try:
        m = map_from_dict(data)
    except LabError as exc:
        raise ConfigError(str(exc)) from exc
    if isinstance(m, ComplexMap):
        return embed_complex(m)
    return m


def cmd_recast(args) -> int:
    try:
        m = _load_ortho(args)
    except ConfigError as exc:
        # a structurally valid file holding a non-orthogonal matrix is a
        # precondition violation, not a config typo
        if "not orthogonal" in str(exc):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
        raise
    report = constraint_coeffs(m)
    out = _out_dir(args)
    results = {
        "scale_residual": report.scale_residual,
        "skew_residual": report.skew_residual,
        "cross_sym_residual": report.cross_sym_residual,
        "cross_skew_residual": report.cross_skew_residual,
        "homogeneous": report.homogeneous,
        "sigma": report.sigma,
        "block_types": [list(row) for row in report.block_types],
    }
    representable = report.sigma is not None
    if representable:
        recast = recast_to_complex(m)
        results["recast"] = complex_map_to_dict(recast)
    dump_json(out / "recast.json", _envelope("recast", str(args.map), None, results))
    if not representable:
        print(
            "map is not the embedding of a unitary or antiunitary transformation "
            f"(max residual {report.max_residual():.6e})",
            file=sys.stderr,
        )
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_checkshift(args) -> int:
    try:
        m = _load_ortho(args)
    except ConfigError as exc:
        if "not orthogonal" in str(exc):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_PRECONDITION
        raise
    rng = np.random.default_rng(args.seed)
    check = check_phase_shift_invariance(m, trials=args.trials, rng=rng, tol=args.tol)
    out = _out_dir(args)
    results = {
        "passed": check.passed,
        "max_deviation": check.max_deviation,
        "trials": args.trials,
        "tol": args.tol,
    }
    if not check.passed:
        results["witness"] = {
            "state": state_to_json_dict(check.witness_state),
            "shift": check.witness_shift,
            "outcome": check.witness_outcome,
        }
    dump_json(out / "checkshift.json", _envelope("checkshift", str(args.map), args.seed, results))
    if not check.passed:
        print(
            f"phase-shift invariance violated: outcome {check.witness_outcome} moved by "
            f"{check.max_deviation:.6e} under a shift of {check.witness_shift:.6f}",
            file=sys.stderr,
        )
        return EXIT_CHECK_FAILED
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate / infer / consistency


def cmd_simulate(args) -> int:
    cfg_dict = _load_config(args)
    if args.seed is not None:
        cfg_dict["seed"] = args.seed
    cfg = pipeline_from_dict(cfg_dict)
    log = run_pipeline(cfg)
    out = _out_dir(args)
    write_runlog_csv(out / "runlog.csv", log)

    counts = log.counts().counts
    v, _ = _post_prep_vector(cfg)
    predicted = outcome_probs(cfg.measurement, v)
    results = {
        "n_outcomes": log.n_outcomes,
        "runs": log.runs,
        "counts": counts,
        "frequencies": counts / counts.sum(),
        "predicted": predicted,
        "prep_attempts": log.prep_attempts,
        "reveal_hidden": cfg.reveal_hidden,
    }
    if cfg.reveal_hidden:
        results["hidden_counts"] = log.hidden_counts().counts
        results["sign_votes"] = log.sign_votes()
    dump_json(out / "runlog.json", _envelope("simulate", cfg_dict, cfg.seed, results))
    if args.figures:
        from .plots import runlog_figure

        runlog_figure(counts, predicted, out / "runlog.png")
    return EXIT_OK


def _post_prep_vector(cfg: PipelineConfig):
    from .measurement import collapse
    from .simulate import prepared_state

    rng = np.random.default_rng(0)
    v, source = prepared_state(cfg, rng)
    if cfg.selection_enabled:
        v = collapse(cfg.preparation, v, cfg.prep_outcome)
    if cfg.interaction is not None:
        v = cfg.interaction.apply(v)
    return v, source


def cmd_infer(args) -> int:
    if args.log is None:
        raise ConfigError("infer needs --log PATH pointing at a run-log CSV")
    log_path = Path(args.log)
    meta_path = Path(args.meta) if args.meta else log_path.with_suffix(".json")
    meta = load_json(meta_path)
    try:
        n_outcomes = int(meta["results"]["n_outcomes"])
    except KeyError as exc:
        raise ConfigError(f"run-log summary missing field {exc}") from exc
    log = read_runlog_csv(log_path, n_outcomes)
    result = infer_state(log, n_outcomes)
    out = _out_dir(args)
    results = {
        "map_state": state_to_json_dict(result.map_state),
        "map_q": result.map_q,
        "sigma": result.sigma,
        "signs": result.signs,
        "ambiguous_cells": np.nonzero(result.ambiguous)[0],
        "cell_counts": result.cell_counts,
    }
    dump_json(out / "inferred_state.json", _envelope("infer", str(log_path), log.seed, results))
    if args.figures:
        from .plots import inferred_state_figure

        inferred_state_figure(result, out / "inferred_state.png")
    return EXIT_OK


def cmd_consistency(args) -> int:
    cfg = _load_config(args)
    try:
        from .serialization import measurement_from_dict, state_from_dict

        state = state_from_dict(cfg["state"])
        m = map_from_dict(cfg["map"])
        meas = measurement_from_dict(cfg["measurement"])
        ns = [int(x) for x in cfg["runs"]]
    except KeyError as exc:
        raise ConfigError(f"consistency config missing field {exc}") from exc
    if isinstance(m, OrthoMap):
        m = recast_to_complex(m)
    seed = int(cfg.get("seed", 0)) if args.seed is None else args.seed

    distances = []
    for i, n in enumerate(ns):
        res = consistency_check(state, m, meas, n, seed=seed + 101 * i)
        distances.append(res.distance)
    out = _out_dir(args)
    write_table(out, "consistency", ["runs", "distance"],
                ([n, float(d)] for n, d in zip(ns, distances)), args.format)
    slope = None
    if len(ns) >= 2:
        slope = float(np.polyfit(np.log(ns), np.log(distances), 1)[0])
    dump_json(out / "consistency.json", _envelope("consistency", cfg, seed, {
        "runs": ns,
        "distances": distances,
        "log_log_slope": slope,
    }))
    if args.figures:
        from .plots import consistency_figure

        consistency_figure(np.asarray(ns), np.asarray(distances), out / "consistency.png")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgainlab",
        description="Numerical laboratory for the information-gain route to quantum theory",
    )
    parser.add_argument("--version", action="version", version=f"qgainlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", type=Path, help="JSON config path")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads for grid sweeps")
        p.add_argument("--format", choices=["csv", "json"], default="csv",
                       help="report table format; run logs stay CSV for the infer command")
        fig = p.add_mutually_exclusive_group()
        fig.add_argument("--figures", dest="figures", action="store_true", default=True,
                         help="render PNG figures next to the data (default)")
        fig.add_argument("--no-figures", dest="figures", action="store_false")

    p = sub.add_parser("infogain", help="information-gain flatness sweep")
    common(p)
    p.set_defaults(func=cmd_infogain)

    p = sub.add_parser("malus", help="integrate the outcome-probability law")
    common(p)
    p.set_defaults(func=cmd_malus)

    p = sub.add_parser("recast", help="block-constraint report and complex recast of a map")
    common(p, needs_config=False)
    p.add_argument("--map", type=Path, required=True, help="serialized map (JSON)")
    p.set_defaults(func=cmd_recast)

    p = sub.add_parser("checkshift", help="phase-shift invariance check of a map")
    common(p, needs_config=False)
    p.add_argument("--map", type=Path, required=True, help="serialized map (JSON)")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_checkshift)

    p = sub.add_parser("simulate", help="run the experiment pipeline")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("infer", help="reconstruct a state from a hidden-outcome run log")
    common(p, needs_config=False)
    p.add_argument("--log", type=Path, required=True, help="run-log CSV from simulate")
    p.add_argument("--meta", type=Path, default=None,
                   help="run-log JSON summary (default: CSV path with .json)")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("consistency", help="transform/inference commuting-diagram statistic")
    common(p)
    p.set_defaults(func=cmd_consistency)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        code = args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotRepresentableError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    elapsed = time.perf_counter() - start
    print(f"[qgainlab] {args.command} finished in {elapsed:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
