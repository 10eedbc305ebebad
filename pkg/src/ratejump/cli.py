"""Command-line interface.

Every subcommand is reproducible: it honors ``--seed`` and writes a
``*.manifest`` file next to its primary output recording the subcommand,
all resolved parameters, input and output paths, the tool version, and
wall time.  Exit codes: 0 success, 2 usage error (bad flags or missing
input file, message on stderr), 1 runtime failure (diagnostic names the
failing module).
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from .detector import DetectorConfig, argmax_single, detect, save_report_csv
from .harness import (
    PRESETS,
    ConstNullScenario,
    ExperimentSpec,
    SITreeScenario,
    SmoothJumpScenario,
    false_alarm_study,
    get_preset,
    heatmap_spec_from_preset,
    run_baselines,
    run_heatmap,
    save_heatmap_csv,
    save_heatmap_long_csv,
)
from .ingest import analyze_binned, load_daily_csv, save_analysis_csv
from .multicascade import CascadeBundle, estimate_high_degree, save_multicascade_report
from .poisson import (
    RATE_PRESETS,
    load_rate_spec,
    preset_rate_spec,
    save_rate_spec,
    simulate,
)
from .process import from_binned, load_binned_csv, load_event_times, save_binned_csv, save_event_times
from .process import bin_events
from .seeding import SimSeed
from .si import (
    build_tree_with_hub,
    infection_count_process,
    load_edge_list,
    load_trace_csv,
    save_trace_csv,
    simulate_si,
)

__all__ = ["main", "entry", "build_parser"]


class UsageError(Exception):
    """Bad invocation detected after argparse (e.g. missing input file)."""


def _positive_float(name):
    def parse(text):
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not value > 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {text}")
        return value

    return parse


def _positive_int(name):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}")
        if value < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1, got {text}")
        return value

    return parse


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _delta_grid(text):
    """Either 'lo:hi:n' (n evenly spaced values) or a comma list of deltas."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected lo:hi:n numbers, got {text!r}")
        if not (0 < lo <= hi and n >= 1):
            raise argparse.ArgumentTypeError(f"need 0 < lo <= hi and n >= 1, got {text!r}")
        return tuple(float(x) for x in np.linspace(lo, hi, n))
    try:
        values = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated deltas, got {text!r}")
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError(f"deltas must be positive, got {text!r}")
    return values


def _out_dir(args) -> str:
    out = getattr(args, "out_dir", None) or os.environ.get("RATEJUMP_OUT") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _require_file(path) -> str:
    if not os.path.isfile(path):
        raise UsageError(f"missing input file: {path}")
    return path


def _write_manifest(primary_output, subcommand, args, inputs, outputs, wall_time, extra=None):
    path = str(primary_output) + ".manifest"
    skip = {"func", "out_dir"}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"subcommand={subcommand}\n")
        fh.write(f"version={__version__}\n")
        fh.write(f"wall_time_s={wall_time:.3f}\n")
        fh.write(f"inputs={','.join(str(p) for p in inputs)}\n")
        fh.write(f"outputs={','.join(str(p) for p in outputs)}\n")
        for key in sorted(vars(args)):
            if key in skip:
                continue
            fh.write(f"param.{key}={getattr(args, key)}\n")
        for key in sorted(extra or {}):
            fh.write(f"result.{key}={extra[key]}\n")
    return path


def _load_counting(args):
    """Resolve the --events / --binned input pair into a counting process."""
    if args.events and args.binned:
        raise UsageError("give either --events or --binned, not both")
    if args.events:
        events = load_event_times(_require_file(args.events), horizon=args.horizon)
        return events, [args.events]
    if args.binned:
        series = load_binned_csv(_require_file(args.binned))
        return from_binned(series), [args.binned]
    raise UsageError("an input is required: --events FILE or --binned FILE")


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate_poisson(args):
    if args.rate_spec:
        spec = load_rate_spec(_require_file(args.rate_spec))
        inputs = [args.rate_spec]
    else:
        overrides = {}
        if args.base is not None:
            overrides["base"] = args.base
        if args.jump is not None:
            overrides["jump"] = args.jump
        if args.onset is not None:
            overrides["onset"] = args.onset
        spec = preset_rate_spec(args.rate_preset, **overrides)
        inputs = []
    events = simulate(spec, args.horizon, SimSeed(args.seed, args.stream))
    out_dir = _out_dir(args)
    out_events = os.path.join(out_dir, args.out)
    save_event_times(events, out_events)
    outputs = [out_events]
    spec_out = out_events + ".ratespec"
    save_rate_spec(spec, spec_out)
    outputs.append(spec_out)
    if args.bin_width is not None:
        binned = bin_events(events, bin_width=args.bin_width)
        out_binned = out_events + ".binned.csv"
        save_binned_csv(binned, out_binned)
        outputs.append(out_binned)
    print(f"simulated {len(events)} events on [0, {args.horizon}] -> {out_events}")
    return out_events, inputs, outputs, {"n_events": len(events)}


def cmd_simulate_si(args):
    if args.graph:
        graph = load_edge_list(_require_file(args.graph))
        inputs = [args.graph]
    else:
        graph = build_tree_with_hub(args.height, args.extra_leaves)
        inputs = []
    source = args.source
    if source >= graph.n:
        raise UsageError(f"source {source} out of range: graph has {graph.n} vertices")
    trace = simulate_si(graph, source, SimSeed(args.seed, args.stream))
    out_dir = _out_dir(args)
    out_trace = os.path.join(out_dir, args.out)
    save_trace_csv(trace, out_trace)
    extra = {"n_vertices": graph.n}
    if graph.hub is not None:
        extra["hub"] = graph.hub
        extra["hub_time"] = repr(float(trace.times[graph.hub]))
        print(f"hub vertex {graph.hub} infected at t = {float(trace.times[graph.hub])}")
    print(f"cascade over {graph.n} vertices -> {out_trace}")
    return out_trace, inputs, [out_trace], extra


def cmd_detect(args):
    if args.threshold is not None and args.argmax_single:
        raise UsageError("--threshold conflicts with --argmax-single: pick one mode")
    if args.threshold is None and not args.argmax_single:
        raise UsageError("pick a mode: --threshold A or --argmax-single")
    counting, inputs = _load_counting(args)
    config = DetectorConfig(
        k=args.k,
        delta=args.delta,
        threshold=args.threshold,
        grid_step=args.grid_step,
        horizon=args.horizon,
    )
    report = detect(counting, config)
    out_dir = _out_dir(args)
    out_report = os.path.join(out_dir, args.out)
    save_report_csv(report, out_report)
    for e in report.estimates:
        print(f"t_hat={e.time} score={e.score}")
    if not report.estimates:
        print("no change points detected")
    return out_report, inputs, [out_report, out_report + ".meta"], {
        "n_estimates": len(report),
        "empty_window": report.empty_window,
    }


def cmd_argmax(args):
    counting, inputs = _load_counting(args)
    t_hat = argmax_single(
        counting, args.k, args.delta, grid_step=args.grid_step, horizon=args.horizon
    )
    out_dir = _out_dir(args)
    out_path = os.path.join(out_dir, args.out)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(f"{t_hat!r}\n")
    print(f"t_hat={t_hat}")
    return out_path, inputs, [out_path], {"t_hat": repr(t_hat)}


def _scenario_from_args(args):
    if args.scenario == "smooth-jump":
        jump = args.jump if args.jump is not None else 0.8 * args.base
        return SmoothJumpScenario(base=args.base, jump=jump, horizon=args.horizon)
    if args.scenario == "si-tree":
        return SITreeScenario(height=args.height, extra_leaves=args.extra_leaves)
    if args.scenario == "const-null":
        return ConstNullScenario(base=args.base, horizon=args.horizon)
    raise UsageError(f"unknown scenario {args.scenario!r}")


def cmd_heatmap(args):
    if args.preset:
        preset = get_preset(args.preset)
        if preset.kind != "heatmap":
            raise UsageError(f"preset {args.preset!r} is a {preset.kind} preset, not a heatmap")
        spec = heatmap_spec_from_preset(
            preset,
            jump=args.jump,
            extra_leaves=args.extra_leaves if args.extra_leaves != 8000 else None,
            trials=args.trials,
            base_seed=args.seed,
            k_grid=args.k_grid,
            delta_grid=args.delta_grid,
        )
    else:
        if args.k_grid is None or args.delta_grid is None:
            raise UsageError("without --preset, both --k-grid and --delta-grid are required")
        scenario = _scenario_from_args(args)
        spec = ExperimentSpec(
            scenario=scenario,
            k_grid=args.k_grid,
            delta_grid=args.delta_grid,
            trials=args.trials or 20,
            base_seed=args.seed,
        )
    result = run_heatmap(spec, workers=args.workers)
    out_dir = _out_dir(args)
    out_matrix = os.path.join(out_dir, "heatmap.csv")
    save_heatmap_csv(result, out_matrix)
    outputs = [out_matrix]
    if args.long_csv:
        out_long = os.path.join(out_dir, "heatmap_long.csv")
        save_heatmap_long_csv(result, out_long)
        outputs.append(out_long)
    k_best, d_best, err_best = result.argmin
    print(f"argmin cell: k={k_best} delta={d_best} mean_error={err_best}")
    if result.diagnostics:
        print(f"{len(result.diagnostics)} cell failures; first: {result.diagnostics[0]}")
    return out_matrix, [], outputs, {
        "argmin_k": k_best,
        "argmin_delta": repr(d_best),
        "argmin_error": repr(err_best),
    }


def cmd_baselines(args):
    scenario = _scenario_from_args(args)
    report = run_baselines(
        scenario,
        delta_grid=args.delta_grid,
        trials=args.trials,
        base_seed=args.seed,
        high_orders=args.high_orders,
        workers=args.workers,
    )
    out_dir = _out_dir(args)
    out_matrix = os.path.join(out_dir, "baselines.csv")
    save_heatmap_csv(report.heatmap, out_matrix)
    lines = []
    for k in sorted(report.per_order_min):
        delta, err = report.per_order_min[k]
        lines.append(f"k={k} best_delta={delta} mean_error={err}")
    k, delta, err = report.best_high
    lines.append(f"best higher-order: k={k} delta={delta} mean_error={err}")
    summary_path = os.path.join(out_dir, "baselines_summary.txt")
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    return out_matrix, [], [out_matrix, summary_path], {
        "best_high_k": k,
        "best_high_delta": repr(delta),
        "best_high_error": repr(err),
    }


def cmd_multicascade(args):
    if args.threshold is not None and args.mode == "argmax-single":
        raise UsageError("--threshold conflicts with --mode argmax-single")
    if args.mode == "threshold" and args.threshold is None:
        raise UsageError("--mode threshold requires --threshold A")
    inputs = []
    if args.trace:
        traces = [load_trace_csv(_require_file(p)) for p in args.trace]
        inputs = list(args.trace)
        hub = None
    else:
        graph = build_tree_with_hub(args.height, args.extra_leaves)
        hub = graph.hub
        traces = [
            simulate_si(graph, args.source, SimSeed(args.seed, i))
            for i in range(args.cascades)
        ]
    bundle = CascadeBundle(traces=tuple(traces))
    config = DetectorConfig(
        k=args.k,
        delta=args.delta,
        threshold=args.threshold,
        grid_step=args.grid_step,
    )
    report = estimate_high_degree(bundle, config, window=args.window)
    out_dir = _out_dir(args)
    out_path = os.path.join(out_dir, args.out)
    save_multicascade_report(report, out_path)
    shown = sorted(report.vertices)
    print(f"estimated high-degree vertices ({len(shown)}): {shown[:10]}"
          + (" ..." if len(shown) > 10 else ""))
    extra = {"n_vertices": len(report.vertices)}
    if hub is not None:
        extra["hub"] = hub
        extra["hub_found"] = hub in report.vertices
        print(f"planted hub {hub} {'found' if hub in report.vertices else 'NOT found'}")
    return out_path, inputs, [out_path], extra


def cmd_analyze_binned(args):
    series = load_daily_csv(
        _require_file(args.csv),
        region=args.region,
        mode=args.mode,
    )
    analysis = analyze_binned(series, k=args.k, delta_days=args.delta_days)
    out_dir = _out_dir(args)
    out_path = os.path.join(out_dir, args.out)
    save_analysis_csv(analysis, out_path)
    print(analysis.summary())
    if series.filled_days:
        print(f"zero-filled {len(series.filled_days)} missing day(s)")
    if series.clamped_days:
        print(f"clamped {len(series.clamped_days)} negative daily count(s)")
    return out_path, [args.csv], [out_path], {
        "argmax_day": analysis.argmax_day,
        "argmax_value": repr(analysis.argmax_value),
    }


def cmd_presets(args):
    lines = ["experiment presets:"]
    for name in sorted(PRESETS):
        lines.append("  " + PRESETS[name].describe())
    lines.append("rate presets (for simulate-poisson --rate-preset):")
    for name in sorted(RATE_PRESETS):
        lines.append(f"  {name}")
    text = "\n".join(lines)
    print(text)
    out_dir = _out_dir(args)
    out_path = os.path.join(out_dir, "presets.txt")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    return out_path, [], [out_path], {}


# ---------------------------------------------------------------------------
# parser


def _add_common(sub, *, seed=True, out_dir=True):
    if seed:
        sub.add_argument("--seed", type=int, default=0,
                         help="base random seed (dimensionless integer, default 0)")
        sub.add_argument("--stream", type=int, default=0,
                         help="random stream index for this run (default 0)")
    if out_dir:
        sub.add_argument("--out-dir", default=None,
                         help="output directory (default: $RATEJUMP_OUT or current directory)")


def _add_counting_inputs(sub):
    sub.add_argument("--events", default=None,
                     help="input event-times file (one timestamp per line, time units)")
    sub.add_argument("--binned", default=None,
                     help="input binned CSV with header bin_start,count (time units)")
    sub.add_argument("--horizon", type=_positive_float("horizon"), default=None,
                     help="observation horizon T in time units (default: last event)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratejump",
        description="Detect abrupt rate changes in point processes via "
                    "higher-order discrete derivatives of the counting process.",
    )
    parser.add_argument("--version", action="version", version=f"ratejump {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("simulate-poisson",
                        help="simulate an inhomogeneous Poisson process by thinning")
    p.add_argument("--rate-preset", default="sin-plus-exp", choices=sorted(RATE_PRESETS),
                   help="built-in rate function family (default sin-plus-exp)")
    p.add_argument("--rate-spec", default=None,
                   help="rate specification file (overrides --rate-preset)")
    p.add_argument("--base", type=_positive_float("base"), default=None,
                   help="base rate B in events per unit time")
    p.add_argument("--jump", type=_positive_float("jump"), default=None,
                   help="jump amplitude A in events per unit time")
    p.add_argument("--onset", type=_positive_float("onset"), default=None,
                   help="jump onset time t0 in time units")
    p.add_argument("--horizon", type=_positive_float("horizon"), default=20.0,
                   help="simulation horizon T in time units (default 20)")
    p.add_argument("--bin-width", type=_positive_float("bin-width"), default=None,
                   help="also write counts binned at this width (time units)")
    p.add_argument("--out", default="events.txt", help="output event-times file name")
    _add_common(p)
    p.set_defaults(func=cmd_simulate_poisson)

    p = subs.add_parser("simulate-si", help="simulate an SI cascade on a graph")
    p.add_argument("--graph", default=None,
                   help="edge-list file 'u v' per line, 0-indexed (overrides the tree)")
    p.add_argument("--height", type=_positive_int("height"), default=18,
                   help="tree height (levels below the root, default 18)")
    p.add_argument("--extra-leaves", type=int, default=8000,
                   help="leaves attached to the planted hub (default 8000)")
    p.add_argument("--source", type=int, default=0,
                   help="source vertex id (default 0 = tree root)")
    p.add_argument("--out", default="trace.csv", help="output trace CSV name")
    _add_common(p)
    p.set_defaults(func=cmd_simulate_si)

    p = subs.add_parser("detect", help="detect change points in a counting process")
    _add_counting_inputs(p)
    p.add_argument("--k", type=_positive_int("k"), required=True,
                   help="derivative order (dimensionless, >= 1)")
    p.add_argument("--delta", type=_positive_float("delta"), required=True,
                   help="derivative step delta in time units")
    p.add_argument("--threshold", type=_positive_float("threshold"), default=None,
                   help="expected jump size A in events per unit time (threshold mode)")
    p.add_argument("--argmax-single", action="store_true",
                   help="exploratory mode: report only the best-scoring time")
    p.add_argument("--grid-step", type=_positive_float("grid-step"), default=None,
                   help="evaluation grid spacing in time units (default delta/10)")
    p.add_argument("--out", default="report.csv", help="output report CSV name")
    _add_common(p)
    p.set_defaults(func=cmd_detect)

    p = subs.add_parser("argmax", help="time of the largest |order-k derivative|")
    _add_counting_inputs(p)
    p.add_argument("--k", type=_positive_int("k"), required=True,
                   help="derivative order (dimensionless, >= 1)")
    p.add_argument("--delta", type=_positive_float("delta"), required=True,
                   help="derivative step delta in time units")
    p.add_argument("--grid-step", type=_positive_float("grid-step"), default=None,
                   help="evaluation grid spacing in time units (default delta/10)")
    p.add_argument("--out", default="argmax.txt", help="output file name")
    _add_common(p)
    p.set_defaults(func=cmd_argmax)

    p = subs.add_parser("heatmap", help="Monte Carlo error heatmap over (k, delta)")
    p.add_argument("--preset", default=None,
                   help="experiment preset name (see the presets subcommand)")
    p.add_argument("--scenario", default="smooth-jump",
                   choices=["smooth-jump", "si-tree", "const-null"],
                   help="scenario family when no preset is given")
    p.add_argument("--base", type=_positive_float("base"), default=1e4,
                   help="base rate B in events per unit time (poisson scenarios)")
    p.add_argument("--jump", type=_positive_float("jump"), default=None,
                   help="jump amplitude A in events per unit time")
    p.add_argument("--horizon", type=_positive_float("horizon"), default=20.0,
                   help="horizon T in time units (poisson scenarios, default 20)")
    p.add_argument("--height", type=_positive_int("height"), default=18,
                   help="tree height for si-tree (default 18)")
    p.add_argument("--extra-leaves", type=int, default=8000,
                   help="hub leaves for si-tree (default 8000)")
    p.add_argument("--k-grid", type=_int_list, default=None,
                   help="comma-separated derivative orders, e.g. 1,2,3")
    p.add_argument("--delta-grid", type=_delta_grid, default=None,
                   help="deltas in time units: comma list or lo:hi:n")
    p.add_argument("--trials", type=_positive_int("trials"), default=None,
                   help="Monte Carlo trials per cell (default: preset value or 20)")
    p.add_argument("--workers", type=_positive_int("workers"), default=os.cpu_count(),
                   help="worker processes; results are identical for any value "
                        f"(default {os.cpu_count()})")
    p.add_argument("--long-csv", action="store_true",
                   help="also write per-trial errors as heatmap_long.csv")
    _add_common(p)
    p.set_defaults(func=cmd_heatmap)

    p = subs.add_parser("baselines",
                        help="compare k=1,2 baselines against higher orders")
    p.add_argument("--scenario", default="si-tree",
                   choices=["smooth-jump", "si-tree", "const-null"],
                   help="scenario family (default si-tree)")
    p.add_argument("--base", type=_positive_float("base"), default=1e4,
                   help="base rate B in events per unit time (poisson scenarios)")
    p.add_argument("--jump", type=_positive_float("jump"), default=8e3,
                   help="jump amplitude A in events per unit time")
    p.add_argument("--horizon", type=_positive_float("horizon"), default=20.0,
                   help="horizon T in time units (default 20)")
    p.add_argument("--height", type=_positive_int("height"), default=18,
                   help="tree height for si-tree (default 18)")
    p.add_argument("--extra-leaves", type=int, default=2000,
                   help="hub leaves for si-tree (default 2000)")
    p.add_argument("--delta-grid", type=_delta_grid, default="0.2:2.0:10",
                   help="deltas in time units: comma list or lo:hi:n (default 0.2:2.0:10)")
    p.add_argument("--high-orders", type=_int_list, default=(3, 4, 5),
                   help="higher orders to compare (default 3,4,5)")
    p.add_argument("--trials", type=_positive_int("trials"), default=20,
                   help="Monte Carlo trials (default 20)")
    p.add_argument("--workers", type=_positive_int("workers"), default=os.cpu_count(),
                   help="worker processes; results are identical for any value")
    _add_common(p)
    p.set_defaults(func=cmd_baselines)

    p = subs.add_parser("multicascade",
                        help="estimate the high-degree vertex from several cascades")
    p.add_argument("--trace", action="append", default=None,
                   help="cascade trace CSV (repeat per cascade; overrides simulation)")
    p.add_argument("--height", type=_positive_int("height"), default=18,
                   help="tree height (default 18)")
    p.add_argument("--extra-leaves", type=int, default=8000,
                   help="hub leaves (default 8000)")
    p.add_argument("--cascades", type=_positive_int("cascades"), default=3,
                   help="number of cascades K to simulate (default 3)")
    p.add_argument("--source", type=int, default=0,
                   help="source vertex id (default 0 = tree root)")
    p.add_argument("--k", type=_positive_int("k"), default=2,
                   help="derivative order (default 2)")
    p.add_argument("--delta", type=_positive_float("delta"), default=0.1,
                   help="derivative step delta in time units (default 0.1)")
    p.add_argument("--window", type=_positive_float("window"), default=None,
                   help="candidate window w in time units (default k*delta)")
    p.add_argument("--mode", choices=["threshold", "argmax-single"],
                   default="argmax-single",
                   help="per-cascade detection mode (default argmax-single)")
    p.add_argument("--threshold", type=_positive_float("threshold"), default=None,
                   help="expected jump size A in events per unit time (threshold mode)")
    p.add_argument("--grid-step", type=_positive_float("grid-step"), default=None,
                   help="evaluation grid spacing in time units (default delta/10)")
    p.add_argument("--out", default="multicascade.txt", help="output file name")
    _add_common(p)
    p.set_defaults(func=cmd_multicascade)

    p = subs.add_parser("analyze-binned",
                        help="derivative analysis of a daily-count CSV")
    p.add_argument("--csv", required=True,
                   help="input CSV with date and cases columns")
    p.add_argument("--region", default=None,
                   help="region filter value (requires a region column)")
    p.add_argument("--mode", choices=["daily", "cumulative"], default="daily",
                   help="whether counts are daily increments or cumulative totals")
    p.add_argument("--k", type=_positive_int("k"), default=2,
                   help="derivative order (default 2)")
    p.add_argument("--delta-days", type=_positive_int("delta-days"), default=1,
                   help="derivative step in whole days (default 1)")
    p.add_argument("--out", default="profile.csv", help="output profile CSV name")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_analyze_binned)

    p = subs.add_parser("presets", help="list built-in experiment and rate presets")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_presets)

    return parser


def _failing_module(exc) -> str:
    tb = exc.__traceback__
    last = "cli"
    while tb is not None:
        mod = tb.tb_frame.f_globals.get("__name__", "")
        if mod.startswith("ratejump."):
            last = mod.split(".", 1)[1]
        tb = tb.tb_next
    return last


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.monotonic()
    try:
        primary, inputs, outputs, extra = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"runtime error in {_failing_module(exc)}: {exc}", file=sys.stderr)
        return 1
    wall = time.monotonic() - start
    manifest = _write_manifest(primary, args.subcommand, args, inputs, outputs, wall, extra)
    print(f"manifest: {manifest}")
    return 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
