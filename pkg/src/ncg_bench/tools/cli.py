#!/usr/bin/env python3
"""
Command-line entry point for ncg-bench.

Subcommands:
    solve      Minimize one registry function and print the result as JSON
    bench      Run methods over the benchmark grid and write a run table
    profile    Turn a run table into performance-profile CSV/SVG files
    checkgrad  Compare analytic gradients against central differences
    mlapp      Train the entity tagger with a solver and with the Adam baseline
    list       Show the benchmark registry

Every command that writes files creates a fresh run directory
``<out-dir>/run_<YYYYmmdd_HHMMSS>[_k]`` holding its outputs and manifest.json.

Exit codes:
    0  success / gradient converged
    1  usage or data error
    2  iteration limit reached
    3  line search failed
    4  non-finite objective value
    5  gradient check failed
"""

import argparse
import json
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from ncg_bench.bench.functions import UnknownFunction, UnsupportedDimension, get_function
from ncg_bench.bench.runner import BenchRunner
from ncg_bench.bench.suite import (
    default_dims,
    full_grid,
    instantiate,
    list_functions,
    write_registry_manifest,
)
from ncg_bench.codegen.config_generator import ConfigFormatError, ConfigGenerator, build_config
from ncg_bench.codegen.manifest_generator import ManifestGenerator, RunManifest, selection_list
from ncg_bench.codegen.profile_generator import ProfileFormat, ProfileGenerator
from ncg_bench.codegen.trace_generator import TraceGenerator
from ncg_bench.core import environment
from ncg_bench.core.objective import check_gradient, check_points
from ncg_bench.core.solver import Method, SolverConfig, solve_traced
from ncg_bench.mlapp.baselines import baseline_adam
from ncg_bench.mlapp.dataset import DatasetError, generate_synthetic
from ncg_bench.mlapp.metrics import evaluate
from ncg_bench.mlapp.model import DEFAULT_L2, HashedFeaturizer
from ncg_bench.mlapp.trainer import default_training_config, train
from ncg_bench.profiles.performance import (
    EmptyTable,
    Metric,
    RunTable,
    default_tau_grid,
    performance_ratios,
    profile_curves,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECKGRAD = 5
CHECKGRAD_TOL = 1e-5
DEFAULT_BENCH_METHODS = ("awhm", "hrm", "nhs")

_OVERRIDE_FLAGS = {
    "method": "method",
    "epsilon": "epsilon",
    "max_iter": "max_iter",
    "delta": "delta",
    "sigma": "sigma",
    "nu": "nu",
    "max_evals": "max_evals",
    "tau": "hybrid.tau",
    "u": "hybrid.u",
    "t": "hybrid.t",
    "theta": "hybrid.theta_override",
}


class UsageError(Exception):
    """Invalid command-line input detected after parsing."""

    pass


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _str_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def make_run_dir(out_dir: Optional[str]) -> Path:
    """Create a fresh run directory; existing runs are never reused."""
    root = Path(out_dir) if out_dir else environment.get_output_root()
    stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    candidate = root / f"run_{stamp}"
    k = 0
    while candidate.exists():
        k += 1
        candidate = root / f"run_{stamp}_{k}"
    candidate.mkdir(parents=True)
    return candidate


def _write_json(path: Path, data: Any) -> Path:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def _merge(base: Dict[str, Any], extra: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in extra.items():
        if key == "hybrid" and isinstance(merged.get("hybrid"), dict):
            merged["hybrid"] = {**merged["hybrid"], **value}
        else:
            merged[key] = value
    return merged


def _load_manifest(args) -> Optional[RunManifest]:
    if not getattr(args, "manifest", None):
        return None
    manifest = ManifestGenerator().load(args.manifest)
    if manifest.command != args.command:
        raise UsageError(
            f"Manifest was written by '{manifest.command}', cannot replay with '{args.command}'"
        )
    return manifest


def resolve_config(
    args, manifest: Optional[RunManifest], base: Optional[SolverConfig] = None
) -> SolverConfig:
    """Defaults < manifest < --config file < explicit flags."""
    values: Dict[str, Any] = {}
    if manifest is not None:
        values = manifest.config.to_dict()
    elif base is not None:
        values = base.to_dict()
    if getattr(args, "config", None):
        values = _merge(values, ConfigGenerator().parse(Path(args.config).read_text()))
    overrides = {key: getattr(args, flag, None) for flag, key in _OVERRIDE_FLAGS.items()}
    return build_config(values, overrides)


def cmd_solve(args) -> int:
    manifest = _load_manifest(args)
    selection = manifest.selection if manifest else {}
    function_id = args.function or selection.get("function")
    n = args.n if args.n is not None else selection.get("n")
    if function_id is None or n is None:
        raise UsageError("solve needs FUNCTION and N (or --manifest)")
    config = resolve_config(args, manifest)
    instance = instantiate(function_id, int(n))
    result = solve_traced(instance.problem, config)
    print(json.dumps(result.to_dict(include_x=args.show_x), indent=2))

    if args.out_dir:
        run_dir = make_run_dir(args.out_dir)
        _write_json(run_dir / "result.json", result.to_dict(include_x=True))
        TraceGenerator().write(run_dir / "trace.csv", result.trace or [])
        ManifestGenerator().write(
            run_dir,
            RunManifest("solve", config, {"function": function_id, "n": int(n)}),
        )
        print(f"Outputs written to {run_dir}", file=sys.stderr)
    return result.status.exit_code


def cmd_bench(args) -> int:
    manifest = _load_manifest(args)
    selection = manifest.selection if manifest else {}
    methods = args.methods or selection_list(selection, "methods") or list(DEFAULT_BENCH_METHODS)
    dims = args.dims or selection_list(selection, "dims") or list(default_dims())
    functions = args.functions or selection_list(selection, "functions")
    labels = [Method.parse(m).value for m in methods]
    config = resolve_config(args, manifest)

    grid = full_grid(dims, functions)
    if not grid:
        raise UsageError(f"No benchmark instance matches dims {dims}")
    runner = BenchRunner(config, workers=args.workers, audit=not args.no_audit, trace=True)
    sweep = runner.run(grid, labels)

    run_dir = make_run_dir(args.out_dir)
    sweep.table.write(run_dir / "runtable.json")
    tracer = TraceGenerator()
    for (problem, solver), outcome in sorted(sweep.outcomes.items()):
        if outcome.result is not None:
            path = run_dir / "traces" / f"{problem}__{solver}.csv"
            tracer.write(path, outcome.result.trace or [])
    _write_json(run_dir / "summary.json", sweep.summary())
    ManifestGenerator().write(
        run_dir,
        RunManifest(
            "bench",
            config,
            {"methods": labels, "dims": sorted(set(dims)), "functions": functions},
        ),
    )
    print(runner.summary_text(sweep))
    print(f"\nOutputs written to {run_dir}")
    return EXIT_OK


def cmd_profile(args) -> int:
    table = RunTable.load(args.runtable)
    metric = Metric(args.metric)
    if args.format == "both":
        formats = [ProfileFormat.CSV, ProfileFormat.SVG]
    else:
        formats = [ProfileFormat(args.format)]
    ratios = performance_ratios(table, metric)
    curves = profile_curves(ratios, default_tau_grid(args.points, args.max_log2))

    run_dir = make_run_dir(args.out_dir)
    generator = ProfileGenerator()
    for fmt in formats:
        path = generator.write(run_dir / f"profile_{metric.value}.{fmt.value}", curves, fmt, metric)
        print(f"Wrote {path}")
    ManifestGenerator().write(
        run_dir,
        RunManifest(
            "profile",
            selection={
                "runtable": str(Path(args.runtable).resolve()),
                "metric": metric.value,
                "formats": [f.value for f in formats],
                "points": args.points,
                "max_log2": args.max_log2,
                "dropped": ratios.dropped,
            },
        ),
    )
    for curve in curves:
        print(f"{curve.solver:>6}: rho(1) = {curve.rhos[0]:.3f}, rho(max) = {curve.rhos[-1]:.3f}")
    return EXIT_OK


def cmd_checkgrad(args) -> int:
    if args.function == "all":
        ids = [fid for fid, _ in list_functions()]
    else:
        get_function(args.function)
        ids = [args.function]
    dims_for = {fid: supported for fid, supported in list_functions(default_dims())}

    failures = []
    checked = 0
    for fid in ids:
        if args.n is not None:
            if args.function == "all" and not get_function(fid).supports(args.n):
                continue
            dims = [args.n]
        else:
            dims = dims_for.get(fid, [])
        for n in dims:
            instance = instantiate(fid, n)
            worst = max(
                check_gradient(instance.problem, x, args.h)
                for x in check_points(instance.problem, args.points, args.seed)
            )
            checked += 1
            verdict = "PASS" if worst <= args.tol else "FAIL"
            print(f"{verdict} {instance.instance_id}: max relative error {worst:.3e}")
            if worst > args.tol:
                failures.append(instance.instance_id)

    print(f"\n{checked} instance(s) checked, {len(failures)} failed")
    if failures:
        print(f"Failed: {', '.join(failures)}")
        return EXIT_CHECKGRAD
    return EXIT_OK


def cmd_mlapp(args) -> int:
    manifest = _load_manifest(args)
    selection = manifest.selection if manifest else {}
    seed = args.seed if args.seed is not None else (manifest.seed if manifest else 7)
    sentences = args.sentences or selection.get("num_sentences", 200)
    adam_steps = args.adam_steps or selection.get("adam_steps", 200)
    adam_lr = args.adam_lr if args.adam_lr is not None else selection.get("adam_lr", 0.05)
    l2 = args.l2 if args.l2 is not None else selection.get("l2", DEFAULT_L2)
    base = default_training_config(args.method or "awhm")
    config = resolve_config(args, manifest, base)
    label = config.method.value

    data = generate_synthetic(seed, sentences)
    train_set, test_set = data.train, data.test
    run = train(train_set, config, l2, HashedFeaturizer())
    solver_metrics = evaluate(run.model, test_set)
    adam_model, adam_time = baseline_adam(train_set, adam_steps, adam_lr, l2=l2, seed=seed)
    adam_metrics = evaluate(adam_model, test_set)

    report = {
        label: {
            **solver_metrics.to_dict(run.wall_time),
            "status": run.result.status.value,
            "iterations": run.result.iterations,
            "f_evals": run.result.counters.f_evals,
            "final_loss": run.result.f_final,
        },
        "adam_baseline": {
            **adam_metrics.to_dict(adam_time),
            "steps": adam_steps,
            "lr": adam_lr,
        },
        "dataset": {
            "seed": seed,
            "num_sentences": len(data),
            "train_sentences": len(train_set),
            "test_sentences": len(test_set),
            "class_histogram": data.class_histogram(),
        },
    }

    run_dir = make_run_dir(args.out_dir)
    train_set.write_tsv(run_dir / "train.tsv")
    test_set.write_tsv(run_dir / "test.tsv")
    _write_json(run_dir / "metrics.json", report)
    TraceGenerator().write(run_dir / "trace.csv", run.trace)
    ManifestGenerator().write(
        run_dir,
        RunManifest(
            "mlapp",
            config,
            {"num_sentences": sentences, "adam_steps": adam_steps, "adam_lr": adam_lr, "l2": l2},
            seed=seed,
        ),
    )
    print(f"{label:>14}: {solver_metrics} in {run.wall_time:.3f}s")
    print(f"{'adam_baseline':>14}: {adam_metrics} in {adam_time:.3f}s")
    print(f"\nOutputs written to {run_dir}")
    return EXIT_OK


def cmd_list(args) -> int:
    dims = args.dims or list(default_dims())
    for fid, supported in list_functions(dims):
        fn = get_function(fid)
        shown = ",".join(str(n) for n in supported) or "-"
        print(f"{fid:<28} n={shown:<18} {fn.title}")
    if args.manifest_out:
        path = write_registry_manifest(args.manifest_out, dims)
        print(f"\nRegistry manifest written to {path}")
    return EXIT_OK


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("solver settings (override --config / --manifest)")
    group.add_argument("--method", type=str, help="fr, prp, hs, hrm, nhs, awhm or sd")
    group.add_argument("--epsilon", type=float, help="gradient-norm tolerance")
    group.add_argument("--max-iter", type=int, help="iteration limit")
    group.add_argument("--delta", type=float, help="sufficient-decrease coefficient")
    group.add_argument("--sigma", type=float, help="curvature coefficient")
    group.add_argument("--nu", type=float, help="restart threshold")
    group.add_argument("--max-evals", type=int, help="trial steps per line search")
    group.add_argument("--tau", type=float, help="HRM/NHS parameter tau")
    group.add_argument("--u", type=float, help="NHS parameter u")
    group.add_argument("--t", type=float, help="hybrid conjugacy parameter t")
    group.add_argument("--theta", type=float, help="force the hybrid weight to this value")
    group.add_argument("--config", type=str, help="key=value solver config file")


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(
        prog="ncg-bench",
        description="Nonlinear conjugate gradient solvers, benchmarks and profiles",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Solve one benchmark instance with the hybrid method
  %(prog)s solve sum_squares 10 --method awhm

  # Benchmark three methods on small dimensions, then plot iteration profiles
  %(prog)s bench --methods awhm,hrm,nhs --dims 2,10 --out-dir ./build/outputs
  %(prog)s profile ./build/outputs/run_20260101_120000/runtable.json --metric iterations

  # Check every registered gradient
  %(prog)s checkgrad all

  # Train the entity tagger and compare with the Adam baseline
  %(prog)s mlapp --seed 7 --method awhm

Exit codes:
  0  success / gradient converged
  1  usage or data error
  2  iteration limit reached
  3  line search failed
  4  non-finite objective value
  5  gradient check failed (checkgrad)
        """,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("solve", help="minimize one registry function")
    p.add_argument("function", nargs="?", help="registry function id")
    p.add_argument("n", nargs="?", type=int, help="dimension")
    p.add_argument("--manifest", type=str, help="replay a previous run's manifest.json")
    p.add_argument("--out-dir", type=str, help="also write result, trace and manifest here")
    p.add_argument("--show-x", action="store_true", help="include x_final in the JSON")
    _add_solver_flags(p)
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("bench", help="run methods over the benchmark grid")
    p.add_argument("--methods", type=_str_list, help="comma-separated method labels")
    p.add_argument("--dims", type=_int_list, help="comma-separated dimensions")
    p.add_argument("--functions", type=_str_list, help="comma-separated function ids")
    p.add_argument(
        "--workers", type=int, help=f"parallel solves (default: ${environment.THREADS_VAR})"
    )
    p.add_argument("--no-audit", action="store_true", help="skip the per-step Wolfe audit")
    p.add_argument("--manifest", type=str, help="replay a previous run's manifest.json")
    p.add_argument(
        "--out-dir", type=str, help=f"output root (default: ${environment.OUTPUT_ROOT_VAR})"
    )
    _add_solver_flags(p)
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("profile", help="performance profiles from a run table")
    p.add_argument("runtable", help="runtable.json written by bench")
    p.add_argument("--metric", choices=[m.value for m in Metric], default="iterations")
    p.add_argument("--format", choices=["csv", "svg", "both"], default="both")
    p.add_argument("--points", type=int, default=256, help="tau grid size (default: 256)")
    p.add_argument("--max-log2", type=float, default=10.0, help="grid ends at 2**max_log2")
    p.add_argument("--out-dir", type=str, help="output root")
    p.set_defaults(handler=cmd_profile)

    p = sub.add_parser("checkgrad", help="central-difference gradient check")
    p.add_argument("function", help="registry function id or 'all'")
    p.add_argument("--n", type=int, help="dimension (default: every grid dimension)")
    p.add_argument("--points", type=int, default=10, help="sample points per instance")
    p.add_argument("--seed", type=int, default=0, help="sample seed")
    p.add_argument("--h", type=float, default=1e-6, help="difference step")
    p.add_argument("--tol", type=float, default=CHECKGRAD_TOL, help="relative error bound")
    p.set_defaults(handler=cmd_checkgrad)

    p = sub.add_parser("mlapp", help="train the entity tagger")
    p.add_argument("--seed", type=int, help="dataset seed (default: 7)")
    p.add_argument("--sentences", type=int, help="corpus size (default: 200)")
    p.add_argument("--adam-steps", type=int, help="Adam baseline steps (default: 200)")
    p.add_argument("--adam-lr", type=float, help="Adam baseline learning rate (default: 0.05)")
    p.add_argument("--l2", type=float, help=f"L2 penalty (default: {DEFAULT_L2})")
    p.add_argument("--manifest", type=str, help="replay a previous run's manifest.json")
    p.add_argument("--out-dir", type=str, help="output root")
    _add_solver_flags(p)
    p.set_defaults(handler=cmd_mlapp)

    p = sub.add_parser("list", help="show the benchmark registry")
    p.add_argument("--dims", type=_int_list, help="comma-separated dimensions")
    p.add_argument("--manifest-out", type=str, help="write the registry manifest JSON here")
    p.set_defaults(handler=cmd_list)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run the selected subcommand; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except UnknownFunction as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
    except (
        UsageError,
        UnsupportedDimension,
        EmptyTable,
        ConfigFormatError,
        DatasetError,
        environment.NcgEnvironmentError,
        OSError,
        ValueError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
