"""Command-line entry point ``pricing-dynamics``.

Subcommands: generate, estimate, run, compare, validate. Errors print a
rich message and one JSON line on stderr; exit codes are 0 success,
2 usage, 3 validation, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from rich.console import Console
from rich.markup import escape
from rich.table import Table

from . import __version__
from .config import Config, load_config
from .dynamics import Algorithm, DynamicsConfig, initial_prices, run_dynamics
from .error_handling import EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, exit_code_for
from .errors import UnifiedErrorFormatter
from .exceptions import RunFailedError
from .experiments import (
    AlgorithmOptions,
    ExperimentSpec,
    GenerateParams,
    OptimumEstimate,
    compare,
    estimate_optimum,
    estimate_smd_bounds,
    run_selfcheck,
)
from .experiments.summary import cell_summary
from .logging_config import setup_logging
from .market import generate_synthetic, load_instance, save_instance, save_prices
from .market.models import MarketInstance
from .oracles import OracleKind

logger = logging.getLogger(__name__)

DEFAULT_COMPARE_ALGORITHMS = ("sgd", "adagrad", "gd", "agd")

console = Console()
err_console = Console(stderr=True)


class CliUsageError(Exception):
    """argparse usage failure, carried to the exit-code mapping."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliUsageError(f"{self.prog}: {message}")


def _add_generate_flags(parser: argparse.ArgumentParser) -> None:
    defaults = GenerateParams()
    parser.add_argument("--S", dest="S", type=int, default=defaults.S, help="Number of suppliers")
    parser.add_argument("--D", dest="D", type=int, default=defaults.D, help="Number of consumers")
    parser.add_argument("--n", dest="n", type=int, default=defaults.n, help="Number of alternatives")
    parser.add_argument("--m", dest="m", type=int, default=defaults.m, help="Number of groups")
    parser.add_argument("--gamma", type=float, default=defaults.gamma, help="Quantity-adjustment weight Γ")
    parser.add_argument("--cost-coeff", type=float, default=defaults.cost_coeff, help="Quadratic cost coefficient")


def _add_dynamics_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--C", dest="C", type=float, default=None, help="Step-size constant (sgd, smd)")
    parser.add_argument("--eta", type=float, default=None, help="AdaGrad step parameter")
    parser.add_argument("--epsilon-div", type=float, default=None, help="AdaGrad zero-division guard")
    parser.add_argument("--R", dest="R", type=float, default=None, help="SMD distance bound (estimated if omitted)")
    parser.add_argument("--M", dest="M", type=float, default=None, help="SMD gradient bound (estimated if omitted)")
    parser.add_argument("--beta", type=float, default=None, help="Supplier fraction for sgd-online")
    parser.add_argument(
        "--oracle",
        choices=[OracleKind.EXACT_AGENT.value, OracleKind.SAMPLED_SALE.value],
        default=OracleKind.SAMPLED_SALE.value,
        help="Stochastic oracle kind",
    )
    parser.add_argument("--diagonal-adagrad", action="store_true", help="Per-coordinate AdaGrad accumulators")
    parser.add_argument("--tol", type=float, default=None, help="GD step-norm stopping tolerance")
    parser.add_argument("--no-wall-time", action="store_true", help="Write elapsed_s as 0.0 for byte-stable traces")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pricing-dynamics", description="Market-clearing price dynamics simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, default=None, help="YAML configuration file")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=None,
        help="Log level (default from configuration)",
    )
    parser.add_argument("--log-file", type=Path, default=None, help="Also log to this file")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    generate = sub.add_parser("generate", help="Generate a synthetic instance")
    generate.add_argument("--seed", type=int, default=None, help="Generator seed")
    _add_generate_flags(generate)
    generate.add_argument("--out", type=Path, required=True, help="Instance JSON path")
    generate.add_argument("--prices-out", type=Path, default=None, help="Also write p0 as CSV")

    estimate = sub.add_parser("estimate", help="Estimate the optimum f* of an instance")
    estimate.add_argument("--instance", type=Path, required=True, help="Instance JSON path")
    estimate.add_argument("--tol", type=float, default=None, help="Step-norm tolerance")
    estimate.add_argument("--max-iterations", type=int, default=None, help="Iteration cap")
    estimate.add_argument("--out", type=Path, required=True, help="Optimum JSON path")

    run = sub.add_parser("run", help="Run one algorithm and write its trace")
    run.add_argument("--instance", type=Path, required=True, help="Instance JSON path")
    run.add_argument("--algo", choices=[a.value for a in Algorithm], required=True)
    run.add_argument("--seed", type=int, default=None, help="Run seed")
    budget = run.add_mutually_exclusive_group(required=True)
    budget.add_argument("--budget", type=int, help="Oracle-call budget B")
    budget.add_argument("--iterations", type=int, help="Iteration count N")
    run.add_argument("--optimum", type=Path, default=None, help="Optimum JSON; estimated when omitted")
    run.add_argument("--out", type=Path, required=True, help="Trace CSV path")
    _add_dynamics_flags(run)

    cmp = sub.add_parser("compare", help="Compare algorithms over seeds at a fixed budget")
    cmp.add_argument("--spec", type=Path, default=None, help="Experiment spec (YAML or JSON)")
    cmp.add_argument("--instance", type=Path, default=None, help="Instance JSON path (else generated)")
    cmp.add_argument("--instance-seed", type=int, default=GenerateParams().seed, help="Generator seed")
    _add_generate_flags(cmp)
    cmp.add_argument("--algo", action="append", default=None, choices=[a.value for a in Algorithm])
    cmp.add_argument("--seed", type=int, action="append", default=None, help="Run seed (repeatable)")
    cmp.add_argument("--seeds", type=int, default=10, help="Use seeds 0..K-1 when --seed is not given")
    cmp.add_argument("--budget", type=int, default=None, help="Oracle-call budget B (default 100·(S+D))")
    cmp.add_argument("--out", type=Path, default=None, help="Output directory")
    _add_dynamics_flags(cmp)

    validate = sub.add_parser("validate", help="Check instance invariants and run oracle self-tests")
    validate.add_argument("--instance", type=Path, required=True, help="Instance JSON path")
    validate.add_argument("--seed", type=int, default=0, help="Self-test seed")
    return parser


def _load_runtime_config(args: argparse.Namespace) -> Config:
    overrides: Dict[str, Any] = {"log_level": args.log_level}
    if getattr(args, "no_wall_time", False):
        overrides["record_wall_time"] = False
    return load_config(config_path=args.config, cli_overrides=overrides)


def _algorithm_options(args: argparse.Namespace, algorithm: str, cfg: Config) -> AlgorithmOptions:
    return AlgorithmOptions(
        algorithm=Algorithm(algorithm),
        C=args.C if args.C is not None else cfg.run.step_c,
        eta=args.eta if args.eta is not None else cfg.run.eta,
        epsilon_div=args.epsilon_div if args.epsilon_div is not None else cfg.run.epsilon_div,
        R=args.R,
        M=args.M,
        beta=args.beta,
        oracle_kind=OracleKind(args.oracle),
        diagonal_adagrad=args.diagonal_adagrad,
        tol=args.tol,
    )


def cmd_generate(args: argparse.Namespace, cfg: Config) -> int:
    seed = args.seed if args.seed is not None else cfg.run.seed
    instance, p0 = generate_synthetic(seed, args.S, args.D, args.n, args.m, args.gamma, cost_coeff=args.cost_coeff)
    save_instance(instance, args.out)
    if args.prices_out:
        save_prices(p0, args.prices_out)
    console.print(
        f"[green]✓[/green] Instance written to {args.out} "
        f"(S={instance.S}, D={instance.D}, n={instance.n}, m={instance.m})"
    )
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace, cfg: Config) -> int:
    instance = load_instance(args.instance)
    estimate = estimate_optimum(
        instance,
        args.tol if args.tol is not None else cfg.estimate_tol,
        max_iterations=args.max_iterations if args.max_iterations is not None else cfg.estimate_max_iterations,
    )
    estimate.save(args.out)
    status = "[green]✓[/green]" if estimate.converged else "[yellow]![/yellow] partial"
    console.print(
        f"{status} f* = {estimate.f_star:.12g}, clearing residual {estimate.clearing_residual:.3g}, "
        f"{estimate.iterations} iterations -> {args.out}"
    )
    return EXIT_OK


def _optimum_for(instance: MarketInstance, path: Optional[Path], cfg: Config) -> OptimumEstimate:
    if path is not None:
        return OptimumEstimate.load(path)
    return estimate_optimum(instance, cfg.estimate_tol, max_iterations=cfg.estimate_max_iterations)


def cmd_run(args: argparse.Namespace, cfg: Config) -> int:
    instance = load_instance(args.instance)
    options = _algorithm_options(args, args.algo, cfg)
    if args.iterations is not None:
        iterations = args.iterations
    else:
        iterations = options.iterations_for(args.budget, instance.agents)
    if options.algorithm is Algorithm.SMD and (options.R is None or options.M is None):
        R, M = estimate_smd_bounds(instance, initial_prices(instance))
        options = options.model_copy(update={"R": options.R or R, "M": options.M or M})
    config = DynamicsConfig(
        **options.model_dump(),
        iterations=iterations,
        seed=args.seed if args.seed is not None else cfg.run.seed,
        dense_until=cfg.run.dense_until,
        sparse_stride=cfg.run.sparse_stride,
        record_wall_time=cfg.record_wall_time,
    )
    optimum = _optimum_for(instance, args.optimum, cfg)
    trace = run_dynamics(instance, config, f_star=optimum.f_star)
    trace.to_csv(args.out)
    console.print(
        f"[green]✓[/green] {config.algorithm.value}: {trace.oracle_calls} oracle calls, "
        f"f = {trace.final.f:.10g}, subopt = {trace.final.subopt:.3g} -> {args.out}"
    )
    return EXIT_OK


def _spec_from_args(args: argparse.Namespace, cfg: Config) -> ExperimentSpec:
    if args.spec is not None:
        spec = ExperimentSpec.from_file(args.spec)
        updates: Dict[str, Any] = {}
        if args.out is not None:
            updates["output_dir"] = args.out
        if args.budget is not None:
            updates["budget"] = args.budget
        return spec.model_copy(update=updates) if updates else spec

    generate = None
    if args.instance is None:
        generate = GenerateParams(
            seed=args.instance_seed,
            S=args.S,
            D=args.D,
            n=args.n,
            m=args.m,
            gamma=args.gamma,
            cost_coeff=args.cost_coeff,
        )
    agents = (generate.S + generate.D) if generate else load_instance(args.instance).agents
    algorithms = args.algo or list(DEFAULT_COMPARE_ALGORITHMS)
    return ExperimentSpec(
        generate=generate,
        instance_path=args.instance,
        algorithms=[_algorithm_options(args, algo, cfg) for algo in algorithms],
        seeds=args.seed or list(range(args.seeds)),
        budget=args.budget if args.budget is not None else 100 * agents,
        estimate_tol=cfg.estimate_tol,
        estimate_max_iterations=cfg.estimate_max_iterations,
        lower_bound_slack=cfg.lower_bound_slack,
        output_dir=args.out or Path("results"),
        dense_until=cfg.run.dense_until,
        sparse_stride=cfg.run.sparse_stride,
        record_wall_time=cfg.record_wall_time,
        max_concurrent_runs=cfg.max_concurrent_runs,
    )


def cmd_compare(args: argparse.Namespace, cfg: Config) -> int:
    spec = _spec_from_args(args, cfg)
    result = compare(spec)

    table = Table(title=f"Suboptimality at budget checkpoints (f* = {result.optimum.f_star:.10g})")
    for column in ("algo", "calls", "median", "q25", "q75"):
        table.add_column(column, justify="left" if column == "algo" else "right")
    for row in result.summary:
        table.add_row(
            row.algo, str(row.checkpoint_calls), f"{row.median_subopt:.4g}", f"{row.q25:.4g}", f"{row.q75:.4g}"
        )
    console.print(table)

    stats = cell_summary(result.manifest.cells)
    console.print(
        f"Runs: {stats['successful_runs']}/{stats['total_runs']} succeeded; outputs in {result.output_dir}"
    )
    if not result.success:
        raise RunFailedError(result.manifest.failures)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, cfg: Config) -> int:
    instance = load_instance(args.instance)
    report = run_selfcheck(instance, seed=args.seed)
    for check in report.checks:
        mark = "[dim]-[/dim]" if check.skipped else ("[green]✓[/green]" if check.passed else "[red]✗[/red]")
        console.print(f"{mark} {check.name}: {escape(check.detail)}")
    return EXIT_OK if report.passed else EXIT_VALIDATION


COMMANDS = {
    "generate": cmd_generate,
    "estimate": cmd_estimate,
    "run": cmd_run,
    "compare": cmd_compare,
    "validate": cmd_validate,
}


def _report(error: Exception, code: int) -> None:
    formatter = UnifiedErrorFormatter()
    err_console.print(formatter.format_for_cli(error))
    payload = formatter.format_for_machine(error)
    payload["error"]["exit_code"] = code
    print(json.dumps(payload, default=str, sort_keys=True), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except CliUsageError as exc:
        _report(exc, EXIT_USAGE)
        return EXIT_USAGE

    try:
        cfg = _load_runtime_config(args)
        setup_logging(level=cfg.log_level, log_file=args.log_file)
        return COMMANDS[args.command](args, cfg)
    except Exception as exc:
        code = exit_code_for(exc)
        logger.debug("command failed", exc_info=True)
        _report(exc, code)
        return code

