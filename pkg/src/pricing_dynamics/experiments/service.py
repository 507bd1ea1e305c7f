"""Multi-seed algorithm comparison at a fixed oracle budget.

Cells (algorithm, seed) run concurrently over one immutable instance and
optimum estimate; each owns its rng and trace file. Aggregation into the
summary and manifest is a sequential final pass.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..dynamics import Algorithm, RunTrace, initial_prices, run_dynamics
from ..error_handling import ErrorAggregator, ErrorContext
from ..exceptions import LowerBoundViolationError
from ..logging import StructuredLogger
from ..market import generate_synthetic, load_instance, save_instance
from ..market.models import MarketInstance, PriceVector
from .bounds import estimate_smd_bounds
from .models import AlgorithmOptions, CellResult, ExperimentSpec, Manifest, OptimumEstimate, SummaryRow
from .optimum import estimate_optimum
from .summary import summarize, write_summary_csv

logger = logging.getLogger(__name__)

INSTANCE_FILE = "instance.json"
OPTIMUM_FILE = "optimum.json"
SUMMARY_FILE = "summary.csv"
MANIFEST_FILE = "manifest.json"


def trace_filename(algorithm: str, seed: int) -> str:
    return f"{algorithm}_{seed}.csv"


@dataclass
class ExperimentResult:
    """Everything ``compare`` produced, in memory."""

    manifest: Manifest
    summary: List[SummaryRow]
    optimum: OptimumEstimate
    instance: MarketInstance
    traces: Dict[str, RunTrace] = field(default_factory=dict)
    output_dir: Optional[Path] = None

    @property
    def success(self) -> bool:
        return self.manifest.success


def load_experiment_instance(spec: ExperimentSpec) -> Tuple[MarketInstance, PriceVector, str]:
    """Instance, starting prices and a description of where they came from."""
    if spec.generate is not None:
        g = spec.generate
        instance, p0 = generate_synthetic(g.seed, g.S, g.D, g.n, g.m, g.gamma, cost_coeff=g.cost_coeff)
        return instance, p0, f"generate:{g.model_dump_json()}"
    assert spec.instance_path is not None
    instance = load_instance(spec.instance_path)
    return instance, initial_prices(instance), f"file:{spec.instance_path}"


class ExperimentRunner:
    """Runs every (algorithm, seed) cell of an experiment and writes its artifacts."""

    def __init__(self, spec: ExperimentSpec) -> None:
        spec.check()
        self.spec = spec
        self.output_dir = Path(spec.output_dir)
        self.events = StructuredLogger("pricing_dynamics.events")
        self.errors = ErrorAggregator()

    def _resolve_options(
        self, options: AlgorithmOptions, instance: MarketInstance, p0: PriceVector
    ) -> AlgorithmOptions:
        if options.algorithm is Algorithm.SMD and (options.R is None or options.M is None):
            R, M = estimate_smd_bounds(instance, p0)
            update = {"R": options.R or R, "M": options.M or M}
            logger.info(f"smd bounds estimated from p0: R={update['R']:.4g}, M={update['M']:.4g}")
            return options.model_copy(update=update)
        return options

    def _run_cell(
        self,
        instance: MarketInstance,
        p0: PriceVector,
        options: AlgorithmOptions,
        seed: int,
        f_star: float,
    ) -> Tuple[CellResult, RunTrace]:
        spec = self.spec
        config = options.to_config(
            iterations=options.iterations_for(spec.budget, instance.agents),
            seed=seed,
            dense_until=spec.dense_until,
            sparse_stride=spec.sparse_stride,
            record_wall_time=spec.record_wall_time,
        )
        started = time.perf_counter()
        trace = run_dynamics(instance, config, p0=p0, f_star=f_star)
        duration = time.perf_counter() - started

        name = trace_filename(options.algorithm.value, seed)
        trace.to_csv(self.output_dir / name)
        min_f = min(r.f for r in trace.records)
        result = CellResult(
            algorithm=options.algorithm.value,
            seed=seed,
            success=True,
            trace_file=name,
            iterations=trace.iterations,
            oracle_calls=trace.oracle_calls,
            final_f=trace.final.f,
            final_subopt=trace.final.subopt,
            min_f=min_f,
            max_grad_norm=trace.max_grad_norm,
            duration_s=duration,
        )
        self.events.log_run(
            options.algorithm.value,
            seed,
            duration,
            True,
            oracle_calls=trace.oracle_calls,
            final_f=trace.final.f,
        )
        if min_f < f_star - spec.lower_bound_slack:
            raise LowerBoundViolationError(options.algorithm.value, seed, min_f, f_star)
        return result, trace

    def run(self) -> ExperimentResult:
        spec = self.spec
        started = time.perf_counter()
        instance, p0, source = load_experiment_instance(spec)
        spec.check_budget(instance)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        save_instance(instance, self.output_dir / INSTANCE_FILE)

        optimum = estimate_optimum(instance, spec.estimate_tol, max_iterations=spec.estimate_max_iterations)
        optimum.save(self.output_dir / OPTIMUM_FILE)
        if not optimum.converged:
            self.errors.add_warning(
                "estimate", f"optimum estimate stopped after {optimum.iterations} iterations without converging"
            )
        logger.info(f"f* = {optimum.f_star:.12g} (clearing residual {optimum.clearing_residual:.3g})")

        resolved = [self._resolve_options(options, instance, p0) for options in spec.algorithms]
        cells = [(options, seed) for options in resolved for seed in spec.seeds]
        results: Dict[Tuple[str, int], CellResult] = {}
        traces: Dict[Tuple[str, int], RunTrace] = {}
        lower_bound_ok = True

        with ThreadPoolExecutor(max_workers=spec.max_concurrent_runs) as executor:
            future_to_cell = {
                executor.submit(self._run_cell, instance, p0, options, seed, optimum.f_star): (options, seed)
                for options, seed in cells
            }
            for future in as_completed(future_to_cell):
                options, seed = future_to_cell[future]
                key = (options.algorithm.value, seed)
                context = ErrorContext(operation="compare", algorithm=key[0], seed=seed)
                try:
                    results[key], traces[key] = future.result()
                except LowerBoundViolationError as exc:
                    lower_bound_ok = False
                    self.errors.add_error(context.key(), exc)
                    results[key] = CellResult(
                        algorithm=key[0],
                        seed=seed,
                        success=False,
                        trace_file=trace_filename(*key),
                        error=str(exc),
                    )
                except Exception as exc:
                    self.errors.add_error(context.key(), exc)
                    self.events.log_run(key[0], seed, 0.0, False, error=str(exc))
                    results[key] = CellResult(algorithm=key[0], seed=seed, success=False, error=str(exc))

        ordered = [(options.algorithm.value, seed) for options, seed in cells]
        by_algorithm: Dict[str, List[RunTrace]] = {}
        for key in ordered:
            if key in traces and results[key].success:
                by_algorithm.setdefault(key[0], []).append(traces[key])

        checkpoints = spec.checkpoints()
        summary = summarize(by_algorithm, checkpoints)
        write_summary_csv(summary, self.output_dir / SUMMARY_FILE)

        max_norms: Dict[str, float] = {}
        for algo, runs in by_algorithm.items():
            max_norms[algo] = max(run.max_grad_norm for run in runs)

        files = [INSTANCE_FILE, OPTIMUM_FILE, SUMMARY_FILE]
        files += [cell.trace_file for cell in (results[key] for key in ordered) if cell.trace_file is not None]
        manifest = Manifest(
            instance_source=source,
            instance_file=INSTANCE_FILE,
            optimum_file=OPTIMUM_FILE,
            f_star=optimum.f_star,
            clearing_residual=optimum.clearing_residual,
            optimum_converged=optimum.converged,
            budget=spec.budget,
            seeds=list(spec.seeds),
            checkpoints=checkpoints,
            algorithms=[options.model_dump(mode="json") for options in resolved],
            files=files,
            cells=[results[key] for key in ordered],
            failures={k: str(v) for k, v in self.errors.errors.items()},
            warnings=dict(self.errors.warnings),
            max_grad_norm=max_norms,
            lower_bound_ok=lower_bound_ok,
            summary_file=SUMMARY_FILE,
        )
        manifest.save(self.output_dir / MANIFEST_FILE)

        self.events.log_event(
            "experiment_completed",
            output_dir=str(self.output_dir),
            runs=len(cells),
            failures=len(manifest.failures),
            duration_ms=round((time.perf_counter() - started) * 1000, 2),
        )
        return ExperimentResult(
            manifest=manifest,
            summary=summary,
            optimum=optimum,
            instance=instance,
            traces={f"{a}_{s}": t for (a, s), t in traces.items()},
            output_dir=self.output_dir,
        )


def compare(spec: ExperimentSpec) -> ExperimentResult:
    """Run the full comparison described by ``spec``; failures are recorded, not raised."""
    return ExperimentRunner(spec).run()
