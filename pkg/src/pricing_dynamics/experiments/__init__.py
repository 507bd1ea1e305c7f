"""Experiment harness: optimum estimation, comparisons and self-checks."""

from .bounds import adagrad_bound, estimate_smd_bounds, loglog_slope, sgd_bound, smd_bound
from .models import (
    AlgorithmOptions,
    CellResult,
    ExperimentSpec,
    GenerateParams,
    Manifest,
    OptimumEstimate,
    SummaryRow,
)
from .optimum import estimate_optimum
from .selfcheck import CheckResult, SelfCheckReport, run_selfcheck
from .service import ExperimentResult, ExperimentRunner, compare, trace_filename
from .summary import median_at, read_summary_csv, summarize, write_summary_csv

__all__ = [
    "AlgorithmOptions",
    "CellResult",
    "CheckResult",
    "ExperimentResult",
    "ExperimentRunner",
    "ExperimentSpec",
    "GenerateParams",
    "Manifest",
    "OptimumEstimate",
    "SelfCheckReport",
    "SummaryRow",
    "adagrad_bound",
    "compare",
    "estimate_optimum",
    "estimate_smd_bounds",
    "loglog_slope",
    "median_at",
    "read_summary_csv",
    "run_selfcheck",
    "sgd_bound",
    "smd_bound",
    "summarize",
    "trace_filename",
    "write_summary_csv",
]
