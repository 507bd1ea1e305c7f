"""Checkpoint summaries across seeds."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

from ..dynamics import RunTrace
from .models import CellResult, SummaryRow

SUMMARY_COLUMNS = ("algo", "checkpoint_calls", "median_subopt", "q25", "q75")


def summarize(
    traces: Dict[str, List[RunTrace]],
    checkpoints: Sequence[int],
) -> List[SummaryRow]:
    """Median and interquartile suboptimality per algorithm at each checkpoint.

    A trace contributes its last record with at most ``checkpoint`` oracle
    calls; algorithms without any such record get NaN.
    """
    rows: List[SummaryRow] = []
    for algo, runs in traces.items():
        for checkpoint in checkpoints:
            values = [v for v in (run.subopt_at(checkpoint) for run in runs) if v is not None]
            if values:
                q25, median, q75 = (float(q) for q in np.quantile(values, [0.25, 0.5, 0.75]))
            else:
                q25 = median = q75 = math.nan
            rows.append(SummaryRow(algo=algo, checkpoint_calls=checkpoint, median_subopt=median, q25=q25, q75=q75))
    return rows


def write_summary_csv(rows: Sequence[SummaryRow], path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow([row.algo, row.checkpoint_calls, repr(row.median_subopt), repr(row.q25), repr(row.q75)])
    return target


def read_summary_csv(path: str | Path) -> List[SummaryRow]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return [SummaryRow.model_validate(row) for row in csv.DictReader(fh)]


def median_at(rows: Sequence[SummaryRow], algo: str, checkpoint: int) -> float:
    for row in rows:
        if row.algo == algo and row.checkpoint_calls == checkpoint:
            return row.median_subopt
    raise KeyError(f"{algo}@{checkpoint}")


def cell_summary(cells: Sequence[CellResult]) -> Dict[str, object]:
    """Success counts and timing over experiment cells."""
    total = len(cells)
    successful = sum(1 for c in cells if c.success)
    total_time = sum(c.duration_s for c in cells)
    return {
        "total_runs": total,
        "successful_runs": successful,
        "failed_runs": total - successful,
        "success_rate": successful / total * 100 if total else 0.0,
        "total_run_time": total_time,
        "avg_run_time": total_time / total if total else 0.0,
        "failed_cells": [f"{c.algorithm}_{c.seed}" for c in cells if not c.success],
    }
