"""Run traces: Polyak–Ruppert averaging, strided records and CSV export."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from ..market.models import FloatArray, PriceVector

TRACE_COLUMNS = ("iter", "oracle_calls", "f", "subopt", "elapsed_s")


@dataclass
class AveragingState:
    """Running sum of p_1..p_t and the count t."""

    total: FloatArray
    count: int = 0

    @classmethod
    def start(cls, n: int) -> "AveragingState":
        return cls(total=np.zeros(n))

    def update(self, p: PriceVector) -> None:
        self.total = self.total + p
        self.count += 1

    @property
    def average(self) -> PriceVector:
        if self.count == 0:
            raise ValueError("average of an empty trajectory")
        return self.total / self.count


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    oracle_calls: int
    f: float
    subopt: Optional[float]
    elapsed_s: float


@dataclass
class RunTrace:
    """Per-record convergence history and the final state of one run."""

    algorithm: str
    seed: int
    records: List[TraceRecord]
    p_average: PriceVector
    p_last: PriceVector
    averaging: AveragingState
    oracle_calls: int
    iterations: int
    max_grad_norm: float
    f_star: Optional[float] = None
    converged: Optional[bool] = None
    trajectory: Optional[FloatArray] = None
    grad_square_sums: Optional[FloatArray] = None

    @property
    def p_final(self) -> PriceVector:
        """p̃_N, the output of the dynamic."""
        return self.p_average

    @property
    def final(self) -> TraceRecord:
        return self.records[-1]

    def subopt_at(self, calls: int) -> Optional[float]:
        """Suboptimality of the last record whose oracle count does not exceed ``calls``."""
        eligible = [r for r in self.records if r.oracle_calls <= calls]
        return eligible[-1].subopt if eligible else None

    def to_csv(self, path: str | Path) -> Path:
        return write_trace_csv(self, path)


def _fmt(value: Optional[float]) -> str:
    return "nan" if value is None else repr(float(value))


def write_trace_csv(trace: RunTrace, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for record in trace.records:
            writer.writerow(
                [record.iteration, record.oracle_calls, _fmt(record.f), _fmt(record.subopt), _fmt(record.elapsed_s)]
            )
    return target


def read_trace_csv(path: str | Path) -> List[TraceRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        records = []
        for row in csv.DictReader(fh):
            subopt = float(row["subopt"])
            records.append(
                TraceRecord(
                    iteration=int(row["iter"]),
                    oracle_calls=int(row["oracle_calls"]),
                    f=float(row["f"]),
                    subopt=None if math.isnan(subopt) else subopt,
                    elapsed_s=float(row["elapsed_s"]),
                )
            )
    return records


@dataclass
class TraceRecorder:
    """Decides which iterations to record and evaluates the reported objective.

    Iterations 1..dense_until are all recorded, then every ``sparse_stride``-th,
    and the last iteration always. Objective evaluations are bookkeeping and
    never count as oracle calls.
    """

    evaluate: Callable[[PriceVector], float]
    iterations: int
    f_star: Optional[float] = None
    dense_until: int = 1000
    sparse_stride: int = 10
    record_wall_time: bool = True
    records: List[TraceRecord] = field(default_factory=list)
    _started: float = field(default_factory=time.perf_counter, repr=False)

    def due(self, t: int) -> bool:
        return t <= self.dense_until or t % self.sparse_stride == 0 or t == self.iterations

    def record(self, t: int, oracle_calls: int, p: PriceVector) -> TraceRecord:
        value = float(self.evaluate(p))
        elapsed = time.perf_counter() - self._started if self.record_wall_time else 0.0
        entry = TraceRecord(
            iteration=t,
            oracle_calls=oracle_calls,
            f=value,
            subopt=None if self.f_star is None else value - self.f_star,
            elapsed_s=elapsed,
        )
        self.records.append(entry)
        return entry

    def maybe_record(self, t: int, oracle_calls: int, p: PriceVector) -> None:
        if self.due(t):
            self.record(t, oracle_calls, p)

    def close(self, t: int, oracle_calls: int, p: PriceVector) -> None:
        """Record the stopping iteration when an early stop skipped it."""
        if not self.records or self.records[-1].iteration != t:
            self.record(t, oracle_calls, p)
