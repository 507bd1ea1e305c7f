"""Typed experiment models: specification, optimum estimate and manifest."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field

from ..dynamics.models import Algorithm, DynamicsConfig
from ..exceptions import ExperimentSpecError
from ..market.models import MarketInstance, PriceVector
from ..oracles import OracleKind


class GenerateParams(BaseModel):
    """Synthetic instance parameters; defaults are the reference experiment."""

    model_config = ConfigDict(extra="forbid")

    seed: int = 17
    S: int = Field(5, ge=0)
    D: int = Field(10, ge=0)
    n: int = Field(20, ge=1)
    m: int = Field(5, ge=1)
    gamma: float = Field(1e-4, ge=0)
    cost_coeff: float = Field(1.0, ge=0)


class AlgorithmOptions(BaseModel):
    """Per-algorithm hyperparameters; N and the seed come from the experiment."""

    model_config = ConfigDict(extra="forbid")

    algorithm: Algorithm
    C: float = Field(1.0, gt=0)
    eta: float = Field(1.0, gt=0)
    epsilon_div: float = Field(1e-8, ge=0)
    R: Optional[float] = Field(None, gt=0)
    M: Optional[float] = Field(None, gt=0)
    beta: Optional[float] = Field(None, gt=0, lt=1)
    oracle_kind: OracleKind = OracleKind.SAMPLED_SALE
    diagonal_adagrad: bool = False
    tol: Optional[float] = Field(None, gt=0)

    def iterations_for(self, budget: int, agents: int) -> int:
        """N that fits the oracle budget: B for stochastic dynamics, B // (S+D) otherwise."""
        return budget if self.algorithm.stochastic else budget // agents

    def to_config(
        self,
        *,
        iterations: int,
        seed: int,
        dense_until: int,
        sparse_stride: int,
        record_wall_time: bool,
    ) -> DynamicsConfig:
        return DynamicsConfig(
            **self.model_dump(),
            iterations=iterations,
            seed=seed,
            dense_until=dense_until,
            sparse_stride=sparse_stride,
            record_wall_time=record_wall_time,
        )


class ExperimentSpec(BaseModel):
    """One comparison: an instance source, algorithms, seeds and an oracle budget."""

    model_config = ConfigDict(extra="forbid")

    generate: Optional[GenerateParams] = None
    instance_path: Optional[Path] = None
    algorithms: List[AlgorithmOptions] = Field(default_factory=list)
    seeds: List[int] = Field(default_factory=lambda: list(range(10)))
    budget: int
    estimate_tol: float = Field(1e-10, gt=0)
    estimate_max_iterations: int = Field(10_000_000, ge=1)
    lower_bound_slack: float = Field(1e-8, ge=0)
    output_dir: Path
    dense_until: int = Field(1000, ge=0)
    sparse_stride: int = Field(10, ge=1)
    record_wall_time: bool = True
    max_concurrent_runs: int = Field(4, ge=1)

    def check(self) -> None:
        """Instance-independent consistency checks."""
        if not self.algorithms:
            raise ExperimentSpecError("algorithms", "at least one algorithm is required")
        if not self.seeds:
            raise ExperimentSpecError("seeds", "at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ExperimentSpecError("seeds", "seeds must be distinct")
        if (self.generate is None) == (self.instance_path is None):
            raise ExperimentSpecError("instance", "give exactly one of generate or instance_path")
        names = [a.algorithm for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ExperimentSpecError("algorithms", "each algorithm may appear once")

    def check_budget(self, instance: MarketInstance) -> None:
        if self.budget < instance.agents:
            raise ExperimentSpecError(
                "budget", f"budget {self.budget} is below S + D = {instance.agents}; no full-gradient step fits"
            )

    def checkpoints(self) -> List[int]:
        """Geometric checkpoint grid {B/100, B/10, B}, deduplicated and positive."""
        return sorted({max(1, self.budget // 100), max(1, self.budget // 10), self.budget})

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentSpec":
        text = Path(path).read_text(encoding="utf-8")
        data = yaml.safe_load(text) if str(path).endswith((".yml", ".yaml")) else json.loads(text)
        return cls.model_validate(data or {})


class OptimumEstimate(BaseModel):
    """High-accuracy reference optimum and how it was obtained."""

    p_star: List[float]
    f_star: float
    clearing_residual: float
    stop_criterion: str
    tol: float
    iterations: int
    converged: bool
    lipschitz: float

    @property
    def p(self) -> PriceVector:
        return np.asarray(self.p_star, dtype=np.float64)

    def save(self, path: str | Path) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        return target

    @classmethod
    def load(cls, path: str | Path) -> "OptimumEstimate":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


class CellResult(BaseModel):
    """Outcome of one (algorithm, seed) run."""

    algorithm: str
    seed: int
    success: bool
    trace_file: Optional[str] = None
    error: Optional[str] = None
    iterations: int = 0
    oracle_calls: int = 0
    final_f: Optional[float] = None
    final_subopt: Optional[float] = None
    min_f: Optional[float] = None
    max_grad_norm: Optional[float] = None
    duration_s: float = 0.0


class SummaryRow(BaseModel):
    algo: str
    checkpoint_calls: int
    median_subopt: float
    q25: float
    q75: float


class Manifest(BaseModel):
    """Index of everything an experiment wrote, with failures and observed bounds."""

    instance_source: str
    instance_file: str
    optimum_file: str
    f_star: float
    clearing_residual: float
    optimum_converged: bool
    budget: int
    seeds: List[int]
    checkpoints: List[int]
    algorithms: List[Dict[str, Any]]
    files: List[str] = Field(default_factory=list)
    cells: List[CellResult] = Field(default_factory=list)
    failures: Dict[str, str] = Field(default_factory=dict)
    warnings: Dict[str, str] = Field(default_factory=dict)
    max_grad_norm: Dict[str, float] = Field(default_factory=dict)
    lower_bound_ok: bool = True
    summary_file: Optional[str] = None

    @property
    def success(self) -> bool:
        return not self.failures and self.lower_bound_ok

    def save(self, path: str | Path) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        return target
