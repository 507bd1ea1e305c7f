"""Typed dynamics configuration."""

from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..oracles import OracleKind


class Algorithm(str, Enum):
    """Price-update dynamics known to the harness."""

    SGD = "sgd"
    ADAGRAD = "adagrad"
    SGD_ONLINE = "sgd-online"
    SMD = "smd"
    GD = "gd"
    AGD = "agd"

    @property
    def stochastic(self) -> bool:
        return self not in (Algorithm.GD, Algorithm.AGD)

    @property
    def needs_smooth(self) -> bool:
        return self in (Algorithm.GD, Algorithm.AGD)


class DynamicsConfig(BaseModel):
    """Hyperparameters of a single run.

    ``iterations`` is N. ``R`` and ``M`` are required by ``smd`` only;
    ``beta`` overrides the population model's supplier fraction for
    ``sgd-online``. ``tol`` enables the step-norm stop of ``gd``.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    algorithm: Algorithm
    iterations: int = Field(ge=1)
    C: float = Field(1.0, gt=0)
    eta: float = Field(1.0, gt=0)
    epsilon_div: float = Field(1e-8, ge=0)
    R: Optional[float] = Field(None, gt=0)
    M: Optional[float] = Field(None, gt=0)
    beta: Optional[float] = Field(None, gt=0, lt=1)
    seed: int = 17
    oracle_kind: OracleKind = OracleKind.SAMPLED_SALE
    diagonal_adagrad: bool = False
    tol: Optional[float] = Field(None, gt=0)
    dense_until: int = Field(1000, ge=0)
    sparse_stride: int = Field(10, ge=1)
    record_wall_time: bool = True
    keep_trajectory: bool = False

    @model_validator(mode="after")
    def _check_oracle(self) -> "DynamicsConfig":
        if self.algorithm.stochastic and self.oracle_kind is OracleKind.FULL:
            raise ValueError(f"{self.algorithm.value} steps with a single-agent oracle, not 'full'")
        return self

    @property
    def smd_step_constant(self) -> float:
        """C·R/M, the step numerator of mirror descent on the orthant."""
        if self.R is None or self.M is None:
            raise ValueError("smd needs both R and M")
        return self.C * self.R / self.M
