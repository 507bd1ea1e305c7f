"""Full-gradient baselines: projected gradient descent and projected Nesterov acceleration.

Both step with 1/L for the Lipschitz constant of the potential and spend
S + D oracle calls per iteration. They record f at the last iterate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..exceptions import NonSmoothInstanceError
from ..market.models import MarketInstance, PriceVector
from ..oracles import full_gradient, lipschitz_constants, potential
from .models import Algorithm, DynamicsConfig
from .steps import step_project
from .stochastic import initial_prices
from .trace import AveragingState, RunTrace, TraceRecorder

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DescentResult:
    p: PriceVector
    iterations: int
    converged: bool
    last_step_norm: float


def projected_descent(
    instance: MarketInstance,
    p0: PriceVector,
    step: float,
    *,
    max_iterations: int,
    tol: float,
) -> DescentResult:
    """Plain projected GD until ‖p_{t+1} - p_t‖₂ <= tol or the iteration cap."""
    p = np.asarray(p0, dtype=np.float64).copy()
    delta = math.inf
    for k in range(1, max_iterations + 1):
        nxt = step_project(p, full_gradient(instance, p).g, step)
        delta = float(np.linalg.norm(nxt - p))
        p = nxt
        if delta <= tol:
            return DescentResult(p=p, iterations=k, converged=True, last_step_norm=delta)
    return DescentResult(p=p, iterations=max_iterations, converged=False, last_step_norm=delta)


def lipschitz_step(instance: MarketInstance, operation: str) -> float:
    """1/L with L = Σ 1/Γ_s + D / min μ; refuses instances with Γ_s = 0."""
    constants = lipschitz_constants(instance)
    if constants.total is None:
        raise NonSmoothInstanceError(operation, constants.zero_gamma_suppliers)
    return 1.0 / constants.total


def _recorder(instance: MarketInstance, config: DynamicsConfig, f_star: Optional[float]) -> TraceRecorder:
    return TraceRecorder(
        evaluate=lambda p: potential(instance, p),
        iterations=config.iterations,
        f_star=f_star,
        dense_until=config.dense_until,
        sparse_stride=config.sparse_stride,
        record_wall_time=config.record_wall_time,
    )


def run_gd(
    instance: MarketInstance,
    config: DynamicsConfig,
    *,
    p0: Optional[PriceVector] = None,
    f_star: Optional[float] = None,
) -> RunTrace:
    """Projected gradient descent with step 1/L; stops early when ``config.tol`` is met."""
    step = lipschitz_step(instance, Algorithm.GD.value)
    recorder = _recorder(instance, config, f_star)
    p = initial_prices(instance, p0)
    averaging = AveragingState.start(instance.n)
    trajectory: List[PriceVector] = []
    calls = 0
    max_norm = 0.0
    converged: Optional[bool] = False if config.tol is not None else None
    t = 0

    for t in range(1, config.iterations + 1):
        sample = full_gradient(instance, p)
        calls += sample.oracle_calls
        max_norm = max(max_norm, float(np.linalg.norm(sample.g)))
        nxt = step_project(p, sample.g, step)
        delta = float(np.linalg.norm(nxt - p))
        p = nxt
        averaging.update(p)
        if config.keep_trajectory:
            trajectory.append(p)
        recorder.maybe_record(t, calls, p)
        if config.tol is not None and delta <= config.tol:
            converged = True
            logger.info(f"gd stopped at t={t}: step norm {delta:.3g} <= {config.tol:g}")
            break
    recorder.close(t, calls, p)

    return RunTrace(
        algorithm=Algorithm.GD.value,
        seed=config.seed,
        records=recorder.records,
        p_average=averaging.average,
        p_last=p,
        averaging=averaging,
        oracle_calls=calls,
        iterations=t,
        max_grad_norm=max_norm,
        f_star=f_star,
        converged=converged,
        trajectory=np.array(trajectory) if config.keep_trajectory else None,
    )


def run_agd(
    instance: MarketInstance,
    config: DynamicsConfig,
    *,
    p0: Optional[PriceVector] = None,
    f_star: Optional[float] = None,
) -> RunTrace:
    """Projected Nesterov acceleration (FISTA momentum) with step 1/L.

    The gradient is taken at the extrapolated point, which may leave the
    orthant; the iterates p_t themselves are always projected.
    """
    step = lipschitz_step(instance, Algorithm.AGD.value)
    recorder = _recorder(instance, config, f_star)
    p = initial_prices(instance, p0)
    y = p.copy()
    momentum = 1.0
    averaging = AveragingState.start(instance.n)
    trajectory: List[PriceVector] = []
    calls = 0
    max_norm = 0.0

    for t in range(1, config.iterations + 1):
        sample = full_gradient(instance, y)
        calls += sample.oracle_calls
        max_norm = max(max_norm, float(np.linalg.norm(sample.g)))
        nxt = step_project(y, sample.g, step)
        next_momentum = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * momentum**2))
        y = nxt + ((momentum - 1.0) / next_momentum) * (nxt - p)
        p, momentum = nxt, next_momentum
        averaging.update(p)
        if config.keep_trajectory:
            trajectory.append(p)
        recorder.maybe_record(t, calls, p)

    return RunTrace(
        algorithm=Algorithm.AGD.value,
        seed=config.seed,
        records=recorder.records,
        p_average=averaging.average,
        p_last=p,
        averaging=averaging,
        oracle_calls=calls,
        iterations=config.iterations,
        max_grad_norm=max_norm,
        f_star=f_star,
        trajectory=np.array(trajectory) if config.keep_trajectory else None,
    )
