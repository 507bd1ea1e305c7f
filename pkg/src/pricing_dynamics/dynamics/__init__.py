"""Price-update dynamics and their traces."""

from __future__ import annotations

from typing import Optional

from ..market.models import MarketInstance, PriceVector
from ..oracles import PopulationModel
from .deterministic import DescentResult, lipschitz_step, projected_descent, run_agd, run_gd
from .models import Algorithm, DynamicsConfig
from .steps import AdaGradState, decaying_step, step_project
from .stochastic import initial_prices, run_adagrad, run_sgd, run_sgd_online, run_smd
from .trace import TRACE_COLUMNS, AveragingState, RunTrace, TraceRecord, TraceRecorder, read_trace_csv, write_trace_csv


def run_dynamics(
    instance: MarketInstance,
    config: DynamicsConfig,
    *,
    p0: Optional[PriceVector] = None,
    f_star: Optional[float] = None,
    population: Optional[PopulationModel] = None,
) -> RunTrace:
    """Run ``config.algorithm`` on ``instance``.

    ``sgd-online`` draws from ``population`` (default: the instance's finite
    mixture) and reports the instance's f.
    """
    algorithm = config.algorithm
    if algorithm is Algorithm.SGD:
        return run_sgd(instance, config, p0=p0, f_star=f_star)
    if algorithm is Algorithm.ADAGRAD:
        return run_adagrad(instance, config, p0=p0, f_star=f_star)
    if algorithm is Algorithm.SMD:
        return run_smd(instance, config, p0=p0, f_star=f_star)
    if algorithm is Algorithm.GD:
        return run_gd(instance, config, p0=p0, f_star=f_star)
    if algorithm is Algorithm.AGD:
        return run_agd(instance, config, p0=p0, f_star=f_star)
    model = population or PopulationModel.from_instance(instance)
    return run_sgd_online(model, config, evaluation=instance, p0=p0, f_star=f_star)


__all__ = [
    "Algorithm",
    "AdaGradState",
    "AveragingState",
    "DescentResult",
    "DynamicsConfig",
    "RunTrace",
    "TRACE_COLUMNS",
    "TraceRecord",
    "TraceRecorder",
    "decaying_step",
    "initial_prices",
    "lipschitz_step",
    "projected_descent",
    "read_trace_csv",
    "run_adagrad",
    "run_agd",
    "run_dynamics",
    "run_gd",
    "run_sgd",
    "run_sgd_online",
    "run_smd",
    "step_project",
    "write_trace_csv",
]
