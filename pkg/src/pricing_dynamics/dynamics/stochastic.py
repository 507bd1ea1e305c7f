"""Single-observation stochastic dynamics with Polyak–Ruppert averaging.

Every dynamic steps with the unscaled per-agent oracle, one agent
observation per iteration, and reports f at the running average p̃_t.
"""

from __future__ import annotations

import dataclasses
import logging
from typing import Callable, List, Optional

import numpy as np

from ..exceptions import ParameterError
from ..market.models import FloatArray, MarketInstance, PriceVector, as_prices
from ..oracles import (
    GradientSample,
    PopulationModel,
    agent_oracle,
    population_objective,
    population_oracle,
    potential,
    uniform_agent,
)
from .models import Algorithm, DynamicsConfig
from .steps import AdaGradState, Step, decaying_step, step_project
from .trace import AveragingState, RunTrace, TraceRecorder

logger = logging.getLogger(__name__)

Draw = Callable[[PriceVector, np.random.Generator], GradientSample]
StepRule = Callable[[int, FloatArray], Step]

# Size of the fixed population draw that stands in for f̃ without an evaluation instance.
EVALUATION_SAMPLE = (50, 100)


def initial_prices(instance: MarketInstance, p0: Optional[PriceVector] = None) -> PriceVector:
    """Explicit p0, else the instance's stored p0, else the all-ones vector."""
    if p0 is not None:
        return as_prices(p0, instance.n).copy()
    if instance.p0 is not None:
        return as_prices(instance.p0, instance.n).copy()
    return np.ones(instance.n)


def _run(
    algorithm: Algorithm,
    config: DynamicsConfig,
    p0: PriceVector,
    draw: Draw,
    step_for: StepRule,
    evaluate: Callable[[PriceVector], float],
    f_star: Optional[float],
) -> RunTrace:
    rng = np.random.default_rng(config.seed)
    recorder = TraceRecorder(
        evaluate=evaluate,
        iterations=config.iterations,
        f_star=f_star,
        dense_until=config.dense_until,
        sparse_stride=config.sparse_stride,
        record_wall_time=config.record_wall_time,
    )
    p = p0.copy()
    averaging = AveragingState.start(p.shape[0])
    trajectory: List[PriceVector] = []
    calls = 0
    max_norm = 0.0
    square_sums = np.zeros(p.shape[0])

    for t in range(config.iterations):
        sample = draw(p, rng)
        calls += sample.oracle_calls
        max_norm = max(max_norm, float(np.linalg.norm(sample.g)))
        square_sums += sample.g * sample.g
        p = step_project(p, sample.g, step_for(t, sample.g))
        averaging.update(p)
        if config.keep_trajectory:
            trajectory.append(p)
        if recorder.due(t + 1):
            recorder.record(t + 1, calls, averaging.average)

    logger.debug(f"{algorithm.value} seed={config.seed}: {calls} oracle calls, max |g| = {max_norm:.3g}")
    return RunTrace(
        algorithm=algorithm.value,
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
        grad_square_sums=square_sums,
    )


def _instance_draw(instance: MarketInstance, config: DynamicsConfig) -> Draw:
    def draw(p: PriceVector, rng: np.random.Generator) -> GradientSample:
        i = uniform_agent(rng, instance.S, instance.D)
        return agent_oracle(instance, i, p, rng, config.oracle_kind)

    return draw


def _sgd_steps(constant: float) -> StepRule:
    return lambda t, g: decaying_step(constant, t)


def run_sgd(
    instance: MarketInstance,
    config: DynamicsConfig,
    *,
    p0: Optional[PriceVector] = None,
    f_star: Optional[float] = None,
) -> RunTrace:
    """Projected SGD with step C/sqrt(t+1) and a uniformly drawn agent per step."""
    return _run(
        Algorithm.SGD,
        config,
        initial_prices(instance, p0),
        _instance_draw(instance, config),
        _sgd_steps(config.C),
        lambda p: potential(instance, p),
        f_star,
    )


def run_adagrad(
    instance: MarketInstance,
    config: DynamicsConfig,
    *,
    p0: Optional[PriceVector] = None,
    f_star: Optional[float] = None,
) -> RunTrace:
    """Projected AdaGrad: H accumulates ⟨g, g⟩ and the step is η/sqrt(H + ε).

    ``config.diagonal_adagrad`` switches to per-coordinate accumulators.
    """
    state = AdaGradState(instance.n, config.eta, config.epsilon_div, diagonal=config.diagonal_adagrad)
    return _run(
        Algorithm.ADAGRAD,
        config,
        initial_prices(instance, p0),
        _instance_draw(instance, config),
        lambda t, g: state.step(g),
        lambda p: potential(instance, p),
        f_star,
    )


def run_smd(
    instance: MarketInstance,
    config: DynamicsConfig,
    *,
    p0: Optional[PriceVector] = None,
    f_star: Optional[float] = None,
) -> RunTrace:
    """Mirror descent with the Euclidean prox on the orthant, step C·R/(M·sqrt(t+1)).

    Needs no Lipschitz gradient, so it runs on instances with Γ_s = 0.
    """
    if config.R is None or config.M is None:
        missing = [name for name, value in (("R", config.R), ("M", config.M)) if value is None]
        raise ParameterError(",".join(missing), None, "smd needs the distance bound R and the gradient bound M")
    return _run(
        Algorithm.SMD,
        config,
        initial_prices(instance, p0),
        _instance_draw(instance, config),
        _sgd_steps(config.smd_step_constant),
        lambda p: potential(instance, p),
        f_star,
    )


def population_evaluator(
    model: PopulationModel,
    evaluation: Optional[MarketInstance],
    *,
    seed: int,
) -> Callable[[PriceVector], float]:
    """Objective used to report an online run.

    With an evaluation instance it is that instance's f; otherwise f̃ is
    estimated on a fixed draw from the population seeded by ``seed``.
    """
    if evaluation is not None:
        return lambda p: potential(evaluation, p)
    suppliers, consumers = EVALUATION_SAMPLE
    sample = model.evaluation_sample(suppliers, consumers, seed)
    return lambda p: population_objective(model, sample, p)


def run_sgd_online(
    population: PopulationModel,
    config: DynamicsConfig,
    *,
    evaluation: Optional[MarketInstance] = None,
    p0: Optional[PriceVector] = None,
    f_star: Optional[float] = None,
    evaluation_seed: int = 0,
) -> RunTrace:
    """SGD against the infinite-population oracle.

    ``config.beta`` overrides the model's supplier fraction.
    """
    if config.beta is not None and config.beta != population.beta:
        population = dataclasses.replace(population, beta=config.beta)
    n = population.nests.n
    if p0 is not None:
        start = as_prices(p0, n).copy()
    elif evaluation is not None:
        start = initial_prices(evaluation)
    else:
        start = np.ones(n)

    evaluate = population_evaluator(population, evaluation, seed=evaluation_seed)

    def draw(p: PriceVector, rng: np.random.Generator) -> GradientSample:
        return population_oracle(population, p, rng)

    return _run(Algorithm.SGD_ONLINE, config, start, draw, _sgd_steps(config.C), evaluate, f_star)
