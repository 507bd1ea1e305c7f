"""Potential f(p), its gradient and the stochastic gradient oracles.

Agents are indexed 0..S+D-1 with suppliers first. An oracle call is one
observation of a single market participant; the full gradient consumes
S + D of them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Protocol, Sequence, Tuple

import numpy as np

from .consumer import (
    choice_probabilities,
    choice_probabilities_all,
    expected_surplus_all,
    sample_choice,
    sample_nested_choice,
)
from .exceptions import AgentIndexError, DegenerateSupplierError, ParameterError
from .market.generator import MU_RANGE, UTILITY_RANGE, Y_HAT_RANGE, contiguous_groups
from .market.models import FloatArray, MarketInstance, NestStructure, PriceVector, SupplierSpec
from .supplier import best_response, revenue_all, supply_all

logger = logging.getLogger(__name__)


class OracleKind(str, Enum):
    """Which gradient information an observation yields."""

    EXACT_AGENT = "exact-agent"
    SAMPLED_SALE = "sampled-sale"
    FULL = "full"


class AgentRole(str, Enum):
    SUPPLIER = "supplier"
    CONSUMER = "consumer"
    POPULATION_SUPPLIER = "population-supplier"
    POPULATION_CONSUMER = "population-consumer"
    MARKET = "market"


@dataclass(frozen=True)
class AgentRef:
    role: AgentRole
    index: Optional[int] = None


@dataclass(frozen=True)
class GradientSample:
    g: FloatArray
    agent: AgentRef
    kind: OracleKind
    oracle_calls: int = 1


def potential(instance: MarketInstance, p: PriceVector) -> float:
    """Total expected revenue f(p) = Σ_s π_s(p) + Σ_d E_d(p)."""
    p = np.asarray(p, dtype=np.float64)
    return float(revenue_all(instance, p).sum() + expected_surplus_all(instance, p).sum())


def full_gradient(instance: MarketInstance, p: PriceVector) -> GradientSample:
    """∇f(p) = Σ_s y_s(p) - Σ_d x_d(p): excess supply."""
    p = np.asarray(p, dtype=np.float64)
    g = supply_all(instance, p).sum(axis=0) - choice_probabilities_all(instance, p).sum(axis=1)
    return GradientSample(g=g, agent=AgentRef(AgentRole.MARKET), kind=OracleKind.FULL, oracle_calls=instance.agents)


def _check_agent(instance: MarketInstance, i: int) -> None:
    if not 0 <= i < instance.agents:
        raise AgentIndexError("agent", i, instance.agents)


def exact_agent_oracle(instance: MarketInstance, i: int, p: PriceVector) -> GradientSample:
    """∇f_i(p): y_i(p) for a supplier, -x_d(p) for consumer d = i - S."""
    _check_agent(instance, i)
    p = np.asarray(p, dtype=np.float64)
    if i < instance.S:
        y = best_response(instance.suppliers[i], p, index=i).y
        return GradientSample(g=y, agent=AgentRef(AgentRole.SUPPLIER, i), kind=OracleKind.EXACT_AGENT)
    d = i - instance.S
    x = choice_probabilities(instance, d, p).x
    return GradientSample(g=-x, agent=AgentRef(AgentRole.CONSUMER, d), kind=OracleKind.EXACT_AGENT)


def sampled_oracle(instance: MarketInstance, i: int, p: PriceVector, rng: np.random.Generator) -> GradientSample:
    """Observation-level oracle: a supplier's plan, or minus one observed sale."""
    _check_agent(instance, i)
    p = np.asarray(p, dtype=np.float64)
    if i < instance.S:
        y = best_response(instance.suppliers[i], p, index=i).y
        return GradientSample(g=y, agent=AgentRef(AgentRole.SUPPLIER, i), kind=OracleKind.SAMPLED_SALE)
    d = i - instance.S
    sale = sample_choice(instance, d, p, rng)
    return GradientSample(g=-sale.one_hot, agent=AgentRef(AgentRole.CONSUMER, d), kind=OracleKind.SAMPLED_SALE)


def agent_oracle(
    instance: MarketInstance,
    i: int,
    p: PriceVector,
    rng: np.random.Generator,
    kind: OracleKind,
) -> GradientSample:
    if kind is OracleKind.EXACT_AGENT:
        return exact_agent_oracle(instance, i, p)
    if kind is OracleKind.SAMPLED_SALE:
        return sampled_oracle(instance, i, p, rng)
    raise ParameterError("oracle_kind", kind, "stochastic dynamics need exact-agent or sampled-sale")


def uniform_agent(rng: np.random.Generator, S: int, D: int) -> int:
    """Draw an agent index uniformly from 0..S+D-1."""
    if S + D < 1:
        raise ParameterError("S + D", S + D, "need at least one agent")
    return int(rng.integers(S + D))


# Population (infinite-market) oracle


class SupplierSampler(Protocol):
    def __call__(self, rng: np.random.Generator) -> SupplierSpec: ...


class ConsumerSampler(Protocol):
    def __call__(self, rng: np.random.Generator) -> FloatArray: ...


@dataclass(frozen=True)
class UniformSupplierSampler:
    """Suppliers with ŷ ~ U[low, high]^n and a common Γ."""

    n: int
    gamma: float
    low: float = Y_HAT_RANGE[0]
    high: float = Y_HAT_RANGE[1]
    cost_coeff: float = 1.0

    def __call__(self, rng: np.random.Generator) -> SupplierSpec:
        y_hat = rng.uniform(self.low, self.high, size=self.n)
        return SupplierSpec(gamma=self.gamma, y_hat=y_hat, cost_coeff=self.cost_coeff)


@dataclass(frozen=True)
class UniformConsumerSampler:
    """Consumers with utilities a ~ U[low, high]^n."""

    n: int
    low: float = UTILITY_RANGE[0]
    high: float = UTILITY_RANGE[1]

    def __call__(self, rng: np.random.Generator) -> FloatArray:
        return rng.uniform(self.low, self.high, size=self.n)


@dataclass(frozen=True)
class FiniteSupplierSampler:
    """Uniform draw from a fixed list of suppliers (a point mass when it has one entry)."""

    suppliers: Tuple[SupplierSpec, ...]

    def __call__(self, rng: np.random.Generator) -> SupplierSpec:
        if len(self.suppliers) == 1:
            return self.suppliers[0]
        return self.suppliers[int(rng.integers(len(self.suppliers)))]


@dataclass(frozen=True, eq=False)
class FiniteConsumerSampler:
    """Uniform draw from the columns of a fixed utility matrix."""

    utilities: FloatArray

    def __call__(self, rng: np.random.Generator) -> FloatArray:
        D = self.utilities.shape[1]
        if D == 1:
            return self.utilities[:, 0]
        return self.utilities[:, int(rng.integers(D))]


@dataclass(frozen=True, eq=False)
class PopulationModel:
    """Infinite market: a supplier fraction β and samplers for both sides."""

    beta: float
    nests: NestStructure
    supplier_sampler: SupplierSampler
    consumer_sampler: ConsumerSampler

    def __post_init__(self) -> None:
        if not 0 < self.beta < 1:
            raise ParameterError("beta", self.beta, "supplier fraction must lie in (0, 1)")

    @classmethod
    def from_instance(cls, instance: MarketInstance) -> "PopulationModel":
        """Finite mixture over an instance's agents with β = S / (S + D)."""
        if instance.S < 1 or instance.D < 1:
            raise ParameterError("S, D", (instance.S, instance.D), "a mixture needs suppliers and consumers")
        return cls(
            beta=instance.S / instance.agents,
            nests=instance.nests,
            supplier_sampler=FiniteSupplierSampler(instance.suppliers),
            consumer_sampler=FiniteConsumerSampler(instance.utilities),
        )

    @classmethod
    def uniform_box(
        cls,
        n: int,
        m: int,
        gamma: float,
        beta: float,
        *,
        seed: int = 0,
    ) -> "PopulationModel":
        """Samplers mirroring the synthetic generator; μ is drawn once from ``seed``."""
        if m < 1 or n < m:
            raise ParameterError("n, m", (n, m), "need n >= m >= 1")
        mu = np.random.default_rng(seed).uniform(*MU_RANGE, size=m)
        return cls(
            beta=beta,
            nests=NestStructure(groups=contiguous_groups(n, m), mu=mu),
            supplier_sampler=UniformSupplierSampler(n=n, gamma=gamma),
            consumer_sampler=UniformConsumerSampler(n=n),
        )

    def evaluation_sample(self, suppliers: int, consumers: int, seed: int) -> MarketInstance:
        """A fixed finite draw used to estimate f̃ by sample averages."""
        rng = np.random.default_rng(seed)
        specs = tuple(self.supplier_sampler(rng) for _ in range(suppliers))
        n = self.nests.n
        utilities = (
            np.column_stack([self.consumer_sampler(rng) for _ in range(consumers)]) if consumers else np.zeros((n, 0))
        )
        return MarketInstance(n=n, nests=self.nests, utilities=utilities, suppliers=specs)


def population_oracle(model: PopulationModel, p: PriceVector, rng: np.random.Generator) -> GradientSample:
    """With probability β a sampled supplier's plan, otherwise minus a sampled consumer's sale."""
    p = np.asarray(p, dtype=np.float64)
    if rng.random() < model.beta:
        spec = model.supplier_sampler(rng)
        return GradientSample(
            g=best_response(spec, p).y,
            agent=AgentRef(AgentRole.POPULATION_SUPPLIER),
            kind=OracleKind.SAMPLED_SALE,
        )
    utilities = model.consumer_sampler(rng)
    sale = sample_nested_choice(model.nests, utilities, p, rng)
    return GradientSample(
        g=-sale.one_hot,
        agent=AgentRef(AgentRole.POPULATION_CONSUMER),
        kind=OracleKind.SAMPLED_SALE,
    )


def population_objective(model: PopulationModel, sample: MarketInstance, p: PriceVector) -> float:
    """Sample-average estimate of f̃(p) = β E[π_s(p)] + (1 - β) E[E_d(p)]."""
    p = np.asarray(p, dtype=np.float64)
    supplier_part = revenue_all(sample, p).mean() if sample.S else 0.0
    consumer_part = expected_surplus_all(sample, p).mean() if sample.D else 0.0
    return float(model.beta * supplier_part + (1.0 - model.beta) * consumer_part)


# Lipschitz constants


@dataclass(frozen=True)
class LipschitzConstants:
    """Gradient Lipschitz bounds; ``total`` is None when some Γ_s = 0."""

    total: Optional[float]
    per_agent: FloatArray
    zero_gamma_suppliers: Tuple[int, ...] = ()

    @property
    def smooth(self) -> bool:
        return self.total is not None


def lipschitz_constants(instance: MarketInstance) -> LipschitzConstants:
    """L = Σ_s 1/Γ_s + Σ_d 1/min_j μ_j and the per-agent terms."""
    consumer_term = 1.0 / instance.nests.min_mu if instance.D else 0.0
    supplier_terms = [1.0 / s.gamma if s.gamma > 0 else np.inf for s in instance.suppliers]
    per_agent = np.array(supplier_terms + [consumer_term] * instance.D, dtype=np.float64)
    zero = instance.zero_gamma_suppliers
    if zero:
        logger.warning(f"Suppliers {list(zero)} have gamma = 0; the potential has no Lipschitz gradient bound")
        return LipschitzConstants(total=None, per_agent=per_agent, zero_gamma_suppliers=zero)
    return LipschitzConstants(total=float(per_agent.sum()), per_agent=per_agent)


def tight_lipschitz(instance: MarketInstance) -> float:
    """Curvature-exact bound Σ_s 1/(2(c_s + Γ_s)) + D / min_j μ_j for the quadratic family."""
    total = instance.D / instance.nests.min_mu if instance.D else 0.0
    for s, spec in enumerate(instance.suppliers):
        curvature = spec.cost_coeff + spec.gamma
        if curvature <= 0:
            raise DegenerateSupplierError(s)
        total += 1.0 / (2.0 * curvature)
    return float(total)


def clearing_residual(instance: MarketInstance, p: PriceVector, *, active_threshold: float = 1e-8) -> float:
    """Largest |excess supply| over coordinates with p_i above the threshold."""
    g = full_gradient(instance, p).g
    active = np.asarray(p) > active_threshold
    return float(np.abs(g[active]).max()) if np.any(active) else 0.0


def gradient_norms(samples: Sequence[GradientSample]) -> FloatArray:
    return np.array([float(np.linalg.norm(s.g)) for s in samples])
