"""Nested-logit consumers: expected surplus, choice probabilities and sampled sales.

Every quantity is evaluated through the stabilized nested log-sum-exp: the
inner term of group j is ``μ_j · logsumexp((a - p)[G_j] / μ_j)`` and the
surplus is the log-sum-exp of the inner terms. Probabilities factor as
P(group) · P(alternative | group), each a stable softmax, so no raw
exponential of a utility is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .market.models import FloatArray, MarketInstance, NestStructure, PriceVector


@dataclass(frozen=True)
class ChoiceProbabilities:
    """Choice distribution x_d(p) of one consumer, with its group marginals."""

    x: FloatArray
    group: FloatArray


@dataclass(frozen=True)
class SaleSample:
    """One observed purchase: a one-hot vector over the n alternatives."""

    chosen_index: int
    n: int

    @property
    def one_hot(self) -> FloatArray:
        vector = np.zeros(self.n)
        vector[self.chosen_index] = 1.0
        return vector


def _inner_terms(nests: NestStructure, values: FloatArray) -> FloatArray:
    """Group inner terms for a (n, K) block of net utilities a - p; shape (m, K)."""
    inner = np.empty((nests.m, values.shape[1]))
    for j, idx in enumerate(nests.group_index):
        mu = nests.mu[j]
        inner[j] = mu * logsumexp(values[idx] / mu, axis=0)
    return inner


def _probabilities(nests: NestStructure, values: FloatArray) -> tuple[FloatArray, FloatArray]:
    inner = _inner_terms(nests, values)
    log_group = inner - logsumexp(inner, axis=0)
    x = np.empty_like(values)
    for j, idx in enumerate(nests.group_index):
        scaled = values[idx] / nests.mu[j]
        x[idx] = np.exp(log_group[j] + scaled - logsumexp(scaled, axis=0))
    return x, np.exp(log_group)


def nested_surplus(nests: NestStructure, utilities: FloatArray, p: PriceVector) -> float:
    values = (np.asarray(utilities, dtype=np.float64) - p)[:, None]
    return float(logsumexp(_inner_terms(nests, values), axis=0)[0])


def nested_probabilities(nests: NestStructure, utilities: FloatArray, p: PriceVector) -> ChoiceProbabilities:
    values = (np.asarray(utilities, dtype=np.float64) - p)[:, None]
    x, group = _probabilities(nests, values)
    return ChoiceProbabilities(x=x[:, 0], group=group[:, 0])


def sample_nested_choice(
    nests: NestStructure,
    utilities: FloatArray,
    p: PriceVector,
    rng: np.random.Generator,
) -> SaleSample:
    """Draw a group from P(group), then an alternative from the within-group softmax."""
    values = np.asarray(utilities, dtype=np.float64) - p
    inner = _inner_terms(nests, values[:, None])[:, 0]
    group_probs = np.exp(inner - logsumexp(inner))
    j = int(rng.choice(nests.m, p=group_probs / group_probs.sum()))
    idx = nests.group_index[j]
    scaled = values[idx] / nests.mu[j]
    within = np.exp(scaled - logsumexp(scaled))
    chosen = int(idx[rng.choice(idx.shape[0], p=within / within.sum())])
    return SaleSample(chosen_index=chosen, n=values.shape[0])


def expected_surplus(instance: MarketInstance, d: int, p: PriceVector) -> float:
    """E_d(p) of consumer d (0-based)."""
    return nested_surplus(instance.nests, instance.consumer_utilities(d), p)


def choice_probabilities(instance: MarketInstance, d: int, p: PriceVector) -> ChoiceProbabilities:
    """x_d(p) = -∇E_d(p) of consumer d (0-based)."""
    return nested_probabilities(instance.nests, instance.consumer_utilities(d), p)


def sample_choice(instance: MarketInstance, d: int, p: PriceVector, rng: np.random.Generator) -> SaleSample:
    """One sale of consumer d, distributed as x_d(p)."""
    return sample_nested_choice(instance.nests, instance.consumer_utilities(d), p, rng)


def expected_surplus_all(instance: MarketInstance, p: PriceVector) -> FloatArray:
    """Vector of E_d(p) over all D consumers."""
    if instance.D == 0:
        return np.zeros(0)
    values = instance.utilities - np.asarray(p, dtype=np.float64)[:, None]
    return logsumexp(_inner_terms(instance.nests, values), axis=0)


def choice_probabilities_all(instance: MarketInstance, p: PriceVector) -> FloatArray:
    """Matrix of choice probabilities, column d is x_d(p); shape (n, D)."""
    if instance.D == 0:
        return np.zeros((instance.n, 0))
    values = instance.utilities - np.asarray(p, dtype=np.float64)[:, None]
    x, _ = _probabilities(instance.nests, values)
    return x
