"""Synthetic instance family used by the experiment harness."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from ..exceptions import ParameterError
from .models import MarketInstance, NestStructure, PriceVector, SupplierSpec

Y_HAT_RANGE = (0.01, 2.0)
MU_RANGE = (0.1, 1.0)
UTILITY_RANGE = (0.01, 5.0)
PRICE_RANGE = (0.01, 5.0)


def contiguous_groups(n: int, m: int) -> Tuple[Tuple[int, ...], ...]:
    """Split 0..n-1 into m contiguous blocks whose sizes differ by at most one."""
    return tuple(tuple(int(i) for i in block) for block in np.array_split(np.arange(n), m))


def generate_synthetic(
    seed: int,
    S: int,
    D: int,
    n: int,
    m: int,
    gamma: float,
    *,
    utility_range: Tuple[float, float] = UTILITY_RANGE,
    cost_coeff: float = 1.0,
) -> Tuple[MarketInstance, PriceVector]:
    """Draw an instance and a starting price vector; a pure function of its arguments.

    Draw order is fixed (typical supplies, μ, utilities column by column,
    initial prices) so that the same seed always yields the same instance.
    """
    if m < 1 or n < m:
        raise ParameterError("n, m", (n, m), "need n >= m >= 1")
    if S < 0 or D < 0 or S + D < 1:
        raise ParameterError("S, D", (S, D), "need S >= 0, D >= 0 and S + D >= 1")
    if not np.isfinite(gamma) or gamma < 0:
        raise ParameterError("gamma", gamma, "must be >= 0")
    low, high = utility_range
    if not 0 < low <= high:
        raise ParameterError("utility_range", utility_range, "bounds must satisfy 0 < low <= high")

    rng = np.random.default_rng(seed)
    y_hats = rng.uniform(*Y_HAT_RANGE, size=(S, n))
    mu = rng.uniform(*MU_RANGE, size=m)
    utilities = rng.uniform(low, high, size=(D, n)).T.copy()
    p0 = rng.uniform(*PRICE_RANGE, size=n)
    p0 = p0 / p0.max()

    suppliers = tuple(SupplierSpec(gamma=gamma, y_hat=y_hats[s], cost_coeff=cost_coeff) for s in range(S))
    instance = MarketInstance(
        n=n,
        nests=NestStructure(groups=contiguous_groups(n, m), mu=mu),
        utilities=utilities.reshape(n, D),
        suppliers=suppliers,
        p0=p0,
    )
    return instance, p0.copy()
