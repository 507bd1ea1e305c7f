"""Step-size inputs and convergence envelopes for the stochastic dynamics.

The envelopes bound the suboptimality of the averaged iterate for the
normalized objective f/(S+D) that the single-agent oracle is unbiased for;
pass ``scale=S+D`` to compare them with suboptimality of f.
"""

from __future__ import annotations

import math
from typing import Sequence, Tuple

import numpy as np

from ..exceptions import ParameterError
from ..market.models import FloatArray, MarketInstance, PriceVector
from ..supplier import supply_all


def estimate_smd_bounds(instance: MarketInstance, p0: PriceVector) -> Tuple[float, float]:
    """Distance bound R and gradient bound M for mirror descent started at p0.

    R = max(1, 2‖p0‖₂). Supply is monotone in p, so on the R-ball around p0
    no supplier plan exceeds ‖y_s(p0 + R·1)‖₂, and consumer samples have
    norm 1; M is the larger of the two.
    """
    p0 = np.asarray(p0, dtype=np.float64)
    R = max(1.0, 2.0 * float(np.linalg.norm(p0)))
    M = 1.0
    if instance.S:
        corner = supply_all(instance, p0 + R)
        M = max(M, float(np.linalg.norm(corner, axis=1).max()))
    return R, M


def _check_iterations(N: int) -> None:
    if N < 1:
        raise ParameterError("N", N, "iteration count must be >= 1")


def sgd_bound(distance_sq: float, C: float, B: float, N: int, *, scale: float = 1.0) -> float:
    """(‖p0 - p*‖² + C·B²·(1 + C·ln N)) / (2C·sqrt(N)) for SGD with step C/sqrt(t+1)."""
    _check_iterations(N)
    return scale * (distance_sq + C * B**2 * (1.0 + C * math.log(N))) / (2.0 * C * math.sqrt(N))


def adagrad_bound(R: float, grad_square_sums: FloatArray, N: int, *, scale: float = 1.0) -> float:
    """(3R / 2N)·Σ_i sqrt(Σ_t g_{t,i}²) with R the sup-norm distance bound."""
    _check_iterations(N)
    return scale * 1.5 * R / N * float(np.sqrt(np.asarray(grad_square_sums, dtype=np.float64)).sum())


def smd_bound(C: float, R: float, M: float, N: int, *, scale: float = 1.0) -> float:
    """max{C, 1/C}·R·M / sqrt(N)."""
    _check_iterations(N)
    return scale * max(C, 1.0 / C) * R * M / math.sqrt(N)


def loglog_slope(ns: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(values) against log(ns)."""
    x = np.log(np.asarray(ns, dtype=np.float64))
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.log(np.asarray(values, dtype=np.float64))
    if x.shape != y.shape or x.shape[0] < 2:
        raise ParameterError("ns", len(x), "need at least two matching points")
    if not np.all(np.isfinite(y)):
        raise ParameterError("values", values, "values must be positive")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
