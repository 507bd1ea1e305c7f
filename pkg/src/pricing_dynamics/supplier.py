"""Supplier best responses, maximal revenue and dual smoothing of Γ = 0 suppliers.

With cost c·‖y‖² and adjustment penalty Γ‖y - ŷ‖² the supplier problem is
separable and strongly concave whenever c + Γ > 0, and its maximizer over
the nonnegative orthant is ``y = (p + 2Γŷ) / (2(c + Γ))``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Optional, Tuple

import numpy as np

from .exceptions import DegenerateSupplierError, ParameterError
from .market.models import FloatArray, MarketInstance, PriceVector, SupplierSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupplierResponse:
    y: FloatArray
    revenue: float


def _objective(spec: SupplierSpec, y: FloatArray, p: PriceVector) -> float:
    deviation = y - spec.y_hat
    return float(y @ p - spec.cost_coeff * (y @ y) - spec.gamma * (deviation @ deviation))


def best_response(spec: SupplierSpec, p: PriceVector, *, index: Optional[int] = None) -> SupplierResponse:
    """Optimal supply y_s(p) and the revenue π_s(p) it attains."""
    curvature = spec.cost_coeff + spec.gamma
    if curvature <= 0:
        raise DegenerateSupplierError(index)
    p = np.asarray(p, dtype=np.float64)
    y = (p + 2.0 * spec.gamma * spec.y_hat) / (2.0 * curvature)
    return SupplierResponse(y=y, revenue=_objective(spec, y, p))


def revenue(spec: SupplierSpec, p: PriceVector) -> float:
    """Maximal revenue π_s(p); convex in p with gradient y_s(p)."""
    return best_response(spec, p).revenue


def supply_all(instance: MarketInstance, p: PriceVector) -> FloatArray:
    """Best responses of every supplier stacked as rows; shape (S, n)."""
    if instance.S == 0:
        return np.zeros((0, instance.n))
    return np.stack([best_response(spec, p, index=s).y for s, spec in enumerate(instance.suppliers)])


def revenue_all(instance: MarketInstance, p: PriceVector) -> FloatArray:
    return np.array([best_response(spec, p, index=s).revenue for s, spec in enumerate(instance.suppliers)])


@dataclass(frozen=True, eq=False)
class SmoothedInstance:
    """A market whose Γ = 0 suppliers carry the synthetic penalty η‖y - y_0‖².

    ``eta = eps / (2 radius²)``. Suppliers with Γ > 0 are left untouched.
    """

    base: MarketInstance
    eta: float
    anchor: FloatArray
    target_eps: float
    radius: float
    smoothed_suppliers: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def noop(self) -> bool:
        return not self.smoothed_suppliers

    @cached_property
    def instance(self) -> MarketInstance:
        suppliers = list(self.base.suppliers)
        for s in self.smoothed_suppliers:
            suppliers[s] = SupplierSpec(gamma=self.eta, y_hat=self.anchor[s], cost_coeff=suppliers[s].cost_coeff)
        return self.base.with_suppliers(suppliers)


def smooth(
    instance: MarketInstance,
    eps: float,
    radius: float,
    anchor: Optional[Any] = None,
) -> SmoothedInstance:
    """Replace every Γ = 0 supplier by Γ = η, ŷ = y_0 with η = ε / (2R²).

    ``anchor`` is either one n-vector shared by all suppliers or an (S, n)
    array with a row per supplier; it defaults to the zero vector.
    """
    if not np.isfinite(eps) or eps <= 0:
        raise ParameterError("eps", eps, "target suboptimality must be > 0")
    if not np.isfinite(radius) or radius <= 0:
        raise ParameterError("radius", radius, "radius must be > 0")

    if anchor is None:
        anchors = np.zeros((instance.S, instance.n))
    else:
        anchors = np.asarray(anchor, dtype=np.float64)
        if anchors.ndim == 1:
            anchors = np.tile(anchors, (instance.S, 1))
        if anchors.shape != (instance.S, instance.n):
            raise ParameterError("anchor", anchors.shape, f"expected ({instance.n},) or ({instance.S}, {instance.n})")
        if np.any(anchors < 0):
            raise ParameterError("anchor", anchors.min(), "anchor must lie in the nonnegative orthant")

    targets = instance.zero_gamma_suppliers
    if not targets:
        logger.warning("No supplier has gamma = 0; smoothing leaves the instance unchanged")

    return SmoothedInstance(
        base=instance,
        eta=eps / (2.0 * radius**2),
        anchor=anchors,
        target_eps=float(eps),
        radius=float(radius),
        smoothed_suppliers=targets,
    )


def smoothed_lipschitz(smoothed: SmoothedInstance) -> float:
    """Gradient Lipschitz constant of f_η, summed term by term.

    1/Γ_s for untouched suppliers, 2R²/ε for each smoothed one and
    1/min_j μ_j per consumer.
    """
    base = smoothed.base
    touched = set(smoothed.smoothed_suppliers)
    supplier_term = sum(
        2.0 * smoothed.radius**2 / smoothed.target_eps if s in touched else 1.0 / spec.gamma
        for s, spec in enumerate(base.suppliers)
    )
    consumer_term = base.D / base.nests.min_mu if base.D else 0.0
    return float(supplier_term + consumer_term)
