"""Reference optimum f* by high-accuracy projected gradient descent."""

from __future__ import annotations

import logging
import time
from typing import Optional

from ..dynamics import initial_prices, projected_descent
from ..exceptions import DegenerateSupplierError, NonSmoothInstanceError, ParameterError
from ..logging import StructuredLogger
from ..logging_config import log_performance
from ..market.models import MarketInstance, PriceVector
from ..oracles import clearing_residual, potential, tight_lipschitz
from .models import OptimumEstimate

logger = logging.getLogger(__name__)
events = StructuredLogger("pricing_dynamics.events")


@log_performance("estimate_optimum")
def estimate_optimum(
    instance: MarketInstance,
    tol: float = 1e-10,
    *,
    max_iterations: int = 10_000_000,
    p0: Optional[PriceVector] = None,
) -> OptimumEstimate:
    """Run projected GD until ‖p_{t+1} - p_t‖₂ <= tol and report p*, f(p*) and the clearing residual.

    The step is 1/L for the curvature-exact constant of the quadratic supplier
    family, which stays finite for Γ_s = 0 when the cost coefficient is
    positive. Hitting ``max_iterations`` returns a partial estimate with
    ``converged=False``.
    """
    if not tol > 0:
        raise ParameterError("tol", tol, "stopping tolerance must be > 0")
    if max_iterations < 1:
        raise ParameterError("max_iterations", max_iterations, "must be >= 1")
    if instance.S == 0:
        raise ParameterError("S", 0, "without suppliers the potential is unbounded below and has no minimizer")
    try:
        lipschitz = tight_lipschitz(instance)
    except DegenerateSupplierError as exc:
        raise NonSmoothInstanceError("estimate", instance.zero_gamma_suppliers) from exc
    if instance.zero_gamma_suppliers:
        logger.warning(
            f"Suppliers {list(instance.zero_gamma_suppliers)} have gamma = 0; "
            "estimating f* with the cost curvature alone"
        )

    started = time.perf_counter()
    result = projected_descent(
        instance,
        initial_prices(instance, p0),
        1.0 / lipschitz,
        max_iterations=max_iterations,
        tol=tol,
    )
    if not result.converged:
        logger.warning(
            f"Optimum estimate hit the iteration cap {max_iterations} with step norm "
            f"{result.last_step_norm:.3g} > {tol:g}; returning a partial estimate"
        )

    estimate = OptimumEstimate(
        p_star=result.p.tolist(),
        f_star=potential(instance, result.p),
        clearing_residual=clearing_residual(instance, result.p),
        stop_criterion=f"step_norm<={tol:g}" if result.converged else f"max_iterations={max_iterations}",
        tol=tol,
        iterations=result.iterations,
        converged=result.converged,
        lipschitz=lipschitz,
    )
    events.log_event(
        "optimum_estimated",
        f_star=estimate.f_star,
        clearing_residual=estimate.clearing_residual,
        iterations=estimate.iterations,
        converged=estimate.converged,
        duration_ms=round((time.perf_counter() - started) * 1000, 2),
    )
    return estimate
