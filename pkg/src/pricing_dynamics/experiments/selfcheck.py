"""Oracle self-tests run by ``pricing-dynamics validate``."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..consumer import choice_probabilities_all
from ..market.models import MarketInstance
from ..market.validation import validate
from ..oracles import exact_agent_oracle, full_gradient, lipschitz_constants, potential, sampled_oracle

logger = logging.getLogger(__name__)

FD_STEP = 1e-5
FD_RTOL = 1e-6
FD_ATOL = 1e-8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    skipped: bool = False


@dataclass
class SelfCheckReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, result: CheckResult) -> None:
        level = logging.INFO if result.passed else logging.WARNING
        logger.log(level, f"{result.name}: {'ok' if result.passed else 'FAILED'} ({result.detail})")
        self.checks.append(result)


def _random_prices(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(0.0, 2.0, size=n)


def central_difference(instance: MarketInstance, p: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central finite-difference gradient of the potential."""
    grad = np.empty_like(p)
    for i in range(p.shape[0]):
        e = np.zeros_like(p)
        e[i] = h
        grad[i] = (potential(instance, p + e) - potential(instance, p - e)) / (2.0 * h)
    return grad


def check_invariants(instance: MarketInstance) -> CheckResult:
    violations = validate(instance)
    if violations:
        return CheckResult("invariants", False, "; ".join(str(v) for v in violations))
    return CheckResult("invariants", True, "all instance invariants hold")


def check_gradient(instance: MarketInstance, rng: np.random.Generator, points: int = 5) -> CheckResult:
    """full_gradient against central differences, ‖fd - g‖ <= rtol·‖g‖ + atol."""
    worst = 0.0
    for _ in range(points):
        p = _random_prices(rng, instance.n) + 2 * FD_STEP
        g = full_gradient(instance, p).g
        error = float(np.linalg.norm(central_difference(instance, p) - g))
        worst = max(worst, error / (FD_RTOL * float(np.linalg.norm(g)) + FD_ATOL))
    return CheckResult("finite_difference", worst <= 1.0, f"worst error ratio {worst:.3g} over {points} points")


def check_normalization(instance: MarketInstance, rng: np.random.Generator, points: int = 20) -> CheckResult:
    if instance.D == 0:
        return CheckResult("normalization", True, "no consumers", skipped=True)
    worst = 0.0
    for _ in range(points):
        x = choice_probabilities_all(instance, _random_prices(rng, instance.n))
        worst = max(worst, float(np.abs(x.sum(axis=0) - 1.0).max()))
    return CheckResult("normalization", worst <= 1e-12, f"max |Σx - 1| = {worst:.3g}")


def check_unbiasedness(instance: MarketInstance, rng: np.random.Generator, draws: int = 2000) -> CheckResult:
    """Sampled sales of the first consumer average to its choice probabilities."""
    if instance.D == 0:
        return CheckResult("unbiasedness", True, "no consumers", skipped=True)
    i = instance.S
    p = _random_prices(rng, instance.n)
    exact = exact_agent_oracle(instance, i, p).g
    mean = np.mean([sampled_oracle(instance, i, p, rng).g for _ in range(draws)], axis=0)
    # variance floored at 1/draws for near-zero probabilities
    variance = np.maximum(np.abs(exact) * (1.0 - np.abs(exact)), 1.0 / draws)
    stderr = np.sqrt(variance / draws)
    worst = float(np.max(np.abs(mean - exact) / stderr))
    return CheckResult("unbiasedness", worst <= 4.0, f"worst deviation {worst:.2f} standard errors over {draws} draws")


def check_lipschitz(instance: MarketInstance, rng: np.random.Generator, pairs: int = 100) -> CheckResult:
    constants = lipschitz_constants(instance)
    if constants.total is None:
        return CheckResult("lipschitz", True, "non-smooth instance, no constant", skipped=True)
    worst = 0.0
    for _ in range(pairs):
        p, q = _random_prices(rng, instance.n), _random_prices(rng, instance.n)
        distance = float(np.linalg.norm(p - q))
        if distance == 0:
            continue
        change = float(np.linalg.norm(full_gradient(instance, p).g - full_gradient(instance, q).g))
        worst = max(worst, change / distance)
    return CheckResult("lipschitz", worst <= constants.total, f"max ratio {worst:.4g} vs L = {constants.total:.4g}")


def run_selfcheck(instance: MarketInstance, *, seed: int = 0) -> SelfCheckReport:
    """Invariants first; the oracle checks only run on a valid instance."""
    report = SelfCheckReport()
    report.add(check_invariants(instance))
    if not report.passed:
        return report
    rng = np.random.default_rng(seed)
    report.add(check_gradient(instance, rng))
    report.add(check_normalization(instance, rng))
    report.add(check_unbiasedness(instance, rng))
    report.add(check_lipschitz(instance, rng))
    return report
