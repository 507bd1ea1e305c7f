"""Invariant checks for market instances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..exceptions import InstanceValidationError
from .models import MarketInstance


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    location: str

    def __str__(self) -> str:
        return f"{self.message} at {self.location}"


def validate(instance: MarketInstance) -> List[Violation]:
    """Return every violated invariant; an empty list means the instance is valid."""
    violations: List[Violation] = []
    n = instance.n

    if n < 1:
        violations.append(Violation("no_alternatives", "instance needs n >= 1", "n"))

    seen: dict[int, int] = {}
    for j, group in enumerate(instance.groups):
        if not group:
            violations.append(Violation("empty_group", "group is empty", f"groups[{j}]"))
        for i in group:
            if not 0 <= i < n:
                violations.append(Violation("group_index", "alternative index out of range", f"groups[{j}]: {i}"))
                continue
            if i in seen:
                violations.append(
                    Violation("groups_overlap", "groups not disjoint", f"groups[{seen[i]}] and groups[{j}]: {i}")
                )
            else:
                seen[i] = j
    missing = sorted(set(range(max(n, 0))) - set(seen))
    if missing:
        violations.append(Violation("groups_cover", "groups do not cover all alternatives", f"missing {missing[:10]}"))

    mu = instance.mu
    if mu.shape != (instance.m,):
        violations.append(Violation("mu_shape", f"expected {instance.m} correlation parameters", "mu"))
    for j in np.flatnonzero(~((mu > 0) & (mu <= 1))):
        violations.append(Violation("mu_range", "μ out of (0,1]", f"mu[{j}] = {mu[j]!r}"))

    utilities = instance.utilities
    if utilities.ndim != 2 or utilities.shape[0] != n:
        violations.append(Violation("utility_shape", f"utility matrix must be {n}×D", f"A {utilities.shape}"))
    else:
        bad = np.argwhere(~(np.isfinite(utilities) & (utilities > 0)))
        for i, d in bad:
            where = f"A[{i}][{d}] = {utilities[i, d]!r}"
            violations.append(Violation("utility_positive", "utility must be > 0", where))

    if instance.S + instance.D < 1:
        violations.append(Violation("no_agents", "need S + D >= 1", "suppliers/A"))

    for s, spec in enumerate(instance.suppliers):
        where = f"suppliers[{s}]"
        if not np.isfinite(spec.gamma) or spec.gamma < 0:
            violations.append(Violation("gamma_range", "gamma must be >= 0", f"{where}.gamma = {spec.gamma!r}"))
        if not np.isfinite(spec.cost_coeff) or spec.cost_coeff < 0:
            violations.append(
                Violation("cost_range", "cost coefficient must be >= 0", f"{where}.cost_coeff = {spec.cost_coeff!r}")
            )
        if spec.y_hat.shape != (n,):
            violations.append(Violation("y_hat_shape", f"typical supply must have {n} entries", f"{where}.y_hat"))
        elif np.any(~np.isfinite(spec.y_hat) | (spec.y_hat < 0)):
            violations.append(Violation("y_hat_range", "typical supply must be >= 0", f"{where}.y_hat"))

    if instance.p0 is not None:
        p0 = instance.p0
        if p0.shape != (n,):
            violations.append(Violation("p0_shape", f"initial prices must have {n} entries", "p0"))
        elif np.any(~np.isfinite(p0) | (p0 < 0)):
            violations.append(Violation("p0_range", "initial prices must be >= 0", "p0"))

    return violations


def ensure_valid(instance: MarketInstance, *, source: Optional[str] = None) -> MarketInstance:
    """Raise :class:`InstanceValidationError` unless the instance is valid."""
    violations = validate(instance)
    if violations:
        raise InstanceValidationError(violations, source=source)
    return instance
