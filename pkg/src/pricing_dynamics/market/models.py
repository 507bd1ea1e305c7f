"""Core data model of a marketplace instance.

Arrays are float64 and 0-based. Construction only normalises shapes and
dtypes; invariant checking lives in :mod:`pricing_dynamics.market.validation`
so that broken instances can still be built and reported on.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from ..exceptions import AgentIndexError, ParameterError

FloatArray = npt.NDArray[np.float64]

# A price state p; every dynamic keeps it componentwise nonnegative.
PriceVector = FloatArray


def as_prices(p: Any, n: Optional[int] = None) -> PriceVector:
    """Convert to a float64 price vector, checking shape and nonnegativity."""
    prices = np.asarray(p, dtype=np.float64)
    if prices.ndim != 1:
        raise ParameterError("p", prices.shape, "prices must be a 1-D vector")
    if n is not None and prices.shape[0] != n:
        raise ParameterError("p", prices.shape[0], f"expected {n} prices")
    if not np.all(np.isfinite(prices)) or np.any(prices < 0):
        raise ParameterError("p", prices.min(initial=0.0), "prices must be finite and nonnegative")
    return prices


@dataclass(frozen=True, eq=False)
class SupplierSpec:
    """One supplier: quantity-adjustment weight Γ, typical supply ŷ, cost c·‖y‖²."""

    gamma: float
    y_hat: FloatArray
    cost_coeff: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "cost_coeff", float(self.cost_coeff))
        object.__setattr__(self, "y_hat", np.asarray(self.y_hat, dtype=np.float64).reshape(-1))

    @property
    def smooth(self) -> bool:
        return self.gamma > 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SupplierSpec):
            return NotImplemented
        return (
            self.gamma == other.gamma
            and self.cost_coeff == other.cost_coeff
            and np.array_equal(self.y_hat, other.y_hat)
        )

    def __hash__(self) -> int:
        return hash((self.gamma, self.cost_coeff, self.y_hat.tobytes()))


@dataclass(frozen=True, eq=False)
class NestStructure:
    """Partition of alternatives into groups with correlation parameters μ_j."""

    groups: Tuple[Tuple[int, ...], ...]
    mu: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", tuple(tuple(int(i) for i in g) for g in self.groups))
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=np.float64).reshape(-1))

    @property
    def m(self) -> int:
        return len(self.groups)

    @property
    def n(self) -> int:
        """Number of alternatives covered by the groups."""
        return sum(len(g) for g in self.groups)

    @cached_property
    def group_index(self) -> Tuple[npt.NDArray[np.intp], ...]:
        return tuple(np.asarray(g, dtype=np.intp) for g in self.groups)

    @property
    def min_mu(self) -> float:
        return float(self.mu.min())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NestStructure):
            return NotImplemented
        return self.groups == other.groups and np.array_equal(self.mu, other.mu)

    def __hash__(self) -> int:
        return hash((self.groups, self.mu.tobytes()))


@dataclass(frozen=True, eq=False)
class MarketInstance:
    """Full problem data: nests, consumer utilities A (n×D) and suppliers.

    Immutable after construction and safe to share across concurrent runs.
    """

    n: int
    nests: NestStructure
    utilities: FloatArray
    suppliers: Tuple[SupplierSpec, ...] = field(default_factory=tuple)
    p0: Optional[FloatArray] = None

    def __post_init__(self) -> None:
        utilities = np.asarray(self.utilities, dtype=np.float64)
        if utilities.size == 0:
            utilities = utilities.reshape(self.n, 0)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "utilities", utilities)
        object.__setattr__(self, "suppliers", tuple(self.suppliers))
        if self.p0 is not None:
            object.__setattr__(self, "p0", np.asarray(self.p0, dtype=np.float64).reshape(-1))

    @classmethod
    def build(
        cls,
        groups: Sequence[Sequence[int]],
        mu: Sequence[float],
        utilities: Any,
        suppliers: Sequence[SupplierSpec] = (),
        p0: Optional[Any] = None,
        *,
        n: Optional[int] = None,
    ) -> "MarketInstance":
        """Convenience constructor from plain sequences (0-based groups)."""
        if n is None:
            n = sum(len(g) for g in groups)
        matrix = np.asarray(utilities, dtype=np.float64)
        matrix = np.zeros((n, 0)) if matrix.size == 0 else matrix.reshape(n, -1)
        return cls(
            n=n,
            nests=NestStructure(groups=tuple(tuple(g) for g in groups), mu=np.asarray(mu, dtype=np.float64)),
            utilities=matrix,
            suppliers=tuple(suppliers),
            p0=p0,
        )

    @property
    def m(self) -> int:
        return self.nests.m

    @property
    def groups(self) -> Tuple[Tuple[int, ...], ...]:
        return self.nests.groups

    @property
    def mu(self) -> FloatArray:
        return self.nests.mu

    @property
    def S(self) -> int:
        return len(self.suppliers)

    @property
    def D(self) -> int:
        return int(self.utilities.shape[1]) if self.utilities.ndim == 2 else 0

    @property
    def agents(self) -> int:
        return self.S + self.D

    @property
    def smooth(self) -> bool:
        return all(s.smooth for s in self.suppliers)

    @property
    def zero_gamma_suppliers(self) -> Tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.suppliers) if not s.smooth)

    def consumer_utilities(self, d: int) -> FloatArray:
        if not 0 <= d < self.D:
            raise AgentIndexError("consumer", d, self.D)
        return self.utilities[:, d]

    def supplier(self, s: int) -> SupplierSpec:
        if not 0 <= s < self.S:
            raise AgentIndexError("supplier", s, self.S)
        return self.suppliers[s]

    def with_suppliers(self, suppliers: Sequence[SupplierSpec]) -> "MarketInstance":
        return replace(self, suppliers=tuple(suppliers))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MarketInstance):
            return NotImplemented
        if (self.p0 is None) != (other.p0 is None):
            return False
        return (
            self.n == other.n
            and self.nests == other.nests
            and self.utilities.shape == other.utilities.shape
            and np.array_equal(self.utilities, other.utilities)
            and self.suppliers == other.suppliers
            and (self.p0 is None or np.array_equal(self.p0, other.p0))
        )

    def __hash__(self) -> int:
        return hash((self.n, self.nests, self.utilities.tobytes(), self.suppliers))
