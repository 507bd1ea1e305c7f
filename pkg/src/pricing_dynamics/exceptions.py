"""Custom exceptions for pricing-dynamics."""

from __future__ import annotations

from typing import Any, Dict, Optional, Sequence


class PricingError(Exception):
    """Base exception for all pricing-dynamics errors."""

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        cause: Optional[Exception] = None,
    ):
        super().__init__(message)
        self.message = message
        self.details = details or {}
        self.cause = cause


class ParameterError(PricingError, ValueError):
    """Raised when a numeric parameter is outside its admissible range."""

    def __init__(self, parameter: str, value: Any, reason: str):
        super().__init__(
            f"Invalid parameter '{parameter}': {reason}",
            details={"parameter": parameter, "value": str(value)[:100], "reason": reason},
        )
        self.parameter = parameter
        self.value = value
        self.reason = reason


class AgentIndexError(PricingError, IndexError):
    """Raised when a supplier, consumer or agent index is out of range."""

    def __init__(self, kind: str, index: int, count: int):
        super().__init__(
            f"{kind} index {index} out of range [0, {count})",
            details={"kind": kind, "index": index, "count": count},
        )
        self.kind = kind
        self.index = index
        self.count = count


class InstanceParseError(PricingError):
    """Raised when an instance file cannot be parsed."""

    def __init__(
        self,
        path: str,
        reason: str,
        *,
        line: Optional[int] = None,
        field: Optional[str] = None,
        cause: Optional[Exception] = None,
    ):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(
            f"Failed to parse instance file {path}{suffix}: {reason}",
            details={"path": path, "line": line, "field": field, "reason": reason},
            cause=cause,
        )
        self.path = path
        self.line = line
        self.field = field


class InstanceValidationError(PricingError):
    """Raised when a market instance breaks one of its invariants."""

    def __init__(self, violations: Sequence[Any], *, source: Optional[str] = None):
        summary = "; ".join(str(v) for v in violations[:5])
        origin = f" in {source}" if source else ""
        super().__init__(
            f"Instance{origin} violates {len(violations)} invariant(s): {summary}",
            details={"source": source, "violations": [str(v) for v in violations]},
        )
        self.violations = list(violations)


class DegenerateSupplierError(PricingError):
    """Raised when a supplier problem has no bounded maximizer (Γ=0 and zero cost)."""

    def __init__(self, supplier: Optional[int] = None):
        label = f"Supplier {supplier}" if supplier is not None else "Supplier"
        super().__init__(
            f"{label} has gamma = 0 and cost coefficient = 0: revenue is unbounded",
            details={"supplier": supplier},
        )
        self.supplier = supplier


class NonSmoothInstanceError(PricingError):
    """Raised when an operation needs the Lipschitz gradient bound but Γ_s = 0."""

    def __init__(self, operation: str, suppliers: Sequence[int]):
        super().__init__(
            f"'{operation}' needs every gamma > 0 (zero for suppliers {list(suppliers)}); "
            "use the smd dynamic or smooth the instance first",
            details={"operation": operation, "suppliers": list(suppliers)},
        )
        self.operation = operation
        self.suppliers = list(suppliers)


class ExperimentSpecError(PricingError, ValueError):
    """Raised when an experiment specification is inconsistent."""

    def __init__(self, field: str, reason: str):
        super().__init__(
            f"Invalid experiment spec field '{field}': {reason}",
            details={"field": field, "reason": reason},
        )
        self.field = field
        self.reason = reason


class LowerBoundViolationError(PricingError):
    """Raised when a run records an objective below the optimum estimate."""

    def __init__(self, algorithm: str, seed: int, value: float, f_star: float):
        super().__init__(
            f"{algorithm} (seed {seed}) recorded f = {value!r} below f* = {f_star!r}; "
            "the optimum estimate is unreliable",
            details={"algorithm": algorithm, "seed": seed, "value": value, "f_star": f_star},
        )
        self.algorithm = algorithm
        self.seed = seed
        self.value = value
        self.f_star = f_star


class RunFailedError(PricingError):
    """Raised when one or more experiment cells fail."""

    def __init__(self, failures: Dict[str, str]):
        super().__init__(
            f"{len(failures)} run(s) failed: {', '.join(sorted(failures))}",
            details={"failures": dict(failures)},
        )
        self.failures = dict(failures)
