"""Instance (JSON) and price vector (CSV) persistence.

Group indices are 1-based on disk and 0-based in memory.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from ..exceptions import InstanceParseError
from .models import MarketInstance, NestStructure, PriceVector, SupplierSpec, as_prices
from .validation import ensure_valid


class SupplierDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    gamma: float
    y_hat: List[float]
    cost_coeff: float = 1.0


class InstanceDocument(BaseModel):
    """On-disk schema of a market instance."""

    model_config = ConfigDict(extra="forbid")

    n: int
    m: int
    groups: List[List[int]]
    mu: List[float]
    A: List[List[float]]
    suppliers: List[SupplierDocument] = []
    p0: Optional[List[float]] = None

    @classmethod
    def from_instance(cls, instance: MarketInstance) -> "InstanceDocument":
        return cls(
            n=instance.n,
            m=instance.m,
            groups=[[i + 1 for i in group] for group in instance.groups],
            mu=instance.mu.tolist(),
            A=instance.utilities.tolist(),
            suppliers=[
                SupplierDocument(gamma=s.gamma, y_hat=s.y_hat.tolist(), cost_coeff=s.cost_coeff)
                for s in instance.suppliers
            ],
            p0=None if instance.p0 is None else instance.p0.tolist(),
        )

    def to_instance(self, source: str) -> MarketInstance:
        if self.m != len(self.groups):
            raise InstanceParseError(source, f"m = {self.m} but {len(self.groups)} groups given", field="m")
        if len(self.A) != self.n:
            raise InstanceParseError(source, f"A has {len(self.A)} rows, expected n = {self.n}", field="A")
        widths = {len(row) for row in self.A}
        if len(widths) > 1:
            raise InstanceParseError(source, "A rows have different lengths", field="A")
        D = widths.pop() if widths else 0
        for j, group in enumerate(self.groups):
            for k, i in enumerate(group):
                if not 1 <= i <= self.n:
                    message = f"alternative {i} out of range 1..{self.n}"
                    raise InstanceParseError(source, message, field=f"groups.{j}.{k}")
        return MarketInstance(
            n=self.n,
            nests=NestStructure(groups=tuple(tuple(i - 1 for i in g) for g in self.groups), mu=np.asarray(self.mu)),
            utilities=np.asarray(self.A, dtype=np.float64).reshape(self.n, D),
            suppliers=tuple(
                SupplierSpec(gamma=s.gamma, y_hat=s.y_hat, cost_coeff=s.cost_coeff) for s in self.suppliers
            ),
            p0=None if self.p0 is None else np.asarray(self.p0, dtype=np.float64),
        )


def save_instance(instance: MarketInstance, path: str | Path) -> Path:
    """Write an instance as JSON; floats are written with round-trip precision."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    document = InstanceDocument.from_instance(instance)
    target.write_text(json.dumps(document.model_dump(), indent=2) + "\n", encoding="utf-8")
    return target


def load_instance(path: str | Path) -> MarketInstance:
    """Read and validate an instance written by :func:`save_instance`."""
    source = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceParseError(source, str(exc), cause=exc) from exc
    if not text.strip():
        raise InstanceParseError(source, "file is empty", line=1)

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(source, exc.msg, line=exc.lineno, cause=exc) from exc

    try:
        document = InstanceDocument.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise InstanceParseError(source, first["msg"], field=field or None, cause=exc) from exc

    return ensure_valid(document.to_instance(source), source=source)


def save_prices(p: PriceVector, path: str | Path) -> Path:
    """Write a price vector as CSV with 1-based alternative indices."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "price"])
        for i, value in enumerate(np.asarray(p, dtype=np.float64), start=1):
            writer.writerow([i, repr(float(value))])
    return target


def load_prices(path: str | Path) -> PriceVector:
    source = str(path)
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        values = []
        for line, row in enumerate(reader, start=2):
            try:
                values.append(float(row["price"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise InstanceParseError(source, "bad price row", line=line, field="price", cause=exc) from exc
    return as_prices(values)
