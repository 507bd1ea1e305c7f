"""Market data model: instances, validation, synthetic generation and storage."""

from __future__ import annotations

from .generator import contiguous_groups, generate_synthetic
from .models import MarketInstance, NestStructure, PriceVector, SupplierSpec, as_prices
from .storage import InstanceDocument, load_instance, load_prices, save_instance, save_prices
from .validation import Violation, ensure_valid, validate

__all__ = [
    "MarketInstance",
    "NestStructure",
    "PriceVector",
    "SupplierSpec",
    "as_prices",
    "contiguous_groups",
    "generate_synthetic",
    "InstanceDocument",
    "load_instance",
    "save_instance",
    "load_prices",
    "save_prices",
    "Violation",
    "validate",
    "ensure_valid",
]
