"""Shared fixtures for the pricing-dynamics test-suite."""

import numpy as np
import pytest

from pricing_dynamics.market import MarketInstance, SupplierSpec, generate_synthetic


@pytest.fixture
def toy_instance() -> MarketInstance:
    """One supplier and two consumers over three alternatives in two groups."""
    return MarketInstance.build(
        groups=[[0, 1], [2]],
        mu=[0.5, 1.0],
        utilities=[[1.0, 2.0], [1.5, 0.5], [0.8, 1.2]],
        suppliers=[SupplierSpec(gamma=1.0, y_hat=[0.5, 0.2, 0.1])],
    )


@pytest.fixture
def supplier_only_instance() -> MarketInstance:
    """S=1, D=0, ŷ=0: revenue p²/(4(c+Γ)) is minimized at p = 0."""
    return MarketInstance.build(
        groups=[[0]],
        mu=[1.0],
        utilities=np.zeros((1, 0)),
        suppliers=[SupplierSpec(gamma=1.0, y_hat=[0.0])],
    )


@pytest.fixture
def zero_gamma_instance() -> MarketInstance:
    """Two alternatives, one consumer and a Γ=0 supplier with unit cost."""
    return MarketInstance.build(
        groups=[[0], [1]],
        mu=[0.6, 1.0],
        utilities=[[2.0], [3.0]],
        suppliers=[SupplierSpec(gamma=0.0, y_hat=[0.5, 0.5], cost_coeff=1.0)],
    )


@pytest.fixture(scope="session")
def reference_market():
    """Reference experiment instance (seed 17, S=5, D=10, n=20, m=5, Γ=1e-4) and its p0."""
    return generate_synthetic(17, 5, 10, 20, 5, 1e-4)


@pytest.fixture(scope="session")
def reference_instance(reference_market) -> MarketInstance:
    return reference_market[0]


@pytest.fixture
def small_market():
    """Small strongly convex generated instance used by experiment tests."""
    return generate_synthetic(3, 2, 3, 4, 2, 1.0)
