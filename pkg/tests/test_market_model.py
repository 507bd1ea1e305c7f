"""Tests for the market data model, invariant checks and the synthetic generator."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pricing_dynamics.exceptions import AgentIndexError, InstanceValidationError, ParameterError
from pricing_dynamics.market import (
    MarketInstance,
    SupplierSpec,
    as_prices,
    contiguous_groups,
    ensure_valid,
    generate_synthetic,
    validate,
)


def _codes(instance: MarketInstance) -> set[str]:
    return {v.code for v in validate(instance)}


class TestValidate:
    """Every broken invariant is reported with its location."""

    def test_valid_toy(self, toy_instance):
        assert validate(toy_instance) == []

    def test_reference_instance_is_valid(self, reference_instance):
        assert validate(reference_instance) == []
        assert reference_instance.S == 5
        assert reference_instance.D == 10
        assert reference_instance.n == 20
        assert reference_instance.m == 5

    def test_overlapping_groups(self):
        instance = MarketInstance.build(groups=[[0, 1], [1, 2]], mu=[0.5, 0.5], utilities=np.ones((3, 1)), n=3)

        violations = validate(instance)

        overlap = [v for v in violations if v.code == "groups_overlap"]
        assert len(overlap) == 1
        assert overlap[0].message == "groups not disjoint"
        assert "groups[0] and groups[1]" in overlap[0].location

    def test_mu_out_of_range(self):
        instance = MarketInstance.build(groups=[[0], [1]], mu=[1.5, 0.5], utilities=np.ones((2, 1)))

        violations = [v for v in validate(instance) if v.code == "mu_range"]

        assert len(violations) == 1
        assert violations[0].message == "μ out of (0,1]"
        assert violations[0].location.startswith("mu[0]")

    def test_uncovered_alternative(self):
        instance = MarketInstance.build(groups=[[0]], mu=[1.0], utilities=np.ones((2, 1)), n=2)
        assert "groups_cover" in _codes(instance)

    def test_nonpositive_utility(self):
        instance = MarketInstance.build(groups=[[0, 1]], mu=[1.0], utilities=[[1.0], [-0.5]])
        assert "utility_positive" in _codes(instance)

    def test_every_utility_violation_reported(self):
        instance = MarketInstance.build(groups=[list(range(12))], mu=[1.0], utilities=-np.ones((12, 2)))
        violations = [v for v in validate(instance) if v.code == "utility_positive"]
        assert len(violations) == 24
        assert violations[-1].location.startswith("A[11][1]")

    def test_negative_gamma_and_supply(self):
        instance = MarketInstance.build(
            groups=[[0]],
            mu=[1.0],
            utilities=[[1.0]],
            suppliers=[SupplierSpec(gamma=-1.0, y_hat=[-0.1])],
        )
        assert {"gamma_range", "y_hat_range"} <= _codes(instance)

    def test_no_agents(self):
        instance = MarketInstance.build(groups=[[0]], mu=[1.0], utilities=np.zeros((1, 0)))
        assert "no_agents" in _codes(instance)

    def test_ensure_valid_raises(self):
        instance = MarketInstance.build(groups=[[0], [1]], mu=[0.0, 1.0], utilities=np.ones((2, 1)))
        with pytest.raises(InstanceValidationError) as info:
            ensure_valid(instance, source="inline")
        assert "in inline" in str(info.value)
        assert info.value.violations


class TestMarketInstance:
    """Accessors of the immutable instance."""

    def test_agent_accessors(self, toy_instance):
        assert toy_instance.agents == 3
        assert toy_instance.smooth
        assert toy_instance.zero_gamma_suppliers == ()
        np.testing.assert_array_equal(toy_instance.consumer_utilities(1), [2.0, 0.5, 1.2])

    def test_consumer_index_error(self, toy_instance):
        with pytest.raises(AgentIndexError):
            toy_instance.consumer_utilities(2)

    def test_supplier_index_error(self, toy_instance):
        with pytest.raises(AgentIndexError):
            toy_instance.supplier(1)

    def test_zero_gamma_detection(self, zero_gamma_instance):
        assert not zero_gamma_instance.smooth
        assert zero_gamma_instance.zero_gamma_suppliers == (0,)

    def test_as_prices_rejects_negative(self):
        with pytest.raises(ParameterError):
            as_prices([1.0, -0.1])

    def test_as_prices_checks_length(self):
        with pytest.raises(ParameterError):
            as_prices([1.0, 2.0], n=3)


class TestGenerateSynthetic:
    """The generator is a pure function of its arguments."""

    def test_contiguous_groups(self):
        assert contiguous_groups(20, 5) == tuple(tuple(range(4 * j, 4 * j + 4)) for j in range(5))
        assert [len(g) for g in contiguous_groups(7, 3)] == [3, 2, 2]

    def test_reference_setting(self, reference_market):
        instance, p0 = reference_market
        assert all(s.gamma == 1e-4 for s in instance.suppliers)
        assert all(s.cost_coeff == 1.0 for s in instance.suppliers)
        assert p0.max() == 1.0
        assert np.all(p0 > 0)
        np.testing.assert_array_equal(instance.p0, p0)

    def test_draw_ranges(self, reference_instance):
        y_hats = np.stack([s.y_hat for s in reference_instance.suppliers])
        assert y_hats.min() >= 0.01 and y_hats.max() <= 2.0
        assert reference_instance.mu.min() >= 0.1 and reference_instance.mu.max() <= 1.0
        assert reference_instance.utilities.min() >= 0.01 and reference_instance.utilities.max() <= 5.0

    def test_same_seed_same_instance(self):
        first, p_first = generate_synthetic(17, 5, 10, 20, 5, 1e-4)
        second, p_second = generate_synthetic(17, 5, 10, 20, 5, 1e-4)
        assert first == second
        np.testing.assert_array_equal(p_first, p_second)

    def test_different_seed_differs(self):
        first, _ = generate_synthetic(1, 2, 2, 4, 2, 1.0)
        second, _ = generate_synthetic(2, 2, 2, 4, 2, 1.0)
        assert first != second

    @pytest.mark.parametrize(
        "args",
        [(0, 1, 1, 2, 3, 1.0), (0, 1, 1, 2, 0, 1.0), (0, 0, 0, 2, 1, 1.0), (0, 1, 1, 2, 1, -1.0)],
    )
    def test_invalid_arguments(self, args):
        with pytest.raises(ParameterError):
            generate_synthetic(*args)

    @settings(max_examples=100, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=2**31),
        m=st.integers(min_value=1, max_value=6),
        extra=st.integers(min_value=0, max_value=10),
    )
    def test_partition_property(self, seed, m, extra):
        instance, _ = generate_synthetic(seed, 1, 1, m + extra, m, 0.5)
        flat = sorted(i for group in instance.groups for i in group)
        assert flat == list(range(instance.n))
        assert validate(instance) == []
