"""Tests for the reference optimum estimate."""

import logging

import numpy as np
import pytest

from pricing_dynamics.exceptions import NonSmoothInstanceError, ParameterError
from pricing_dynamics.experiments import OptimumEstimate, estimate_optimum
from pricing_dynamics.market import MarketInstance, SupplierSpec, generate_synthetic
from pricing_dynamics.oracles import clearing_residual, potential, tight_lipschitz


class TestEstimateOptimum:
    """Projected GD with the curvature-exact step."""

    def test_supplier_only_optimum_is_zero(self, supplier_only_instance):
        estimate = estimate_optimum(supplier_only_instance)
        assert estimate.converged
        np.testing.assert_array_equal(estimate.p, [0.0])
        assert estimate.f_star == 0.0
        assert estimate.lipschitz == pytest.approx(0.25)

    def test_reference_instance_clears(self, reference_instance):
        estimate = estimate_optimum(reference_instance)
        assert estimate.converged
        assert estimate.clearing_residual <= 1e-6
        assert estimate.clearing_residual == pytest.approx(clearing_residual(reference_instance, estimate.p))
        assert np.all(estimate.p >= 0)
        assert estimate.stop_criterion == "step_norm<=1e-10"

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", [17, 18, 19, 20, 21])
    def test_generated_instances_clear(self, seed):
        instance, _ = generate_synthetic(seed, 5, 10, 20, 5, 1e-4)
        estimate = estimate_optimum(instance)
        assert estimate.converged
        assert clearing_residual(instance, estimate.p) <= 1e-6

    def test_tolerance_refinement_agrees(self, reference_instance):
        coarse = estimate_optimum(reference_instance, 1e-10)
        fine = estimate_optimum(reference_instance, 1e-12)
        assert abs(coarse.f_star - fine.f_star) <= 1e-9

    def test_no_better_random_prices(self, small_market):
        instance, _ = small_market
        estimate = estimate_optimum(instance)
        rng = np.random.default_rng(0)
        for _ in range(200):
            assert potential(instance, rng.uniform(0.0, 5.0, size=instance.n)) >= estimate.f_star - 1e-9

    def test_partial_estimate_at_cap(self, reference_instance, caplog):
        with caplog.at_level(logging.WARNING, logger="pricing_dynamics.experiments.optimum"):
            estimate = estimate_optimum(reference_instance, max_iterations=3)
        assert not estimate.converged
        assert estimate.iterations == 3
        assert estimate.stop_criterion == "max_iterations=3"
        assert "partial" in caplog.text

    def test_zero_gamma_uses_cost_curvature(self, zero_gamma_instance, caplog):
        with caplog.at_level(logging.WARNING, logger="pricing_dynamics.experiments.optimum"):
            estimate = estimate_optimum(zero_gamma_instance)
        assert estimate.converged
        assert estimate.lipschitz == pytest.approx(tight_lipschitz(zero_gamma_instance))
        assert "gamma = 0" in caplog.text

    def test_degenerate_supplier_refused(self):
        instance = MarketInstance.build(
            groups=[[0]],
            mu=[1.0],
            utilities=[[1.0]],
            suppliers=[SupplierSpec(gamma=0.0, y_hat=[1.0], cost_coeff=0.0)],
        )
        with pytest.raises(NonSmoothInstanceError):
            estimate_optimum(instance)

    def test_consumer_only_market_refused(self):
        instance = MarketInstance.build(groups=[[0]], mu=[1.0], utilities=[[1.0]])
        with pytest.raises(ParameterError) as info:
            estimate_optimum(instance, max_iterations=10)
        assert info.value.parameter == "S"

    @pytest.mark.parametrize("kwargs", [{"tol": 0.0}, {"tol": -1.0}, {"max_iterations": 0}])
    def test_invalid_arguments(self, toy_instance, kwargs):
        with pytest.raises(ParameterError):
            estimate_optimum(toy_instance, **kwargs)

    def test_start_point(self, toy_instance):
        a = estimate_optimum(toy_instance, 1e-12)
        b = estimate_optimum(toy_instance, 1e-12, p0=np.full(3, 4.0))
        assert a.f_star == pytest.approx(b.f_star, abs=1e-10)


class TestOptimumEstimatePersistence:
    def test_save_and_load(self, toy_instance, tmp_path):
        estimate = estimate_optimum(toy_instance)
        path = estimate.save(tmp_path / "nested" / "optimum.json")
        loaded = OptimumEstimate.load(path)
        assert loaded == estimate
        np.testing.assert_array_equal(loaded.p, estimate.p)
