"""Tests for the price-update dynamics and their traces."""

import numpy as np
import pytest
from pydantic import ValidationError

from pricing_dynamics.dynamics import (
    TRACE_COLUMNS,
    AdaGradState,
    Algorithm,
    AveragingState,
    DynamicsConfig,
    TraceRecorder,
    decaying_step,
    initial_prices,
    read_trace_csv,
    run_adagrad,
    run_agd,
    run_dynamics,
    run_gd,
    run_sgd,
    run_sgd_online,
    run_smd,
    step_project,
)
from pricing_dynamics.exceptions import NonSmoothInstanceError, ParameterError
from pricing_dynamics.experiments import estimate_optimum, estimate_smd_bounds, loglog_slope, smd_bound
from pricing_dynamics.market import MarketInstance, NestStructure, SupplierSpec, generate_synthetic
from pricing_dynamics.oracles import (
    FiniteConsumerSampler,
    FiniteSupplierSampler,
    OracleKind,
    PopulationModel,
    lipschitz_constants,
    potential,
)


def _config(algorithm, iterations, **overrides) -> DynamicsConfig:
    return DynamicsConfig(algorithm=algorithm, iterations=iterations, record_wall_time=False, **overrides)


class TestStepProject:
    """max{0, p - step·g}."""

    def test_clips_at_zero(self):
        np.testing.assert_array_equal(step_project(np.array([1.0]), np.array([2.0]), 1.0), [0.0])

    def test_zero_gradient(self):
        p = np.array([0.3, 1.7])
        np.testing.assert_array_equal(step_project(p, np.zeros(2), 0.9), p)

    def test_negative_gradient_raises_price(self):
        np.testing.assert_array_equal(step_project(np.array([0.0]), np.array([-1.0]), 0.5), [0.5])

    def test_first_sgd_step(self):
        p1 = step_project(np.array([1.0, 1.0]), np.array([2.0, -1.0]), decaying_step(1.0, 0))
        np.testing.assert_array_equal(p1, [0.0, 2.0])

    def test_vector_step(self):
        np.testing.assert_allclose(step_project(np.ones(2), np.ones(2), np.array([0.5, 2.0])), [0.5, 0.0])

    def test_negative_step(self):
        with pytest.raises(ParameterError):
            step_project(np.ones(1), np.ones(1), -0.1)

    def test_decaying_step(self):
        assert decaying_step(2.0, 3) == pytest.approx(1.0)


class TestAdaGradState:
    def test_scalar_accumulation(self):
        state = AdaGradState(2, eta=1.0, epsilon_div=0.0)
        assert state.step(np.array([3.0, 4.0])) == pytest.approx(0.2)
        assert state.H == 25.0

    def test_steps_nonincreasing(self):
        state = AdaGradState(3, eta=0.7, epsilon_div=1e-8)
        rng = np.random.default_rng(0)
        steps = [state.step(rng.normal(size=3)) for _ in range(50)]
        assert all(a >= b for a, b in zip(steps, steps[1:]))

    def test_zero_gradient_keeps_prices(self):
        state = AdaGradState(2, eta=1.0, epsilon_div=1e-8)
        p = np.array([0.4, 0.9])
        for _ in range(5):
            p = step_project(p, np.zeros(2), state.step(np.zeros(2)))
        np.testing.assert_array_equal(p, [0.4, 0.9])

    def test_zero_denominator_gives_zero_step(self):
        assert AdaGradState(2, eta=1.0, epsilon_div=0.0).step(np.zeros(2)) == 0.0

    def test_diagonal(self):
        state = AdaGradState(2, eta=1.0, epsilon_div=0.0, diagonal=True)
        np.testing.assert_allclose(state.step(np.array([3.0, 0.0])), [1 / 3, 0.0])
        np.testing.assert_allclose(state.H, [9.0, 0.0])


class TestDynamicsConfig:
    def test_full_oracle_rejected_for_stochastic(self):
        with pytest.raises(ValidationError):
            DynamicsConfig(algorithm="sgd", iterations=10, oracle_kind=OracleKind.FULL)

    def test_full_oracle_allowed_for_gd(self):
        assert DynamicsConfig(algorithm="gd", iterations=10, oracle_kind="full").oracle_kind is OracleKind.FULL

    @pytest.mark.parametrize("field, value", [("iterations", 0), ("C", 0.0), ("beta", 1.0), ("sparse_stride", 0)])
    def test_ranges(self, field, value):
        data = {"algorithm": "sgd", "iterations": 10, field: value}
        with pytest.raises(ValidationError):
            DynamicsConfig(**data)

    def test_unknown_field(self):
        with pytest.raises(ValidationError):
            DynamicsConfig(algorithm="sgd", iterations=10, momentum=0.9)

    def test_smd_step_constant(self):
        assert DynamicsConfig(algorithm="smd", iterations=1, C=2.0, R=3.0, M=4.0).smd_step_constant == 1.5

    def test_algorithm_flags(self):
        assert Algorithm.SGD_ONLINE.stochastic
        assert not Algorithm.AGD.stochastic
        assert Algorithm.GD.needs_smooth
        assert not Algorithm.SMD.needs_smooth


class TestTraceRecorder:
    def test_stride(self):
        recorder = TraceRecorder(evaluate=lambda p: 0.0, iterations=12, dense_until=3, sparse_stride=5)
        assert [t for t in range(1, 13) if recorder.due(t)] == [1, 2, 3, 5, 10, 12]

    def test_subopt_and_wall_time(self):
        recorder = TraceRecorder(evaluate=lambda p: float(p.sum()), iterations=1, f_star=1.0, record_wall_time=False)
        record = recorder.record(1, 7, np.array([2.0, 0.5]))
        assert record.subopt == pytest.approx(1.5)
        assert record.elapsed_s == 0.0
        assert record.oracle_calls == 7

    def test_averaging_state(self):
        state = AveragingState.start(2)
        with pytest.raises(ValueError):
            state.average
        state.update(np.array([1.0, 2.0]))
        state.update(np.array([3.0, 0.0]))
        np.testing.assert_array_equal(state.average, [2.0, 1.0])


class TestStochasticDynamics:
    """SGD, AdaGrad and SMD on a finite market."""

    @pytest.mark.parametrize("runner, algorithm", [(run_sgd, "sgd"), (run_adagrad, "adagrad")])
    def test_single_iteration_average(self, toy_instance, runner, algorithm):
        trace = runner(toy_instance, _config(algorithm, 1, keep_trajectory=True))
        np.testing.assert_array_equal(trace.p_final, trace.trajectory[0])
        np.testing.assert_array_equal(trace.p_final, trace.p_last)

    def test_call_accounting_and_records(self, reference_instance):
        trace = run_sgd(reference_instance, _config("sgd", 50, dense_until=10, sparse_stride=7))
        assert trace.oracle_calls == 50
        assert [r.iteration for r in trace.records] == list(range(1, 11)) + [14, 21, 28, 35, 42, 49, 50]
        assert [r.oracle_calls for r in trace.records] == [r.iteration for r in trace.records]
        assert trace.final.oracle_calls == 50

    def test_average_matches_trajectory(self, reference_instance):
        trace = run_adagrad(reference_instance, _config("adagrad", 300, keep_trajectory=True))
        np.testing.assert_allclose(trace.p_average, trace.trajectory.mean(axis=0), rtol=1e-12)
        assert trace.records[-1].f == pytest.approx(potential(reference_instance, trace.p_average))

    @pytest.mark.parametrize("algorithm", ["sgd", "adagrad", "smd"])
    def test_iterates_stay_nonnegative(self, reference_instance, algorithm):
        config = _config(algorithm, 200, C=5.0, R=4.0, M=1.0, keep_trajectory=True)
        trace = run_dynamics(reference_instance, config)
        assert np.all(trace.trajectory >= 0.0)
        assert np.all(trace.p_average >= 0.0)

    def test_determinism(self, reference_instance, tmp_path):
        config = _config("sgd", 500, seed=4)
        first = run_sgd(reference_instance, config).to_csv(tmp_path / "a.csv")
        second = run_sgd(reference_instance, config).to_csv(tmp_path / "b.csv")
        assert first.read_bytes() == second.read_bytes()

    def test_seeds_differ(self, reference_instance):
        a = run_sgd(reference_instance, _config("sgd", 100, seed=1))
        b = run_sgd(reference_instance, _config("sgd", 100, seed=2))
        assert not np.array_equal(a.p_last, b.p_last)

    def test_smd_aliases_sgd(self, reference_instance):
        smd = run_smd(reference_instance, _config("smd", 300, C=1.0, R=2.0, M=4.0, seed=9))
        sgd = run_sgd(reference_instance, _config("sgd", 300, C=0.5, seed=9))
        np.testing.assert_array_equal(smd.p_average, sgd.p_average)
        assert [r.f for r in smd.records] == [r.f for r in sgd.records]

    def test_smd_requires_bounds(self, toy_instance):
        with pytest.raises(ParameterError):
            run_smd(toy_instance, _config("smd", 10, R=1.0))

    def test_smd_runs_without_gamma(self, zero_gamma_instance):
        trace = run_smd(zero_gamma_instance, _config("smd", 100, R=2.0, M=2.0))
        assert trace.oracle_calls == 100
        assert trace.algorithm == "smd"

    @pytest.mark.slow
    def test_smd_within_envelope_without_gamma(self):
        instance, p0 = generate_synthetic(17, 5, 10, 20, 5, 0.0)
        f_star = estimate_optimum(instance).f_star
        R, M = estimate_smd_bounds(instance, p0)
        N = 10_000
        finals = [
            run_smd(
                instance, _config("smd", N, R=R, M=M, seed=seed, dense_until=0, sparse_stride=N), p0=p0, f_star=f_star
            ).final.subopt
            for seed in range(10)
        ]
        median = float(np.median(finals))
        assert -1e-8 <= median <= smd_bound(1.0, R, M, N, scale=instance.agents)

    def test_exact_agent_oracle_kind(self, toy_instance):
        trace = run_sgd(toy_instance, _config("sgd", 20, oracle_kind="exact-agent"))
        assert trace.oracle_calls == 20

    def test_gradient_statistics(self, toy_instance):
        trace = run_sgd(toy_instance, _config("sgd", 40))
        assert trace.max_grad_norm > 0
        assert trace.grad_square_sums.shape == (3,)
        assert trace.grad_square_sums.sum() <= 40 * trace.max_grad_norm**2 + 1e-12

    def test_trace_csv(self, toy_instance, tmp_path):
        trace = run_sgd(toy_instance, _config("sgd", 5))
        path = trace.to_csv(tmp_path / "trace.csv")
        assert path.read_text().splitlines()[0] == ",".join(TRACE_COLUMNS)
        records = read_trace_csv(path)
        assert [r.f for r in records] == [r.f for r in trace.records]
        assert all(r.subopt is None for r in records)
        assert "nan" in path.read_text()

    def test_explicit_start(self, toy_instance):
        assert initial_prices(toy_instance).tolist() == [1.0, 1.0, 1.0]
        with pytest.raises(ParameterError):
            initial_prices(toy_instance, np.array([1.0, -1.0, 0.0]))
        trace = run_sgd(toy_instance, _config("sgd", 1, keep_trajectory=True), p0=np.zeros(3))
        assert trace.trajectory.shape == (1, 3)

    @pytest.mark.slow
    def test_sgd_rate_shape(self, reference_instance):
        """Median suboptimality over seeds decays at least like N^(-1/4) and no faster than N^(-2)."""
        f_star = estimate_optimum(reference_instance).f_star
        budgets = [100, 1_000, 10_000]
        medians = []
        for N in budgets:
            finals = [
                run_sgd(reference_instance, _config("sgd", N, seed=seed, dense_until=0, sparse_stride=N), f_star=f_star)
                .final.subopt
                for seed in range(10)
            ]
            medians.append(float(np.median(finals)))
        assert medians[0] > medians[1] > medians[2]
        assert -2.0 <= loglog_slope(budgets, medians) <= -0.25


class TestOnlineDynamics:
    """SGD against the infinite-population oracle."""

    def test_clearing_price_of_symmetric_market(self):
        """β = 0.5, one alternative, Γ = 1, ŷ = 0: p/4 = 1 at p = 4."""
        model = PopulationModel(
            beta=0.5,
            nests=NestStructure(groups=((0,),), mu=np.array([1.0])),
            supplier_sampler=FiniteSupplierSampler((SupplierSpec(gamma=1.0, y_hat=[0.0]),)),
            consumer_sampler=FiniteConsumerSampler(np.array([[1.0]])),
        )
        config = _config("sgd-online", 20_000, seed=3, dense_until=0, sparse_stride=5_000)
        trace = run_sgd_online(model, config)
        assert trace.oracle_calls == 20_000
        assert trace.p_final[0] == pytest.approx(4.0, abs=0.3)

    def test_beta_override(self):
        model = PopulationModel.uniform_box(4, 2, gamma=1.0, beta=0.5)
        config = _config("sgd-online", 2_000, beta=0.9, seed=0, dense_until=0, sparse_stride=1_000)
        heavy = run_sgd_online(model, config)
        light = run_sgd_online(model, config.model_copy(update={"beta": 0.1}))
        # more supplier observations push prices down
        assert heavy.p_final.mean() < light.p_final.mean()

    def test_default_population_reports_instance_f(self, toy_instance):
        trace = run_dynamics(toy_instance, _config("sgd-online", 30))
        assert trace.algorithm == "sgd-online"
        assert trace.oracle_calls == 30
        assert trace.final.f == pytest.approx(potential(toy_instance, trace.p_final))
        assert [r.oracle_calls for r in trace.records] == list(range(1, 31))

    def test_finite_mixture_matches_sampled_sgd_in_expectation(self, toy_instance):
        """Same expected update: the averaged outputs agree across many seeds."""
        online = [run_dynamics(toy_instance, _config("sgd-online", 200, seed=s)).p_final for s in range(100)]
        finite = [run_sgd(toy_instance, _config("sgd", 200, seed=s)).p_final for s in range(100)]
        np.testing.assert_allclose(np.mean(online, axis=0), np.mean(finite, axis=0), atol=0.15)

    def test_explicit_start_length(self):
        model = PopulationModel.uniform_box(4, 2, gamma=1.0, beta=0.5)
        with pytest.raises(ParameterError):
            run_sgd_online(model, _config("sgd-online", 5), p0=np.ones(3))


class TestDeterministicDynamics:
    """Projected GD and AGD with step 1/L."""

    def test_gd_on_supplier_toy(self, supplier_only_instance):
        trace = run_gd(supplier_only_instance, _config("gd", 100))
        assert trace.oracle_calls == 100
        assert trace.p_last[0] < 1e-10
        assert trace.converged is None

    def test_gd_monotone(self, reference_market):
        instance, p0 = reference_market
        smooth_instance = instance.with_suppliers(
            [SupplierSpec(gamma=1.0, y_hat=s.y_hat, cost_coeff=s.cost_coeff) for s in instance.suppliers]
        )
        trace = run_gd(smooth_instance, _config("gd", 200), p0=p0)
        values = [r.f for r in trace.records]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
        assert trace.oracle_calls == 200 * instance.agents

    def test_gd_records_last_iterate(self, toy_instance):
        trace = run_gd(toy_instance, _config("gd", 5, keep_trajectory=True))
        assert trace.final.f == pytest.approx(potential(toy_instance, trace.trajectory[-1]))
        assert [r.oracle_calls for r in trace.records] == [3, 6, 9, 12, 15]

    def test_gd_tolerance_stop(self, supplier_only_instance):
        trace = run_gd(supplier_only_instance, _config("gd", 1_000, tol=1e-3))
        assert trace.converged is True
        assert trace.iterations < 1_000
        assert trace.final.iteration == trace.iterations
        assert trace.oracle_calls == trace.iterations

    @pytest.mark.parametrize("runner", [run_gd, run_agd])
    def test_refuses_zero_gamma(self, zero_gamma_instance, runner):
        with pytest.raises(NonSmoothInstanceError) as info:
            runner(zero_gamma_instance, _config("gd", 5))
        assert "smd" in str(info.value)

    def test_agd_converges_on_toy(self, supplier_only_instance):
        trace = run_agd(supplier_only_instance, _config("agd", 200, keep_trajectory=True))
        assert trace.oracle_calls == 200
        assert np.all(trace.trajectory >= 0)
        # f* = 0 at p* = 0, L = 1 and ‖p0 - p*‖ = 1
        assert potential(supplier_only_instance, trace.p_last) <= 2.0 / 201**2

    def test_agd_approaches_optimum(self, toy_instance):
        optimum = estimate_optimum(toy_instance)
        N = 2_000
        trace = run_agd(toy_instance, _config("agd", N), f_star=optimum.f_star)
        L = lipschitz_constants(toy_instance).total
        bound = 2 * L * float(np.sum((initial_prices(toy_instance) - optimum.p) ** 2)) / (N + 1) ** 2
        assert trace.final.subopt <= bound
        assert min(r.subopt for r in trace.records) >= -1e-9
