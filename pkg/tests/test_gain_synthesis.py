import numpy as np
import pytest

from declq import (InformationPattern, METHOD_GIVEN, METHOD_POLE_PLACEMENT,
                   METHOD_RANDOM_SEARCH, ObservabilityError, PlantModel,
                   build_scheme, certify_gains, solve_dare, spectral_radius,
                   synthesize)

from conftest import BENCHMARK_ERROR_RADIUS, BENCHMARK_L, random_plant


class TestCertifyGains:
    def test_benchmark_gains_certify(self, benchmark_plant, benchmark_solution):
        result = certify_gains(benchmark_plant, benchmark_solution,
                               InformationPattern.PRIVATE, BENCHMARK_L)
        assert result.certified
        assert result.method == METHOD_GIVEN
        assert result.achieved_radius == pytest.approx(BENCHMARK_ERROR_RADIUS, abs=1e-9)

    def test_zero_gains_on_stable_plant_input_sharing(self):
        plant = PlantModel(A=[[0.5, 0.1], [0.0, 0.4]],
                           B=[[[1.0], [0.0]], [[0.0], [1.0]]],
                           H=[[[1.0, 0.0]], [[0.0, 1.0]]],
                           Q=np.eye(2), R=[np.eye(1), np.eye(1)], x0=[1.0, 1.0])
        sol = solve_dare(plant)
        result = certify_gains(plant, sol, InformationPattern.INPUT_SHARING,
                               (np.zeros((2, 1)), np.zeros((2, 1))))
        assert result.certified
        assert result.achieved_radius == pytest.approx(0.5, abs=1e-12)

    def test_benchmark_gains_do_not_certify_input_sharing(self, benchmark_plant, benchmark_solution):
        # the benchmark gains target the coupled private error map; the
        # block-diagonal map they induce is unstable
        result = certify_gains(benchmark_plant, benchmark_solution,
                               InformationPattern.INPUT_SHARING, BENCHMARK_L)
        assert not result.certified
        assert result.achieved_radius > 1.0

    def test_state_feedback_rejected(self, benchmark_plant, benchmark_solution):
        with pytest.raises(ValueError):
            certify_gains(benchmark_plant, benchmark_solution,
                          InformationPattern.STATE_FEEDBACK, BENCHMARK_L)

    def test_certified_result_rebuilds(self, benchmark_plant, benchmark_solution):
        result = certify_gains(benchmark_plant, benchmark_solution,
                               InformationPattern.PRIVATE, BENCHMARK_L, margin=0.02)
        scheme = build_scheme(benchmark_plant, benchmark_solution, result.L,
                              InformationPattern.PRIVATE)
        assert spectral_radius(scheme.error_matrix) < 1.0 - 0.02


class TestSynthesize:
    def test_input_sharing_single_output_always_certifies(self):
        rng = np.random.default_rng(101)
        for seed in range(5):
            plant = random_plant(rng, need_observable_measurements=True)
            sol = solve_dare(plant)
            result = synthesize(plant, sol, InformationPattern.INPUT_SHARING, seed=seed)
            assert result.certified
            assert result.method == METHOD_POLE_PLACEMENT
            # placed poles sit in [0.1, 0.5], well inside the margin
            assert result.achieved_radius <= 0.5 + 1e-6

    def test_private_search_certifies_benchmark(self, benchmark_plant, benchmark_solution):
        result = synthesize(benchmark_plant, benchmark_solution,
                            InformationPattern.PRIVATE, seed=7)
        assert result.certified
        assert result.method == METHOD_RANDOM_SEARCH
        assert result.achieved_radius < 0.98
        rebuilt = build_scheme(benchmark_plant, benchmark_solution, result.L,
                               InformationPattern.PRIVATE)
        assert spectral_radius(rebuilt.error_matrix) == pytest.approx(
            result.achieved_radius, abs=1e-12)

    def test_deterministic_under_seed(self, benchmark_plant, benchmark_solution):
        first = synthesize(benchmark_plant, benchmark_solution, InformationPattern.PRIVATE, seed=11)
        second = synthesize(benchmark_plant, benchmark_solution, InformationPattern.PRIVATE, seed=11)
        assert first.achieved_radius == second.achieved_radius
        assert first.method == second.method
        for a, b in zip(first.L, second.L):
            np.testing.assert_array_equal(a, b)

    def test_different_seeds_may_differ(self, benchmark_plant, benchmark_solution):
        first = synthesize(benchmark_plant, benchmark_solution, InformationPattern.PRIVATE, seed=11)
        second = synthesize(benchmark_plant, benchmark_solution, InformationPattern.PRIVATE, seed=12)
        assert any(not np.array_equal(a, b) for a, b in zip(first.L, second.L))

    def test_unobservable_pair_rejected(self, benchmark_plant):
        plant = PlantModel(A=np.diag([2.0, 3.0]),
                           B=[[[1.0], [1.0]], [[0.0], [1.0]]],
                           H=[[[1.0, 0.0]], [[1.0, 1.0]]],
                           Q=np.eye(2), R=[np.eye(1), np.eye(1)], x0=[1.0, 1.0])
        sol = solve_dare(plant)
        with pytest.raises(ObservabilityError):
            synthesize(plant, sol, InformationPattern.PRIVATE, seed=0)

    def test_unreachable_margin_reports_failure(self, benchmark_plant, benchmark_solution):
        # demanding a spectral radius below 0.02 exhausts the budget; the
        # outcome is a report, not an exception
        result = synthesize(benchmark_plant, benchmark_solution,
                            InformationPattern.PRIVATE, seed=3, margin=0.98)
        assert not result.certified
        assert result.achieved_radius >= 0.02
