import numpy as np
import pytest

from declq import DimensionError, InformationPattern, PlantModel, psd_sqrt, stack, validate


class TestPlantModel:
    def test_coerces_vectors_to_columns_and_rows(self, benchmark_plant):
        plant = PlantModel(A=benchmark_plant.A, B=[[0.6, 0.5], [0.0, 1.0]],
                           H=[[1.0, 0.0], [0.0, 1.0]], Q=np.eye(2),
                           R=[1.0, 1.0], x0=[1.0, -1.0])
        assert plant.B[0].shape == (2, 1)
        assert plant.H[0].shape == (1, 2)
        assert plant.R[0].shape == (1, 1)
        np.testing.assert_array_equal(plant.B[0], benchmark_plant.B[0])

    def test_dimension_properties(self, benchmark_plant):
        assert benchmark_plant.n == 2
        assert benchmark_plant.r == 2
        assert benchmark_plant.m_sizes == (1, 1)
        assert benchmark_plant.s_sizes == (1, 1)
        assert benchmark_plant.m_total == 2

    def test_rejects_wrong_b_rows(self):
        with pytest.raises(DimensionError):
            PlantModel(A=np.eye(2), B=[np.ones((3, 1))], H=[np.ones((1, 2))],
                       Q=np.eye(2), R=[np.eye(1)], x0=np.zeros(2))

    def test_rejects_mismatched_agent_lists(self):
        with pytest.raises(DimensionError):
            PlantModel(A=np.eye(2), B=[np.ones((2, 1))],
                       H=[np.ones((1, 2)), np.ones((1, 2))],
                       Q=np.eye(2), R=[np.eye(1)], x0=np.zeros(2))

    def test_rejects_r_not_matching_inputs(self):
        with pytest.raises(DimensionError):
            PlantModel(A=np.eye(2), B=[np.ones((2, 2))], H=[np.ones((1, 2))],
                       Q=np.eye(2), R=[np.eye(1)], x0=np.zeros(2))

    def test_rejects_non_finite(self):
        with pytest.raises(DimensionError):
            PlantModel(A=[[np.nan, 0.0], [0.0, 1.0]], B=[np.ones((2, 1))],
                       H=[np.ones((1, 2))], Q=np.eye(2), R=[np.eye(1)], x0=np.zeros(2))


class TestInformationPattern:
    def test_round_trip_names(self):
        for pattern in InformationPattern:
            assert InformationPattern.from_string(pattern.value) is pattern

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            InformationPattern.from_string("telepathy")

    def test_decentralized_flag(self):
        assert not InformationPattern.STATE_FEEDBACK.is_decentralized
        assert InformationPattern.INPUT_SHARING.is_decentralized
        assert InformationPattern.PRIVATE.is_decentralized


class TestStack:
    def test_single_agent_passthrough(self):
        plant = PlantModel(A=0.5 * np.eye(2), B=[np.array([[1.0], [2.0]])],
                           H=[np.array([[1.0, 0.0]])], Q=np.eye(2),
                           R=[np.array([[3.0]])], x0=np.zeros(2))
        stacked = stack(plant)
        np.testing.assert_array_equal(stacked.Bstack, plant.B[0])
        np.testing.assert_array_equal(stacked.Rblock, plant.R[0])

    def test_benchmark_plant(self, benchmark_plant):
        stacked = stack(benchmark_plant)
        np.testing.assert_array_equal(stacked.Bstack, [[0.6, 0.0], [0.5, 1.0]])
        np.testing.assert_array_equal(stacked.Rblock, np.eye(2))

    def test_three_agents_with_mixed_widths(self):
        rng = np.random.default_rng(3)
        n = 3
        widths = (1, 2, 1)
        B = [rng.standard_normal((n, m)) for m in widths]
        R = [np.diag(rng.uniform(1.0, 2.0, size=m)) for m in widths]
        plant = PlantModel(A=0.5 * np.eye(n), B=B, H=[np.eye(n)[:1]] * 3,
                           Q=np.eye(n), R=R, x0=np.zeros(n))
        stacked = stack(plant)
        assert stacked.Bstack.shape == (n, 4)
        assert stacked.Rblock.shape == (4, 4)
        # blocks appear at offsets 0, 1, 3 and off-blocks are exact zeros
        np.testing.assert_array_equal(stacked.Rblock[0:1, 0:1], R[0])
        np.testing.assert_array_equal(stacked.Rblock[1:3, 1:3], R[1])
        np.testing.assert_array_equal(stacked.Rblock[3:4, 3:4], R[2])
        mask = np.ones((4, 4), dtype=bool)
        mask[0:1, 0:1] = mask[1:3, 1:3] = mask[3:4, 3:4] = False
        assert np.all(stacked.Rblock[mask] == 0.0)

    def test_unstack_round_trip(self):
        rng = np.random.default_rng(5)
        n = 3
        B = [rng.standard_normal((n, m)) for m in (2, 1, 3)]
        plant = PlantModel(A=0.5 * np.eye(n), B=B, H=[np.eye(n)[:1]] * 3,
                           Q=np.eye(n), R=[np.eye(2), np.eye(1), np.eye(3)],
                           x0=np.zeros(n))
        recovered = stack(plant).unstack()
        for original, back in zip(B, recovered):
            np.testing.assert_array_equal(back, original)


class TestValidate:
    def test_benchmark_plant_is_clean(self, benchmark_plant):
        assert validate(benchmark_plant) == []

    def test_validate_is_pure(self, benchmark_plant):
        assert validate(benchmark_plant) == validate(benchmark_plant)

    def test_no_control_authority_flagged(self):
        plant = PlantModel(A=np.eye(2), B=[np.zeros((2, 1)), np.zeros((2, 1))],
                           H=[np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]])],
                           Q=np.eye(2), R=[np.eye(1), np.eye(1)], x0=np.zeros(2))
        checks = {d.check for d in validate(plant)}
        assert "stabilizability" in checks

    def test_unobservable_measurement_flagged(self):
        # observability matrix [[1, 0], [2, 0]] has rank 1
        plant = PlantModel(A=np.diag([2.0, 3.0]),
                           B=[np.ones((2, 1)), np.ones((2, 1))],
                           H=[np.array([[1.0, 0.0]]), np.array([[1.0, 1.0]])],
                           Q=np.eye(2), R=[np.eye(1), np.eye(1)], x0=np.zeros(2))
        flagged = [d for d in validate(plant) if d.check == "measurement_observability"]
        assert len(flagged) == 1
        assert "H[0]" in flagged[0].message

    def test_indefinite_state_weight_flagged(self, benchmark_plant):
        plant = PlantModel(A=benchmark_plant.A, B=benchmark_plant.B, H=benchmark_plant.H,
                           Q=np.diag([1.0, -0.5]), R=benchmark_plant.R, x0=benchmark_plant.x0)
        checks = {d.check for d in validate(plant)}
        assert "state_cost_psd" in checks

    def test_semidefinite_input_weight_flagged(self, benchmark_plant):
        plant = PlantModel(A=benchmark_plant.A, B=benchmark_plant.B, H=benchmark_plant.H,
                           Q=benchmark_plant.Q, R=[np.zeros((1, 1)), np.eye(1)],
                           x0=benchmark_plant.x0)
        checks = {d.check for d in validate(plant)}
        assert "input_cost_pd" in checks

    def test_unobservable_state_cost_flagged(self):
        # Q weighs only the first state of an upper-triangular A whose
        # second mode never shows up in the first coordinate
        plant = PlantModel(A=np.diag([0.5, 0.6]), B=[np.ones((2, 1))],
                           H=[np.array([[1.0, 1.0]])],
                           Q=np.diag([1.0, 0.0]), R=[np.eye(1)], x0=np.zeros(2))
        checks = {d.check for d in validate(plant)}
        assert "state_cost_observability" in checks


class TestPsdSqrt:
    def test_square_root_squares_back(self):
        rng = np.random.default_rng(9)
        C = rng.standard_normal((4, 4))
        Q = C @ C.T
        root = psd_sqrt(Q)
        np.testing.assert_allclose(root @ root, Q, atol=1e-10)
        np.testing.assert_allclose(root, root.T, atol=1e-12)

    def test_clamps_tiny_negative_eigenvalues(self):
        Q = np.diag([1.0, -5e-11])
        root = psd_sqrt(Q)
        assert np.min(np.linalg.eigvalsh(root)) >= 0.0

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            psd_sqrt(np.diag([1.0, -1.0]))
