import numpy as np
import pytest

from src.models.discover import function_symmetries
from src.models.dynamics import (
    as_field,
    general_initial_conditions,
    integrated_relative_error,
    linear_field,
    make_spring_mass,
    momentum_slice,
    planar_initial_conditions,
    position_slice,
    simulate,
    stack_pairs,
)
from src.models.errors import DimensionMismatchError, InvalidParameterError, NonFiniteInputError
from src.models.liegroup import particle_rep
from src.models.operators import ActionPair, assemble_lie_tensor, build_inner_product


@pytest.fixture(scope="module")
def system():
    return make_spring_mass(5, seed=0)


class TestSpringMass:
    def test_state_layout(self, system):
        assert system.state_dim == 31
        assert system.state_matrix.shape == (31, 31)
        np.testing.assert_array_equal(system.state_matrix[-1], 0.0)
        assert position_slice(1) == slice(6, 9)
        assert momentum_slice(1) == slice(9, 12)

    def test_stiffness(self, system):
        K = system.stiffness
        np.testing.assert_allclose(K, K.T)
        np.testing.assert_array_equal(np.diag(K), 0.0)
        off = K[~np.eye(5, dtype=bool)]
        assert np.all(off > 0)

    def test_forces_depend_on_differences(self, system):
        A = system.state_matrix
        for i in range(5):
            total = sum(A[momentum_slice(i), position_slice(j)] for j in range(5))
            np.testing.assert_allclose(total, 0.0, atol=1e-12)
            np.testing.assert_array_equal(A[momentum_slice(i), -1], [0.0, 0.0, -1.0])

    def test_same_seed_same_system(self, system):
        np.testing.assert_array_equal(make_spring_mass(5, seed=0).state_matrix, system.state_matrix)
        assert not np.allclose(make_spring_mass(5, seed=1).stiffness, system.stiffness)

    def test_too_few_particles(self):
        with pytest.raises(DimensionMismatchError):
            make_spring_mass(1)

    def test_linear_dictionary_reproduces_the_dynamics(self, system, rng):
        x = rng.standard_normal(31)
        np.testing.assert_allclose(as_field((system.dictionary(), system.coeffs))(x),
                                   system.state_matrix @ x, atol=1e-12)

    def test_true_symmetries(self, se3, system):
        # rotation about gravity plus three translations
        rep = particle_rep(se3, 5)
        pair = ActionPair(rep, rep)
        dictionary = system.dictionary()
        tensor = assemble_lie_tensor(pair, dictionary, build_inner_product(None, 64, 0, m=31))
        report = function_symmetries(tensor, system.coeffs)
        assert report.nullity == 4
        np.testing.assert_allclose(np.abs(report.basis[[1, 2], :]), 0.0, atol=1e-8)


class TestInitialConditions:
    def test_planar_draws_leave_the_plane_empty(self):
        x = planar_initial_conditions(4, 7, "train:0")
        for i in range(4):
            assert x[position_slice(i)][1] == 0.0
            assert x[momentum_slice(i)][1] == 0.0
        assert x[-1] == 1.0

    def test_streams_are_reproducible(self):
        np.testing.assert_array_equal(general_initial_conditions(3, 7, "test:0"),
                                      general_initial_conditions(3, 7, "test:0"))
        assert not np.allclose(general_initial_conditions(3, 7, "test:0"),
                               general_initial_conditions(3, 7, "test:1"))

    def test_fixed_centers(self):
        q0, p0 = np.array([5.0, 0.0, 5.0]), np.zeros(3)
        x = planar_initial_conditions(200, 0, centers=(q0, p0))
        positions = np.array([x[position_slice(i)] for i in range(200)])
        assert np.abs(positions.mean(axis=0) - q0).max() < 0.3


class TestSimulate:
    def test_rk4_oscillator_period(self):
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        run = simulate(linear_field(A), [1.0, 0.0], 2 * np.pi, 2 * np.pi / 1000)
        assert run.count == 1001
        np.testing.assert_allclose(run.states[-1], [1.0, 0.0], atol=1e-8)
        np.testing.assert_allclose(run.derivatives, run.states @ A.T)

    def test_record_every(self):
        run = simulate(linear_field(-np.eye(2)), [1.0, 1.0], 1.0, 0.01, record_every=10)
        np.testing.assert_allclose(run.times, np.arange(11) * 0.1)
        np.testing.assert_allclose(run.states[-1], np.exp(-1.0) * np.ones(2), rtol=1e-8)

    def test_planar_motion_stays_planar(self):
        system = make_spring_mass(3, seed=2)
        run = simulate(system, planar_initial_conditions(3, 2), 2.0, 0.01, record_every=10)
        for i in range(3):
            np.testing.assert_array_equal(run.states[:, position_slice(i)][:, 1], 0.0)
            np.testing.assert_array_equal(run.states[:, momentum_slice(i)][:, 1], 0.0)
        np.testing.assert_array_equal(run.states[:, -1], 1.0)

    def test_homogeneous_coordinate_is_held(self):
        A = np.ones((3, 3))
        run = simulate(linear_field(A), [0.1, 0.1, 1.0], 0.5, 0.01, homogeneous=True)
        np.testing.assert_array_equal(run.states[:, -1], 1.0)
        np.testing.assert_array_equal(run.derivatives[:, -1], 0.0)

    def test_divergence_is_flagged(self):
        reference = simulate(linear_field(np.eye(1)), [1.0], 1.0, 0.01)
        blowup = simulate(linear_field(100.0 * np.eye(1)), [1.0], 10.0, 0.01)
        assert blowup.diverged
        assert blowup.count < 1001
        assert integrated_relative_error(reference, blowup) == float("inf")

    def test_error_of_a_perfect_prediction(self):
        run = simulate(linear_field(-np.eye(2)), [1.0, 2.0], 1.0, 0.01)
        assert integrated_relative_error(run, run) == 0.0

    def test_frame_and_pairs(self):
        runs = [simulate(linear_field(-np.eye(2)), [1.0, k], 0.1, 0.01) for k in range(3)]
        X, Y = stack_pairs(runs)
        assert X.shape == Y.shape == (33, 2)
        frame = runs[0].to_frame()
        assert list(frame.columns) == ["t", "x0", "x1", "dx0", "dx1"]

    def test_bad_arguments(self):
        with pytest.raises(InvalidParameterError):
            simulate(linear_field(np.eye(2)), [1.0, 0.0], 1.0, 0.0)
        with pytest.raises(DimensionMismatchError):
            simulate(lambda x: np.zeros(3), [1.0, 0.0], 1.0, 0.1)
        with pytest.raises(NonFiniteInputError):
            simulate(linear_field(np.eye(2)), [np.nan, 0.0], 1.0, 0.1)
        with pytest.raises(InvalidParameterError):
            as_field(42)
