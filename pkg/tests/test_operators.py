from math import comb

import numpy as np
import pytest

from src.models.errors import (
    DimensionMismatchError,
    GroupMismatchError,
    InsufficientSamplesError,
    RepresentationError,
    SingularGramError,
)
from src.models.fnspace import PolynomialDictionary, evaluate_model, named_dictionary
from src.models.liegroup import bracket, exp_map, make_group, standard_rep, trivial_rep
from src.models.operators import (
    ActionPair,
    LieOperatorTensor,
    assemble_lie_tensor,
    build_inner_product,
    certified_sample_count,
    default_sample_count,
    finite_transform_eval,
    generator_vector,
    inner_product_convergence,
    lie_derivative_eval,
    lie_derivative_matrix,
)


def _invariant_pair(group):
    return ActionPair(standard_rep(group), trivial_rep(group))


def _x1(dictionary):
    c = np.zeros(dictionary.size)
    c[dictionary.index_of((1, 0))] = 1.0
    return c


class TestActionPair:
    def test_output_action_must_be_linear(self, se2):
        with pytest.raises(RepresentationError):
            ActionPair(standard_rep(se2), standard_rep(se2))

    def test_groups_must_agree(self, so2, so3):
        with pytest.raises(GroupMismatchError):
            ActionPair(standard_rep(so2), trivial_rep(so3))

    def test_dictionary_dimensions_are_checked(self, so2):
        with pytest.raises(DimensionMismatchError):
            _invariant_pair(so2).check(PolynomialDictionary(3, 1, 2))

    def test_pure_translation_detection(self, se2):
        t2 = make_group("T", 2)
        assert _invariant_pair(t2).is_pure_translation()
        assert not _invariant_pair(se2).is_pure_translation()


class TestLieDerivative:
    def test_zero_generator(self, so3, rng):
        dictionary = PolynomialDictionary(3, 1, 2)
        out = lie_derivative_eval(_invariant_pair(so3), dictionary, rng.standard_normal(dictionary.size),
                                  so3.element(np.zeros(3)), rng.standard_normal((4, 3)))
        np.testing.assert_array_equal(out, 0.0)

    def test_rotation_generator_is_tangent_to_circle(self, so2):
        # phi(xi) = [[0, -1], [1, 0]]
        xi = so2.element([-np.sqrt(2.0)])
        np.testing.assert_allclose(generator_vector(_invariant_pair(so2), xi, np.array([1.0, 0.0])),
                                   [0.0, -1.0], atol=1e-15)

    def test_translation_generator_is_constant(self, se2, rng):
        x = rng.standard_normal((5, 2))
        v = generator_vector(_invariant_pair(se2), se2.basis_element(2), x)
        np.testing.assert_allclose(v, np.tile([0.0, -1.0], (5, 1)))

    def test_squared_norm_is_rotation_invariant(self, so3, rng):
        dictionary = PolynomialDictionary(3, 1, 2)
        c = np.zeros(dictionary.size)
        for alpha in [(2, 0, 0), (0, 2, 0), (0, 0, 2)]:
            c[dictionary.index_of(alpha)] = 1.0
        pair = _invariant_pair(so3)
        x = rng.standard_normal((6, 3))
        for k in range(3):
            np.testing.assert_allclose(lie_derivative_eval(pair, dictionary, c, so3.basis_element(k), x),
                                       0.0, atol=1e-14)
        g = so3.random_element(rng)
        np.testing.assert_allclose(finite_transform_eval(pair, dictionary, c, g, x),
                                   dictionary.model_values(c, x), atol=1e-12)

    def test_rotating_a_coordinate(self, so2, rng):
        dictionary = PolynomialDictionary(2, 1, 1)
        x = rng.standard_normal((5, 2))
        out = lie_derivative_eval(_invariant_pair(so2), dictionary, _x1(dictionary),
                                  so2.element([-np.sqrt(2.0)]), x)
        np.testing.assert_allclose(out[:, 0], x[:, 1], atol=1e-14)

    def test_linear_map_gives_commutator(self, so3, rng):
        dictionary = PolynomialDictionary(3, 3, 1, min_degree=1)
        A = rng.standard_normal((3, 3))
        rep = standard_rep(so3)
        xi = so3.random_algebra_element(rng)
        x = rng.standard_normal((4, 3))
        phi = xi.matrix
        out = lie_derivative_eval(ActionPair(rep, rep), dictionary, A.ravel(), xi, x)
        np.testing.assert_allclose(out, x @ (phi @ A - A @ phi).T, atol=1e-13)

    def test_linear_in_the_generator(self, se3, rng):
        dictionary = PolynomialDictionary(3, 1, 3)
        pair = _invariant_pair(se3)
        c = rng.standard_normal(dictionary.size)
        xi, eta = se3.random_algebra_element(rng), se3.random_algebra_element(rng)
        x = rng.standard_normal((5, 3))
        combined = lie_derivative_eval(pair, dictionary, c, 2.0 * xi + (-3.0) * eta, x)
        separate = (2.0 * lie_derivative_eval(pair, dictionary, c, xi, x)
                    - 3.0 * lie_derivative_eval(pair, dictionary, c, eta, x))
        np.testing.assert_allclose(combined, separate, atol=1e-12)

    @pytest.mark.parametrize("case", ["so2-vector", "se2-scalar"])
    def test_matches_derivative_of_finite_transform(self, case, so2, se2, rng):
        if case == "so2-vector":
            pair = ActionPair(standard_rep(so2), standard_rep(so2))
            dictionary = PolynomialDictionary(2, 2, 2)
            xi = so2.random_algebra_element(rng)
        else:
            pair = _invariant_pair(se2)
            dictionary = PolynomialDictionary(2, 1, 3)
            xi = se2.random_algebra_element(rng)
        c = rng.standard_normal(dictionary.size)
        x = rng.uniform(-1.0, 1.0, (6, 2))
        h = 1e-5
        forward = finite_transform_eval(pair, dictionary, c, exp_map(xi, h), x)
        backward = finite_transform_eval(pair, dictionary, c, exp_map(xi, -h), x)
        np.testing.assert_allclose((forward - backward) / (2 * h),
                                   lie_derivative_eval(pair, dictionary, c, xi, x), atol=1e-6)

    def test_first_order_error_is_quadratic(self, se2, rng):
        pair = _invariant_pair(se2)
        dictionary = PolynomialDictionary(2, 1, 3)
        c = rng.standard_normal(dictionary.size)
        xi = se2.random_algebra_element(rng)
        x = rng.uniform(-1.0, 1.0, (8, 2))
        F = evaluate_model(dictionary, c, x)
        LF = lie_derivative_eval(pair, dictionary, c, xi, x)
        ts = np.array([1e-1, 1e-2, 1e-3, 1e-4])
        residuals = [np.linalg.norm(finite_transform_eval(pair, dictionary, c, exp_map(xi, t), x) - F - t * LF)
                     for t in ts]
        slope, _ = np.polyfit(np.log(ts), np.log(residuals), 1)
        assert slope == pytest.approx(2.0, abs=0.2)

    def test_identity_transform(self, se3, rng):
        dictionary = PolynomialDictionary(3, 1, 2)
        c = rng.standard_normal(dictionary.size)
        x = rng.standard_normal((3, 3))
        np.testing.assert_allclose(finite_transform_eval(_invariant_pair(se3), dictionary, c, np.eye(4), x),
                                   dictionary.model_values(c, x), atol=1e-14)


class TestOperatorMatrices:
    def test_commutator_identity(self, se3, rng):
        dictionary = PolynomialDictionary(3, 1, 3)
        pair = _invariant_pair(se3)
        points = rng.uniform(-1.0, 1.0, (60, 3))
        for _ in range(20):
            xi, eta = se3.random_algebra_element(rng), se3.random_algebra_element(rng)
            M_xi = lie_derivative_matrix(pair, dictionary, xi, points)
            M_eta = lie_derivative_matrix(pair, dictionary, eta, points)
            M_br = lie_derivative_matrix(pair, dictionary, bracket(xi, eta), points)
            np.testing.assert_allclose(M_br, M_xi @ M_eta - M_eta @ M_xi, atol=1e-8)

    def test_matrices_are_linear(self, se3, rng):
        dictionary = PolynomialDictionary(3, 1, 3)
        pair = _invariant_pair(se3)
        points = rng.uniform(-1.0, 1.0, (60, 3))
        xi, eta = se3.random_algebra_element(rng), se3.random_algebra_element(rng)
        combined = lie_derivative_matrix(pair, dictionary, 0.5 * xi + eta, points)
        np.testing.assert_allclose(combined, 0.5 * lie_derivative_matrix(pair, dictionary, xi, points)
                                   + lie_derivative_matrix(pair, dictionary, eta, points), atol=1e-10)

    def test_span_must_be_closed(self, so2, rng):
        dictionary = named_dictionary("fourier-r2-k1")
        with pytest.raises(DimensionMismatchError):
            lie_derivative_matrix(_invariant_pair(so2), dictionary, so2.basis_element(0),
                                  rng.uniform(-1.0, 1.0, (40, 2)))


class TestInnerProduct:
    def test_fixed_seed_is_reproducible(self):
        a = build_inner_product(None, 25, 7, m=3)
        b = build_inner_product(None, 25, 7, m=3)
        np.testing.assert_array_equal(a.points, b.points)
        assert not np.array_equal(a.points, build_inner_product(None, 25, 8, m=3).points)

    def test_points_stay_in_the_cube(self):
        inner = build_inner_product([[0.0, 1.0], [-2.0, -1.0]], 200, 3)
        assert inner.dim == 2 and inner.count == 200
        assert np.all((inner.points[:, 0] >= 0.0) & (inner.points[:, 0] <= 1.0))
        assert np.all((inner.points[:, 1] >= -2.0) & (inner.points[:, 1] <= -1.0))

    def test_unit_weights_normalize_constants(self):
        inner = build_inner_product(None, 10, 0, m=2)
        assert inner.norm(np.ones(10)) == pytest.approx(1.0)
        assert inner.describe()["unit_weights"]

    def test_bad_arguments(self):
        with pytest.raises(DimensionMismatchError):
            build_inner_product(None, 0, 0, m=2)
        with pytest.raises(DimensionMismatchError):
            build_inner_product(None, 5, 0)
        with pytest.raises(DimensionMismatchError):
            build_inner_product(None, 3, 0, m=1, weights=[1.0, 1.0])
        with pytest.raises(DimensionMismatchError):
            build_inner_product([1.0, -1.0], 3, 0, m=1)

    def test_single_point_cannot_separate_affine_functions(self):
        with pytest.raises(SingularGramError):
            build_inner_product(None, 1, 0, target=PolynomialDictionary(1, 1, 1))

    @pytest.mark.parametrize("m, d", [(2, 3), (3, 2)])
    def test_certified_count_gives_positive_definite_gram(self, m, d):
        dictionary = PolynomialDictionary(m, 1, d)
        M = comb(d + m, m)
        for seed in range(100):
            inner = build_inner_product(None, M, seed, m=m)
            assert inner.gram_spectrum(dictionary)[-1] > 0.0

    def test_monte_carlo_convergence_report(self):
        report = inner_product_convergence(PolynomialDictionary(2, 1, 2), 2000, 11)
        assert report["samples"] == 2000
        assert report["statistical_scale"] == pytest.approx(1.0 / np.sqrt(2000))
        assert np.isfinite(report["max_relative_change"]) and report["max_relative_change"] >= 0.0
        assert isinstance(report["within_scale"], bool)


class TestLieTensor:
    def test_certified_sample_counts(self, so2, se2):
        dictionary = PolynomialDictionary(2, 1, 2)
        assert certified_sample_count(dictionary, _invariant_pair(so2)) == 6
        assert certified_sample_count(dictionary, _invariant_pair(se2)) == 6
        assert certified_sample_count(dictionary, _invariant_pair(make_group("T", 2))) == 3
        fourier = named_dictionary("fourier-r2-k1")
        assert certified_sample_count(fourier, _invariant_pair(so2)) is None
        assert default_sample_count(fourier, _invariant_pair(so2)) == 4 * fourier.size

    def test_too_few_samples(self, so2):
        dictionary = PolynomialDictionary(2, 1, 2)
        inner = build_inner_product(None, 3, 0, m=2)
        with pytest.raises(InsufficientSamplesError):
            assemble_lie_tensor(_invariant_pair(so2), dictionary, inner)

    def test_trivial_action_gives_zero_tensor(self):
        t2 = make_group("T", 2)
        pair = ActionPair(trivial_rep(t2, 2), trivial_rep(t2))
        dictionary = PolynomialDictionary(2, 1, 2)
        tensor = assemble_lie_tensor(pair, dictionary, build_inner_product(None, 20, 0, m=2))
        assert tensor.size == 6 and tensor.range_dim == 0
        assert tensor.operator_norm == 0.0

    def test_trivial_group(self):
        group = make_group("trivial", 2)
        dictionary = PolynomialDictionary(2, 1, 2)
        tensor = assemble_lie_tensor(_invariant_pair(group), dictionary, build_inner_product(None, 10, 0, m=2))
        assert tensor.tensor.shape == (6, 0, 0)

    def test_rotating_one_coordinate_has_rank_one(self, so2):
        dictionary = PolynomialDictionary(2, 1, 1)
        inner = build_inner_product(None, 50, 4, m=2)
        tensor = assemble_lie_tensor(_invariant_pair(so2), dictionary, inner)
        L = tensor.operator_matrix(_x1(dictionary))
        assert np.linalg.matrix_rank(L) == 1
        # L_xi x1 = -x2 / sqrt(2) for the unit generator
        assert np.linalg.norm(L) == pytest.approx(inner.norm(inner.points[:, 1]) / np.sqrt(2.0))

    def test_translations_lower_the_degree(self):
        t3 = make_group("T", 3)
        dictionary = PolynomialDictionary(3, 1, 2)
        tensor = assemble_lie_tensor(_invariant_pair(t3), dictionary, build_inner_product(None, 30, 1, m=3))
        assert tensor.range_dim == 4
        assert tensor.algebra_dim == 3

    def test_tensor_contracts_like_the_operator(self, se2, rng):
        dictionary = PolynomialDictionary(2, 1, 2)
        pair = _invariant_pair(se2)
        inner = build_inner_product(None, 40, 2, m=2)
        tensor = assemble_lie_tensor(pair, dictionary, inner, workers=2)
        c = rng.standard_normal(dictionary.size)
        L = tensor.operator_matrix(c)
        # column norms of L_F equal the sampled norms of L_{xi_k} F
        for k in range(se2.dim):
            values = lie_derivative_eval(pair, dictionary, c, se2.basis_element(k), inner.points)
            assert np.linalg.norm(L[:, k]) == pytest.approx(inner.norm(values), rel=1e-10, abs=1e-12)
        np.testing.assert_allclose(tensor.flattened() @ c, L.ravel(), atol=1e-13)

    def test_save_and_load(self, tmp_path, so2):
        dictionary = PolynomialDictionary(2, 1, 2)
        tensor = assemble_lie_tensor(_invariant_pair(so2), dictionary, build_inner_product(None, 12, 5, m=2))
        for name in ("tensor.npz", "tensor.json"):
            loaded = LieOperatorTensor.load(tensor.save(tmp_path / name))
            np.testing.assert_allclose(loaded.tensor, tensor.tensor)
            assert loaded.group_descriptor == {"kind": "SO", "n": 2}
            assert loaded.seed == 5
