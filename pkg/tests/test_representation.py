import numpy as np
import pytest

from src.models.errors import DimensionMismatchError, GroupMismatchError, RepresentationError
from src.models.liegroup import (
    direct_sum,
    exp_map,
    homogeneous_rep,
    kernel_value_rep,
    make_group,
    make_product,
    particle_rep,
    representation_from_descriptor,
    standard_rep,
    trivial_rep,
)


def _differential_gap(rep, xi, h=1e-6):
    """Central difference of t -> Phi(exp(t xi)) at 0 against phi(xi)."""
    forward = rep.matrix(exp_map(xi, h))
    backward = rep.matrix(exp_map(xi, -h))
    return np.abs((forward - backward) / (2 * h) - rep.algebra_matrix(xi)).max()


def test_standard_rep_of_se2_is_affine(se2, rng):
    rep = standard_rep(se2)
    assert rep.affine and rep.dim == 2
    g = se2.random_element(rng)
    v = rng.standard_normal((4, 2))
    np.testing.assert_allclose(rep.apply_group(g, v), v @ g[:2, :2].T + g[:2, 2], atol=1e-14)
    np.testing.assert_allclose(rep.apply_inverse(g, rep.apply_group(g, v)), v, atol=1e-12)
    np.testing.assert_allclose(rep.linear_part().matrix(g), g[:2, :2])


def test_homogeneous_rep_is_linear(se2):
    rep = homogeneous_rep(se2)
    assert not rep.affine and rep.dim == 3


def test_particle_rep_size_and_homomorphism(se3, rng):
    rep = particle_rep(se3, 5)
    assert rep.dim == 31
    g, h = se3.random_element(rng), se3.random_element(rng)
    np.testing.assert_allclose(rep.matrix(g @ h), rep.matrix(g) @ rep.matrix(h), atol=1e-12)


def test_particle_rep_translations_move_positions_only(se3):
    rep = particle_rep(se3, 2)
    a = rep.algebra_matrix(se3.basis_element(3))
    rows = np.nonzero(np.abs(a).sum(axis=1))[0]
    np.testing.assert_array_equal(rows, [0, 6])
    assert np.all(a[:, :-1] == 0.0)


@pytest.mark.parametrize("make", [
    lambda G: particle_rep(G, 2),
    standard_rep,
    homogeneous_rep,
    lambda G: direct_sum(standard_rep(G), trivial_rep(G, 2)),
])
def test_algebra_map_is_the_differential(make, se3, rng):
    rep = make(se3)
    for _ in range(3):
        assert _differential_gap(rep, se3.random_algebra_element(rng)) < 1e-7


def test_kernel_value_rep(so2, rng):
    std = standard_rep(so2)
    rep = kernel_value_rep(std, std, std)
    assert rep.dim == 4
    g, h = so2.random_element(rng), so2.random_element(rng)
    np.testing.assert_allclose(rep.matrix(g @ h), rep.matrix(g) @ rep.matrix(h), atol=1e-12)
    assert _differential_gap(rep, so2.random_algebra_element(rng)) < 1e-7


def test_kernel_value_rep_scales_by_determinant(rng):
    gl2 = make_group("GL", 2)
    std = standard_rep(gl2)
    scalar = trivial_rep(gl2)
    rep = kernel_value_rep(scalar, scalar, std)
    g = np.diag([2.0, 3.0])
    np.testing.assert_allclose(rep.matrix(g), [[1.0 / 6.0]])
    assert _differential_gap(rep, gl2.random_algebra_element(rng)) < 1e-6


def test_kernel_value_rep_needs_linear_values(se2):
    with pytest.raises(RepresentationError):
        kernel_value_rep(standard_rep(se2), trivial_rep(se2), standard_rep(se2))


def test_direct_sum_stacks_translations(se2, rng):
    rep = direct_sum(standard_rep(se2), trivial_rep(se2), standard_rep(se2))
    assert rep.affine and rep.dim == 5
    g = se2.random_element(rng)
    v = rng.standard_normal(5)
    moved = rep.apply_group(g, v)
    np.testing.assert_allclose(moved[:2], g[:2, :2] @ v[:2] + g[:2, 2])
    assert moved[2] == pytest.approx(v[2])
    np.testing.assert_allclose(moved[3:], g[:2, :2] @ v[3:] + g[:2, 2])


def test_direct_sum_of_different_groups(so2, so3):
    with pytest.raises(GroupMismatchError):
        direct_sum(standard_rep(so2), standard_rep(so3))


def test_vectors_of_wrong_size(so3):
    with pytest.raises(DimensionMismatchError):
        standard_rep(so3).apply_group(np.eye(3), np.ones(2))


def test_trivial_rep_is_zero_on_algebra(se3):
    assert trivial_rep(se3, 3).is_zero_on_algebra()
    assert not standard_rep(se3).is_zero_on_algebra()
    with pytest.raises(RepresentationError):
        trivial_rep(se3, 0)


def test_particle_rep_requires_euclidean_group():
    with pytest.raises(RepresentationError):
        particle_rep(make_group("GL", 3), 2)


def test_representation_descriptors(se3):
    assert representation_from_descriptor(se3, None).name == "standard"
    assert representation_from_descriptor(se3, "homogeneous").dim == 4
    assert representation_from_descriptor(se3, {"kind": "trivial", "dim": 2}).dim == 2
    assert representation_from_descriptor(se3, {"kind": "particles", "n_particles": 3}).dim == 19
    with pytest.raises(RepresentationError):
        representation_from_descriptor(se3, "adjoint")


def test_product_standard_rep(so2, rng):
    group = make_product(so2, make_group("T", 1))
    rep = standard_rep(group)
    assert rep.affine and rep.dim == 3
    g = group.random_element(rng)
    v = rng.standard_normal(3)
    moved = rep.apply_group(g, v)
    np.testing.assert_allclose(moved[:2], g[:2, :2] @ v[:2])
    assert moved[2] == pytest.approx(v[2] + g[2, 3])
