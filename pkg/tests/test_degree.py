import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from linkdeg import catalog
from linkdeg.degree import (
    classify_residual,
    degree_sphere_map_kronecker,
    degree_sphere_map_simplicial,
    local_degree_perturbed,
    local_degree_regular,
    sphere_map_images,
    verify_multiplication,
)
from linkdeg.errors import BoundaryHit, NearZero, NotConverged, SingularPreimage, ZeroVertex
from linkdeg.mesh import circle_quadrature, make_sphere_mesh
from linkdeg.oracle import Box, MapOracle, affine_oracle, reflection_matrix


def winding_number(f, samples=4096):
    """Independent oracle: accumulated change of arg f along the unit circle."""
    th = np.linspace(0.0, 2 * np.pi, samples + 1)
    vals = f(np.stack([np.cos(th), np.sin(th)], axis=-1))
    ang = np.unwrap(np.arctan2(vals[:, 1], vals[:, 0]))
    return (ang[-1] - ang[0]) / (2 * np.pi)


@pytest.mark.parametrize("residual,status", [(0.0, "ok"), (0.249, "ok"), (0.25, "warn"), (0.49, "warn"), (0.5, "reject")])
def test_rounding_thresholds(residual, status):
    assert classify_residual(residual) == status


@pytest.mark.parametrize("k", range(-3, 4))
def test_circle_powers_agree_with_winding_oracle(k):
    f = catalog.get(f"circle-power-{k}").oracle
    expected = round(winding_number(f))
    assert expected == k
    mesh = make_sphere_mesh(1, 5)
    assert degree_sphere_map_simplicial(sphere_map_images(mesh, f)).rounded == k
    assert degree_sphere_map_kronecker(f, circle_quadrature(512)).rounded == k
    assert local_degree_regular(f, Box.cube(2), [0.05, 0.031]).rounded == k


def test_complex_square_preimages():
    res = local_degree_regular(catalog.get("complex-square").oracle, Box.cube(2, -2, 2), [0.25, 0.0])
    assert res.value == 2.0
    pts = sorted(pt[0] for pt, _ in res.preimages)
    assert np.allclose(pts, [-0.5, 0.5], atol=1e-10)
    assert all(sign == 1 for _, sign in res.preimages)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_reflection_degree(n):
    f = affine_oracle(reflection_matrix(n))
    p = 0.1 * np.arange(1, n + 1)
    assert local_degree_regular(f, Box.cube(n), p, seeds_per_axis=4).rounded == -1


@pytest.mark.parametrize("n", [2, 3])
def test_antipodal_degree(n):
    f = catalog.get(f"antipodal-{n}d").oracle
    mesh = make_sphere_mesh(n - 1, 4 if n == 2 else 3)
    assert degree_sphere_map_simplicial(sphere_map_images(mesh, f)).rounded == (-1) ** n
    assert degree_sphere_map_kronecker(f, mesh).rounded == (-1) ** n


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_linear_map_degree_is_sign_of_det(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((3, 3))
    d = np.linalg.det(a)
    assume(np.linalg.cond(a) < 8)
    f = affine_oracle(a)
    assert degree_sphere_map_kronecker(f, 4).rounded == int(np.sign(d))
    mesh = make_sphere_mesh(2, 3)
    assert degree_sphere_map_simplicial(sphere_map_images(mesh, f)).rounded == int(np.sign(d))


def test_point_outside_image_has_degree_zero():
    f = catalog.get("complex-square").oracle
    assert local_degree_regular(f, Box.cube(2, 0.5, 1.0), [-0.1, 0.05]).rounded == 0


def test_boundary_hit():
    with pytest.raises(BoundaryHit):
        local_degree_regular(affine_oracle(np.eye(2)), Box.cube(2), [1.0, 0.25])


def test_singular_preimage_and_jitter():
    f = catalog.get("complex-square").oracle
    with pytest.raises(SingularPreimage):
        local_degree_regular(f, Box.cube(2), [0.0, 0.0])
    assert local_degree_perturbed(f, Box.cube(2), [0.0, 0.0]).rounded == 2


def test_zero_vertex():
    mesh = make_sphere_mesh(1, 2)
    images = mesh.vertices.copy()
    images[0] = 0.0
    with pytest.raises(ZeroVertex):
        degree_sphere_map_simplicial(mesh, images)


def test_near_zero_and_not_converged():
    shifted = affine_oracle(np.eye(2), [1.0, 0.0])
    with pytest.raises(NearZero):
        degree_sphere_map_kronecker(shifted, circle_quadrature(64))
    # zero just inside the circle: eight nodes cannot resolve the steep integrand
    with pytest.raises(NotConverged):
        degree_sphere_map_kronecker(affine_oracle(np.eye(2), [0.85, 0.0]), circle_quadrature(8))
    assert degree_sphere_map_kronecker(affine_oracle(np.eye(2), [0.85, 0.0]), circle_quadrature(256)).rounded == 1


def test_simplicial_ignores_the_direction():
    f = catalog.get("circle-power-2").oracle
    mesh = make_sphere_mesh(1, 5)
    for angle in (0.1, 1.0, 2.5, 4.0):
        d = [np.cos(angle), np.sin(angle)]
        assert degree_sphere_map_simplicial(sphere_map_images(mesh, f), direction=d).rounded == 2


ROT = catalog.get("rotation-pi4").oracle
SQ = catalog.get("complex-square").oracle
R2 = affine_oracle(reflection_matrix(2))
CUBE = MapOracle(2, 2, lambda x: np.stack([x[:, 0] ** 3 + x[:, 0], x[:, 1]], axis=-1))


@pytest.mark.parametrize(
    "phi,psi,box,p,expected",
    [
        (ROT, SQ, Box.cube(2, -2, 2), [0.25, 0.0], 2),
        (SQ, ROT, Box.cube(2, -1, 1), [0.2, 0.1], 2),
        (R2, SQ, Box.cube(2, -1, 1), [0.1, 0.05], -2),
        (SQ, R2, Box.cube(2, -1, 1), [0.1, 0.05], -2),
        (CUBE, R2, Box.cube(2, -1, 1), [0.3, -0.2], -1),
    ],
)
def test_multiplication_formula(phi, psi, box, p, expected):
    rep = verify_multiplication(phi, psi, box, p)
    assert rep.agree
    assert rep.lhs == expected
