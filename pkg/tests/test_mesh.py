import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linkdeg.errors import DimensionMismatch, InvalidMesh, OutOfBall, UnsupportedDimension
from linkdeg.mesh import (
    SphereMesh,
    embed_iota1,
    embed_iota2,
    load_mesh,
    make_product_grid,
    make_sphere_mesh,
    reflect_last,
    save_mesh,
    sphere_quadrature,
    sphere_volume,
    surface_area,
    torus_dims,
)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("refinement", [0, 1, 2])
def test_mesh_counts_and_orientation(k, refinement):
    mesh = make_sphere_mesh(k, refinement)
    # cross-polytope boundary: 2^(k+1) facets, each split into 2^k per step
    assert mesh.n_simplices == 2 ** (k + 1) * (2**k) ** refinement
    mesh.validate()
    assert mesh.signed_solid_angle() == pytest.approx(sphere_volume(k), abs=1e-9)


def test_reversed_mesh_has_negative_total_angle():
    mesh = make_sphere_mesh(2, 1).reversed()
    assert mesh.signed_solid_angle() == pytest.approx(-4 * math.pi, abs=1e-9)
    with pytest.raises(InvalidMesh):
        mesh.validate()


def test_flipped_simplex_is_rejected():
    mesh = make_sphere_mesh(2, 1)
    signs = mesh.signs.copy()
    signs[3] *= -1
    with pytest.raises(InvalidMesh):
        SphereMesh(2, mesh.vertices, mesh.simplices, signs).validate()


def test_dimension_limit():
    with pytest.raises(UnsupportedDimension):
        make_sphere_mesh(4)


def test_octahedron_area():
    # eight equilateral faces with side sqrt(2)
    mesh = make_sphere_mesh(2, 0)
    sphere = embed_iota2(4, np.zeros(2), mesh)
    assert surface_area(sphere) == pytest.approx(0.25 * 4 * math.sqrt(3), rel=1e-12)


@pytest.mark.parametrize("refinement", [0, 3, 6])
def test_polygon_perimeter(refinement):
    mesh = make_sphere_mesh(1, refinement)
    sides = 4 * 2**refinement
    pts = mesh.vertices[mesh.simplices]
    perimeter = np.linalg.norm(pts[:, 1] - pts[:, 0], axis=1).sum()
    assert perimeter == pytest.approx(2 * sides * math.sin(math.pi / sides), rel=1e-12)


def test_area_converges_to_sphere():
    areas = [surface_area(embed_iota2(4, np.zeros(2), make_sphere_mesh(2, r))) / 0.25 for r in (2, 3, 4)]
    errors = [4 * math.pi - a for a in areas]
    assert all(e > 0 for e in errors)
    assert errors[0] / errors[1] > 3.5 and errors[1] / errors[2] > 3.5


@pytest.mark.parametrize("k,level", [(1, 4), (2, 2), (3, 1)])
def test_quadrature_weights_sum_to_sphere_volume(k, level):
    quad = sphere_quadrature(make_sphere_mesh(k, level))
    assert quad.weights.sum() == pytest.approx(sphere_volume(k), rel=1e-10)
    full = np.concatenate([quad.nodes[:, None, :], quad.frames], axis=1)
    assert np.all(np.linalg.det(full) > 0.999)


def test_quadrature_second_moment():
    quad = sphere_quadrature(make_sphere_mesh(2, 4))
    # ∫_{S^2} z^2 = 4π/3
    assert np.dot(quad.weights, quad.nodes[:, 2] ** 2) == pytest.approx(4 * math.pi / 3, rel=2e-3)


def test_product_grid_sizes():
    grid = make_product_grid(1, 2, 64, 2)
    assert grid.factor_dims == (1, 2)
    assert grid.size == 64 * 128
    assert grid.weights.sum() == pytest.approx(2 * math.pi * 4 * math.pi, rel=1e-10)


@pytest.mark.parametrize("n,dims", [(3, (1, 1)), (4, (1, 2)), (5, (2, 2)), (6, (2, 3))])
def test_torus_dims(n, dims):
    assert torus_dims(n) == dims


def test_iota_radii_and_centres():
    n = 4
    s1 = embed_iota1(n, [0.2, 0.1, -0.3], make_sphere_mesh(1, 3))
    s2 = embed_iota2(n, [0.4, -0.5], make_sphere_mesh(2, 2))
    c1 = np.array([0.0, -0.25, 0.01, -0.03])
    assert np.allclose(np.linalg.norm(s1.image_vertices - c1, axis=1), 0.52)
    c2 = np.array([0.04, 0.25, 0.0, 0.0])
    assert np.allclose(np.linalg.norm(s2.image_vertices - c2, axis=1), 0.45)


def test_iota_preconditions():
    with pytest.raises(OutOfBall):
        embed_iota1(4, [1.0, 1.0, 0.0], make_sphere_mesh(1, 2))
    with pytest.raises(DimensionMismatch):
        embed_iota2(4, [0.0, 0.0], make_sphere_mesh(1, 2))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_reflect_last_is_an_involution(point):
    p = np.array(point)
    once = reflect_last(p)
    assert once[-1] == -p[-1] and np.array_equal(once[:-1], p[:-1])
    assert np.array_equal(reflect_last(once), p)


def test_mesh_roundtrip(tmp_path):
    mesh = make_sphere_mesh(2, 1)
    save_mesh(mesh, tmp_path / "m.txt")
    back = load_mesh(tmp_path / "m.txt")
    assert np.array_equal(back.vertices, mesh.vertices)
    assert np.array_equal(back.simplices, mesh.simplices)
    assert np.array_equal(back.signs, mesh.signs)


def test_mesh_file_with_bad_header(tmp_path):
    (tmp_path / "bad.txt").write_text("2 3\n")
    with pytest.raises(InvalidMesh):
        load_mesh(tmp_path / "bad.txt")
