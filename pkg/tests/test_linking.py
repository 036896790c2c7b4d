import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linkdeg import catalog
from linkdeg.errors import DimensionMismatch, ImagesIntersect
from linkdeg.experiments import torus_grid, torus_spheres
from linkdeg.linking import crossing_linking_number, gauss_linking_circles, linking_number, verify_linking_invariance
from linkdeg.mesh import make_product_grid
from linkdeg.oracle import MapOracle, affine_oracle, reflection_matrix

THETA = np.linspace(0.0, 2 * np.pi, 400, endpoint=False)
CIRCLE = np.stack([np.cos(THETA), np.sin(THETA)], axis=-1)

# Classical Gauss sum over 2000-gon chords for the Hopf pair gave
# -1.0000016; the library reports the opposite sign.
HOPF_VALUE = 1.0000016


@pytest.mark.parametrize("name", catalog.CIRCLE_PAIRS)
def test_three_routes_agree(name):
    entry = catalog.get(name)
    g1, g2 = entry.oracle
    crossings = crossing_linking_number(g1(CIRCLE), g2(CIRCLE))
    gauss = gauss_linking_circles(g1, g2, 256)
    gauss_map = linking_number(g1, g2, make_product_grid(1, 1, 128, 128))
    assert crossings == entry.fact("linking")
    assert gauss.rounded == crossings
    assert gauss_map.rounded == crossings
    assert gauss.residual < 1e-3


def test_hopf_value():
    g1, g2 = catalog.get("hopf").oracle
    assert gauss_linking_circles(g1, g2, 256).value == pytest.approx(HOPF_VALUE, abs=1e-3)


def test_crossing_count_classical_sign():
    g1, g2 = catalog.get("hopf").oracle
    assert crossing_linking_number(g1(CIRCLE), g2(CIRCLE), classical=True) == -crossing_linking_number(g1(CIRCLE), g2(CIRCLE))


def test_crossing_count_ignores_projection():
    g1, g2 = catalog.get("torus-link-2").oracle
    a, b = g1(CIRCLE), g2(CIRCLE)
    values = {crossing_linking_number(a, b, projection=d) for d in ([0.3, 0.1, 1.0], [1.0, 0.2, 0.3], [-0.4, 1.0, 0.5])}
    assert values == {2}


def test_swapping_curves_in_r3_keeps_the_sign():
    # for k = l = 1 in R^3, swapping the factors gives (-1)^{(k+1)(l+1)} = +1
    g1, g2 = catalog.get("hopf").oracle
    assert gauss_linking_circles(g2, g1).rounded == gauss_linking_circles(g1, g2).rounded


def test_intersecting_curves():
    g1, _ = catalog.get("hopf").oracle
    with pytest.raises(ImagesIntersect):
        gauss_linking_circles(g1, g1)


def test_dimension_mismatch():
    a, b = torus_spheres(4)
    with pytest.raises(DimensionMismatch):
        linking_number(a, a)


@settings(max_examples=15, deadline=None)
@given(
    st.lists(st.floats(-3, 3), min_size=3, max_size=3),
    st.floats(0.3, 3.0),
)
def test_similarity_invariance(shift, scale):
    g1, g2 = catalog.get("torus-link-2").oracle
    h = affine_oracle(scale * np.eye(3), shift)
    assert gauss_linking_circles(h.compose(g1), h.compose(g2)).rounded == 2


@pytest.mark.parametrize("sense", [1, -1])
def test_invariance_report(sense):
    g1, g2 = catalog.get("hopf").oracle
    h = affine_oracle(np.eye(3) if sense == 1 else reflection_matrix(3))
    rep = verify_linking_invariance(g1, g2, h, sense)
    assert rep.holds
    assert rep.mapped.rounded == sense * rep.base.rounded


@pytest.mark.parametrize("n,raw", [(3, 1), (4, -1)])
def test_base_torus_pair_raw_sign(n, raw):
    """Uncalibrated base-pair values under the Gauss-map orientation."""
    res = linking_number(*torus_spheres(n), torus_grid(n))
    assert res.rounded == raw
    assert res.residual < 1e-2


def test_torus_pair_in_r3_matches_gauss_integral():
    g1, g2 = torus_spheres(3)
    assert gauss_linking_circles(g1, g2).rounded == linking_number(g1, g2).rounded


def test_separated_spheres_are_unlinked():
    g1, g2 = torus_spheres(4)
    far = MapOracle(g2.dim_in, 4, lambda s: g2(s) + np.array([3.0, 0.0, 0.0, 0.0]))
    assert linking_number(g1, far, torus_grid(4)).rounded == 0
