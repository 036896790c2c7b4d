import numpy as np
import pytest

from linkdeg import catalog
from linkdeg.degree import local_degree_regular
from linkdeg.errors import UnknownEntry
from linkdeg.oracle import Box

PROVENANCE_PREFIXES = ("trivial", "derived", "stated")


def all_entries():
    out = []
    for name in catalog.names():
        out.append(catalog.get(name.replace("-<n>d", "")))
    return out


def test_every_fact_has_a_provenance_tag():
    for entry in all_entries():
        assert entry.kind in catalog.KINDS
        for prop, _, provenance in entry.known_facts:
            assert provenance.split(":")[0] in PROVENANCE_PREFIXES, (entry.name, prop)


def test_lookup_by_dimension_and_power():
    assert catalog.get("reflection-3d").name == "reflection-3d"
    assert catalog.get("reflection").name == "reflection-4d"
    assert catalog.get("circle-power--3").fact("degree") == -3
    assert catalog.get("antipodal-4d").fact("degree") == 1


@pytest.mark.parametrize("name", ["nope", "circle-power-x", "identity-xd"])
def test_unknown_entry(name):
    with pytest.raises(UnknownEntry):
        catalog.get(name)


def test_oracles_are_deterministic():
    x = np.random.default_rng(3).uniform(-1, 1, (20, 4))
    for name in ("reversing-diffeo-4d", "homeo-plus-4-4d", "homeo-minus-9-4d", "affine-reversing-4d"):
        assert np.array_equal(catalog.get(name).oracle(x), catalog.get(name).oracle(x))


@pytest.mark.parametrize("sense", [1, -1])
def test_homeomorphism_senses(sense):
    rng = np.random.default_rng(7)
    x = rng.uniform(-1, 1, (300, 4))
    for entry in catalog.homeomorphisms(4, sense):
        assert entry.sense == sense
        assert np.all(np.sign(entry.oracle.jacobian_det(x)) == sense), entry.name
        p = entry.oracle(np.full(4, 0.1))
        assert local_degree_regular(entry.oracle, Box.cube(4), p, seeds_per_axis=6).rounded == sense, entry.name


def test_reversing_diffeo_inverse():
    entry = catalog.get("reversing-diffeo-4d")
    x = np.random.default_rng(1).uniform(-1, 1, (200, 4))
    assert np.max(entry.oracle.jacobian_det(x)) < 0
    assert np.max(np.abs(entry.inverse(entry.oracle(x)) - x)) < 1e-10


def test_cubic_inverses():
    x = np.random.default_rng(2).uniform(-1, 1, (100, 2))
    for name in ("cubic-diffeo", "cubic-degenerate"):
        entry = catalog.get(name)
        assert np.max(np.abs(entry.inverse(entry.oracle(x)) - x)) < 1e-10


def test_scalar_functions_have_compact_support():
    x = np.random.default_rng(0).uniform(-2, 2, (2000, 2))
    for name in ("bump", "tent", "two-bumps", "sine-bump"):
        entry = catalog.get(name)
        radius = entry.fact("support_radius")
        outside = np.linalg.norm(x, axis=1) > radius + 1e-9
        assert np.all(entry.oracle(x)[outside] == 0.0), name


def test_oscillation_sequence_limit():
    member = catalog.get("oscillation-sequence").oracle
    x = np.random.default_rng(0).uniform(0, 1, (50, 2))
    assert np.max(np.abs(member(64)(x) - member(0)(x))) <= 1 / 64**2
