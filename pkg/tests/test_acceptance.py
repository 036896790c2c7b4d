"""Acceptance criteria, one test per criterion.

Each test prints a single ``[criterion NN] PASS|FAIL  detail`` line to the
terminal (outside pytest's capture) before asserting.
"""

import time

import numpy as np
import pytest

from linkdeg import catalog
from linkdeg.degree import (
    degree_sphere_map_kronecker,
    degree_sphere_map_simplicial,
    local_degree_regular,
    sphere_map_images,
    verify_multiplication,
)
from linkdeg.experiments import calibrate, jacobian_sign_experiment, random_ball_point, torus_grid, torus_linking, torus_spheres
from linkdeg.extension import (
    Mollifier,
    build_homotopy,
    det_bound_check,
    det_ratio,
    extend,
    extension_exponent,
    hausdorff_volume_estimate,
    lq_ratio,
)
from linkdeg.linking import gauss_linking_circles, linking_number
from linkdeg.mesh import circle_quadrature, make_sphere_mesh
from linkdeg.oracle import Box, MapOracle, affine_oracle, reflection_matrix
from linkdeg.records import CalibrationState
from linkdeg.sobolev import GridFunction, chain_rule_check, fubini_slices, simultaneous_blow_up, w1p_norm


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:02d}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def sign4():
    sign, _ = calibrate(4, CalibrationState())
    return sign


@pytest.fixture(scope="module")
def grid4():
    return torus_grid(4, 128, 4)


def test_gauss_integral(report):
    start = time.perf_counter()
    hopf = gauss_linking_circles(*catalog.get("hopf").oracle, nodes=256)
    unlinked = gauss_linking_circles(*catalog.get("unlinked").oracle, nodes=256)
    elapsed = time.perf_counter() - start
    hopf_err = abs(abs(hopf.value) - 1.0)
    ok = hopf_err < 1e-3 and abs(unlinked.value) < 1e-3 and elapsed < 1.0
    report(1, ok, f"hopf={hopf.value:.6f} unlinked={unlinked.value:.2e} time={elapsed:.2f}s")


def test_linked_tori(report, sign4, grid4):
    rng = np.random.default_rng(2024)
    pairs = [(np.zeros(3), np.zeros(2))] + [(random_ball_point(rng, 3, 1.0), random_ball_point(rng, 2, 1.0)) for _ in range(5)]
    values, worst_time = [], 0.0
    for x, y in pairs:
        start = time.perf_counter()
        res, _ = torus_linking(4, sign4, x, y, grid=grid4)
        worst_time = max(worst_time, time.perf_counter() - start)
        values.append(res)
    ok = all(r.rounded == 1 and r.residual < 1e-2 for r in values) and worst_time < 30
    worst = max(r.residual for r in values)
    report(2, ok, f"rounded={[r.rounded for r in values]} max residual={worst:.1e} slowest={worst_time:.2f}s")


def test_reflection_identities(report, sign4, grid4):
    # R maps the second torus sphere (centre (0, 1/4, 0, 0) for y = 0) to itself
    _, g2 = torus_spheres(4)
    center = np.array([0.0, 0.25, 0.0, 0.0])
    refl = affine_oracle(reflection_matrix(4))
    mesh = make_sphere_mesh(2, 3)
    images = (refl(g2(mesh.vertices)) - center)[:, 1:]
    deg = degree_sphere_map_simplicial(mesh, images)
    kron = degree_sphere_map_kronecker(MapOracle(3, 3, lambda r: (refl(g2(r / np.linalg.norm(r, axis=1, keepdims=True))) - center)[:, 1:]), 4)
    l22, _ = torus_linking(4, sign4, reflect_second=True, grid=grid4)
    l23, _ = torus_linking(4, sign4, reflect_first=True, grid=grid4)
    ok = (
        deg.rounded == -1
        and kron.rounded == -1
        and kron.residual < 1e-2
        and (l22.rounded, l23.rounded) == (-1, 1)
        and max(l22.residual, l23.residual) < 1e-2
    )
    report(3, ok, f"deg R|S2={deg.rounded} (kronecker {kron.value:.4f}) l(S,RS)={l22.value:.4f} l(RS,S)={l23.value:.4f}")


def test_invariance_under_homeomorphisms(report, sign4, grid4):
    g1, g2 = torus_spheres(4)
    base = linking_number(g1, g2, grid4).scaled(sign4).rounded
    failures = []
    for sense in (1, -1):
        for h in catalog.homeomorphisms(4, sense):
            mapped = linking_number(h.oracle.compose(g1), h.oracle.compose(g2), grid4).scaled(sign4)
            if mapped.rounded != sense * base or not mapped.valid:
                failures.append(h.name)
    report(4, not failures, f"base={base} 10 preserving + 10 reversing, failures={failures}")


DEGREE_CATALOG = [
    *(f"circle-power-{k}" for k in range(-3, 4)),
    "identity-2d",
    "antipodal-3d",
    "complex-square",
    "reflection-3d",
]

MULTIPLICATION_PAIRS = [
    ("identity-2d", "identity-2d", Box.cube(2), [0.2, 0.1]),
    ("reflection-3d", "reflection-3d", Box.cube(3), [0.1, 0.2, 0.5]),
    ("rotation-pi4", "complex-square", Box.cube(2), [0.25, 0.0]),
    ("complex-square", "reflection-2d", Box.cube(2), [0.3, 0.1]),
    ("cubic-diffeo", "circle-power-3", Box.cube(2), [0.2, 0.15]),
]


def test_degree_oracle_equivalence(report):
    disagreements = []
    for name in DEGREE_CATALOG:
        f = catalog.get(name).oracle
        n = f.dim_in
        mesh = make_sphere_mesh(n - 1, 5 if n == 2 else 3)
        quad = circle_quadrature(512) if n == 2 else make_sphere_mesh(n - 1, 4)
        p = 0.1 * np.array([0.5, 0.31, 0.17])[:n]
        values = {
            local_degree_regular(f, Box.cube(n), p).rounded,
            degree_sphere_map_simplicial(sphere_map_images(mesh, f)).rounded,
            degree_sphere_map_kronecker(f, quad).rounded,
        }
        if len(values) != 1:
            disagreements.append((name, sorted(values)))
    mult = [verify_multiplication(catalog.get(a).oracle, catalog.get(b).oracle, box, p) for a, b, box, p in MULTIPLICATION_PAIRS]
    ok = not disagreements and all(m.agree for m in mult)
    report(5, ok, f"{len(DEGREE_CATALOG)} maps, disagreements={disagreements}, multiplication {sum(m.agree for m in mult)}/5")


def test_blow_up_convergence(report):
    entry = catalog.get("reversing-diffeo-4d")
    rep = simultaneous_blow_up(entry.oracle, entry.inverse, np.zeros(4), radii=(0.5, 0.25, 0.125), p=2.0, q=1.0)
    fwd, inv = rep.ratios("forward"), rep.ratios("inverse")
    ok = min(fwd + inv) >= 1.4 and rep.det_matrix > 0
    report(6, ok, f"forward ratios={np.round(fwd, 3).tolist()} inverse ratios={np.round(inv, 3).tolist()} det A={rep.det_matrix:.4f}")


def test_jacobian_sign_pipeline(report, sign4):
    rev = catalog.get("reversing-diffeo-4d")
    reversed_run = jacobian_sign_experiment(rev.oracle, np.zeros(4), sign4, name=rev.name)
    ident = catalog.get("identity-4d")
    identity_run = jacobian_sign_experiment(ident.oracle, np.zeros(4), sign4, name=ident.name)
    ok = (
        reversed_run.linking[-2:] == [-reversed_run.base] * 2
        and identity_run.linking == [identity_run.base] * 3
        and reversed_run.det_a > 0
    )
    report(7, ok, f"base={reversed_run.base} reversing={reversed_run.linking} identity={identity_run.linking}")


def test_extension_operator(report):
    n, p = 2, 2.0
    phi = Mollifier(n)
    box = Box.cube(n, -2, 2)
    q = extension_exponent(n, p)
    traces, ratios, dilation = [], [], []
    for name in catalog.EXTENSION_FUNCTIONS:
        oracle = catalog.get(name).oracle
        f = GridFunction.from_oracle(oracle, box, 201)
        fp = float(np.sum(np.abs(f.values[..., 0]) ** p * f.weights()) ** (1 / p))
        traces.append(extend(f, phi, [0.01], fill="zero").trace_errors(p)[0] / fp)
        ratios.append(lq_ratio(f, phi, p))
        squeezed = GridFunction.from_oracle(MapOracle(n, 1, lambda x, o=oracle: o(2.0 * x)), box, 201)
        dilation.append(abs(lq_ratio(squeezed, phi, p) / ratios[-1] - 1.0))
    spread = max(ratios) / min(ratios)
    ok = q == 3.0 and max(traces) < 0.05 and spread < 2.0 and max(dilation) < 0.10
    report(8, ok, f"q={q} max trace={max(traces):.2e} ratio spread={spread:.3f} max dilation change={max(dilation):.3f}")


def _volumes(n, refinement):
    mesh = make_sphere_mesh(n, refinement)
    g = affine_oracle(np.eye(n + 1))
    v = mesh.vertices
    wiggle = np.stack([np.sin(3 * v[:, 0] + 1)] + [np.cos(2 * v[:, i]) for i in range(1, n + 1)], axis=-1)
    zero = hausdorff_volume_estimate(build_homotopy(mesh, g(v), g), mesh)
    vols = [hausdorff_volume_estimate(build_homotopy(mesh, g(v) + eps * wiggle, g), mesh) for eps in (0.1, 0.05, 0.025)]
    return zero, vols


def test_homotopy_volume(report):
    lines, ok = [], True
    for n, refinement in ((1, 6), (2, 3)):
        zero, vols = _volumes(n, refinement)
        ratios = [vols[0] / vols[1], vols[1] / vols[2]]
        ok = ok and min(ratios) >= 1.8 and zero < 1e-6
        lines.append(f"n={n} ratios={np.round(ratios, 3).tolist()} f=g volume={zero:.1e}")
    report(9, ok, "; ".join(lines))


def test_det_bound(report):
    lines, ok = [], True
    for n in (2, 3, 4):
        rep = det_bound_check(n, trials=100_000)
        analytic = 2.0**n / (2 * n ** (n / 2))
        identity = float(det_ratio(np.eye(n), np.eye(n)))
        ok = ok and rep.holds and abs(identity / analytic - 1) < 0.10
        lines.append(f"n={n} max={rep.max_ratio:.4f}<=bound={rep.bound:.4f} I,I={identity:.4f}")
    report(10, ok, "; ".join(lines))


def test_chain_rule(report):
    cubic = catalog.get("cubic-diffeo")
    affine = catalog.get("affine-reversing-4d")
    c = chain_rule_check(cubic.oracle, cubic.inverse, Box.cube(2))
    a = chain_rule_check(affine.oracle, affine.inverse, Box.cube(4))
    ok = c.max_inverse_error < 1e-4 and a.max_inverse_error < 1e-8
    report(11, ok, f"cubic={c.max_inverse_error:.2e} affine={a.max_inverse_error:.2e}")


def test_fubini_slicing(report):
    seq = catalog.get("oscillation-sequence").oracle
    box = Box.cube(2, 0, 1)
    f0 = GridFunction.from_oracle(seq(0), box, 129)
    identity = fubini_slices(f0, (1, 1), 2).integrated()
    rel = abs(identity / w1p_norm(f0, 2) ** 2 - 1)
    dists = [fubini_slices(GridFunction.from_oracle(seq(k), box, 129), (1, 1), 2, other=f0).quantile_distance(0.9) for k in (2, 4, 8, 16)]
    shrinking = all(b < a for a, b in zip(dists, dists[1:])) and dists[-1] < 0.25 * dists[0]
    ok = rel < 0.01 and shrinking
    report(12, ok, f"identity rel err={rel:.1e} slice distances (k=2..16)={np.round(dists, 4).tolist()}")
