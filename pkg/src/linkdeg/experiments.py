"""Replay pipelines: torus-pair linking, calibration, the Jacobian-sign experiment."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ImagesIntersect
from .linking import LinkingResult, linking_number
from .mesh import iota1_oracle, iota2_oracle, make_product_grid, torus_dims
from .oracle import MapOracle, affine_oracle, reflection_matrix
from .records import CalibrationState
from .sobolev import blow_up_oracle, normalizing_matrix, simultaneous_blow_up


def torus_grid(n: int, first=None, second=None):
    nu, half = torus_dims(n)
    return make_product_grid(nu, half, first, second)


def torus_spheres(n: int, x=None, y=None, reflect_first: bool = False, reflect_second: bool = False) -> tuple[MapOracle, MapOracle]:
    """The pair ι₁({x} × S^ν), ι₂({y} × S^[n/2]), optionally composed with R."""
    nu, half = torus_dims(n)
    x = np.zeros(half + 1) if x is None else np.asarray(x, dtype=float)
    y = np.zeros(nu + 1) if y is None else np.asarray(y, dtype=float)
    g1, g2 = iota1_oracle(n, x), iota2_oracle(n, y)
    refl = affine_oracle(reflection_matrix(n), name="R")
    if reflect_first:
        g1 = refl.compose(g1)
    if reflect_second:
        g2 = refl.compose(g2)
    return g1, g2


def random_ball_point(rng: np.random.Generator, dim: int, radius: float = 0.95) -> np.ndarray:
    v = rng.standard_normal(dim)
    return radius * rng.random() ** (1.0 / dim) * v / np.linalg.norm(v)


def calibrate(n: int, state: CalibrationState, grid=None) -> tuple[int, LinkingResult]:
    """Fix the sign for dimension n from the raw base-pair linking number."""
    raw = linking_number(*torus_spheres(n), grid or torus_grid(n))
    return state.fix(n, raw.value), raw


def torus_linking(n: int, sign: int, x=None, y=None, reflect_first=False, reflect_second=False, grid=None, jitter: int = 0, seed: int = 0) -> tuple[LinkingResult, dict]:
    """Calibrated linking number of the torus pair.

    With ``jitter > 0``, an ImagesIntersect failure is retried with fresh
    random (x, y) up to ``jitter`` times.
    """
    nu, half = torus_dims(n)
    rng = np.random.default_rng(seed)
    grid = grid or torus_grid(n)
    params = {"x": None if x is None else np.asarray(x, float).tolist(), "y": None if y is None else np.asarray(y, float).tolist()}
    for attempt in range(jitter + 1):
        try:
            g1, g2 = torus_spheres(n, x, y, reflect_first, reflect_second)
            result = linking_number(g1, g2, grid).scaled(sign)
            params["attempts"] = attempt + 1
            return result, params
        except ImagesIntersect:
            if attempt == jitter:
                raise
            x, y = random_ball_point(rng, half + 1), random_ball_point(rng, nu + 1)
            params.update(x=x.tolist(), y=y.tolist())
    raise AssertionError("unreachable")


@dataclass
class JacobianSignReport:
    map_name: str
    point: list
    jacobian_sign: int
    det_a: float
    base: int
    expected: int
    radii: list
    linking: list
    skipped: list
    distances: list
    inverse_distances: list = field(default_factory=list)

    def matches(self, count: int | None = None) -> bool:
        vals = [v for v in self.linking if v is not None]
        if count is not None:
            vals = vals[-count:]
        return bool(vals) and all(v == self.expected for v in vals)

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def jacobian_sign_experiment(
    f: MapOracle,
    x_o,
    sign: int,
    radii=(0.5, 0.25, 0.125),
    x=None,
    y=None,
    grid=None,
    f_inv: MapOracle | None = None,
    p: float = 2.0,
    name: str = "",
) -> JacobianSignReport:
    """Blow-ups of g = A∘f at x_o, where A = S·Df(x_o)^{-1} has det A > 0.

    S is R when J_f(x_o) < 0. For each r the linking number of
    g_r(ι₁-sphere) and g_r(ι₂-sphere) is computed; the prediction is
    -(base) for J_f(x_o) < 0 and +(base) otherwise.
    """
    n = f.dim_in
    x_o = np.asarray(x_o, dtype=float)
    a, target, jsign = normalizing_matrix(f, x_o)
    g = MapOracle(n, n, lambda z: f(z) @ a.T, name=f"A∘{f.name}")
    grid = grid or torus_grid(n)
    g1, g2 = torus_spheres(n, x, y)
    base = linking_number(g1, g2, grid).scaled(sign)
    links, skipped = [], []
    for r in radii:
        gr = blow_up_oracle(g, x_o, r)
        try:
            links.append(linking_number(gr.compose(g1), gr.compose(g2), grid).scaled(sign).rounded)
        except ImagesIntersect as err:
            links.append(None)
            skipped.append({"r": r, "separation": err.separation})
    distances, inverse = [], []
    if f_inv is not None:
        blow = simultaneous_blow_up(f, f_inv, x_o, radii, p=p, q=1.0, resolution=11)
        distances, inverse = blow.forward, blow.inverse
    return JacobianSignReport(
        name or f.name,
        x_o.tolist(),
        jsign,
        float(np.linalg.det(a)),
        base.rounded,
        jsign * base.rounded,
        list(radii),
        links,
        skipped,
        list(distances),
        list(inverse),
    )
