"""Named test maps, homeomorphisms, curve pairs and grid-function families.

Names of dimension-generic families end in ``-<n>d`` (``reflection-4d``,
``homeo-minus-3-4d``); omitting the suffix picks the family default.
Every known fact carries a provenance tag and is re-verified in the tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import UnknownEntry
from .mesh import iota1_oracle, iota2_oracle
from .oracle import MapOracle, affine_oracle, numerical_inverse, reflection_matrix

KINDS = ("sphere_map", "plane_map", "homeomorphism", "curve_pair", "grid_sequence", "embedding", "scalar_function")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str
    oracle: MapOracle | tuple | Callable | None
    known_facts: tuple = ()
    inverse: MapOracle | None = field(default=None, compare=False)

    def fact(self, prop: str):
        for key, value, _ in self.known_facts:
            if key == prop:
                return value
        raise KeyError(f"{self.name} has no known fact '{prop}'")

    @property
    def sense(self) -> int:
        return int(self.fact("sense"))


_REGISTRY: dict[str, Callable] = {}
_DEFAULT_DIM: dict[str, int] = {}


def register(name: str, default_dim: int | None = None):
    def deco(factory):
        _REGISTRY[name] = factory
        if default_dim is not None:
            _DEFAULT_DIM[name] = default_dim
        return factory

    return deco


def names() -> list[str]:
    out = []
    for name in sorted(_REGISTRY):
        out.append(f"{name}-<n>d" if name in _DEFAULT_DIM else name)
    return out


def get(name: str) -> CatalogEntry:
    """Look up a catalog entry by name."""
    if name in _REGISTRY and name not in _DEFAULT_DIM:
        return _REGISTRY[name]()
    if name in _DEFAULT_DIM:
        return _REGISTRY[name](_DEFAULT_DIM[name])
    m = re.fullmatch(r"(.+)-(\d+)d", name)
    if m and m.group(1) in _DEFAULT_DIM:
        return _REGISTRY[m.group(1)](int(m.group(2)))
    m = re.fullmatch(r"circle-power-(-?\d+)", name)
    if m:
        return circle_power(int(m.group(1)))
    raise UnknownEntry(f"unknown catalog entry '{name}'")


# ---------------------------------------------------------------------------
# helpers


def _complex(x):
    return x[:, 0] + 1j * x[:, 1]


def _real2(z):
    return np.stack([z.real, z.imag], axis=-1)


def _rotation(n: int, i: int, j: int, angle: float) -> np.ndarray:
    r = np.eye(n)
    c, s = np.cos(angle), np.sin(angle)
    r[i, i] = r[j, j] = c
    r[i, j], r[j, i] = -s, s
    return r


def _seeded_matrix(n: int, seed: int, sign: int) -> np.ndarray:
    """Well-conditioned random matrix with det of the requested sign."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    if np.linalg.det(q) * sign < 0:
        q[:, 0] *= -1
    scales = rng.uniform(0.6, 1.6, n)
    return q @ np.diag(scales)


# ---------------------------------------------------------------------------
# linear maps


@register("identity", default_dim=2)
def identity(n: int) -> CatalogEntry:
    oracle = affine_oracle(np.eye(n), name=f"identity-{n}d")
    return CatalogEntry(
        f"identity-{n}d",
        "homeomorphism",
        oracle,
        (("degree", 1, "trivial"), ("sense", 1, "trivial")),
        inverse=oracle,
    )


@register("reflection", default_dim=4)
def reflection(n: int) -> CatalogEntry:
    oracle = affine_oracle(reflection_matrix(n), name=f"reflection-{n}d")
    return CatalogEntry(
        f"reflection-{n}d",
        "homeomorphism",
        oracle,
        (("degree", -1, "stated: reflection has degree -1 on spheres it preserves"), ("sense", -1, "stated")),
        inverse=oracle,
    )


@register("antipodal", default_dim=3)
def antipodal(n: int) -> CatalogEntry:
    oracle = affine_oracle(-np.eye(n), name=f"antipodal-{n}d")
    return CatalogEntry(
        f"antipodal-{n}d",
        "sphere_map",
        oracle,
        (("degree", (-1) ** n, "trivial: product of n coordinate reflections"), ("sense", (-1) ** n, "trivial")),
        inverse=oracle,
    )


@register("affine-reversing", default_dim=4)
def affine_reversing(n: int) -> CatalogEntry:
    a = _seeded_matrix(n, 11, -1)
    shift = np.linspace(0.05, -0.05, n)
    oracle = affine_oracle(a, shift, name=f"affine-reversing-{n}d")
    inv = np.linalg.inv(a)
    return CatalogEntry(
        f"affine-reversing-{n}d",
        "homeomorphism",
        oracle,
        (("sense", -1, "trivial: det < 0"),),
        inverse=affine_oracle(inv, -inv @ shift),
    )


def circle_power(k: int) -> CatalogEntry:
    """z -> z^k (conjugate power for k < 0) on the plane; degree k on S^1."""

    def evaluate(x):
        z = _complex(x)
        return _real2(z ** k if k >= 0 else np.conj(z) ** (-k))

    return CatalogEntry(
        f"circle-power-{k}",
        "sphere_map",
        MapOracle(2, 2, evaluate, name=f"circle-power-{k}"),
        (("degree", k, "derived: winding-number oracle"),),
    )


@register("complex-square")
def complex_square() -> CatalogEntry:
    return CatalogEntry(
        "complex-square",
        "plane_map",
        MapOracle(2, 2, lambda x: _real2(_complex(x) ** 2), name="complex-square"),
        (("degree", 2, "derived: two square roots, J = 4|z|^2 > 0"),),
    )


@register("rotation-pi4")
def rotation_pi4() -> CatalogEntry:
    r = _rotation(2, 0, 1, np.pi / 4)
    return CatalogEntry(
        "rotation-pi4",
        "homeomorphism",
        affine_oracle(r, name="rotation-pi4"),
        (("degree", 1, "trivial"), ("sense", 1, "trivial: det = 1")),
        inverse=affine_oracle(r.T),
    )


# ---------------------------------------------------------------------------
# nonlinear maps


@register("kink")
def kink() -> CatalogEntry:
    return CatalogEntry(
        "kink",
        "plane_map",
        MapOracle(2, 2, lambda x: np.stack([np.abs(x[:, 0]), x[:, 1]], axis=-1), name="kink"),
        (("good_point_at_origin", False, "derived: Df jumps across x1 = 0"),),
    )


@register("cubic-diffeo")
def cubic_diffeo() -> CatalogEntry:
    oracle = MapOracle(2, 2, lambda x: np.stack([x[:, 0] ** 3 + x[:, 0], x[:, 1]], axis=-1), name="cubic-diffeo")
    return CatalogEntry(
        "cubic-diffeo",
        "homeomorphism",
        oracle,
        (("sense", 1, "derived: J = 3 x1^2 + 1 > 0"),),
        inverse=numerical_inverse(oracle, name="cubic-diffeo^-1"),
    )


@register("cubic-degenerate")
def cubic_degenerate() -> CatalogEntry:
    oracle = MapOracle(2, 2, lambda x: np.stack([x[:, 0] ** 3, x[:, 1]], axis=-1), name="cubic-degenerate")
    inverse = MapOracle(2, 2, lambda y: np.stack([np.cbrt(y[:, 0]), y[:, 1]], axis=-1), name="cubic-degenerate^-1")
    return CatalogEntry(
        "cubic-degenerate",
        "homeomorphism",
        oracle,
        (("sense", 1, "trivial: increasing in x1"), ("jacobian_zero_set", "x1 = 0", "trivial: J = 3 x1^2")),
        inverse=inverse,
    )


REVERSING_AMPLITUDE = 0.05


@register("reversing-diffeo", default_dim=4)
def reversing_diffeo(n: int) -> CatalogEntry:
    """g(x) = R x + 0.05 * (sin(2 x_{i+1} + 0.7 i))_i.

    The perturbation has Jacobian norm <= 0.1, so J < 0 everywhere.
    """
    refl = reflection_matrix(n)
    phase = 0.7 * np.arange(n)
    shift = np.roll(np.arange(n), -1)

    def evaluate(x):
        return x @ refl.T + REVERSING_AMPLITUDE * np.sin(2 * x[:, shift] + phase)

    oracle = MapOracle(n, n, evaluate, name=f"reversing-diffeo-{n}d")
    return CatalogEntry(
        f"reversing-diffeo-{n}d",
        "homeomorphism",
        oracle,
        (("sense", -1, "derived: |Dg - R| <= 0.1 so det Dg < 0 (verified by sampling)"),),
        inverse=numerical_inverse(oracle, guess=lambda y: y @ refl.T, name=f"reversing-diffeo-{n}d^-1"),
    )


# ten sense-preserving homeomorphisms of R^n; composing with R reverses them


def _preserving_family(n: int, i: int) -> tuple[MapOracle, MapOracle | None]:
    if i == 0:
        return affine_oracle(np.eye(n), name="identity"), None
    if i == 1:
        t = np.linspace(0.3, -0.5, n)
        return affine_oracle(np.eye(n), t, name="translation"), None
    if i == 2:
        return affine_oracle(3.0 * np.eye(n), name="scaling-3"), None
    if i == 3:
        return affine_oracle(_rotation(n, 0, 1, 0.9), name="rotation"), None
    if i == 4:
        rng = np.random.default_rng(4)
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        if np.linalg.det(q) < 0:
            q[:, 0] *= -1
        return affine_oracle(q, rng.standard_normal(n), name="rigid-motion"), None
    if i == 5:
        return affine_oracle(_seeded_matrix(n, 5, +1), name="affine-preserving"), None
    if i == 6:
        # triangular with unit diagonal: x_j + p(x_0..x_{j-1})
        def shear(x):
            out = x.copy()
            out[:, 1] += 0.5 * x[:, 0] ** 2
            for j in range(2, n):
                out[:, j] += 0.3 * np.sin(x[:, j - 1]) * x[:, 0]
            return out

        return MapOracle(n, n, shear, name="triangular-shear"), None
    if i == 7:
        return MapOracle(n, n, lambda x: x * (1.0 + np.sum(x * x, axis=1, keepdims=True)), name="radial-stretch"), None
    if i == 8:
        b = np.roll(np.eye(n), 1, axis=1)
        return MapOracle(n, n, lambda x: x + 0.2 * np.sin(x @ b.T), name="sine-perturbation"), None
    if i == 9:
        rot = _rotation(n, 0, n - 1, 0.6)

        def cubic(x):
            out = x @ rot.T
            out[:, 0] = out[:, 0] ** 3 + out[:, 0]
            return out

        return MapOracle(n, n, cubic, name="rotated-cubic"), None
    raise UnknownEntry(f"homeomorphism family index {i} outside 0..9")


def _make_homeo_family(sign: int):
    label = "plus" if sign > 0 else "minus"

    def factory_for(i):
        def factory(n: int) -> CatalogEntry:
            h, _ = _preserving_family(n, i)
            if sign < 0:
                refl = affine_oracle(reflection_matrix(n), name="R")
                h = refl.compose(h, name=f"R∘{h.name}")
            return CatalogEntry(
                f"homeo-{label}-{i}-{n}d",
                "homeomorphism",
                h,
                (("sense", sign, "derived: Jacobian sign, verified by local degree"),),
            )

        return factory

    for i in range(10):
        register(f"homeo-{label}-{i}", default_dim=4)(factory_for(i))


_make_homeo_family(+1)
_make_homeo_family(-1)


def homeomorphisms(n: int, sense: int) -> list[CatalogEntry]:
    label = "plus" if sense > 0 else "minus"
    return [get(f"homeo-{label}-{i}-{n}d") for i in range(10)]


# ---------------------------------------------------------------------------
# curve pairs in R^3 (S^1 -> R^3 oracles on unit vectors (cos t, sin t))


def _curve(fn, name):
    def evaluate(s):
        t = np.arctan2(s[:, 1], s[:, 0])
        r = np.linalg.norm(s, axis=1)
        return fn(t, r)

    return MapOracle(2, 3, evaluate, name=name)


def _circle_xy():
    return MapOracle(2, 3, lambda s: np.stack([s[:, 0], s[:, 1], np.zeros(len(s))], axis=-1), name="circle-xy")


def _torus_knot(windings: int, radius: float = 0.4):
    def fn(t, r):
        rho = 1.0 + radius * np.cos(windings * t)
        return np.stack([rho * np.cos(t), rho * np.sin(t), radius * np.sin(windings * t)], axis=-1)

    return _curve(fn, f"torus-curve-{windings}")


def _pair(name, g1, g2, linking, provenance="derived: crossing oracle"):
    return CatalogEntry(name, "curve_pair", (g1, g2), (("linking", linking, provenance),))


@register("hopf")
def hopf() -> CatalogEntry:
    g2 = MapOracle(2, 3, lambda s: np.stack([1.0 + s[:, 0], np.zeros(len(s)), s[:, 1]], axis=-1), name="hopf-2")
    return _pair("hopf", _circle_xy(), g2, 1)


@register("hopf-reversed")
def hopf_reversed() -> CatalogEntry:
    g2 = MapOracle(2, 3, lambda s: np.stack([1.0 + s[:, 0], np.zeros(len(s)), -s[:, 1]], axis=-1), name="hopf-2r")
    return _pair("hopf-reversed", _circle_xy(), g2, -1)


@register("unlinked")
def unlinked() -> CatalogEntry:
    g2 = MapOracle(2, 3, lambda s: np.stack([11.0 + s[:, 0], np.zeros(len(s)), s[:, 1]], axis=-1), name="far-circle")
    return _pair("unlinked", _circle_xy(), g2, 0, "trivial: separated by a plane")


@register("torus-link-2")
def torus_link_2() -> CatalogEntry:
    return _pair("torus-link-2", _circle_xy(), _torus_knot(2), 2)


@register("torus-link-3")
def torus_link_3() -> CatalogEntry:
    return _pair("torus-link-3", _circle_xy(), _torus_knot(3), 3)


CIRCLE_PAIRS = ("hopf", "hopf-reversed", "unlinked", "torus-link-2", "torus-link-3")


# ---------------------------------------------------------------------------
# torus embeddings


@register("iota1")
def iota1() -> CatalogEntry:
    return CatalogEntry("iota1", "embedding", iota1_oracle, (("linked_with", "iota2", "stated: linked torus pair"),))


@register("iota2")
def iota2() -> CatalogEntry:
    return CatalogEntry("iota2", "embedding", iota2_oracle, (("linked_with", "iota1", "stated: linked torus pair"),))


# ---------------------------------------------------------------------------
# scalar functions on R^n (evaluate (N, n) -> (N, 1)) for Sobolev/extension work


def _scalar(name, fn, n, facts=()):
    return CatalogEntry(name, "scalar_function", MapOracle(n, 1, lambda x: fn(x)[:, None], name=name), tuple(facts))


def _bump(x, center, radius):
    r2 = np.sum((x - center) ** 2, axis=1) / radius**2
    out = np.zeros(len(x))
    inside = r2 < 1
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


@register("bump", default_dim=2)
def bump(n: int) -> CatalogEntry:
    return _scalar(f"bump-{n}d", lambda x: _bump(x, np.zeros(n), 1.0), n, [("support_radius", 1.0, "trivial")])


@register("gaussian", default_dim=2)
def gaussian(n: int) -> CatalogEntry:
    return _scalar(f"gaussian-{n}d", lambda x: np.exp(-4.0 * np.sum(x * x, axis=1)), n)


@register("tent", default_dim=2)
def tent(n: int) -> CatalogEntry:
    return _scalar(f"tent-{n}d", lambda x: np.clip(1.0 - np.linalg.norm(x, axis=1), 0.0, None), n, [("support_radius", 1.0, "trivial")])


@register("two-bumps", default_dim=2)
def two_bumps(n: int) -> CatalogEntry:
    c = np.zeros(n)
    c[0] = 0.45

    def fn(x):
        return _bump(x, c, 0.5) - 0.7 * _bump(x, -c, 0.5)

    return _scalar(f"two-bumps-{n}d", fn, n, [("support_radius", 0.95, "trivial")])


@register("sine", default_dim=2)
def sine(n: int) -> CatalogEntry:
    return _scalar(f"sine-{n}d", lambda x: np.sin(2 * np.pi * x[:, 0]), n)


@register("sine-bump", default_dim=2)
def sine_bump(n: int) -> CatalogEntry:
    return _scalar(f"sine-bump-{n}d", lambda x: np.sin(2 * np.pi * x[:, 0]) * _bump(x, np.zeros(n), 1.0), n, [("support_radius", 1.0, "trivial")])


EXTENSION_FUNCTIONS = ("bump", "gaussian", "tent", "two-bumps", "sine-bump")


@register("oscillation-sequence")
def oscillation_sequence() -> CatalogEntry:
    """f_k = f + k^-2 sin(k x1) e1 with f = (sin x1 cos x2, x1 x2): f_k -> f in W^{1,p}."""

    def member(k: int) -> MapOracle:
        def evaluate(x):
            base = np.stack([np.sin(x[:, 0]) * np.cos(x[:, 1]), x[:, 0] * x[:, 1]], axis=-1)
            if k:
                base[:, 0] += np.sin(k * x[:, 0]) / k**2
            return base

        return MapOracle(2, 2, evaluate, name=f"oscillation-{k}")

    return CatalogEntry("oscillation-sequence", "grid_sequence", member, (("limit_index", 0, "trivial"),))
