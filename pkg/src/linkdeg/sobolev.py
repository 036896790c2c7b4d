"""Lattice Sobolev analysis: W^{1,p} norms, blow-ups, good points, slicing.

Derivatives are central differences (one-sided on the boundary rows) and
integrals use trapezoid weights, so a GridFunction behaves like its
piecewise-multilinear interpolant to second order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.signal import fftconvolve

from .errors import DimensionMismatch, EmptySubdomain, NotInverse, OutOfDomain, SingularJacobian
from .oracle import Ball, Box, MapOracle, reflection_matrix


@dataclass(frozen=True)
class GridFunction:
    """Samples of a map R^n -> R^m on a uniform lattice over ``box``.

    ``values`` has shape (*resolution, m).
    """

    box: Box
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != self.box.dim + 1:
            raise DimensionMismatch(f"values need shape (*resolution, m) for a {self.box.dim}-dimensional box")
        if min(vals.shape[:-1]) < 3:
            raise ValueError("need at least 3 samples per axis")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_oracle(cls, oracle: MapOracle, box: Box, resolution) -> "GridFunction":
        res = _resolution(resolution, box.dim)
        pts = lattice_points(box, res)
        vals = oracle(pts.reshape(-1, box.dim)).reshape(*res, oracle.dim_out)
        return cls(box, vals)

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def codim(self) -> int:
        return self.values.shape[-1]

    @property
    def resolution(self) -> tuple:
        return self.values.shape[:-1]

    @property
    def spacing(self) -> np.ndarray:
        return self.box.sides / (np.array(self.resolution) - 1)

    def points(self) -> np.ndarray:
        return lattice_points(self.box, self.resolution)

    def gradient(self) -> np.ndarray:
        """Df on the lattice, shape (*resolution, m, n)."""
        h = self.spacing
        parts = np.gradient(self.values, *h, axis=tuple(range(self.dim)), edge_order=1)
        if self.dim == 1:
            parts = [parts]
        return np.stack(parts, axis=-1)

    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.box, self.resolution)

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.box, values)

    def __sub__(self, other):
        return self.with_values(self.values - _as_values(self, other))

    def __add__(self, other):
        return self.with_values(self.values + _as_values(self, other))

    def __mul__(self, scalar: float):
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__

    def interpolator(self):
        axes = [np.linspace(lo, hi, k) for lo, hi, k in zip(self.box.corner, self.box.upper, self.resolution)]
        return RegularGridInterpolator(axes, self.values, method="linear")

    def as_oracle(self, name: str = "grid") -> MapOracle:
        interp = self.interpolator()
        return MapOracle(self.dim, self.codim, interp, name=name)


def _resolution(resolution, n: int) -> tuple:
    if np.isscalar(resolution):
        return (int(resolution),) * n
    res = tuple(int(r) for r in resolution)
    if len(res) != n:
        raise DimensionMismatch(f"resolution has {len(res)} entries for a {n}-dimensional box")
    return res


def lattice_points(box: Box, resolution) -> np.ndarray:
    res = _resolution(resolution, box.dim)
    axes = [np.linspace(lo, hi, k) for lo, hi, k in zip(box.corner, box.upper, res)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def trapezoid_weights(box: Box, resolution) -> np.ndarray:
    res = _resolution(resolution, box.dim)
    w = np.ones(())
    for side, k in zip(box.sides, res):
        axis_w = np.full(k, side / (k - 1))
        axis_w[[0, -1]] *= 0.5
        w = np.multiply.outer(w, axis_w)
    return w


def _as_values(f: GridFunction, other) -> np.ndarray:
    if isinstance(other, GridFunction):
        if other.values.shape != f.values.shape or not np.allclose(other.box.corner, f.box.corner) or not np.allclose(other.box.sides, f.box.sides):
            raise DimensionMismatch("grid functions live on different lattices")
        return other.values
    other = np.asarray(other, dtype=float)
    if other.ndim == 2:
        # a linear map, sampled on the lattice
        if other.shape != (f.codim, f.dim):
            raise DimensionMismatch(f"linear map must be {f.codim}x{f.dim}")
        return f.points() @ other.T
    return np.broadcast_to(other, f.values.shape)


# ---------------------------------------------------------------------------
# file format


def save_grid(f: GridFunction, path) -> None:
    """Text layout: ``n m``, resolution, corner, sides, then one row of m values per node (C order)."""
    lines = [
        f"{f.dim} {f.codim}",
        " ".join(str(r) for r in f.resolution),
        " ".join(repr(float(c)) for c in f.box.corner),
        " ".join(repr(float(s)) for s in f.box.sides),
    ]
    body = "\n".join(" ".join(repr(float(v)) for v in row) for row in f.values.reshape(-1, f.codim))
    Path(path).write_text("\n".join(lines) + "\n" + body + "\n")


def load_grid(path) -> GridFunction:
    rows = Path(path).read_text().split("\n")
    n, m = (int(t) for t in rows[0].split())
    res = tuple(int(t) for t in rows[1].split())
    corner = np.array(rows[2].split(), dtype=float)
    sides = np.array(rows[3].split(), dtype=float)
    if len(res) != n or len(corner) != n or len(sides) != n:
        raise DimensionMismatch("grid header is inconsistent")
    data = np.array([r.split() for r in rows[4:] if r.strip()], dtype=float)
    if data.shape != (int(np.prod(res)), m):
        raise DimensionMismatch(f"expected {int(np.prod(res))} rows of {m} values, got {data.shape}")
    return GridFunction(Box(corner, sides), data.reshape(*res, m))


# ---------------------------------------------------------------------------
# norms


def _densities(f: GridFunction, p: float):
    val = np.linalg.norm(f.values, axis=-1) ** p
    grad = np.sqrt(np.sum(f.gradient() ** 2, axis=(-2, -1))) ** p
    return val, grad


def subdomain_weights(f: GridFunction, subdomain: Box | Ball | None) -> np.ndarray:
    """Quadrature weights restricted to a subdomain.

    Boxes re-apply the trapezoid rule on the nodes they contain; balls keep
    the nodes inside (full lattice weights).
    """
    if subdomain is None:
        return f.weights()
    if subdomain.dim != f.dim:
        raise DimensionMismatch("subdomain dimension differs from the grid")
    tol = 1e-9 * float(np.max(f.box.sides))
    if isinstance(subdomain, Box):
        if not f.box.contains_box(subdomain, tol):
            raise OutOfDomain("subdomain is not inside the grid box")
        w = np.ones(())
        for i, (lo, hi, k) in enumerate(zip(f.box.corner, f.box.upper, f.resolution)):
            x = np.linspace(lo, hi, k)
            inside = np.flatnonzero((x >= subdomain.corner[i] - tol) & (x <= subdomain.upper[i] + tol))
            axis_w = np.zeros(k)
            if len(inside) >= 2:
                axis_w[inside] = f.spacing[i]
                axis_w[inside[[0, -1]]] *= 0.5
            w = np.multiply.outer(w, axis_w)
    else:
        if not f.box.contains_box(subdomain.bounding_box(), tol):
            raise OutOfDomain("ball is not inside the grid box")
        w = np.where(subdomain.contains(f.points().reshape(-1, f.dim)).reshape(f.resolution), np.prod(f.spacing), 0.0)
    if not np.any(w > 0):
        raise EmptySubdomain("no lattice cells inside the subdomain")
    return w


def w1p_norm(f: GridFunction, p: float, subdomain: Box | Ball | None = None) -> float:
    """(∫ |f|^p + |Df|^p)^{1/p}, with |Df| the Hilbert-Schmidt norm."""
    if p < 1:
        raise ValueError("p must be at least 1")
    w = subdomain_weights(f, subdomain)
    val, grad = _densities(f, p)
    return float(np.sum((val + grad) * w) ** (1.0 / p))


def lp_norm(f: GridFunction, p: float, subdomain: Box | Ball | None = None) -> float:
    w = subdomain_weights(f, subdomain)
    return float(np.sum(np.linalg.norm(f.values, axis=-1) ** p * w) ** (1.0 / p))


# ---------------------------------------------------------------------------
# blow-ups

UNIT_BOX_RESOLUTION = 17


def blow_up(f: GridFunction | MapOracle, x_o, r: float, resolution=UNIT_BOX_RESOLUTION, domain: Box | None = None) -> GridFunction:
    """f_r(x) = (f(x_o + r x) - f(x_o)) / r sampled on [-1, 1]^n.

    A GridFunction is interpolated multilinearly; an oracle is evaluated
    directly and may be restricted with ``domain``.
    """
    if r <= 0:
        raise ValueError("blow-up radius must be positive")
    x_o = np.asarray(x_o, dtype=float)
    if isinstance(f, GridFunction):
        domain = f.box
        evaluate = f.interpolator()
        n = f.dim
    else:
        evaluate = f
        n = f.dim_in
    if len(x_o) != n:
        raise DimensionMismatch(f"blow-up point must lie in R^{n}")
    if domain is not None and not domain.contains_box(Box(x_o - r, np.full(n, 2 * r)), tol=1e-12):
        raise OutOfDomain(f"the cube of radius {r} around {x_o.tolist()} leaves the domain")
    unit = Box.cube(n)
    pts = lattice_points(unit, resolution).reshape(-1, n)
    base = np.asarray(evaluate(x_o[None, :]))[0]
    vals = (np.asarray(evaluate(x_o + r * pts)) - base) / r
    return GridFunction(unit, vals.reshape(*_resolution(resolution, n), -1))


def blow_up_oracle(f: MapOracle, x_o, r: float) -> MapOracle:
    x_o = np.asarray(x_o, dtype=float)
    base = f(x_o)
    return MapOracle(f.dim_in, f.dim_out, lambda x: (f(x_o + r * x) - base) / r, name=f"{f.name}_r")


@dataclass
class SimultaneousBlowUp:
    """Distances of g_r and (g_r)^{-1} to the limiting linear map S."""

    point: np.ndarray
    matrix: np.ndarray
    det_matrix: float
    jacobian_sign: int
    target: np.ndarray
    radii: list
    forward: list
    inverse: list
    p: float
    q: float

    def ratios(self, which: str = "forward") -> list:
        vals = getattr(self, which)
        return [vals[i] / vals[i + 1] for i in range(len(vals) - 1)]

    def as_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "det_A": self.det_matrix,
            "jacobian_sign": self.jacobian_sign,
            "radii": list(self.radii),
            "forward_w1p": list(self.forward),
            "inverse_w1q": list(self.inverse),
            "forward_ratios": self.ratios("forward"),
            "inverse_ratios": self.ratios("inverse"),
            "p": self.p,
            "q": self.q,
        }


def normalizing_matrix(f: MapOracle, x_o) -> tuple[np.ndarray, np.ndarray, int]:
    """A = S (Df(x_o))^{-1} with S = R when J_f(x_o) < 0 and S = I otherwise.

    Then det A > 0 and g = A∘f has Dg(x_o) = S.
    """
    jac = f.jacobian(np.asarray(x_o, dtype=float))
    det = np.linalg.det(jac)
    if abs(det) < 1e-12:
        raise SingularJacobian(f"Df is singular at {np.asarray(x_o).tolist()}; no linear normalization exists")
    n = f.dim_in
    target = reflection_matrix(n) if det < 0 else np.eye(n)
    return target @ np.linalg.inv(jac), target, int(np.sign(det))


def simultaneous_blow_up(
    f: MapOracle,
    f_inv: MapOracle,
    x_o,
    radii=(0.5, 0.25, 0.125),
    p: float = 2.0,
    q: float = 1.0,
    resolution: int = 13,
) -> SimultaneousBlowUp:
    """Blow up g = A∘f at x_o and g^{-1} at g(x_o), measured on the unit ball."""
    x_o = np.asarray(x_o, dtype=float)
    n = f.dim_in
    a, target, sign = normalizing_matrix(f, x_o)
    a_inv = np.linalg.inv(a)
    g = MapOracle(n, n, lambda x: f(x) @ a.T, name="A∘f")
    g_inv = MapOracle(n, n, lambda y: f_inv(y @ a_inv.T), name="(A∘f)^-1")
    y_o = g(x_o)
    ball = Ball(np.zeros(n), 1.0)
    fwd, inv = [], []
    for r in radii:
        fwd.append(w1p_norm(blow_up(g, x_o, r, resolution) - target, p, ball))
        inv.append(w1p_norm(blow_up(g_inv, y_o, r, resolution) - np.linalg.inv(target), q, ball))
    return SimultaneousBlowUp(x_o, a, float(np.linalg.det(a)), sign, target, list(radii), fwd, inv, p, q)


# ---------------------------------------------------------------------------
# good points


@dataclass
class GoodPointReport:
    point: np.ndarray
    radii: list
    lebesgue_averages: list
    cz_averages: list
    verdict: str

    def as_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "radii": list(self.radii),
            "derivative_oscillation": list(self.lebesgue_averages),
            "remainder": list(self.cz_averages),
            "verdict": self.verdict,
        }


GOOD_DECAY = 0.1
STALL_LEVEL = 0.5
ZERO_LEVEL = 1e-12


def _nearest_node(f: GridFunction, x) -> tuple:
    raw = np.asarray(x)
    if len(raw) != f.dim:
        raise DimensionMismatch(f"point must have {f.dim} coordinates")
    if np.issubdtype(raw.dtype, np.integer):
        if np.any(raw < 0) or np.any(raw >= np.array(f.resolution)):
            raise OutOfDomain(f"index {raw.tolist()} is outside the lattice")
        return tuple(int(i) for i in raw)
    x = raw.astype(float)
    if not f.box.contains(x, tol=1e-12)[0]:
        raise OutOfDomain(f"{x.tolist()} is outside the grid box")
    idx = np.rint((x - f.box.corner) / f.spacing).astype(int)
    return tuple(int(i) for i in idx)


def _classify(series: list) -> str:
    first, last = series[0], series[-1]
    if max(series) <= ZERO_LEVEL:
        return "good"
    tail = series[-3:]
    monotone = all(b <= a * (1 + 1e-9) for a, b in zip(tail, tail[1:]))
    if monotone and last < GOOD_DECAY * first:
        return "good"
    if last > STALL_LEVEL * first:
        return "bad"
    return "inconclusive"


def good_point_check(f: GridFunction, x, p: float, radii) -> GoodPointReport:
    """Both averages of the p-good-point definition along a radius ladder.

    ``x`` is a lattice multi-index or a point, snapped to the nearest node.
    Verdict ``good`` needs both series to decrease over the last three radii
    and end below a tenth of their first value; ``bad`` means a series ends
    above half of its first value.
    """
    radii = [float(r) for r in radii]
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly decreasing")
    idx = _nearest_node(f, x)
    pts = f.points()
    center = pts[idx]
    if not f.box.contains_box(Box(center - radii[0], np.full(f.dim, 2 * radii[0])), tol=1e-9):
        raise OutOfDomain(f"ball of radius {radii[0]} around {center.tolist()} leaves the grid box")
    grad = f.gradient()
    d0 = grad[idx]
    f0 = f.values[idx]
    dist = np.linalg.norm(pts - center, axis=-1)
    osc, rem = [], []
    for r in radii:
        mask = dist <= r + 1e-12
        y = pts[mask]
        remainder = (f.values[mask] - f0 - (y - center) @ d0.T) / r
        rem.append(float(np.mean(np.linalg.norm(remainder, axis=-1) ** p)))
        dev = grad[mask] - d0
        osc.append(float(np.mean(np.sqrt(np.sum(dev**2, axis=(-2, -1))) ** p)))
    verdicts = {_classify(osc), _classify(rem)}
    verdict = "good" if verdicts == {"good"} else ("bad" if "bad" in verdicts else "inconclusive")
    return GoodPointReport(center, radii, osc, rem, verdict)


# ---------------------------------------------------------------------------
# Fubini slicing


@dataclass
class SliceReport:
    slice_norms: np.ndarray
    slice_weights: np.ndarray
    p: float
    distances: np.ndarray | None = None

    def integrated(self, which: str = "norms") -> float:
        """Σ_x F(x)^p · cell weight."""
        data = self.slice_norms if which == "norms" else self.distances
        return float(np.sum(data**self.p * self.slice_weights))

    def quantile_distance(self, fraction: float = 0.9) -> float:
        """Largest slice distance after discarding the worst (1 - fraction) of slices by measure."""
        order = np.argsort(self.distances.ravel())
        w = self.slice_weights.ravel()[order]
        cum = np.cumsum(w) / np.sum(w)
        k = int(np.searchsorted(cum, fraction - 1e-12))
        return float(self.distances.ravel()[order][min(k, len(order) - 1)])


def fubini_slices(f: GridFunction, split, p: float, other: GridFunction | None = None, derivative: str = "full") -> SliceReport:
    """Per-slice W^{1,p} norms of f_x(z) = f(x, z) with x in the first n - l axes.

    ``split`` is (n - l, l). With ``derivative="full"`` the slice density uses
    the whole gradient, which makes Σ F(x)^p·w_x = ‖f‖^p hold exactly;
    ``"slice"`` keeps only the derivatives along the slice.
    """
    split = tuple(int(s) for s in split)
    if len(split) != 2 or min(split) < 1 or sum(split) != f.dim:
        raise DimensionMismatch(f"split {split} does not partition {f.dim} axes")
    if derivative not in ("full", "slice"):
        raise ValueError("derivative must be 'full' or 'slice'")
    outer = split[0]
    res = f.resolution
    box_outer = Box(f.box.corner[:outer], f.box.sides[:outer])
    box_inner = Box(f.box.corner[outer:], f.box.sides[outer:])
    w_outer = trapezoid_weights(box_outer, res[:outer])
    w_inner = trapezoid_weights(box_inner, res[outer:])
    inner_axes = tuple(range(outer, f.dim))

    def norms(g: GridFunction) -> np.ndarray:
        val = np.linalg.norm(g.values, axis=-1) ** p
        grad = g.gradient()
        if derivative == "slice":
            grad = grad[..., outer:]
        dens = val + np.sqrt(np.sum(grad**2, axis=(-2, -1))) ** p
        return np.sum(dens * w_inner, axis=inner_axes) ** (1.0 / p)

    distances = norms(f - other) if other is not None else None
    return SliceReport(norms(f), w_outer, p, distances)


# ---------------------------------------------------------------------------
# maximal function


def maximal_function(f: GridFunction, radii, boundary: str = "skip") -> GridFunction:
    """Mf(x) = max over ``radii`` of the lattice average of |f| on B(x, r).

    ``boundary="skip"`` ignores radii whose ball leaves the box; nodes with
    no admissible radius fall back to |f(x)|, the small-radius limit.
    ``"zero"`` extends f by zero outside the box.
    """
    if boundary not in ("skip", "zero"):
        raise ValueError("boundary must be 'skip' or 'zero'")
    if f.codim != 1:
        raise DimensionMismatch("maximal function needs a scalar grid function")
    absf = np.abs(f.values[..., 0])
    h = f.spacing
    pts = f.points()
    best = np.full(f.resolution, -np.inf)
    for r in radii:
        if r <= 0:
            raise ValueError("radii must be positive")
        half = np.floor(r / h + 1e-9).astype(int)
        offsets = np.stack(np.meshgrid(*[np.arange(-k, k + 1) * hh for k, hh in zip(half, h)], indexing="ij"), axis=-1)
        kernel = (np.sum(offsets**2, axis=-1) <= r * r * (1 + 1e-12)).astype(float)
        avg = fftconvolve(absf, kernel, mode="same") / kernel.sum()
        avg = np.clip(avg, 0.0, None)
        if boundary == "skip":
            inside = np.all((pts - r >= f.box.corner - 1e-12) & (pts + r <= f.box.upper + 1e-12), axis=-1)
            avg = np.where(inside, avg, -np.inf)
        best = np.maximum(best, avg)
    best = np.where(np.isfinite(best), best, absf)
    return f.with_values(best[..., None])


# ---------------------------------------------------------------------------
# chain rule and the inverse derivative


@dataclass
class ChainRuleReport:
    samples: int
    excluded: int
    max_inverse_error: float
    max_chain_error: float
    max_roundtrip: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def chain_rule_check(
    f: MapOracle,
    f_inv: MapOracle,
    domain: Box,
    samples: int = 200,
    seed: int = 0,
    scalar: MapOracle | None = None,
    jacobian_cutoff: float = 1e-6,
    points=None,
) -> ChainRuleReport:
    """Compare (Df(x))^{-1} with Df^{-1}(f(x)) and D(u∘f) with Du(f)·Df.

    Points with |J_f| <= ``jacobian_cutoff`` are excluded and counted.
    """
    rng = np.random.default_rng(seed)
    x = domain.corner + rng.random((samples, domain.dim)) * domain.sides
    if points is not None:
        x = np.concatenate([x, np.atleast_2d(points)])
    y = f(x)
    roundtrip = float(np.max(np.abs(f_inv(y) - x)))
    if roundtrip > 1e-8:
        raise NotInverse(f"f_inv(f(x)) misses x by {roundtrip:.3g}")
    jac = f.jacobian(x)
    keep = np.abs(np.linalg.det(jac)) > jacobian_cutoff
    x, y, jac = x[keep], y[keep], jac[keep]
    inv_err = 0.0
    if len(x):
        diff = np.linalg.inv(jac) - f_inv.jacobian(y)
        inv_err = float(np.max(np.sqrt(np.sum(diff**2, axis=(-2, -1)))))
    if scalar is None:
        scalar = MapOracle(f.dim_out, 1, lambda z: np.exp(-np.sum(z * z, axis=1))[:, None], name="gaussian")
    chain_err = 0.0
    if len(x):
        lhs = scalar.compose(f).jacobian(x)
        rhs = scalar.jacobian(y) @ jac
        chain_err = float(np.max(np.abs(lhs - rhs)))
    return ChainRuleReport(len(x), int(np.sum(~keep)), inv_err, chain_err, roundtrip)


# ---------------------------------------------------------------------------
# the pointwise Lipschitz-type inequality via the maximal function of |Du|


@dataclass
class PointwiseReport:
    pairs: int
    fitted_constant: float
    holdout_ratio: float
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"pairs": self.pairs, "fitted_constant": self.fitted_constant, "holdout_ratio": self.holdout_ratio, **self.extra}


def pointwise_inequality_check(u: GridFunction, pairs: int = 1000, seed: int = 0, radii=None) -> PointwiseReport:
    """|u(x) - u(y)| <= C |x - y| (M|Du|(x) + M|Du|(y)) at random node pairs.

    C is fitted on the first half of the pairs; ``holdout_ratio`` is the
    largest ratio on the second half divided by that C.
    """
    if u.codim != 1:
        raise DimensionMismatch("pointwise inequality needs a scalar function")
    grad = u.gradient()[..., 0, :]
    g = u.with_values(np.linalg.norm(grad, axis=-1)[..., None])
    if radii is None:
        hmin = float(np.min(u.spacing))
        radii = np.geomspace(hmin, 0.5 * float(np.max(u.box.sides)), 12)
    mg = maximal_function(g, radii, boundary="zero").values[..., 0].ravel()
    vals = u.values[..., 0].ravel()
    pts = u.points().reshape(-1, u.dim)
    rng = np.random.default_rng(seed)
    i = rng.integers(0, len(vals), pairs)
    j = rng.integers(0, len(vals), pairs)
    dist = np.linalg.norm(pts[i] - pts[j], axis=1)
    keep = dist > 0
    lhs = np.abs(vals[i] - vals[j])[keep]
    rhs = (dist * (mg[i] + mg[j]))[keep]
    ratio = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.where(lhs > 0, np.inf, 0.0))
    half = len(ratio) // 2
    fitted = float(np.max(ratio[:half]))
    holdout = float(np.max(ratio[half:]) / fitted) if fitted > 0 else 0.0
    return PointwiseReport(int(keep.sum()), fitted, holdout)
