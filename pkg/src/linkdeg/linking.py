"""Linking numbers of disjoint embedded spheres.

For curves in R^3 the Gauss double integral is evaluated directly. In
general, for S^k and S^l in R^n with k + l = n - 1, the linking number is the
degree of the Gauss map

    psi(s, t) = (g1(s) - g2(t)) / |g1(s) - g2(t)|,   S^k x S^l -> S^{n-1},

computed as a Kronecker integral on a product grid. The product is oriented
by the S^k tangent frame followed by the S^l frame, and S^{n-1} by its
outward normal. In R^3 this convention is the negative of the classical
right-handed linking number; the Gauss integral and the crossing count below
are reported in the same convention so all three routes agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .degree import ACCEPT_RESIDUAL, classify_residual
from .errors import DimensionMismatch, ImagesIntersect, NotConverged
from .mesh import ProductGrid, make_product_grid, sphere_volume
from .oracle import MapOracle

SEPARATION_TOL = 1e-6


@dataclass
class LinkingResult:
    value: float
    separation: float
    nodes_used: int
    method: str = "gauss_map"
    extra: dict = field(default_factory=dict)

    @property
    def rounded(self) -> int:
        return int(np.rint(self.value))

    @property
    def residual(self) -> float:
        return float(abs(self.value - self.rounded))

    @property
    def status(self) -> str:
        return classify_residual(self.residual)

    @property
    def valid(self) -> bool:
        return self.status != "reject"

    def scaled(self, sign: int) -> "LinkingResult":
        return LinkingResult(sign * self.value, self.separation, self.nodes_used, self.method, dict(self.extra))

    def as_dict(self) -> dict:
        return {
            "value": float(self.value),
            "rounded": self.rounded,
            "residual": self.residual,
            "separation": self.separation,
            "nodes_used": self.nodes_used,
            "method": self.method,
            "status": self.status,
            **self.extra,
        }


def _check_converged(result: LinkingResult) -> LinkingResult:
    if result.residual >= ACCEPT_RESIDUAL:
        raise NotConverged(
            f"linking value {result.value:.4f} is {result.residual:.3f} from an integer; refine the grid",
            result=result,
        )
    return result


def _min_distance(a: np.ndarray, b: np.ndarray, chunk: int = 2048) -> float:
    best = np.inf
    for i in range(0, len(a), chunk):
        diff = a[i: i + chunk, None, :] - b[None, :, :]
        best = min(best, float(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).min())))
    return best


def gauss_linking_circles(gamma1: MapOracle, gamma2: MapOracle, nodes: int = 256, step: float = 1e-5) -> LinkingResult:
    """Gauss double integral for two closed curves S^1 -> R^3.

    The integrand is det(g1'(s), g2'(t), g1(s) - g2(t)) / |g1(s) - g2(t)|^3,
    multiplied by -1 so that the result is the degree of the Gauss map under
    this module's orientation conventions (see the module docstring).
    Tensor trapezoidal rule with ``nodes`` points per circle; tangents by
    central differences in the angle.
    """
    if gamma1.dim_out != 3 or gamma2.dim_out != 3 or gamma1.dim_in != 2 or gamma2.dim_in != 2:
        raise DimensionMismatch("Gauss integral needs two maps S^1 -> R^3")
    if nodes < 16:
        raise ValueError("need at least 16 nodes per circle")
    theta = 2 * np.pi * np.arange(nodes) / nodes

    def curve(g):
        pts = g(np.stack([np.cos(theta), np.sin(theta)], axis=-1))
        fwd = g(np.stack([np.cos(theta + step), np.sin(theta + step)], axis=-1))
        bwd = g(np.stack([np.cos(theta - step), np.sin(theta - step)], axis=-1))
        return pts, (fwd - bwd) / (2 * step)

    p1, d1 = curve(gamma1)
    p2, d2 = curve(gamma2)
    separation = _min_distance(p1, p2)
    if separation <= SEPARATION_TOL:
        raise ImagesIntersect(f"curves come within {separation:.3g} of each other", separation)
    diff = p1[:, None, :] - p2[None, :, :]
    cross = np.cross(d1[:, None, :], d2[None, :, :])
    num = np.einsum("ijk,ijk->ij", cross, diff)
    dist3 = np.linalg.norm(diff, axis=-1) ** 3
    total = -np.sum(num / dist3) * (2 * np.pi / nodes) ** 2 / (4 * np.pi)
    return _check_converged(LinkingResult(float(total), separation, nodes, "gauss_integral"))


def _tangent_samples(gamma: MapOracle, quad, step: float):
    """Values at nodes and at +-step along each tangent direction."""
    k = quad.dim
    base = gamma(quad.nodes)
    shifted = []
    for a in range(k):
        e = quad.frames[:, a]
        plus = gamma(np.cos(step) * quad.nodes + np.sin(step) * e)
        minus = gamma(np.cos(step) * quad.nodes - np.sin(step) * e)
        shifted.append((plus, minus))
    return base, shifted


def _unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def linking_number(
    gamma1: MapOracle,
    gamma2: MapOracle,
    grid: ProductGrid | None = None,
    step: float = 1e-5,
    chunk: int = 32,
    check: bool = True,
) -> LinkingResult:
    """Linking number as the degree of the Gauss map on a product grid."""
    k, l = gamma1.dim_in - 1, gamma2.dim_in - 1
    n = gamma1.dim_out
    if gamma2.dim_out != n:
        raise DimensionMismatch("both spheres must be embedded in the same R^n")
    if k + l != n - 1:
        raise DimensionMismatch(f"need k + l = n - 1, got k={k}, l={l}, n={n}")
    if grid is None:
        grid = make_product_grid(k, l)
    if grid.factor_dims != (k, l):
        raise DimensionMismatch(f"grid is for S^{grid.factor_dims[0]} x S^{grid.factor_dims[1]}")
    q1, q2 = grid.first, grid.second
    a0, a_sh = _tangent_samples(gamma1, q1, step)
    b0, b_sh = _tangent_samples(gamma2, q2, step)
    separation = _min_distance(a0, b0)
    if separation <= SEPARATION_TOL:
        raise ImagesIntersect(f"embedded spheres come within {separation:.3g} of each other", separation)

    total = 0.0
    for i in range(0, q1.size, chunk):
        sl = slice(i, i + chunk)
        cols = [_unit(a0[sl, None, :] - b0[None, :, :])]
        for plus, minus in a_sh:
            cols.append((_unit(plus[sl, None, :] - b0[None, :, :]) - _unit(minus[sl, None, :] - b0[None, :, :])) / (2 * step))
        for plus, minus in b_sh:
            cols.append((_unit(a0[sl, None, :] - plus[None, :, :]) - _unit(a0[sl, None, :] - minus[None, :, :])) / (2 * step))
        det = np.linalg.det(np.stack(cols, axis=-1))
        total += float(np.einsum("i,ij,j->", q1.weights[sl], det, q2.weights))
    value = total / sphere_volume(n - 1)
    result = LinkingResult(value, separation, grid.size, "gauss_map")
    return _check_converged(result) if check else result


# ---------------------------------------------------------------------------
# invariance under homeomorphisms


@dataclass
class InvarianceReport:
    base: LinkingResult
    mapped: LinkingResult
    sense: int
    holds: bool

    def as_dict(self) -> dict:
        return {
            "base": self.base.rounded,
            "mapped": self.mapped.rounded,
            "sense": self.sense,
            "expected": self.sense * self.base.rounded,
            "holds": self.holds,
        }


def verify_linking_invariance(
    gamma1: MapOracle,
    gamma2: MapOracle,
    h: MapOracle,
    sense: int,
    grid: ProductGrid | None = None,
) -> InvarianceReport:
    """Compare l(h∘g1, h∘g2) with sense * l(g1, g2).

    ``sense`` is +1 for a sense-preserving and -1 for a sense-reversing h.
    Circle pairs in R^3 use the Gauss integral; everything else the Gauss map.
    """
    if sense not in (1, -1):
        raise ValueError("sense must be +1 or -1")
    if gamma1.dim_out == 3 and gamma1.dim_in == 2 and gamma2.dim_in == 2 and grid is None:
        base = gauss_linking_circles(gamma1, gamma2)
        mapped = gauss_linking_circles(h.compose(gamma1), h.compose(gamma2))
    else:
        base = linking_number(gamma1, gamma2, grid)
        mapped = linking_number(h.compose(gamma1), h.compose(gamma2), grid)
    return InvarianceReport(base, mapped, sense, mapped.rounded == sense * base.rounded)


def crossing_linking_number(curve1: np.ndarray, curve2: np.ndarray, projection=None, classical: bool = False) -> int:
    """Linking number of two closed polygons from signed crossings.

    Projects both polygons onto the plane orthogonal to ``projection`` and
    sums the right-handed signs of the crossings where ``curve1`` passes over
    ``curve2``. That classical count is negated unless ``classical`` is set,
    to match the Gauss-map convention used everywhere else in this module.
    Independent of the Gauss integral; used as a test oracle.
    """
    if projection is None:
        projection = np.array([0.2113, 0.3571, 0.9098])
    z = np.asarray(projection, dtype=float)
    z /= np.linalg.norm(z)
    helper = np.array([1.0, 0.0, 0.0]) if abs(z[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    ex = np.cross(z, helper)
    ex /= np.linalg.norm(ex)
    ey = np.cross(z, ex)
    basis = np.stack([ex, ey, z])

    a = np.asarray(curve1) @ basis.T
    b = np.asarray(curve2) @ basis.T
    a0, a1 = a, np.roll(a, -1, axis=0)
    b0, b1 = b, np.roll(b, -1, axis=0)
    da = a1 - a0
    db = b1 - b0
    total = 0
    for i in range(len(a)):
        # solve a0 + s da = b0 + t db in the projection plane
        r = b0[:, :2] - a0[i, :2]
        den = da[i, 0] * db[:, 1] - da[i, 1] * db[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (r[:, 0] * db[:, 1] - r[:, 1] * db[:, 0]) / den
            t = (r[:, 0] * da[i, 1] - r[:, 1] * da[i, 0]) / den
        hit = (np.abs(den) > 1e-15) & (s >= 0) & (s < 1) & (t >= 0) & (t < 1)
        for j in np.flatnonzero(hit):
            za = a0[i, 2] + s[j] * da[i, 2]
            zb = b0[j, 2] + t[j] * db[j, 2]
            if za > zb:
                # right-handed crossing sign with curve1 over curve2
                total += int(np.sign(da[i, 0] * db[j, 1] - da[i, 1] * db[j, 0]))
    return total if classical else -total
