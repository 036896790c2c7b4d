"""Mollifier extension to the half-space, small-image homotopies, area formula.

Ef(x, t) = ∫_{B^n} f(x - t y) φ(y) dy is evaluated with a midpoint rule on
the mollifier support and multilinear interpolation of the grid samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.ndimage import map_coordinates
from scipy.signal import fftconvolve
from scipy.spatial import cKDTree

from .errors import DimensionMismatch, WindowEmpty
from .mesh import SphereMesh, signed_solid_angles, sphere_quadrature, sphere_volume
from .oracle import Box, MapOracle
from .sobolev import GridFunction


def bump_profile(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < 1
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


@dataclass(frozen=True)
class Mollifier:
    """Radial kernel φ(y) = c·profile(|y|) supported in the closed unit ball.

    ``nodes``/``weights`` form the midpoint rule with ``per_axis``^n cells on
    [-1, 1]^n; the weights are rescaled to sum to exactly 1.
    """

    dim: int
    profile: Callable = bump_profile
    per_axis: int = 16
    symmetric: bool = True
    normalization: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatch("mollifier dimension must be positive")
        radial, _ = integrate.quad(lambda r: float(self.profile(np.array([r]))[0]) * r ** (self.dim - 1), 0.0, 1.0, epsabs=1e-14, epsrel=1e-12)
        object.__setattr__(self, "normalization", 1.0 / (sphere_volume(self.dim - 1) * radial))
        h = 2.0 / self.per_axis
        centers = -1.0 + h * (np.arange(self.per_axis) + 0.5)
        pts = np.stack(np.meshgrid(*[centers] * self.dim, indexing="ij"), axis=-1).reshape(-1, self.dim)
        vals = self.normalization * self.profile(np.linalg.norm(pts, axis=1))
        keep = vals > 0
        w = vals[keep] * h**self.dim
        object.__setattr__(self, "nodes", pts[keep])
        object.__setattr__(self, "weights", w / w.sum())

    def __call__(self, y):
        y = np.atleast_2d(y)
        return self.normalization * self.profile(np.linalg.norm(y, axis=-1))

    def scaled(self, y, t: float):
        """φ_t(y) = t^{-n} φ(y / t)."""
        return self(np.asarray(y) / t) / t**self.dim

    def quadrature_mass(self) -> float:
        h = 2.0 / self.per_axis
        return float(np.sum(self(self.nodes)) * h**self.dim)

    def first_moment(self) -> np.ndarray:
        return self.weights @ self.nodes

    def gradient_l1(self) -> float:
        """∫ |∇φ|, the constant in the Young-type bound |∇(f*φ_t)| <= ‖f‖_∞ ∫|∇φ| / t."""
        d = 1e-6

        def radial(r):
            slope = (self.profile(np.array([r + d])) - self.profile(np.array([r - d])))[0] / (2 * d)
            return abs(slope) * r ** (self.dim - 1)

        value, _ = integrate.quad(radial, 0.0, 1.0, limit=200)
        return float(self.normalization * sphere_volume(self.dim - 1) * value)


@dataclass
class HalfSpaceFunction:
    """Ef sampled at heights ``t_levels`` over a lattice window of the base box."""

    base: GridFunction
    t_levels: np.ndarray
    values: list
    window: Box
    fill: str

    def level(self, t: float) -> GridFunction:
        i = int(np.argmin(np.abs(self.t_levels - t)))
        return self.values[i]

    def base_on_window(self) -> GridFunction:
        return self.values[0].with_values(_window_slice(self.base, self.window, self.base.values))

    def t_weights(self, t_max: float | None = None) -> np.ndarray:
        """Cell lengths of the partition of (0, t_max] with cuts halfway between levels."""
        t = self.t_levels
        top = t[-1] if t_max is None else t_max
        cuts = np.concatenate([[0.0], (t[1:] + t[:-1]) / 2, [top]])
        return np.diff(cuts)

    def slab_norm(self, q: float, t_max: float | None = None) -> float:
        """‖Ef‖_{L^q} over window × (0, t_max]."""
        wt = self.t_weights(t_max)
        total = 0.0
        for w, g in zip(wt, self.values):
            total += w * float(np.sum(np.linalg.norm(g.values, axis=-1) ** q * g.weights()))
        return total ** (1.0 / q)

    def trace_errors(self, p: float) -> np.ndarray:
        """‖Ef(·, t) - f‖_{L^p(window)} per level."""
        base = self.base_on_window()
        w = base.weights()
        return np.array([float(np.sum(np.linalg.norm(g.values - base.values, axis=-1) ** p * w) ** (1 / p)) for g in self.values])


def _window_indices(f: GridFunction, t_max: float, fill: str):
    if fill == "zero":
        return tuple(slice(0, k) for k in f.resolution)
    x_axes = [np.linspace(lo, hi, k) for lo, hi, k in zip(f.box.corner, f.box.upper, f.resolution)]
    out = []
    for ax, lo, hi in zip(x_axes, f.box.corner, f.box.upper):
        inside = np.flatnonzero((ax - t_max >= lo - 1e-12) & (ax + t_max <= hi + 1e-12))
        if len(inside) < 3:
            raise WindowEmpty(f"the box cannot absorb mollification at t = {t_max}")
        out.append(slice(inside[0], inside[-1] + 1))
    return tuple(out)


def _window_slice(f: GridFunction, window: Box, values):
    idx = []
    for i, (lo, hi, k) in enumerate(zip(f.box.corner, f.box.upper, f.resolution)):
        ax = np.linspace(lo, hi, k)
        inside = np.flatnonzero((ax >= window.corner[i] - 1e-12) & (ax <= window.upper[i] + 1e-12))
        idx.append(slice(inside[0], inside[-1] + 1))
    return values[tuple(idx)]


def _sample(f: GridFunction, points: np.ndarray, fill: str) -> np.ndarray:
    """Multilinear interpolation of f at arbitrary points, shape (N, m)."""
    coords = ((points - f.box.corner) / f.spacing).T
    mode = "constant" if fill == "zero" else "nearest"
    return np.stack([map_coordinates(f.values[..., j], coords, order=1, mode=mode, cval=0.0) for j in range(f.codim)], axis=-1)


def extension_at(f: GridFunction, phi: Mollifier, x, t, fill: str = "zero") -> np.ndarray:
    """Ef at arbitrary points x (N, n) and heights t (N,)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t = np.broadcast_to(np.asarray(t, dtype=float), (len(x),))
    out = np.zeros((len(x), f.codim))
    for j0 in range(0, len(phi.weights), 64):
        y = phi.nodes[j0: j0 + 64]
        w = phi.weights[j0: j0 + 64]
        pts = x[:, None, :] - t[:, None, None] * y[None, :, :]
        vals = _sample(f, pts.reshape(-1, f.dim), fill).reshape(len(x), len(y), f.codim)
        out += np.einsum("j,ijm->im", w, vals)
    return out


def extend(f: GridFunction, phi: Mollifier, t_levels, fill: str = "window") -> HalfSpaceFunction:
    """Ef(·, t) on the lattice for each t in ``t_levels``.

    ``fill="window"`` shrinks the evaluation window so every ball B(x, t)
    stays in the box; ``"zero"`` extends f by zero and keeps the whole box.
    """
    if phi.dim != f.dim:
        raise DimensionMismatch("mollifier and grid function dimensions differ")
    if fill not in ("window", "zero"):
        raise ValueError("fill must be 'window' or 'zero'")
    t_levels = np.sort(np.asarray(t_levels, dtype=float))
    if len(t_levels) == 0 or t_levels[0] <= 0 or t_levels[-1] > 1:
        raise ValueError("t levels must lie in (0, 1]")
    idx = _window_indices(f, t_levels[-1], fill)
    pts = f.points()[idx]
    window = Box.from_bounds(pts.reshape(-1, f.dim).min(axis=0), pts.reshape(-1, f.dim).max(axis=0))
    levels = []
    for t in t_levels:
        kernel = _splat_kernel(phi, t, f.spacing)
        flipped = kernel[(slice(None, None, -1),) * f.dim]
        vals = np.stack([fftconvolve(f.values[..., j], flipped, mode="same") for j in range(f.codim)], axis=-1)
        levels.append(GridFunction(window, vals[idx]))
    return HalfSpaceFunction(f, t_levels, levels, window, fill)


def _splat_kernel(phi: Mollifier, t: float, spacing: np.ndarray) -> np.ndarray:
    """Lattice kernel K with Ef(x_i) = Σ_k K[k] f(x_{i+k}) on lattice nodes.

    Each midpoint node -t·y_j lands between lattice nodes; its weight is
    shared among the 2^n surrounding nodes with multilinear weights, which
    reproduces multilinear interpolation of f exactly.
    """
    n = phi.dim
    u = -t * phi.nodes / spacing
    radius = int(np.ceil(np.max(np.abs(u)))) + 1
    base = np.floor(u).astype(int)
    frac = u - base
    kernel = np.zeros((2 * radius + 1,) * n)
    for corner in np.ndindex(*(2,) * n):
        c = np.array(corner)
        w = phi.weights * np.prod(np.where(c == 1, frac, 1.0 - frac), axis=1)
        np.add.at(kernel, tuple((base + c + radius).T), w)
    return kernel


def extension_exponent(n: int, p: float) -> float:
    """q = (n + 1) p / n."""
    return (n + 1) * p / n


# ---------------------------------------------------------------------------
# L^q bound and the gradient inequality


DEFAULT_SLAB_LEVELS = np.concatenate([np.geomspace(2e-3, 0.05, 6), np.linspace(0.1, 1.0, 10)])


@dataclass
class ExtensionBoundReport:
    n: int
    p: float
    q: float
    ratios: list
    max_ratio: float
    spread: float
    stable: bool
    gradient_constant: float
    gradient_holdout: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def lq_ratio(f: GridFunction, phi: Mollifier, p: float, t_levels=DEFAULT_SLAB_LEVELS) -> float:
    """‖Ef‖_{L^q(window × (0, 1])} / ‖f‖_{L^p}, f extended by zero."""
    q = extension_exponent(f.dim, p)
    ef = extend(f, phi, t_levels, fill="zero")
    fp = float(np.sum(np.linalg.norm(f.values, axis=-1) ** p * f.weights()) ** (1 / p))
    return ef.slab_norm(q, t_max=1.0) / fp


def gradient_inequality(f: GridFunction, phi: Mollifier, samples: int = 500, seed: int = 0, step: float = 1e-4) -> tuple[float, float]:
    """Fit C in |∇Ef(x, t)| <= C ⨍_{B(x,t)} |∇f| at random (x, t).

    Returns the constant fitted on the first half of the samples and the
    worst ratio on the second half relative to it.
    """
    rng = np.random.default_rng(seed)
    n = f.dim
    t = rng.uniform(0.05, 0.5, samples)
    x = f.box.corner + t[:, None] + rng.random((samples, n)) * (f.box.sides - 2 * t[:, None])
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        cols.append((extension_at(f, phi, x + e, t) - extension_at(f, phi, x - e, t)) / (2 * step))
    cols.append((extension_at(f, phi, x, t + step) - extension_at(f, phi, x, t - step)) / (2 * step))
    grad_e = np.sqrt(sum(np.sum(c**2, axis=-1) for c in cols))
    grad_f = np.sqrt(np.sum(f.gradient() ** 2, axis=(-2, -1)))
    gf = f.with_values(grad_f[..., None])
    ball = phi.nodes[np.linalg.norm(phi.nodes, axis=1) <= 1]
    avg = np.zeros(samples)
    for y in np.array_split(ball, max(1, len(ball) // 64)):
        pts = x[:, None, :] + t[:, None, None] * y[None, :, :]
        avg += _sample(gf, pts.reshape(-1, n), "zero").reshape(samples, len(y)).sum(axis=1)
    avg /= len(ball)
    keep = avg > 1e-12
    ratio = grad_e[keep] / avg[keep]
    half = len(ratio) // 2
    fitted = float(ratio[:half].max())
    return fitted, float(ratio[half:].max() / fitted)


def verify_extension_bounds(f_set, phi: Mollifier, p: float, t_levels=DEFAULT_SLAB_LEVELS, gradient_samples: int = 500) -> ExtensionBoundReport:
    """Empirical constant of ‖Ef‖_q <= C‖f‖_p over a family of test functions."""
    if p <= 1:
        raise ValueError("p must exceed 1")
    f_set = list(f_set)
    n = f_set[0].dim
    ratios = [lq_ratio(f, phi, p, t_levels) for f in f_set]
    consts = [gradient_inequality(f, phi, gradient_samples) for f in f_set]
    spread = max(ratios) / min(ratios)
    return ExtensionBoundReport(
        n,
        p,
        extension_exponent(n, p),
        ratios,
        max(ratios),
        spread,
        spread < 2.0,
        max(c for c, _ in consts),
        max(h for _, h in consts),
    )


def smoothing_constant(f: GridFunction, phi: Mollifier, t: float, fill: str = "window") -> float:
    """t · ‖∇ₓEf(·, t)‖_∞ / ‖f‖_∞; bounded by ``phi.gradient_l1()``."""
    g = extend(f, phi, [t], fill=fill).values[0]
    grad = np.sqrt(np.sum(g.gradient() ** 2, axis=(-2, -1)))
    return float(t * grad.max() / np.abs(f.values).max())


# ---------------------------------------------------------------------------
# small-image homotopy on the sphere


def smooth_step(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3 - 2 * t)


def _vertex_areas(mesh: SphereMesh) -> np.ndarray:
    area = np.abs(signed_solid_angles(mesh.simplex_points()))
    out = np.zeros(mesh.n_vertices)
    np.add.at(out, mesh.simplices.ravel(), np.repeat(area / (mesh.dim + 1), mesh.dim + 1))
    return out


class SphereLocator:
    """Radial point location in a sphere mesh with barycentric weights."""

    def __init__(self, mesh: SphereMesh, candidates: int = 12):
        self.mesh = mesh
        pts = mesh.simplex_points()
        c = pts.mean(axis=1)
        self.tree = cKDTree(c / np.linalg.norm(c, axis=1, keepdims=True))
        self.inv = np.linalg.inv(np.swapaxes(pts, 1, 2))
        self.k = min(candidates, mesh.n_simplices)

    def _solve(self, x, simplices):
        lam = np.einsum("...ij,...j->...i", self.inv[simplices], x)
        return lam

    def locate(self, x) -> tuple[np.ndarray, np.ndarray]:
        """(simplex index, barycentric weights) for unit vectors x."""
        x = np.atleast_2d(x)
        _, cand = self.tree.query(x / np.linalg.norm(x, axis=1, keepdims=True), k=self.k)
        cand = cand.reshape(len(x), -1)
        lam = self._solve(x[:, None, :], cand)
        ok = np.all(lam >= -1e-12, axis=-1)
        first = np.argmax(ok, axis=1)
        rows = np.arange(len(x))
        simplex = cand[rows, first]
        bary = lam[rows, first]
        missing = np.flatnonzero(~ok.any(axis=1))
        for i in missing:
            all_lam = self._solve(x[i][None, :], np.arange(self.mesh.n_simplices))
            j = int(np.argmax(np.min(all_lam, axis=1)))
            simplex[i], bary[i] = j, all_lam[j]
        bary = np.clip(bary, 0.0, None)
        return simplex, bary / bary.sum(axis=1, keepdims=True)

    def interpolate(self, x, vertex_values: np.ndarray) -> np.ndarray:
        simplex, bary = self.locate(x)
        idx = self.mesh.simplices[simplex]
        return np.einsum("nv,nvm->nm", bary, vertex_values[idx])


class SphereHomotopy:
    """H(x, t) = g(x) + χ(t) · (M_{s(t)} h)(x) with h = f - g on the mesh vertices.

    M_s averages vertex values against the mollifier profile in geodesic
    distance at scale s(t) = s0 (1 - t), weighted by vertex areas, and is
    interpolated piecewise linearly. χ is the cubic smooth step, so
    H(·, 0) = g and H(·, 1) = g + interp(h), the mesh interpolant of f.
    """

    def __init__(self, mesh: SphereMesh, f_values, g: MapOracle, phi: Mollifier, s0: float = 0.5):
        f_values = np.asarray(f_values, dtype=float)
        if f_values.shape[0] != mesh.n_vertices:
            raise DimensionMismatch("need one f value per mesh vertex")
        if g.dim_in != mesh.dim + 1 or g.dim_out != f_values.shape[1]:
            raise DimensionMismatch("g must map R^{n+1} to the target of f")
        if g.dim_out < mesh.dim + 1:
            raise DimensionMismatch("target dimension must be at least n + 1")
        self.mesh = mesh
        self.g = g
        self.phi = phi
        self.s0 = s0
        self.h = f_values - g(mesh.vertices)
        self.areas = _vertex_areas(mesh)
        cosines = np.clip(mesh.vertices @ mesh.vertices.T, -1.0, 1.0)
        self.geodesic = np.arccos(cosines)
        self.locator = SphereLocator(mesh)
        self._cache: dict = {}

    @property
    def dim(self) -> int:
        return self.mesh.dim

    @property
    def codim(self) -> int:
        return self.g.dim_out

    def scale(self, t):
        return self.s0 * (1.0 - np.asarray(t, dtype=float))

    def mollified(self, t: float) -> np.ndarray:
        """Vertex values of M_{s(t)} h."""
        key = float(t)
        if key not in self._cache:
            s = float(self.scale(t))
            if s <= 0:
                out = self.h.copy()
            else:
                k = self.phi.profile(self.geodesic / s) * self.areas[None, :]
                k[np.diag_indices_from(k)] = np.maximum(np.diag(k), 1e-300)
                out = (k @ self.h) / k.sum(axis=1, keepdims=True)
            if len(self._cache) > 512:
                self._cache.clear()
            self._cache[key] = out
        return self._cache[key]

    def __call__(self, x, t) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.broadcast_to(np.asarray(t, dtype=float), (len(x),))
        simplex, bary = self.locator.locate(x)
        idx = self.mesh.simplices[simplex]
        out = self.g(x)
        for tv in np.unique(t):
            rows = t == tv
            mh = self.mollified(tv)
            out[rows] += smooth_step(tv) * np.einsum("nv,nvm->nm", bary[rows], mh[idx[rows]])
        return out


def build_homotopy(mesh: SphereMesh, f_values, g: MapOracle, phi: Mollifier | None = None, s0: float = 0.5) -> SphereHomotopy:
    if phi is None:
        phi = Mollifier(mesh.dim)
    return SphereHomotopy(mesh, f_values, g, phi, s0)


def hausdorff_volume_estimate(H, mesh: SphereMesh, t_levels=16, step: float = 1e-6) -> float:
    """∫_0^1 ∫_{S^n} √det(DHᵀ DH) dσ dt by centroid × midpoint quadrature.

    ``H(x, t)`` takes unit vectors (N, n+1) and heights (N,). ``t_levels`` is
    an interval count or the partition points of [0, 1].
    """
    cuts = np.linspace(0.0, 1.0, t_levels + 1) if np.isscalar(t_levels) else np.asarray(t_levels, dtype=float)
    mids = (cuts[1:] + cuts[:-1]) / 2
    dts = np.diff(cuts)
    quad = sphere_quadrature(mesh)
    k = mesh.dim
    nodes = np.repeat(quad.nodes, len(mids), axis=0)
    frames = np.repeat(quad.frames, len(mids), axis=0)
    tt = np.tile(mids, quad.size)
    weights = np.repeat(quad.weights, len(mids)) * np.tile(dts, quad.size)
    cols = []
    for a in range(k):
        e = frames[:, a]
        plus = np.cos(step) * nodes + np.sin(step) * e
        minus = np.cos(step) * nodes - np.sin(step) * e
        cols.append((H(plus, tt) - H(minus, tt)) / (2 * step))
    cols.append((H(nodes, tt + step) - H(nodes, tt - step)) / (2 * step))
    dh = np.stack(cols, axis=-1)
    gram = np.einsum("nmi,nmj->nij", dh, dh)
    jac = np.sqrt(np.clip(np.linalg.det(gram), 0.0, None))
    return float(np.sum(jac * weights))


# ---------------------------------------------------------------------------
# |det(A + B)| <= C(n) (|A|^n + |B|^n)


def det_bound_constant(n: int) -> float:
    """2^{n-1} Λ(n) with Λ(n) = max{|det M| : |M|_HS <= 1} = n^{-n/2}."""
    return 2.0 ** (n - 1) * n ** (-n / 2)


def hs_ball_max_det(n: int, starts: int = 8, seed: int = 0) -> float:
    """Λ(n) by direct optimization over the unit Hilbert-Schmidt sphere."""
    rng = np.random.default_rng(seed)

    def neg(v):
        m = v.reshape(n, n)
        return -abs(np.linalg.det(m / np.linalg.norm(m)))

    best = 0.0
    for _ in range(starts):
        res = optimize.minimize(neg, rng.standard_normal(n * n), method="Nelder-Mead" if n == 1 else "BFGS")
        best = max(best, -res.fun)
    return float(best)


@dataclass
class DetBoundReport:
    n: int
    trials: int
    max_ratio: float
    bound: float
    lambda_closed: float
    lambda_optimized: float
    holds: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def det_ratio(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.shape[-1]
    num = np.abs(np.linalg.det(a + b))
    den = np.linalg.norm(a, axis=(-2, -1)) ** n + np.linalg.norm(b, axis=(-2, -1)) ** n
    return num / den


def det_bound_check(n: int, trials: int = 100_000, seed: int = 0, chunk: int = 20_000) -> DetBoundReport:
    if n < 1:
        raise ValueError("n must be positive")
    if trials < 1000:
        raise ValueError("use at least 1000 trials")
    rng = np.random.default_rng(seed)
    best = 0.0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        a = rng.standard_normal((m, n, n))
        b = rng.standard_normal((m, n, n))
        best = max(best, float(det_ratio(a, b).max()))
        done += m
    bound = det_bound_constant(n)
    return DetBoundReport(n, trials, best, bound, n ** (-n / 2), hs_ball_max_det(n), best <= bound * (1 + 1e-12))
