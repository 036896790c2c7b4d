"""Map evaluators, domains, and vectorized Newton iteration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch

DEFAULT_STEP = 1e-5


@dataclass(frozen=True)
class MapOracle:
    """A map R^dim_in -> R^dim_out with finite-difference Jacobians.

    ``evaluate`` must accept an array of shape (N, dim_in) and return
    (N, dim_out). Calling the oracle also accepts a single point.
    """

    dim_in: int
    dim_out: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    jacobian_step: float = DEFAULT_STEP
    name: str = ""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        if pts.shape[-1] != self.dim_in:
            raise DimensionMismatch(
                f"{self.name or 'map'} expects points in R^{self.dim_in}, got {pts.shape[-1]}"
            )
        out = np.asarray(self.evaluate(pts), dtype=float).reshape(len(pts), self.dim_out)
        return out[0] if single else out

    def jacobian(self, x):
        """Central-difference Jacobian, shape (N, dim_out, dim_in)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        h = self.jacobian_step
        n = self.dim_in
        # one batched call for all 2n stencil points
        offsets = np.concatenate([np.eye(n), -np.eye(n)]) * h
        stencil = (pts[:, None, :] + offsets[None, :, :]).reshape(-1, n)
        vals = self(stencil).reshape(len(pts), 2 * n, self.dim_out)
        jac = (vals[:, :n, :] - vals[:, n:, :]) / (2 * h)
        jac = np.swapaxes(jac, 1, 2)
        return jac[0] if single else jac

    def jacobian_det(self, x):
        if self.dim_in != self.dim_out:
            raise DimensionMismatch("Jacobian determinant needs a square map")
        return np.linalg.det(self.jacobian(x))

    def compose(self, inner: "MapOracle", name: str = "") -> "MapOracle":
        """Return ``self ∘ inner``."""
        if inner.dim_out != self.dim_in:
            raise DimensionMismatch(
                f"cannot compose R^{inner.dim_out}-valued map into a map on R^{self.dim_in}"
            )
        outer = self
        return MapOracle(
            inner.dim_in,
            outer.dim_out,
            lambda x: outer(inner(x)),
            jacobian_step=min(outer.jacobian_step, inner.jacobian_step),
            name=name or f"{outer.name}∘{inner.name}",
        )


def affine_oracle(matrix, shift=None, name: str = "") -> MapOracle:
    matrix = np.array(matrix, dtype=float)
    m, n = matrix.shape
    shift = np.zeros(m) if shift is None else np.asarray(shift, dtype=float)
    return MapOracle(n, m, lambda x: x @ matrix.T + shift, name=name or "affine")


def reflection_matrix(n: int) -> np.ndarray:
    """Diag(1, ..., 1, -1)."""
    r = np.eye(n)
    r[-1, -1] = -1.0
    return r


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by its lower corner and side lengths."""

    corner: np.ndarray
    sides: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "corner", np.asarray(self.corner, dtype=float).ravel())
        object.__setattr__(self, "sides", np.asarray(self.sides, dtype=float).ravel())
        if self.corner.shape != self.sides.shape:
            raise DimensionMismatch("corner and sides must have the same length")
        if np.any(self.sides <= 0):
            raise ValueError("box sides must be positive")

    @classmethod
    def cube(cls, n: int, lo: float = -1.0, hi: float = 1.0) -> "Box":
        return cls(np.full(n, lo), np.full(n, hi - lo))

    @classmethod
    def from_bounds(cls, lower, upper) -> "Box":
        lower = np.asarray(lower, dtype=float)
        return cls(lower, np.asarray(upper, dtype=float) - lower)

    @property
    def dim(self) -> int:
        return len(self.corner)

    @property
    def upper(self) -> np.ndarray:
        return self.corner + self.sides

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.all((points >= self.corner - tol) & (points <= self.upper + tol), axis=-1)

    def contains_box(self, other: "Box", tol: float = 1e-12) -> bool:
        return bool(np.all(other.corner >= self.corner - tol) and np.all(other.upper <= self.upper + tol))

    def boundary_samples(self, per_axis: int = 33) -> np.ndarray:
        """Uniform lattice points on every face of the box."""
        n = self.dim
        axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(self.corner, self.upper)]
        faces = []
        for i in range(n):
            others = [axes[j] for j in range(n) if j != i]
            grid = np.stack(np.meshgrid(*others, indexing="ij"), axis=-1).reshape(-1, n - 1) if others else np.zeros((1, 0))
            for value in (self.corner[i], self.upper[i]):
                face = np.insert(grid, i, value, axis=1)
                faces.append(face)
        return np.concatenate(faces)

    def lattice(self, per_axis: int) -> np.ndarray:
        axes = [np.linspace(lo, hi, per_axis) for lo, hi in zip(self.corner, self.upper)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).ravel())

    @property
    def dim(self) -> int:
        return len(self.center)

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.linalg.norm(points - self.center, axis=-1) <= self.radius + tol

    def bounding_box(self) -> Box:
        return Box(self.center - self.radius, np.full(self.dim, 2 * self.radius))


@dataclass
class NewtonResult:
    points: np.ndarray
    residuals: np.ndarray
    converged: np.ndarray
    iterations: int = 0
    seeds: int = 0
    extra: dict = field(default_factory=dict)


def newton_solve(
    oracle: MapOracle,
    target,
    seeds,
    max_iter: int = 50,
    tol: float = 1e-11,
    armijo: float = 1e-4,
) -> NewtonResult:
    """Damped Newton iteration for ``oracle(x) = target`` from many seeds at once.

    The merit function is ``|F(x) - target|^2``; each step is halved until the
    Armijo decrease condition holds (at most 30 halvings).
    """
    target = np.asarray(target, dtype=float)
    x = np.array(np.atleast_2d(seeds), dtype=float)
    fx = oracle(x) - target
    merit = np.einsum("ij,ij->i", fx, fx)
    active = np.ones(len(x), dtype=bool)
    it = 0
    for it in range(1, max_iter + 1):
        active &= np.sqrt(merit) > tol
        if not active.any():
            break
        idx = np.flatnonzero(active)
        jac = oracle.jacobian(x[idx])
        try:
            step = np.linalg.solve(jac, -fx[idx][..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = -(np.linalg.pinv(jac) @ fx[idx][..., None])[..., 0]
        step = np.where(np.isfinite(step), step, 0.0)
        lam = np.ones(len(idx))
        pending = np.ones(len(idx), dtype=bool)
        new_x = x[idx].copy()
        new_f = fx[idx].copy()
        new_m = merit[idx].copy()
        for _ in range(30):
            if not pending.any():
                break
            p = np.flatnonzero(pending)
            trial = x[idx[p]] + lam[p, None] * step[p]
            ft = oracle(trial) - target
            mt = np.einsum("ij,ij->i", ft, ft)
            ok = mt <= (1 - 2 * armijo * lam[p]) * merit[idx[p]]
            ok |= ~np.isfinite(merit[idx[p]])
            good = p[ok]
            new_x[good] = trial[ok]
            new_f[good] = ft[ok]
            new_m[good] = mt[ok]
            pending[good] = False
            lam[p[~ok]] *= 0.5
        # seeds whose line search failed are stalled
        stalled = pending
        x[idx] = new_x
        fx[idx] = new_f
        merit[idx] = new_m
        active[idx[stalled]] = False
    res = np.sqrt(merit)
    return NewtonResult(x, res, res <= tol * 10, iterations=it, seeds=len(x))


def numerical_inverse(oracle: MapOracle, guess: Callable[[np.ndarray], np.ndarray] | None = None, name: str = "", tol: float = 1e-13) -> MapOracle:
    """Inverse of a diffeomorphism by Newton iteration started at ``guess(y)``."""

    def evaluate(y):
        x = np.array(y if guess is None else guess(y), dtype=float)
        for _ in range(60):
            f = oracle(x) - y
            if np.max(np.abs(f), initial=0.0) < tol:
                break
            jac = oracle.jacobian(x)
            x = x - np.linalg.solve(jac, f[..., None])[..., 0]
        return x

    return MapOracle(oracle.dim_out, oracle.dim_in, evaluate, name=name or f"{oracle.name}^-1")
