"""Oriented triangulated spheres, product quadrature grids, torus embeddings.

Orientation convention: a simplex (v_0, ..., v_k) of a mesh of S^k carries
sign +1 when det(v_0, ..., v_k) > 0 with the vertices as columns, i.e. when
its vertex order agrees with the outward-normal orientation of the sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InvalidMesh, OutOfBall, UnsupportedDimension
from .oracle import MapOracle

MAX_SPHERE_DIM = 3


def sphere_volume(k: int) -> float:
    """Surface measure of the unit sphere S^k in R^{k+1}."""
    return 2 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


# ---------------------------------------------------------------------------
# solid angles


@lru_cache(maxsize=None)
def _simplex_rule(k: int, order: int):
    """Collapsed-coordinate Gauss rule on the standard k-simplex."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    grids = np.meshgrid(*([x] * k), indexing="ij")
    wgrids = np.meshgrid(*([w] * k), indexing="ij")
    u = np.stack([g.ravel() for g in grids], axis=-1)
    weight = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    lam = np.zeros_like(u)
    rest = np.ones(len(u))
    for i in range(k):
        lam[:, i] = rest * u[:, i]
        rest = rest * (1.0 - u[:, i])
    # Jacobian of the collapse: prod_i (1 - u_i)^(k-1-i)
    for i in range(k - 1):
        weight = weight * (1.0 - u[:, i]) ** (k - 1 - i)
    return lam, weight


def signed_solid_angles(points: np.ndarray, order: int = 14) -> np.ndarray:
    """Signed solid angle of the cone over each simplex, seen from the origin.

    ``points`` has shape (S, k+1, k+1): S simplices with k+1 vertices each.
    The sign is the sign of det(v_0, ..., v_k).
    """
    points = np.asarray(points, dtype=float)
    k = points.shape[-1] - 1
    if k == 1:
        a, b = points[:, 0], points[:, 1]
        det = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        return np.arctan2(det, np.einsum("ij,ij->i", a, b))
    unit = points / np.linalg.norm(points, axis=-1, keepdims=True)
    if k == 2:
        a, b, c = unit[:, 0], unit[:, 1], unit[:, 2]
        det = np.linalg.det(unit)
        denom = 1.0 + np.einsum("ij,ij->i", a, b) + np.einsum("ij,ij->i", b, c) + np.einsum("ij,ij->i", c, a)
        return 2.0 * np.arctan2(det, denom)
    # k >= 3: integrate det(x, e_1..e_k) / |x|^(k+1) over the flat simplex
    lam, weight = _simplex_rule(k, order)
    v0 = points[:, 0]
    edges = points[:, 1:] - v0[:, None, :]
    det = np.linalg.det(points)
    x = v0[:, None, :] + np.einsum("qi,sid->sqd", lam, edges)
    r = np.linalg.norm(x, axis=-1)
    return det * np.einsum("q,sq->s", weight, r ** (-(k + 1)))


# ---------------------------------------------------------------------------
# sphere meshes


@dataclass(frozen=True)
class SphereMesh:
    dim: int
    vertices: np.ndarray
    simplices: np.ndarray
    signs: np.ndarray
    refinement_level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=float))
        object.__setattr__(self, "simplices", np.asarray(self.simplices, dtype=np.int64))
        object.__setattr__(self, "signs", np.asarray(self.signs, dtype=np.int64))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_simplices(self) -> int:
        return len(self.simplices)

    def simplex_points(self) -> np.ndarray:
        return self.vertices[self.simplices]

    def solid_angles(self) -> np.ndarray:
        """Per-simplex signed solid angle, multiplied by the stored sign."""
        return self.signs * signed_solid_angles(self.simplex_points())

    def signed_solid_angle(self) -> float:
        return float(self.solid_angles().sum())

    def reversed(self) -> "SphereMesh":
        return SphereMesh(self.dim, self.vertices, self.simplices, -self.signs, self.refinement_level)

    def validate(self, tol: float = 1e-12) -> None:
        """Raise InvalidMesh unless every mesh invariant holds."""
        k = self.dim
        if self.vertices.ndim != 2 or self.vertices.shape[1] != k + 1:
            raise InvalidMesh(f"vertices must live in R^{k + 1}")
        if self.simplices.ndim != 2 or self.simplices.shape[1] != k + 1:
            raise InvalidMesh(f"simplices must have {k + 1} vertices")
        if len(self.signs) != len(self.simplices) or not np.all(np.abs(self.signs) == 1):
            raise InvalidMesh("every simplex needs an orientation sign of +1 or -1")
        if self.simplices.min(initial=0) < 0 or self.simplices.max(initial=0) >= self.n_vertices:
            raise InvalidMesh("simplex index out of range")
        norms = np.linalg.norm(self.vertices, axis=1)
        if np.max(np.abs(norms - 1.0)) > tol:
            raise InvalidMesh("vertices must lie on the unit sphere")
        _check_closed_oriented(self)
        total = self.signed_solid_angle()
        if abs(total - sphere_volume(k)) > 1e-6:
            raise InvalidMesh(
                f"signed solid angle {total:.9f} differs from vol(S^{k}) = {sphere_volume(k):.9f}"
            )


def _check_closed_oriented(mesh: SphereMesh) -> None:
    """Every (k-1)-face is shared by two simplices inducing opposite orientations."""
    k = mesh.dim
    faces = {}
    for simplex, sign in zip(mesh.simplices.tolist(), mesh.signs.tolist()):
        for drop in range(k + 1):
            face = simplex[:drop] + simplex[drop + 1:]
            # induced orientation of the face: (-1)^drop times the sign of the
            # permutation sorting it
            order = np.argsort(face)
            parity = _perm_parity(order)
            key = tuple(sorted(face))
            faces.setdefault(key, []).append(sign * (-1) ** drop * parity)
    for key, induced in faces.items():
        if len(induced) != 2:
            raise InvalidMesh(f"face {key} is shared by {len(induced)} simplices")
        if induced[0] != -induced[1]:
            raise InvalidMesh(f"face {key} has inconsistent induced orientations")


def _perm_parity(perm) -> int:
    perm = list(perm)
    parity = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            parity = -parity
    return parity


def _cross_polytope(k: int):
    n = k + 1
    vertices = np.concatenate([np.eye(n), -np.eye(n)])
    simplices = []
    for mask in range(2 ** n):
        simplices.append([i + n * ((mask >> i) & 1) for i in range(n)])
    return vertices, np.array(simplices)


def _subdivide(vertices: np.ndarray, simplices: np.ndarray, k: int):
    """Edge-midpoint subdivision (2, 4 or 8 children per simplex)."""
    verts = [v for v in vertices]
    midpoint = {}

    def mid(a, b):
        key = (a, b) if a < b else (b, a)
        if key not in midpoint:
            m = verts[a] + verts[b]
            verts.append(m / np.linalg.norm(m))
            midpoint[key] = len(verts) - 1
        return midpoint[key]

    children = []
    for s in simplices.tolist():
        if k == 1:
            a, b = s
            m = mid(a, b)
            children += [[a, m], [m, b]]
        elif k == 2:
            a, b, c = s
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            children += [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
        else:
            a, b, c, d = s
            ab, ac, ad = mid(a, b), mid(a, c), mid(a, d)
            bc, bd, cd = mid(b, c), mid(b, d), mid(c, d)
            # red refinement: four corner tets and the octahedron split
            # along the ac-bd diagonal
            children += [
                [a, ab, ac, ad],
                [ab, b, bc, bd],
                [ac, bc, c, cd],
                [ad, bd, cd, d],
                [ab, ac, ad, bd],
                [ab, ac, bc, bd],
                [ac, ad, bd, cd],
                [ac, bc, bd, cd],
            ]
    return np.array(verts), np.array(children)


def make_sphere_mesh(k: int, refinement: int = 0) -> SphereMesh:
    """Triangulate S^k by refining the boundary of the cross-polytope.

    Each refinement step splits every simplex at its edge midpoints and
    projects the new vertices radially onto the sphere.
    """
    if not 1 <= k <= MAX_SPHERE_DIM:
        raise UnsupportedDimension(f"sphere dimension must be in [1, {MAX_SPHERE_DIM}], got {k}")
    if refinement < 0:
        raise ValueError("refinement must be >= 0")
    vertices, simplices = _cross_polytope(k)
    for _ in range(refinement):
        vertices, simplices = _subdivide(vertices, simplices, k)
    signs = np.sign(np.linalg.det(vertices[simplices])).astype(np.int64)
    return SphereMesh(k, vertices, simplices, signs, refinement)


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class SphereQuadrature:
    """Centroid rule on a sphere mesh: one node per simplex.

    ``frames[i]`` is an orthonormal basis of the tangent space at
    ``nodes[i]``, ordered so that det(node, frame) = +1.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    frames: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)


def tangent_frames(nodes: np.ndarray, hints: np.ndarray | None = None) -> np.ndarray:
    """Positively oriented orthonormal tangent frames at unit vectors."""
    nodes = np.asarray(nodes, dtype=float)
    count, d = nodes.shape
    k = d - 1
    if k == 1:
        return np.stack([-nodes[:, 1], nodes[:, 0]], axis=-1)[:, None, :]
    if hints is None:
        # coordinate axes least aligned with the node
        order = np.argsort(np.abs(nodes), axis=1)[:, :k]
        hints = np.eye(d)[order]
    proj = hints - np.einsum("nd,nkd->nk", nodes, hints)[..., None] * nodes[:, None, :]
    q, _ = np.linalg.qr(np.swapaxes(proj, 1, 2))
    frames = np.swapaxes(q, 1, 2)
    full = np.concatenate([nodes[:, None, :], frames], axis=1)
    flip = np.linalg.det(full) < 0
    frames[flip, -1] *= -1
    return frames


def sphere_quadrature(mesh: SphereMesh) -> SphereQuadrature:
    pts = mesh.simplex_points()
    centroid = pts.mean(axis=1)
    nodes = centroid / np.linalg.norm(centroid, axis=1, keepdims=True)
    weights = np.abs(signed_solid_angles(pts))
    hints = pts[:, 1:] - pts[:, :1]
    if mesh.dim == 1:
        hints = None
    frames = tangent_frames(nodes, hints)
    return SphereQuadrature(mesh.dim, nodes, weights, frames)


def circle_quadrature(nodes: int) -> SphereQuadrature:
    """Equally spaced nodes on S^1 (trapezoidal rule)."""
    theta = 2 * np.pi * np.arange(nodes) / nodes
    pts = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return SphereQuadrature(1, pts, np.full(nodes, 2 * np.pi / nodes), tangent_frames(pts))


@dataclass(frozen=True)
class ProductGrid:
    """Tensor-product quadrature on S^k x S^l.

    Nodes are stored factor-wise; ``weights`` is the flattened outer product
    with the S^k index varying slowest.
    """

    first: SphereQuadrature
    second: SphereQuadrature

    @property
    def factor_dims(self) -> tuple[int, int]:
        return self.first.dim, self.second.dim

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.first.weights, self.second.weights).ravel()

    @property
    def size(self) -> int:
        return self.first.size * self.second.size

    @property
    def nodes(self):
        i, j = np.meshgrid(np.arange(self.first.size), np.arange(self.second.size), indexing="ij")
        return self.first.nodes[i.ravel()], self.second.nodes[j.ravel()]


def make_product_grid(k: int, l: int, first=None, second=None) -> ProductGrid:
    """Product grid from refinement levels (int) or node counts for circles.

    ``first``/``second`` may be a SphereMesh, a SphereQuadrature, or an int
    refinement level. For a circle factor an int >= 8 is read as a node count.
    """
    return ProductGrid(_factor(k, first), _factor(l, second))


def _factor(k, spec) -> SphereQuadrature:
    if isinstance(spec, SphereQuadrature):
        if spec.dim != k:
            raise DimensionMismatch(f"quadrature on S^{spec.dim} where S^{k} was required")
        return spec
    if isinstance(spec, SphereMesh):
        if spec.dim != k:
            raise DimensionMismatch(f"mesh of S^{spec.dim} where S^{k} was required")
        return sphere_quadrature(spec)
    if spec is None:
        spec = 128 if k == 1 else 4 if k == 2 else 2
    if k == 1 and spec >= 8:
        return circle_quadrature(int(spec))
    return sphere_quadrature(make_sphere_mesh(k, int(spec)))


# ---------------------------------------------------------------------------
# embeddings


def torus_dims(n: int) -> tuple[int, int]:
    """(nu, [n/2]) with nu = n - 1 - [n/2]."""
    half = n // 2
    return n - 1 - half, half


@dataclass(frozen=True)
class EmbeddedSphere:
    base_mesh: SphereMesh
    image_vertices: np.ndarray
    label: str = "custom"
    parameter: np.ndarray | None = None
    oracle: MapOracle | None = field(default=None, compare=False, repr=False)

    @property
    def ambient_dim(self) -> int:
        return self.image_vertices.shape[1]


def _check_ball_point(point, expected: int, what: str) -> np.ndarray:
    point = np.asarray(point, dtype=float).ravel()
    if len(point) != expected:
        raise DimensionMismatch(f"{what} must have {expected} coordinates, got {len(point)}")
    if np.linalg.norm(point) > 1.0 + 1e-12:
        raise OutOfBall(f"{what} = {point.tolist()} lies outside the closed unit ball")
    return point


def _check_n(n: int) -> None:
    if n < 3:
        raise UnsupportedDimension(f"torus embeddings need n >= 3, got {n}")


def iota1_oracle(n: int, x) -> MapOracle:
    """sigma in S^nu -> iota_1(x, sigma) in R^n."""
    _check_n(n)
    nu, half = torus_dims(n)
    x = _check_ball_point(x, half + 1, "x")
    radius = (5.0 + x[0]) / 10.0
    tail = x[1:] / 10.0

    def evaluate(sigma):
        out = np.empty((len(sigma), n))
        out[:, : nu + 1] = radius * sigma
        out[:, nu] -= 0.25
        out[:, nu + 1:] = tail
        return out

    return MapOracle(nu + 1, n, evaluate, name=f"iota1[x={x.tolist()}]")


def iota2_oracle(n: int, y) -> MapOracle:
    """rho in S^[n/2] -> iota_2(y, rho) in R^n."""
    _check_n(n)
    nu, half = torus_dims(n)
    y = _check_ball_point(y, nu + 1, "y")
    radius = (5.0 + y[nu]) / 10.0
    head = y[:nu] / 10.0

    def evaluate(rho):
        out = np.empty((len(rho), n))
        out[:, :nu] = head
        out[:, nu:] = radius * rho
        out[:, nu] += 0.25
        return out

    return MapOracle(half + 1, n, evaluate, name=f"iota2[y={y.tolist()}]")


def embed_iota1(n: int, x, mesh: SphereMesh) -> EmbeddedSphere:
    _check_n(n)
    nu, _ = torus_dims(n)
    if mesh.dim != nu:
        raise DimensionMismatch(f"iota_1 in R^{n} embeds S^{nu}, got a mesh of S^{mesh.dim}")
    oracle = iota1_oracle(n, x)
    return EmbeddedSphere(mesh, oracle(mesh.vertices), "iota1", np.asarray(x, dtype=float), oracle)


def embed_iota2(n: int, y, mesh: SphereMesh) -> EmbeddedSphere:
    _check_n(n)
    _, half = torus_dims(n)
    if mesh.dim != half:
        raise DimensionMismatch(f"iota_2 in R^{n} embeds S^{half}, got a mesh of S^{mesh.dim}")
    oracle = iota2_oracle(n, y)
    return EmbeddedSphere(mesh, oracle(mesh.vertices), "iota2", np.asarray(y, dtype=float), oracle)


def embed(mesh: SphereMesh, oracle: MapOracle, label: str = "custom") -> EmbeddedSphere:
    return EmbeddedSphere(mesh, oracle(mesh.vertices), label, None, oracle)


def reflect_last(points) -> np.ndarray:
    """Negate the last coordinate of every point."""
    out = np.array(points, dtype=float, copy=True)
    out[..., -1] *= -1
    return out


def surface_area(sphere: EmbeddedSphere) -> float:
    """Sum of k-volumes of the image simplices (Gram determinant)."""
    mesh = sphere.base_mesh
    pts = sphere.image_vertices[mesh.simplices]
    edges = pts[:, 1:] - pts[:, :1]
    gram = edges @ np.swapaxes(edges, 1, 2)
    vol = np.sqrt(np.clip(np.linalg.det(gram), 0.0, None)) / math.factorial(mesh.dim)
    return float(vol.sum())


# ---------------------------------------------------------------------------
# text format: "k V S", V vertex rows, S rows of indices followed by the sign


def save_mesh(mesh: SphereMesh, path) -> None:
    lines = [f"{mesh.dim} {mesh.n_vertices} {mesh.n_simplices}"]
    lines += [" ".join(repr(float(c)) for c in v) for v in mesh.vertices]
    lines += [" ".join(str(int(i)) for i in s) + f" {int(sg):+d}" for s, sg in zip(mesh.simplices, mesh.signs)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_mesh(path) -> SphereMesh:
    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    if not rows or len(rows[0]) != 3:
        raise InvalidMesh("header must read 'k V S'")
    try:
        k, nv, ns = (int(t) for t in rows[0])
        if len(rows) != 1 + nv + ns:
            raise InvalidMesh(f"expected {nv} vertex and {ns} simplex lines, found {len(rows) - 1} lines")
        vertices = np.array([[float(t) for t in r] for r in rows[1: 1 + nv]])
        body = [[int(t) for t in r] for r in rows[1 + nv:]]
    except ValueError as exc:
        raise InvalidMesh(f"malformed mesh file: {exc}") from None
    if any(len(r) != k + 2 for r in body) or vertices.shape[1:] != (k + 1,):
        raise InvalidMesh("row width does not match the declared dimension")
    body = np.array(body, dtype=np.int64).reshape(ns, k + 2)
    mesh = SphereMesh(k, vertices, body[:, :-1], body[:, -1], 0)
    mesh.validate()
    return mesh
