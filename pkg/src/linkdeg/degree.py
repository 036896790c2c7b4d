"""Local degree of maps on boxes and degree of maps between spheres.

Three independent routes:

* regular-value counting: locate every preimage by Newton iteration and sum
  the Jacobian signs;
* simplicial covering: count, with sign, the image simplices of a sphere mesh
  that cover a fixed direction;
* the Kronecker integral of det(psi, d_1 psi, ..., d_k psi) with
  psi = f / |f| over the sphere.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundaryHit,
    DegenerateSimplex,
    DimensionMismatch,
    NearZero,
    NotConverged,
    SingularPreimage,
    ZeroVertex,
)
from .mesh import EmbeddedSphere, SphereMesh, SphereQuadrature, make_sphere_mesh, sphere_quadrature, sphere_volume
from .oracle import Box, MapOracle, newton_solve

logger = logging.getLogger(__name__)

ACCEPT_RESIDUAL = 0.25
REJECT_RESIDUAL = 0.5

DEFAULT_DIRECTION = np.array([0.31415926, 0.57721566, 0.69314718, 0.41421356])


def classify_residual(residual: float) -> str:
    """Map a rounding residual onto ``ok`` / ``warn`` / ``reject``."""
    if residual < ACCEPT_RESIDUAL:
        return "ok"
    if residual < REJECT_RESIDUAL:
        return "warn"
    return "reject"


@dataclass
class DegreeResult:
    value: float
    method: str
    preimages: list | None = None
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
        return self.residual < REJECT_RESIDUAL

    def as_dict(self) -> dict:
        out = {
            "value": float(self.value),
            "rounded": self.rounded,
            "residual": self.residual,
            "method": self.method,
            "status": self.status,
        }
        if self.preimages is not None:
            out["preimages"] = [
                {"point": [float(c) for c in pt], "sign": int(sg)} for pt, sg in self.preimages
            ]
        out.update(self.extra)
        return out


# ---------------------------------------------------------------------------
# regular values


def _dedup(points: np.ndarray, radius: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for pt in points[np.lexsort(points.T[::-1])]:
        if all(np.linalg.norm(pt - q) > radius for q in kept):
            kept.append(pt)
    return np.array(kept).reshape(-1, points.shape[1])


def boundary_distance(phi: MapOracle, domain: Box, p, per_axis: int = 33) -> float:
    """Minimum sampled distance from p to phi(boundary of domain)."""
    samples = domain.boundary_samples(per_axis)
    return float(np.min(np.linalg.norm(phi(samples) - np.asarray(p, dtype=float), axis=1)))


def find_preimages(
    phi: MapOracle,
    domain: Box,
    p,
    seeds_per_axis: int = 16,
    dedup_radius: float = 1e-6,
    tol: float = 1e-11,
) -> tuple[np.ndarray, int]:
    """All Newton-located solutions of phi(x) = p inside the closed box."""
    n = domain.dim
    centers = (np.arange(seeds_per_axis) + 0.5) / seeds_per_axis
    axes = [domain.corner[i] + domain.sides[i] * centers for i in range(n)]
    seeds = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    scale = max(1.0, float(np.linalg.norm(p)))
    res = newton_solve(phi, p, seeds, max_iter=50, tol=tol * scale)
    ok = (res.residuals <= 1e-9 * scale) & domain.contains(res.points, tol=1e-12)
    return _dedup(res.points[ok], dedup_radius), len(seeds)


def local_degree_regular(
    phi: MapOracle,
    domain: Box,
    p,
    seeds_per_axis: int = 16,
    boundary_tol: float = 1e-3,
    boundary_per_axis: int = 33,
    jacobian_tol: float = 1e-8,
) -> DegreeResult:
    """deg(phi, domain, p) as the signed count of preimages of p.

    Raises BoundaryHit when p is within ``boundary_tol`` of the sampled
    boundary image, and SingularPreimage when a located preimage has
    |J| < ``jacobian_tol``.
    """
    p = np.asarray(p, dtype=float).ravel()
    if phi.dim_in != phi.dim_out or phi.dim_in != domain.dim or len(p) != domain.dim:
        raise DimensionMismatch("local degree needs phi: R^n -> R^n, a box in R^n and p in R^n")
    dist = boundary_distance(phi, domain, p, boundary_per_axis)
    if dist < boundary_tol:
        raise BoundaryHit(
            f"p={p.tolist()} is {dist:.3g} from the boundary image (tolerance {boundary_tol:g})"
        )
    points, seeds = find_preimages(phi, domain, p, seeds_per_axis)
    preimages = []
    if len(points):
        dets = np.atleast_1d(phi.jacobian_det(points))
        for pt, det in zip(points, dets):
            if abs(det) < jacobian_tol:
                raise SingularPreimage(
                    f"|J| = {abs(det):.3g} at preimage {pt.tolist()}; p is not a regular value",
                    point=pt,
                )
            preimages.append((pt, int(np.sign(det))))
    value = float(sum(sg for _, sg in preimages))
    return DegreeResult(
        value,
        "regular_value",
        preimages,
        {"seeds": seeds, "boundary_distance": dist},
    )


def local_degree_perturbed(phi: MapOracle, domain: Box, p, attempts: int = 5, jitter: float = 1e-3, seed: int = 0, **kw) -> DegreeResult:
    """Retry ``local_degree_regular`` with p jittered on SingularPreimage.

    The degree is constant on components of the complement of the boundary
    image, so a small jitter does not change the answer.
    """
    rng = np.random.default_rng(seed)
    p = np.asarray(p, dtype=float)
    q = p
    for attempt in range(attempts + 1):
        try:
            result = local_degree_regular(phi, domain, q, **kw)
            result.extra["jitter_attempts"] = attempt
            result.extra["evaluated_at"] = q.tolist()
            return result
        except SingularPreimage:
            if attempt == attempts:
                raise
            d = rng.standard_normal(len(p))
            q = p + jitter * d / np.linalg.norm(d)
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# sphere maps


def _images_of(sphere, images=None):
    if isinstance(sphere, EmbeddedSphere):
        return sphere.base_mesh, np.asarray(sphere.image_vertices, dtype=float)
    if images is None:
        raise TypeError("pass an EmbeddedSphere or a mesh together with vertex images")
    return sphere, np.asarray(images, dtype=float)


def degree_sphere_map_simplicial(
    sphere: EmbeddedSphere | SphereMesh,
    images=None,
    direction=None,
    max_redraws: int = 8,
    seed: int = 0,
) -> DegreeResult:
    """Degree of a vertex-mapped sphere map S^k -> R^{k+1} \\ {0}.

    Vertex images are projected radially to S^k. The signed number of image
    simplices whose cone contains ``direction`` is the degree. If the
    direction lands on an image simplex boundary or inside the span of a flat
    image simplex it is redrawn (at most ``max_redraws`` times).
    """
    mesh, imgs = _images_of(sphere, images)
    k = mesh.dim
    if imgs.shape != (mesh.n_vertices, k + 1):
        raise DimensionMismatch(f"need one image in R^{k + 1} per vertex")
    norms = np.linalg.norm(imgs, axis=1)
    if norms.min() < 1e-12:
        i = int(norms.argmin())
        raise ZeroVertex(f"vertex {i} maps to {imgs[i].tolist()}, which is (numerically) zero")
    unit = imgs / norms[:, None]
    cones = unit[mesh.simplices]  # (S, k+1 vertices, k+1 coords)
    det = np.linalg.det(cones)
    flat = np.abs(det) < 1e-10
    rng = np.random.default_rng(seed)
    if direction is None:
        d = DEFAULT_DIRECTION[: k + 1]
    else:
        d = np.asarray(direction, dtype=float)
        if len(d) != k + 1:
            raise DimensionMismatch(f"direction must lie in R^{k + 1}")
    d = d / np.linalg.norm(d)
    for attempt in range(max_redraws + 1):
        count, bad = _cover_count(cones, det, flat, mesh.signs, d)
        if not bad:
            return DegreeResult(
                float(count),
                "simplicial",
                extra={"direction": d.tolist(), "redraws": attempt, "flat_simplices": int(flat.sum())},
            )
        d = rng.standard_normal(k + 1)
        d /= np.linalg.norm(d)
    raise DegenerateSimplex(
        f"direction kept hitting image simplex boundaries or flat simplices after {max_redraws} redraws"
    )


def _cover_count(cones, det, flat, signs, d):
    good = ~flat
    lam = np.linalg.solve(np.swapaxes(cones[good], 1, 2), np.broadcast_to(d, (good.sum(), len(d)))[..., None])[..., 0]
    if np.any(np.all(lam > -1e-9, axis=1) & np.any(np.abs(lam) <= 1e-9, axis=1)):
        return 0, True
    covering = np.all(lam > 0, axis=1)
    count = int(np.sum(signs[good][covering] * np.sign(det[good][covering])))
    if flat.any():
        # a flat cone matters only if the direction sits in it
        for cone in cones[flat]:
            coef, *_ = np.linalg.lstsq(cone.T, d, rcond=None)
            if np.linalg.norm(cone.T @ coef - d) < 1e-8 and np.all(coef > -1e-9):
                return 0, True
    return count, False


def _quadrature(spec, k: int) -> SphereQuadrature:
    if isinstance(spec, SphereQuadrature):
        return spec
    if isinstance(spec, SphereMesh):
        return sphere_quadrature(spec)
    if spec is None:
        spec = 7 if k == 1 else 4 if k == 2 else 2
    return sphere_quadrature(make_sphere_mesh(k, int(spec)))


def degree_sphere_map_kronecker(
    f: MapOracle,
    quadrature=None,
    normalize: bool = True,
    step: float = 1e-5,
) -> DegreeResult:
    """Kronecker integral of f / |f| over S^k.

    ``quadrature`` is a SphereQuadrature, a SphereMesh, or a refinement level.
    With ``normalize`` the integral is divided by vol(S^k) so the value
    approximates the (integer) degree.
    """
    k = f.dim_in - 1
    if f.dim_out != f.dim_in:
        raise DimensionMismatch("sphere map must send R^{k+1} to R^{k+1}")
    quad = _quadrature(quadrature, k)
    vals = f(quad.nodes)
    norms = np.linalg.norm(vals, axis=1)
    if norms.min() < 1e-8:
        raise NearZero(f"|f| = {norms.min():.3g} on the sphere; the degree is undefined")
    cols = [vals / norms[:, None]]
    for a in range(k):
        e = quad.frames[:, a]
        plus = f(np.cos(step) * quad.nodes + np.sin(step) * e)
        minus = f(np.cos(step) * quad.nodes - np.sin(step) * e)
        plus /= np.linalg.norm(plus, axis=1, keepdims=True)
        minus /= np.linalg.norm(minus, axis=1, keepdims=True)
        cols.append((plus - minus) / (2 * step))
    integrand = np.linalg.det(np.stack(cols, axis=-1))
    total = float(np.dot(quad.weights, integrand))
    value = total / sphere_volume(k) if normalize else total
    result = DegreeResult(value, "kronecker", extra={"nodes": quad.size, "min_norm": float(norms.min())})
    if normalize and result.residual >= ACCEPT_RESIDUAL:
        raise NotConverged(
            f"Kronecker integral {value:.4f} is {result.residual:.3f} from an integer; refine the grid",
            result=result,
        )
    return result


def sphere_map_images(mesh: SphereMesh, f: MapOracle) -> EmbeddedSphere:
    return EmbeddedSphere(mesh, f(mesh.vertices), "custom", None, f)


# ---------------------------------------------------------------------------
# multiplication theorem


@dataclass
class MultiplicationReport:
    lhs: int
    rhs: int
    terms: list
    agree: bool

    def as_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "terms": self.terms, "agree": self.agree}


def _image_box(phi: MapOracle, domain: Box, per_axis: int = 24, pad: float = 0.1) -> Box:
    pts = np.concatenate([domain.lattice(per_axis), domain.boundary_samples(per_axis)])
    img = phi(pts)
    lo, hi = img.min(axis=0), img.max(axis=0)
    margin = pad * np.maximum(hi - lo, 1e-3)
    return Box.from_bounds(lo - margin, hi + margin)


def verify_multiplication(phi: MapOracle, psi: MapOracle, domain: Box, p, **kw) -> MultiplicationReport:
    """Check deg(psi∘phi, domain, p) = sum_y sgn J_psi(y) deg(phi, domain, y).

    The sum runs over the preimages y of p under psi; grouping them by the
    components of the complement of phi(boundary) gives the multiplication
    formula with q_i = y.
    """
    lhs = local_degree_regular(psi.compose(phi), domain, p, **kw)
    outer = _image_box(phi, domain)
    psi_deg = local_degree_regular(psi, outer, p, **kw)
    terms = []
    rhs = 0
    for y, sign in psi_deg.preimages:
        inner = local_degree_regular(phi, domain, y, **kw)
        terms.append({"q": [float(c) for c in y], "deg_psi": sign, "deg_phi": inner.rounded})
        rhs += sign * inner.rounded
    return MultiplicationReport(lhs.rounded, rhs, terms, lhs.rounded == rhs)
