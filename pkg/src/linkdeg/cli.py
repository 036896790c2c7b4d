"""Command-line front end.

Every command prints single-line JSON records (``schema: 1``) on stdout and
a short human-readable table on stderr. Exit codes: 0 success, 2 violated
precondition, 3 non-convergence, 4 anything else.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import catalog
from .degree import (
    degree_sphere_map_kronecker,
    degree_sphere_map_simplicial,
    local_degree_perturbed,
    local_degree_regular,
    verify_multiplication,
)
from .errors import LinkdegError, NotConverged
from .experiments import calibrate, jacobian_sign_experiment, torus_grid, torus_linking
from .extension import Mollifier, det_bound_check, extend, extension_exponent, lq_ratio
from .linking import gauss_linking_circles, linking_number, verify_linking_invariance
from .mesh import circle_quadrature, make_sphere_mesh
from .oracle import Ball, Box, MapOracle
from .records import CalibrationState, ResultRecord, default_config_path
from .sobolev import GridFunction, blow_up, chain_rule_check, good_point_check, normalizing_matrix, simultaneous_blow_up, w1p_norm


def _floats(text: str | None):
    if text is None:
        return None
    return [float(t) for t in text.replace(" ", "").split(",") if t]


def _config_path(args) -> Path:
    return Path(args.config) if getattr(args, "config", None) else default_config_path()


def _emit(record: ResultRecord, table: dict | None = None) -> None:
    print(record.to_json(), flush=True)
    rows = table if table is not None else {"value": record.value, "residual": record.residual}
    width = max(len(k) for k in rows) if rows else 0
    print(f"[{record.command}]", file=sys.stderr)
    for key, val in rows.items():
        print(f"  {key:<{width}}  {val}", file=sys.stderr)


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = int(1000 * (time.perf_counter() - self.start))


def _sign_for(n: int, args) -> int:
    path = _config_path(args)
    state = CalibrationState.load(path)
    if not state.fixed(n):
        calibrate(n, state)
        state.save(path)
    return state.sign_for(n)


def _grid_spec(text):
    if text is None:
        return None
    return int(text)


# ---------------------------------------------------------------------------
# commands


def cmd_link(args) -> int:
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    with _Timer() as tm:
        if args.pair:
            g1, g2 = catalog.get(args.pair).oracle
            if args.method == "gauss":
                result = gauss_linking_circles(g1, g2, args.nodes)
                sign = 1
            else:
                sign = _sign_for(3, args)
                result = linking_number(g1, g2).scaled(sign)
            params = {}
        else:
            n = args.n
            sign = _sign_for(n, args)
            grid = torus_grid(n, _grid_spec(args.first), _grid_spec(args.second))
            result, params = torus_linking(
                n, sign, _floats(args.iota1), _floats(args.iota2), args.iota1_reflected, args.iota2_reflected, grid, args.jitter, args.seed
            )
    rec = ResultRecord(
        "link",
        inputs,
        result.rounded,
        result.residual,
        [result.method],
        tm.ms,
        {"raw_value": result.value, "separation": result.separation, "nodes_used": result.nodes_used, "status": result.status, "calibration_sign": sign, **params},
    )
    _emit(rec, {"linking": result.rounded, "raw": f"{result.value:.6f}", "residual": f"{result.residual:.2e}", "separation": f"{result.separation:.4f}"})
    return 0


def cmd_calibrate(args) -> int:
    path = _config_path(args)
    state = CalibrationState.load(path)
    for n in args.n:
        with _Timer() as tm:
            if args.force:
                state.signs.pop(str(n), None)
            was_fixed = state.fixed(n)
            if was_fixed:
                sign, raw = state.sign_for(n), None
            else:
                sign, raw = calibrate(n, state)
                state.save(path)
        raw_value = state.raw.get(str(n)) if raw is None else raw.value
        rec = ResultRecord(
            "calibrate",
            {"n": n},
            int(np.rint(sign * raw_value)),
            abs(abs(raw_value) - 1.0),
            ["torus-pair base linking"],
            tm.ms,
            {"global_sign": sign, "raw": raw_value, "fixed": True, "reused": was_fixed, "path": str(path)},
        )
        _emit(rec, {"n": n, "global_sign": sign, "raw": f"{raw_value:.6f}", "reused": was_fixed})
    return 0


def cmd_experiment(args) -> int:
    entry = catalog.get(args.map)
    f = entry.oracle
    n = f.dim_in
    point = _floats(args.point) or [0.0] * n
    radii = _floats(args.radii)
    sign = _sign_for(n, args)
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    with _Timer() as tm:
        report = jacobian_sign_experiment(
            f, point, sign, radii, _floats(args.x), _floats(args.y), torus_grid(n, _grid_spec(args.first), _grid_spec(args.second)), entry.inverse, args.p, entry.name
        )
    final = next((v for v in reversed(report.linking) if v is not None), None)
    rec = ResultRecord("experiment jacobian-sign", inputs, final, None, ["blow-up", "gauss-map-degree"], tm.ms, report.as_dict())
    table = {"J sign": report.jacobian_sign, "det A": f"{report.det_a:.4f}", "base": report.base, "expected": report.expected}
    for r, v in zip(report.radii, report.linking):
        table[f"r={r:g}"] = v
    _emit(rec, table)
    return 0


def _sphere_mesh_for(k: int, refinement):
    if refinement is None:
        refinement = 5 if k == 1 else 4 if k == 2 else 2
    return make_sphere_mesh(k, refinement)


def cmd_degree(args) -> int:
    entry = catalog.get(args.map)
    f = entry.oracle
    n = f.dim_in
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    methods = ["regular", "simplicial", "kronecker"] if args.method == "all" else [args.method]
    for method in methods:
        with _Timer() as tm:
            extra = {}
            if method == "regular":
                lo, hi = _floats(args.box) or [-2.0, 2.0]
                p = _floats(args.point) or list(0.1 * np.array([1.0, 0.7, 0.4, 0.2, 0.1])[:n])
                runner = local_degree_perturbed if args.jitter else local_degree_regular
                result = runner(f, Box.cube(n, lo, hi), p)
                extra["preimages"] = [pt.tolist() for pt, _ in result.preimages]
            elif method == "simplicial":
                mesh = _sphere_mesh_for(n - 1, args.refinement)
                result = degree_sphere_map_simplicial(mesh, f(mesh.vertices))
            else:
                quad = circle_quadrature(args.nodes) if n == 2 else _sphere_mesh_for(n - 1, args.refinement)
                result = degree_sphere_map_kronecker(f, quad)
        rec = ResultRecord("degree", {**inputs, "method": method}, result.rounded, result.residual, [result.method], tm.ms, {"raw_value": result.value, "status": result.status, **extra})
        _emit(rec, {"method": method, "degree": result.rounded, "raw": f"{result.value:.6f}"})
    return 0


def cmd_blowup(args) -> int:
    entry = catalog.get(args.map)
    f = entry.oracle
    n = f.dim_in
    point = np.array(_floats(args.point) or [0.0] * n)
    radii = sorted(_floats(args.r), reverse=True)
    if len(radii) == 1:
        radii = [2 * radii[0], radii[0]]
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    with _Timer() as tm:
        if entry.inverse is not None:
            rep = simultaneous_blow_up(f, entry.inverse, point, radii, args.p, args.q, args.resolution)
            payload = rep.as_dict()
            forward = rep.forward
        else:
            a, target, jsign = normalizing_matrix(f, point)
            g = MapOracle(n, n, lambda z: f(z) @ a.T)
            forward = [w1p_norm(blow_up(g, point, r, args.resolution) - target, args.p, Ball(np.zeros(n), 1.0)) for r in radii]
            payload = {"radii": radii, "forward_w1p": forward, "det_A": float(np.linalg.det(a)), "jacobian_sign": jsign}
    rec = ResultRecord("blowup", inputs, forward[-1], None, ["blow-up"], tm.ms, payload)
    _emit(rec, {f"r={r:g}": f"{d:.5f}" for r, d in zip(radii, forward)})
    return 0


def cmd_extend(args) -> int:
    entry = catalog.get(f"{args.f}-{args.n}d")
    n = args.n
    q = extension_exponent(n, args.p)
    phi = Mollifier(n)
    half = 2.0
    res = args.resolution
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    with _Timer() as tm:
        f = GridFunction.from_oracle(entry.oracle, Box.cube(n, -half, half), res)
        levels = sorted(_floats(args.t))
        ext = extend(f, phi, levels, fill="zero")
        fp = float(np.sum(np.abs(f.values[..., 0]) ** args.p * f.weights()) ** (1 / args.p))
        trace = (ext.trace_errors(args.p) / fp).tolist()
        ratio = lq_ratio(f, phi, args.p)
    rec = ResultRecord("extend", inputs, q, None, ["mollifier extension"], tm.ms, {"q": q, "t_levels": levels, "relative_trace_errors": trace, "lq_ratio": ratio})
    table = {"q": q, "Lq/Lp ratio": f"{ratio:.4f}"}
    table.update({f"trace t={t:g}": f"{e:.2e}" for t, e in zip(levels, trace)})
    _emit(rec, table)
    return 0


def cmd_goodpoint(args) -> int:
    entry = catalog.get(args.map)
    f = entry.oracle
    n = f.dim_in
    lo, hi = _floats(args.box) or [-1.0, 1.0]
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    with _Timer() as tm:
        grid = GridFunction.from_oracle(f, Box.cube(n, lo, hi), args.resolution)
        rep = good_point_check(grid, np.array(_floats(args.point) or [0.0] * n), args.p, _floats(args.radii))
    rec = ResultRecord("goodpoint", inputs, rep.verdict, None, ["good-point averages"], tm.ms, rep.as_dict())
    _emit(rec, {"verdict": rep.verdict, "oscillation": np.round(rep.lebesgue_averages, 5).tolist(), "remainder": np.round(rep.cz_averages, 5).tolist()})
    return 0


def cmd_checks(args) -> int:
    trials = 2000 if args.quick else args.trials
    failures = 0

    def record(name, ok, payload, ms):
        nonlocal failures
        failures += 0 if ok else 1
        rec = ResultRecord("checks", {"check": name, "trials": trials}, bool(ok), None, [name], ms, payload)
        _emit(rec, {"check": name, "holds": bool(ok)})

    box2, box3 = Box.cube(2, -1, 1), Box.cube(3, -1, 1)
    pairs = [
        ("identity", "identity", box2, [0.2, 0.1]),
        ("reflection-3d", "reflection-3d", box3, [0.1, 0.2, 0.5]),
        ("rotation-pi4", "complex-square", box2, [0.25, 0.0]),
        ("complex-square", "reflection-2d", box2, [0.3, 0.1]),
        ("cubic-diffeo", "circle-power-3", box2, [0.2, 0.15]),
    ]
    for inner, outer, box, p in pairs:
        with _Timer() as tm:
            rep = verify_multiplication(catalog.get(inner if inner != "identity" else "identity-2d").oracle, catalog.get(outer if outer != "identity" else "identity-2d").oracle, box, p)
        record(f"multiplication {outer}∘{inner}", rep.agree, rep.as_dict(), tm.ms)

    hopf = catalog.get("hopf").oracle
    for sense in (1, -1):
        for h in catalog.homeomorphisms(3, sense)[:: 3 if args.quick else 1]:
            with _Timer() as tm:
                rep = verify_linking_invariance(*hopf, h.oracle, sense)
            record(f"invariance {h.name}", rep.holds, rep.as_dict(), tm.ms)

    for n in (2, 3, 4):
        with _Timer() as tm:
            rep = det_bound_check(n, trials)
        record(f"det bound n={n}", rep.holds, rep.as_dict(), tm.ms)

    for name in ("cubic-diffeo", "affine-reversing-4d"):
        entry = catalog.get(name)
        with _Timer() as tm:
            rep = chain_rule_check(entry.oracle, entry.inverse, Box.cube(entry.oracle.dim_in, -1, 1))
        limit = 1e-8 if name.startswith("affine") else 1e-4
        record(f"chain rule {name}", rep.max_inverse_error < limit, rep.as_dict(), tm.ms)
    return 0 if failures == 0 else 4


def cmd_catalog(args) -> int:
    for name in catalog.names():
        print(name)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkdeg", description="Topological degree and linking numbers of discretized maps.")
    parser.add_argument("--config", help="calibration file (default: $LINKDEG_CONFIG or ~/.config/linkdeg/calibration.json)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("link", help="linking number of a catalog curve pair or of the torus spheres")
    p.add_argument("--pair", help="catalog curve pair, e.g. hopf")
    p.add_argument("--method", choices=["gauss", "gauss-map"], default="gauss")
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--iota1", help="ball point x for the first sphere, comma separated")
    p.add_argument("--iota2", help="ball point y for the second sphere")
    p.add_argument("--iota1-reflected", action="store_true")
    p.add_argument("--iota2-reflected", action="store_true")
    p.add_argument("--first", help="grid of the first factor (circle nodes or refinement)")
    p.add_argument("--second", help="grid of the second factor")
    p.add_argument("--jitter", type=int, default=0, help="retries with random (x, y) when the images intersect")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("calibrate", help="fix the orientation sign so the base torus pair links +1")
    p.add_argument("--n", type=int, action="append", help="ambient dimension (repeatable, default 4)")
    p.add_argument("--force", action="store_true", help="recompute even if already fixed")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("experiment", help="replay pipelines")
    exp = p.add_subparsers(dest="experiment", required=True)
    e = exp.add_parser("jacobian-sign", help="linking of blown-up torus spheres")
    e.add_argument("--map", default="reversing-diffeo-4d")
    e.add_argument("--point")
    e.add_argument("--radii", default="0.5,0.25,0.125")
    e.add_argument("--x")
    e.add_argument("--y")
    e.add_argument("--first")
    e.add_argument("--second")
    e.add_argument("--p", type=float, default=2.0)
    e.set_defaults(func=cmd_experiment)

    p = sub.add_parser("degree", help="degree of a catalog map")
    p.add_argument("--map", required=True)
    p.add_argument("--method", choices=["regular", "simplicial", "kronecker", "all"], default="all")
    p.add_argument("--point", help="value p for the local degree")
    p.add_argument("--box", help="lo,hi of the cube domain for the local degree")
    p.add_argument("--refinement", type=int)
    p.add_argument("--nodes", type=int, default=512, help="circle nodes for the Kronecker integral")
    p.add_argument("--jitter", action="store_true", help="perturb p on a singular preimage")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("blowup", help="W^{1,p} distance of blow-ups to their linear limit")
    p.add_argument("--map", required=True)
    p.add_argument("--point")
    p.add_argument("--r", default="0.5,0.25,0.125")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--resolution", type=int, default=13)
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("extend", help="half-space extension of a catalog function")
    p.add_argument("--f", default="sine-bump")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--t", default="0.4,0.2,0.1,0.05,0.01")
    p.add_argument("--resolution", type=int, default=201)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("goodpoint", help="good-point averages along a radius ladder")
    p.add_argument("--map", required=True)
    p.add_argument("--point")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--radii", default="0.5,0.25,0.125,0.0625,0.03125")
    p.add_argument("--box")
    p.add_argument("--resolution", type=int, default=257)
    p.set_defaults(func=cmd_goodpoint)

    p = sub.add_parser("checks", help="run the property checks, one record each")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_checks)

    p = sub.add_parser("catalog", help="list catalog names")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "calibrate" and not args.n:
        args.n = [4]
    try:
        return args.func(args)
    except NotConverged as err:
        print(f"linkdeg: not converged: {err}", file=sys.stderr)
        return err.exit_code
    except LinkdegError as err:
        print(f"linkdeg: {type(err).__name__}: {err}", file=sys.stderr)
        return err.exit_code
    except KeyboardInterrupt:
        raise
    except Exception as err:  # the exit-code contract maps everything else to 4
        print(f"linkdeg: internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
