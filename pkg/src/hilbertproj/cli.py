"""Command-line interface: ``hilbertproj <command> [options]``.

JSON goes out for reports and structured results, CSV for bulk samples.
All randomness derives from ``--seed``.
"""
from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import io as hio
from .catalog import SCENES, catalog_build, default_scenes
from .cones import invariant_splitting, verify_decomposition
from .equivariant import (blend_interval, boundary_reconstruct, equivariant_solution_space,
                          factorize)
from .errors import GeometryError
from .groups import orbit_ball
from .hilbert import hilbert_distance
from .projective import ProjPoint
from .suites import EMIT_KINDS, SUITES, emit_samples, rows_to_csv, run_all, run_check_suite


def _vec(text: str) -> np.ndarray:
    return np.array([float(t) for t in text.split(",") if t.strip()])


def _fmt(x) -> str:
    return repr(float(x))


def _scene(args):
    if not args.scene:
        raise SystemExit("error: --scene is required for this command")
    return hio.load_scene(args.scene)


def _cone(args, path_attr: str):
    path = getattr(args, path_attr, None)
    if path:
        return hio.cone_from_json(hio.read_json(path))
    scene = _scene(args)
    if scene.cone is None:
        raise SystemExit(f"error: scene {scene.name} has no cone")
    return scene.cone


def cmd_dist(args) -> tuple[str, int]:
    body = _scene(args).body
    if args.pairs:
        rows = [["x", "y", "distance"]]
        for x, y in hio.read_json(args.pairs):
            x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
            d = hilbert_distance(body, x, y)
            rows.append([" ".join(_fmt(v) for v in x), " ".join(_fmt(v) for v in y), _fmt(d)])
        return rows_to_csv(rows), 0
    if args.x is None or args.y is None:
        raise SystemExit("error: give --x and --y, or --pairs")
    return _fmt(hilbert_distance(body, _vec(args.x), _vec(args.y))) + "\n", 0


def cmd_orbit(args) -> tuple[str, int]:
    scene = _scene(args)
    params = {"L": args.L}
    if args.base:
        params["base"] = _vec(args.base)
    return rows_to_csv(emit_samples(scene, "orbit", params, seed=args.seed)), 0


def cmd_split(args) -> tuple[str, int]:
    scene = _scene(args)
    if scene.cone is None:
        raise SystemExit(f"error: scene {scene.name} has no cone")
    D = invariant_splitting(scene.group, scene.cone, seed=args.seed)
    r = verify_decomposition(scene.cone, scene.group, D, seed=args.seed, tol=args.tol)
    out = {"k": D.k, "status": D.status, "subspaces": [Q.tolist() for Q in D.subspaces],
           "report": r.to_dict()}
    return hio.dumps(out), 0 if r.passed else 1


def cmd_solve(args) -> tuple[str, int]:
    E = hio.equivariance_from_json(hio.read_json(args.equivariance))
    space = equivariant_solution_space(E)
    out = {"dim": space.dim, "basis": [B.tolist() for B in space.basis],
           "residuals": [E.residual(B) for B in space.basis]}
    return hio.dumps(out), 0


def cmd_blend(args) -> tuple[str, int]:
    C1 = _cone(args, "source_cone")
    C2 = _cone(args, "target_cone")
    S1 = hio.map_from_json(hio.read_json(args.map1))
    S2 = hio.map_from_json(hio.read_json(args.map2))
    sample = np.asarray(hio.read_json(args.samples), dtype=float)
    r = blend_interval(S1, S2, sample, C1, C2, seed=args.seed)
    out = {"R": r.R, "interval": list(r.interval), "verified": r.verified,
           "grid": [{"lambda": lam, "status": s} for lam, s in r.grid]}
    return hio.dumps(out), 0 if r.verified else 1


def cmd_factor(args) -> tuple[str, int]:
    E = hio.equivariance_from_json(hio.read_json(args.equivariance))
    S0 = hio.map_from_json(hio.read_json(args.map))
    C1 = _cone(args, "source_cone")
    C2 = _cone(args, "target_cone")
    f = factorize(S0, E, C1, C2, seed=args.seed)
    out = {"U_basis": f.U_basis.tolist(), "W_basis": f.W_basis.tolist(),
           "projector": f.projector.tolist(), "injective_part": f.injective_part.tolist(),
           "quotient_cone": hio.cone_to_json(f.quotient_cone),
           "quotient_group": hio.group_to_json(f.quotient_group), "residuals": f.residuals}
    ok = all(v <= args.tol for v in f.residuals.values())
    return hio.dumps(out), 0 if ok else 1


def cmd_reconstruct(args) -> tuple[str, int]:
    scene = _scene(args)
    target = hio.load_scene(args.target) if args.target else scene
    d1, d2 = scene.body.dim, target.body.dim
    pairs = []
    with open(args.pairs, newline="") as fh:
        rows = list(csv.reader(fh))
    for row in rows[1:]:
        vals = np.array([float(v) for v in row])
        if vals.size == d1 + d2:
            xi, eta = vals[:d1], vals[d1:]
        elif vals.size == d1 + d2 + 2:
            xi, eta = ProjPoint(vals[:d1 + 1]), ProjPoint(vals[d1 + 1:])
        else:
            raise SystemExit(f"error: expected {d1 + d2} or {d1 + d2 + 2} columns per row")
        pairs.append((xi, eta))
    T = boundary_reconstruct(scene.body, target.body, pairs, seed=args.seed)
    return hio.dumps({"matrix": T.matrix.tolist()}), 0


def cmd_catalog(args) -> tuple[str, int]:
    if not args.name:
        return "".join(f"{s}\n" for s in SCENES), 0
    return hio.dumps(hio.scene_to_json(catalog_build(args.name))), 0


def cmd_check(args) -> tuple[str, int]:
    if args.all:
        scenes = [hio.load_scene(args.scene)] if args.scene else default_scenes()
        reports = run_all(scenes, seed=args.seed, tol=args.tol)
    else:
        if not args.suite:
            raise SystemExit("error: give --suite NAME or --all")
        reports = [run_check_suite(_scene(args), args.suite, seed=args.seed, tol=args.tol)]
    status = int(any(r.exit_status for r in reports))
    out = {"exit_status": status, "reports": [r.to_dict() for r in reports]}
    return hio.dumps(out), status


def cmd_emit(args) -> tuple[str, int]:
    scene = _scene(args)
    params = {"L": args.L, "grid": args.grid, "n": args.n}
    for key in ("x", "y", "base"):
        val = getattr(args, key)
        if val:
            params[key] = _vec(val)
    return rows_to_csv(emit_samples(scene, args.kind, params, seed=args.seed)), 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--tol", type=float, default=1e-9, help="check tolerance (default 1e-9)")
    common.add_argument("--scene", help="scene JSON file or catalog name such as torus-orthant:3")
    common.add_argument("--out", help="write output to this file instead of standard output")

    p = argparse.ArgumentParser(prog="hilbertproj", parents=[common],
                                description="Hilbert geometry of convex projective sets.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dist", parents=[common], help="Hilbert distance between points")
    s.add_argument("--x", help="comma-separated chart coordinates")
    s.add_argument("--y", help="comma-separated chart coordinates")
    s.add_argument("--pairs", help="JSON list of [x, y] pairs; emits CSV")
    s.set_defaults(func=cmd_dist)

    s = sub.add_parser("orbit", parents=[common], help="orbit ball as CSV")
    s.add_argument("-L", type=int, default=4, help="word length (default 4)")
    s.add_argument("--base", help="base point in chart coordinates (default: body center)")
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("split", parents=[common], help="invariant cone splitting")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("solve", parents=[common], help="equivariant solution space")
    s.add_argument("equivariance", help="equivariance JSON")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("blend", parents=[common], help="blend interval of two maps")
    s.add_argument("map1")
    s.add_argument("map2")
    s.add_argument("samples", help="JSON list of source cone points")
    s.add_argument("--source-cone", help="cone JSON (default: cone of --scene)")
    s.add_argument("--target-cone", help="cone JSON (default: cone of --scene)")
    s.set_defaults(func=cmd_blend)

    s = sub.add_parser("factor", parents=[common], help="factor a map through its kernel")
    s.add_argument("map")
    s.add_argument("equivariance")
    s.add_argument("--source-cone")
    s.add_argument("--target-cone")
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("reconstruct", parents=[common], help="projective map from boundary pairs")
    s.add_argument("pairs", help="CSV with a header row and source then target coordinates")
    s.add_argument("--target", help="target scene (default: --scene)")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("catalog", parents=[common], help="list scenes or dump one as JSON")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("check", parents=[common], help="run property suites; JSON report")
    s.add_argument("--suite", choices=SUITES)
    s.add_argument("--all", action="store_true", help="every suite on every scene")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("emit", parents=[common], help="CSV samples for plotting")
    s.add_argument("kind", choices=EMIT_KINDS)
    s.add_argument("-L", type=int, default=8)
    s.add_argument("--grid", type=int, default=50)
    s.add_argument("--n", type=int, default=50)
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--base")
    s.set_defaults(func=cmd_emit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = args.func(args)
    except GeometryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
