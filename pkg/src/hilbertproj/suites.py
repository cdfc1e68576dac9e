"""Property suites over catalog scenes and CSV sample emission."""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import as_vector, check_random_state
from .catalog import Scene
from .cones import invariant_splitting, verify_decomposition
from .convex import chord_endpoints, is_strictly_convex
from .equivariant import (Equivariance, InconsistentBoundaryData, Status, blend_interval,
                          boundary_reconstruct, equivariant_solution_space, maps_cone_to_cone)
from .errors import GeometryError, NotProper, SceneIncompatible, UnknownSuite
from .groups import orbit_ball
from .hilbert import check_contraction, check_isometry, hilbert_distance
from .projective import ProjPoint, canonical_matrix, proj_apply

SUITES = ("metric-axioms", "isometry", "contraction", "orbit-extreme", "blend-convexity",
          "boundary-rigidity", "splitting")


@dataclass
class CheckRecord:
    name: str
    status: str
    margin: float | None
    tolerance: float | None
    seed: int
    reason: str | None = None


@dataclass
class SuiteReport:
    """Records of one suite run on one scene; ``exit_status`` is 0 iff nothing failed."""

    suite: str
    scene: str
    seed: int
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def exit_status(self) -> int:
        return int(any(r.status == "FAIL" for r in self.records))

    def to_dict(self) -> dict:
        recs = sorted(self.records, key=lambda r: r.name)
        return {"suite": self.suite, "scene": self.scene, "seed": self.seed,
                "exit_status": self.exit_status, "records": [asdict(r) for r in recs]}


def _rec(name, passed, margin, tol, seed) -> CheckRecord:
    return CheckRecord(name, "PASS" if passed else "FAIL", float(margin), float(tol), seed)


def _require_proper(scene: Scene):
    if not scene.body.proper or scene.cone is None:
        raise NotProper(f"{scene.name} is not proper")


def _metric_axioms(scene: Scene, seed: int, tol: float) -> list[CheckRecord]:
    body = scene.body
    _require_proper(scene)
    P = body.sample_interior(300, seed).reshape(100, 3, body.dim)
    sym = tri = 0.0
    neg = 0.0
    ident = 0.0
    for x, y, z in P:
        dxy, dyx = hilbert_distance(body, x, y), hilbert_distance(body, y, x)
        dyz, dxz = hilbert_distance(body, y, z), hilbert_distance(body, x, z)
        sym = max(sym, abs(dxy - dyx))
        tri = max(tri, dxz - dxy - dyz)
        neg = max(neg, -min(dxy, dyz, dxz))
        ident = max(ident, hilbert_distance(body, x, x))
    return [
        _rec("metric-axioms/identity", ident <= 1e-12, ident, 1e-12, seed),
        _rec("metric-axioms/nonnegativity", neg <= 0.0, neg, 0.0, seed),
        _rec("metric-axioms/symmetry", sym <= 1e-10, sym, 1e-10, seed),
        _rec("metric-axioms/triangle", tri <= tol, tri, tol, seed),
    ]


def _pairs(body, n, seed):
    P = body.sample_interior(2 * n, seed)
    return list(zip(P[:n], P[n:]))


def _isometry(scene: Scene, seed: int, tol: float) -> list[CheckRecord]:
    _require_proper(scene)
    pairs = _pairs(scene.body, 100, seed)
    maps = list(zip(scene.group.labels, scene.group.generators))
    maps += [(f"aut{i}", g) for i, g in enumerate(scene.expected.get("aut_generators", []))]
    out = []
    for label, g in maps:
        r = check_isometry(g, scene.body, pairs, tol)
        out.append(_rec(f"isometry/{label}", r.passed, r.margin, tol, seed))
    return out


def _contraction(scene: Scene, seed: int, tol: float) -> list[CheckRecord]:
    _require_proper(scene)
    body = scene.body
    c = body.center
    T = body.chart.affine_map_matrix(0.5 * np.eye(body.dim), 0.5 * c)
    r = check_contraction(T, body, body, _pairs(body, 200, seed), tol)
    out = [_rec("contraction/homothety", r.passed, r.margin, tol, seed)]
    g = scene.group.generators[0]
    r = check_contraction(g, body, body, _pairs(body, 200, seed + 1), tol)
    out.append(_rec("contraction/automorphism", r.passed, r.margin, tol, seed))
    return out


def orbit_targets(scene: Scene) -> np.ndarray:
    """Extreme points the orbit of an interior point should approach.

    Vertices for polyhedra; otherwise the attracting fixed points of each
    generator and its inverse, which lie on the boundary of a strictly convex
    body.
    """
    body = scene.body
    if body.kind in ("polytope", "halfspaces", "interval"):
        return np.asarray(body.vertices)
    out = []
    for g in list(scene.group.generators) + list(scene.group.inverses):
        w, v = np.linalg.eig(g)
        top = np.real(v[:, int(np.argmax(np.abs(w)))])
        out.append(body.chart.to_affine(top))
    return np.array(out)


def _orbit_extreme(scene: Scene, seed: int, tol: float) -> list[CheckRecord]:
    _require_proper(scene)
    body = scene.body
    L = int(scene.expected.get("orbit_radius", 8))
    ball = orbit_ball(scene.group, body.chart.point(body.center), L)
    pts = np.array([body.chart.to_affine(p) for _, p in ball.points])
    targets = orbit_targets(scene)
    gaps = [float(np.min(np.linalg.norm(pts - t, axis=1))) for t in targets]
    return [_rec(f"orbit-extreme/target{i}", g <= 1e-2, g, 1e-2, seed) for i, g in enumerate(gaps)]


def _blend(scene: Scene, seed: int, tol: float) -> list[CheckRecord]:
    _require_proper(scene)
    C = scene.cone
    D = invariant_splitting(scene.group, C, seed=seed)
    S2 = sum((i + 2.0) * p for i, p in enumerate(D.projectors()))
    E = Equivariance.identity(scene.group)
    space = equivariant_solution_space(E, C, C)
    res = max(E.residual(S2), space.coefficients(S2)[1])
    rng = check_random_state(seed)
    res_blend = blend_interval(np.eye(C.ambient_dim), S2, C.sample_interior(50, rng), C, C, seed=seed)
    bad = sum(s != Status.STRICTLY_INSIDE.value for _, s in res_blend.grid)
    return [
        _rec("blend-convexity/equivariance", res <= tol, res, tol, seed),
        _rec("blend-convexity/grid", res_blend.verified, bad, 0, seed),
        CheckRecord("blend-convexity/endpoints",
                    "PASS" if maps_cone_to_cone(S2, C, C) is Status.STRICTLY_INSIDE else "FAIL",
                    float(res_blend.R), None, seed),
    ]


def _boundary_rigidity(scene: Scene, seed: int, tol: float, target: Scene | None) -> list[CheckRecord]:
    _require_proper(scene)
    body1 = scene.body
    body2 = (target or scene).body
    if not is_strictly_convex(body1):
        raise SceneIncompatible(f"{scene.name} is not strictly convex")
    if body2.dim != body1.dim:
        raise SceneIncompatible("source and target dimensions differ")
    g = (target or scene).group.generators[0]
    xi = body1.sample_boundary(12, seed)
    pairs = [(x, proj_apply(g, body1.chart.lift(x))) for x in xi]
    T = boundary_reconstruct(body1, body2, pairs, seed=seed)
    A, B = canonical_matrix(T.matrix), canonical_matrix(g)
    gap = float(min(np.linalg.norm(A - B), np.linalg.norm(A + B)))
    bad = list(pairs)
    bad[0] = (bad[0][0], ProjPoint(body2.chart.lift(body2.sample_boundary(1, seed + 1)[0])))
    try:
        boundary_reconstruct(body1, body2, bad, seed=seed)
        caught = False
    except InconsistentBoundaryData:
        caught = True
    return [
        _rec("boundary-rigidity/recover", gap <= 1e-8, gap, 1e-8, seed),
        CheckRecord("boundary-rigidity/corrupted", "PASS" if caught else "FAIL", None, None, seed),
    ]


def _splitting(scene: Scene, seed: int, tol: float) -> list[CheckRecord]:
    _require_proper(scene)
    D = invariant_splitting(scene.group, scene.cone, seed=seed)
    r = verify_decomposition(scene.cone, scene.group, D, seed=seed, tol=tol)
    out = [_rec("splitting/verify", r.passed, r.margin, tol, seed)]
    if "blocks" in scene.expected:
        want = scene.expected["blocks"]
        out.append(_rec("splitting/blocks", D.k == want, abs(D.k - want), 0, seed))
    return out


def run_check_suite(scene: Scene, suite: str, seed: int = 0, tol: float = 1e-9,
                    target: Scene | None = None) -> SuiteReport:
    """Run a named property suite on a scene.

    A non-proper scene yields one ``SKIP`` record naming the reason.

    Raises
    ------
    UnknownSuite
        For names outside :data:`SUITES`.
    SceneIncompatible
        When the suite does not apply to the scene.
    """
    if suite not in SUITES:
        raise UnknownSuite(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    report = SuiteReport(suite, scene.name, seed)
    try:
        if suite == "metric-axioms":
            recs = _metric_axioms(scene, seed, tol)
        elif suite == "isometry":
            recs = _isometry(scene, seed, tol)
        elif suite == "contraction":
            recs = _contraction(scene, seed, tol)
        elif suite == "orbit-extreme":
            recs = _orbit_extreme(scene, seed, tol)
        elif suite == "blend-convexity":
            recs = _blend(scene, seed, tol)
        elif suite == "boundary-rigidity":
            recs = _boundary_rigidity(scene, seed, tol, target)
        else:
            recs = _splitting(scene, seed, tol)
    except NotProper as exc:
        recs = [CheckRecord(suite, "SKIP", None, None, seed, f"NotProper: {exc}")]
    except SceneIncompatible:
        raise
    except GeometryError as exc:
        recs = [CheckRecord(suite, "FAIL", None, None, seed, f"{type(exc).__name__}: {exc}")]
    report.records.extend(recs)
    return report


def run_all(scenes: list[Scene], seed: int = 0, tol: float = 1e-9) -> list[SuiteReport]:
    """Every suite on every scene; incompatible combinations become SKIP records."""
    out = []
    for scene in scenes:
        for suite in SUITES:
            try:
                out.append(run_check_suite(scene, suite, seed, tol))
            except SceneIncompatible as exc:
                r = SuiteReport(suite, scene.name, seed)
                r.records.append(CheckRecord(suite, "SKIP", None, None, seed,
                                             f"SceneIncompatible: {exc}"))
                out.append(r)
    return out


EMIT_KINDS = ("geodesic", "orbit", "distance-field")


def _fmt(x) -> str:
    return repr(float(x))


def emit_samples(scene: Scene, kind: str, params: dict | None = None, seed: int = 0) -> list[list[str]]:
    """Tabular samples for plotting: a header row followed by data rows.

    ``geodesic`` (params ``x``, ``y``, ``n``): chord parameter ``t`` of the
    point ``x + t (y - x)`` against its Hilbert distance from ``x``.
    ``orbit`` (params ``L``, ``base``): word, word length and chart
    coordinates in breadth-first order. ``distance-field`` (params ``grid``,
    ``base``; planar bodies only): interior grid points and their distance to
    the base point.
    """
    params = dict(params or {})
    body = scene.body
    d = body.dim
    if kind == "orbit":
        L = int(params.get("L", 8))
        base = as_vector(params.get("base", body.center), length=d)
        ball = orbit_ball(scene.group, body.chart.point(base), L)
        rows = [["word", "length"] + [f"x{i + 1}" for i in range(d)]]
        for word, p in ball.points:
            a = body.chart.to_affine(p) if body.chart.in_chart(p) else np.full(d, np.inf)
            rows.append([".".join(word), str(len(word))] + [_fmt(v) for v in a])
        return rows
    if kind not in EMIT_KINDS:
        raise ValueError(f"unknown sample kind {kind!r}; choose from {', '.join(EMIT_KINDS)}")
    if not body.proper:
        raise NotProper(f"{scene.name} is not proper")
    if kind == "geodesic":
        rng = check_random_state(seed)
        x = as_vector(params.get("x", body.center), length=d)
        y = as_vector(params["y"], length=d) if "y" in params else body.sample_interior(1, rng)[0]
        rows = [["t", "distance"] + [f"x{i + 1}" for i in range(d)]]
        if not np.any(y - x):
            hilbert_distance(body, x, y)
            return rows + [[_fmt(0.0), _fmt(0.0)] + [_fmt(v) for v in x]]
        n = int(params.get("n", 50))
        ch = chord_endpoints(body, x, y)
        a, b = ch.affine[0], ch.affine[3]
        u = y - x
        t_lo, t_hi = (a - x) @ u / (u @ u), (b - x) @ u / (u @ u)
        for t in np.linspace(t_lo, t_hi, n + 2)[1:-1]:
            p = x + t * u
            dist = hilbert_distance(body, x, p)
            rows.append([_fmt(t), _fmt(dist)] + [_fmt(v) for v in p])
        return rows
    if d != 2:
        raise SceneIncompatible("distance fields are emitted for planar bodies only")
    m = int(params.get("grid", 50))
    base = as_vector(params.get("base", body.center), length=2)
    if body.kind == "ellipsoid":
        r = 0.5 * body.diameter
        lo, hi = body.center - r, body.center + r
    else:
        lo, hi = body.vertices.min(axis=0), body.vertices.max(axis=0)
    rows = [["x1", "x2", "distance"]]
    for gx in np.linspace(lo[0], hi[0], m):
        for gy in np.linspace(lo[1], hi[1], m):
            p = np.array([gx, gy])
            if body.is_interior(body.chart.point(p)):
                rows.append([_fmt(gx), _fmt(gy), _fmt(hilbert_distance(body, base, p))])
    return rows


def rows_to_csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()
