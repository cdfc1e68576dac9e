"""Convex open sets in a fixed affine chart.

A :class:`ConvexBody` is stored in the affine coordinates of one declared
:class:`~hilbertproj.projective.AffineChart`. Public functions accept points
either as :class:`~hilbertproj.projective.ProjPoint` (converted through the
chart) or as arrays of affine coordinates.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _polyhedra
from ._validation import as_matrix, as_points, as_vector, check_random_state
from .errors import CoincidentPoints, NotInterior, NotProper
from .projective import AffineChart, ProjPoint

BOUNDARY_TOL = 1e-9


class Position(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    EXTERIOR = "Exterior"


class ConvexBody:
    """A convex open set, bounded in its chart unless tagged non-proper.

    Use the classmethod constructors rather than ``__init__``. ``kind`` is one
    of ``"polytope"``, ``"halfspaces"``, ``"ellipsoid"``, ``"interval"`` or
    ``"affine"`` (the whole chart; kept only as a non-proper counterexample).

    The ellipsoid convention is ``{x : (x - center)^T shape (x - center) < 1}``.
    """

    def __init__(self, kind: str, chart: AffineChart, *, vertices=None, normals=None,
                 offsets=None, center=None, shape=None, box=None, proper: bool = True):
        self.kind = kind
        self.chart = chart
        self.proper = proper
        self.vertices = vertices
        self.normals = normals
        self.offsets = offsets
        self.center = center
        self.shape = shape
        self.box = box

    # -- constructors -------------------------------------------------------

    @classmethod
    def polytope(cls, vertices, chart: AffineChart | None = None, prune: bool = False) -> "ConvexBody":
        V = as_points(vertices)
        d = V.shape[1]
        chart = chart or AffineChart.standard(d)
        if chart.dim != d:
            raise ValueError(f"chart dimension {chart.dim} != vertex dimension {d}")
        if d == 1:
            return cls.interval(V.min(), V.max(), chart)
        if np.linalg.matrix_rank(V[1:] - V[0]) < d:
            raise ValueError("polytope has empty interior")
        A, b = _polyhedra.polytope_halfspaces(V)
        tol = 1e-9 * _diameter_of(V)
        extreme = np.array([_polyhedra.active_rank(A, b, v, tol) == d for v in V])
        if not np.all(extreme):
            if not prune:
                raise ValueError(f"vertices {np.flatnonzero(~extreme).tolist()} are not extreme")
            V = V[extreme]
        body = cls("polytope", chart, vertices=V, normals=A, offsets=b)
        body.center = V.mean(axis=0)
        return body

    @classmethod
    def halfspaces(cls, normals, offsets, chart: AffineChart | None = None) -> "ConvexBody":
        A = as_matrix(normals, name="normals")
        b = as_vector(offsets, length=A.shape[0], name="offsets")
        d = A.shape[1]
        chart = chart or AffineChart.standard(d)
        n = np.linalg.norm(A, axis=1)
        A, b = A / n[:, None], b / n
        if not _polyhedra.is_bounded(A, b):
            raise NotProper("halfspace system is unbounded in its chart")
        c, r = _polyhedra.chebyshev_center(A, b)
        if r <= 1e-12:
            raise ValueError("halfspace system has empty interior")
        V = _polyhedra.halfspace_vertices(A, b)
        return cls("halfspaces", chart, vertices=V, normals=A, offsets=b, center=c)

    @classmethod
    def ellipsoid(cls, center, shape, chart: AffineChart | None = None) -> "ConvexBody":
        c = as_vector(center, name="center")
        Q = as_matrix(shape, shape=(c.shape[0], c.shape[0]), name="shape")
        if not np.allclose(Q, Q.T, atol=1e-12 * np.abs(Q).max()):
            raise ValueError("shape matrix must be symmetric")
        if np.linalg.eigvalsh(Q).min() <= 0:
            raise ValueError("shape matrix must be positive definite")
        chart = chart or AffineChart.standard(c.shape[0])
        if c.shape[0] == 1:
            r = 1.0 / np.sqrt(Q[0, 0])
            return cls.interval(c[0] - r, c[0] + r, chart)
        return cls("ellipsoid", chart, center=c, shape=0.5 * (Q + Q.T))

    @classmethod
    def interval(cls, lo: float, hi: float, chart: AffineChart | None = None) -> "ConvexBody":
        lo, hi = float(lo), float(hi)
        if not lo < hi:
            raise ValueError("interval needs lo < hi")
        chart = chart or AffineChart.standard(1)
        return cls("interval", chart, vertices=np.array([[lo], [hi]]),
                   normals=np.array([[-1.0], [1.0]]), offsets=np.array([-lo, hi]),
                   center=np.array([0.5 * (lo + hi)]))

    @classmethod
    def affine_space(cls, d: int, chart: AffineChart | None = None, box: float = 10.0) -> "ConvexBody":
        """The whole affine chart; not proper. ``box`` only bounds sampling."""
        chart = chart or AffineChart.standard(d)
        return cls("affine", chart, center=np.zeros(d), box=float(box), proper=False)

    # -- basic geometry -----------------------------------------------------

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def diameter(self) -> float:
        if self.kind in ("polytope", "halfspaces", "interval"):
            return _diameter_of(self.vertices)
        if self.kind == "ellipsoid":
            return 2.0 / np.sqrt(np.linalg.eigvalsh(self.shape).min())
        return 2.0 * self.box * np.sqrt(self.dim)

    def affine(self, x) -> np.ndarray | None:
        """Affine coordinates of ``x``; ``None`` if it is off the chart."""
        if isinstance(x, ProjPoint):
            if x.dim != self.dim:
                raise ValueError(f"point in P^{x.dim}, body in P^{self.dim}")
            if not self.chart.in_chart(x):
                return None
            return self.chart.to_affine(x)
        return as_vector(x, length=self.dim, name="affine point")

    def margin(self, x: np.ndarray) -> float:
        """Signed, distance-like defining-function value; negative inside."""
        if self.kind == "affine":
            return -np.inf
        if self.kind == "ellipsoid":
            w = x - self.center
            return (np.sqrt(w @ self.shape @ w) - 1.0) * 0.5 * self.diameter
        return float(np.max(self.normals @ x - self.offsets))

    def classify(self, x, tol: float | None = None) -> Position:
        a = self.affine(x)
        if a is None:
            return Position.EXTERIOR
        if tol is None:
            tol = BOUNDARY_TOL * self.diameter
        m = self.margin(a)
        if m < -tol:
            return Position.INTERIOR
        if m <= tol:
            return Position.BOUNDARY
        return Position.EXTERIOR

    def is_interior(self, x, tol: float = 0.0) -> bool:
        a = self.affine(x)
        return a is not None and self.margin(a) < -tol

    def line_params(self, x: np.ndarray, u: np.ndarray) -> tuple[float, float]:
        """Parameters ``s_lo < 0 < s_hi`` where ``x + s u`` meets the boundary."""
        if self.kind == "affine":
            raise NotProper("the affine chart has no boundary in the chart")
        if self.kind == "ellipsoid":
            w = x - self.center
            Qu = self.shape @ u
            A = u @ Qu
            B = 2.0 * (w @ Qu)
            C = w @ self.shape @ w - 1.0
            disc = max(B * B - 4.0 * A * C, 0.0)
            q = -0.5 * (B + np.copysign(np.sqrt(disc), B))
            r1, r2 = q / A, C / q
            return min(r1, r2), max(r1, r2)
        slack = self.offsets - self.normals @ x
        rate = self.normals @ u
        pos, neg = rate > 0, rate < 0
        hi = np.min(slack[pos] / rate[pos]) if np.any(pos) else np.inf
        lo = np.max(slack[neg] / rate[neg]) if np.any(neg) else -np.inf
        return float(lo), float(hi)

    def homogeneous_quadric(self) -> np.ndarray:
        """Symmetric ``M`` with ``[v]`` inside iff ``v^T M v < 0`` (ellipsoids only)."""
        if self.kind != "ellipsoid":
            raise ValueError("only ellipsoids have a defining quadric")
        d = self.dim
        # v -> (s, P v) with s = functional . v; affine point = P v / s
        A = self.chart.frame()
        K = np.zeros((d + 1, d + 1))
        c, Q = self.center, self.shape
        K[0, 0] = c @ Q @ c - 1.0
        K[0, 1:] = K[1:, 0] = -(Q @ c)
        K[1:, 1:] = Q
        return A.T @ K @ A

    # -- sampling -----------------------------------------------------------

    def sample_interior(self, n: int, seed=None) -> np.ndarray:
        rng = check_random_state(seed)
        d = self.dim
        if self.kind in ("polytope", "halfspaces"):
            w = rng.dirichlet(np.ones(len(self.vertices)), size=n)
            return w @ self.vertices
        if self.kind == "interval":
            lo, hi = self.vertices[:, 0]
            return (lo + (hi - lo) * rng.uniform(0.02, 0.98, size=n))[:, None]
        if self.kind == "ellipsoid":
            z = rng.normal(size=(n, d))
            z /= np.linalg.norm(z, axis=1, keepdims=True)
            z *= 0.98 * rng.uniform(size=(n, 1)) ** (1.0 / d)
            L = np.linalg.cholesky(self.shape)
            return self.center + np.linalg.solve(L.T, z.T).T
        return rng.uniform(-self.box, self.box, size=(n, d))

    def sample_boundary(self, n: int, seed=None) -> np.ndarray:
        rng = check_random_state(seed)
        d = self.dim
        if self.kind == "ellipsoid":
            z = rng.normal(size=(n, d))
            z /= np.linalg.norm(z, axis=1, keepdims=True)
            L = np.linalg.cholesky(self.shape)
            return self.center + np.linalg.solve(L.T, z.T).T
        if self.kind == "interval":
            return self.vertices[rng.integers(0, 2, size=n)]
        if self.kind == "affine":
            raise NotProper("the affine chart has no boundary in the chart")
        out = np.empty((n, d))
        tol = 1e-9 * self.diameter
        for i in range(n):
            f = rng.integers(len(self.normals))
            on = np.abs(self.vertices @ self.normals[f] - self.offsets[f]) <= tol
            F = self.vertices[on]
            out[i] = rng.dirichlet(np.ones(len(F))) @ F
        return out

    def __repr__(self):
        tag = "" if self.proper else ", non-proper"
        return f"ConvexBody({self.kind}, dim={self.dim}{tag})"


def _diameter_of(V: np.ndarray) -> float:
    V = np.asarray(V, dtype=float)
    diff = V[:, None, :] - V[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())


def contains(body: ConvexBody, x, tol: float | None = None) -> Position:
    """Classify ``x`` as interior, boundary or exterior of ``body``.

    The default boundary band is ``1e-9 * diameter``.
    """
    return body.classify(x, tol)


@dataclass(frozen=True)
class Chord:
    """Boundary endpoints ``a, b`` of the line through ``x, y``, ordered a, x, y, b."""

    a: ProjPoint
    x: ProjPoint
    y: ProjPoint
    b: ProjPoint
    affine: np.ndarray = field(repr=False)  # rows a, x, y, b in chart coordinates


def chord_endpoints(body: ConvexBody, x, y) -> Chord:
    """Intersect the line through two interior points with the boundary.

    Raises
    ------
    NotInterior
        If either point is not strictly inside.
    CoincidentPoints
        If ``x`` and ``y`` coincide.
    """
    if not body.proper:
        raise NotProper(f"{body!r} is not a proper convex set")
    xa, ya = body.affine(x), body.affine(y)
    for name, p in (("x", xa), ("y", ya)):
        if p is None or body.margin(p) >= 0:
            raise NotInterior(f"{name} is not an interior point")
    u = ya - xa
    if not np.any(u):
        raise CoincidentPoints("x and y coincide")
    lo, hi = body.line_params(xa, u)
    a_aff, b_aff = xa + lo * u, xa + hi * u
    pts = np.stack([a_aff, xa, ya, b_aff])
    P = [body.chart.point(p) for p in pts]
    return Chord(P[0], P[1], P[2], P[3], pts)


@dataclass(frozen=True)
class NotEnumerable:
    """Marker for bodies whose extreme points form a continuum.

    ``sampler(n, seed)`` returns ``n`` boundary points as :class:`ProjPoint`.
    """

    sampler: Callable[[int, object], list]


def extreme_points(body: ConvexBody):
    """Extreme points: a vertex list for polyhedra, otherwise a sampler."""
    if not body.proper:
        raise NotProper(f"{body!r} is not a proper convex set")
    if body.kind in ("polytope", "halfspaces", "interval"):
        return [body.chart.point(v) for v in body.vertices]

    def sampler(n, seed=None):
        return [body.chart.point(p) for p in body.sample_boundary(n, seed)]

    return NotEnumerable(sampler)


def is_strictly_convex(body: ConvexBody) -> bool:
    """Whether every line meets the boundary in at most two points."""
    if body.kind in ("ellipsoid", "interval"):
        return True
    if body.kind == "affine":
        return False
    return body.dim < 2


def is_extreme(body: ConvexBody, x, tol: float | None = None) -> bool:
    """Exact extreme-point test for a boundary point of ``body``."""
    if tol is None:
        tol = BOUNDARY_TOL * body.diameter
    if body.classify(x, tol) is not Position.BOUNDARY:
        return False
    if body.kind in ("ellipsoid", "interval"):
        return True
    a = body.affine(x)
    return _polyhedra.active_rank(body.normals, body.offsets, a, tol) == body.dim


def segment_witness(body: ConvexBody, x, candidates, tol: float | None = None,
                    checks: int = 9):
    """Search for ``p, q`` among ``candidates`` with ``x`` inside ``(p, q)`` and
    the whole segment in the boundary.

    This is the definition-level test of non-extremality and is independent of
    the facet structure used by :func:`is_extreme`. Returns the witnessing
    pair or ``None``.
    """
    if tol is None:
        tol = BOUNDARY_TOL * body.diameter
    xa = body.affine(x)
    C = [body.affine(c) for c in candidates]
    C = [c for c in C if c is not None and np.linalg.norm(c - xa) > tol]
    for i, p in enumerate(C):
        for q in C[i + 1:]:
            pq = q - p
            t = (xa - p) @ pq / (pq @ pq)
            if not (0.0 < t < 1.0) or np.linalg.norm(p + t * pq - xa) > tol:
                continue
            ts = np.linspace(0.0, 1.0, checks)
            if all(body.classify(p + s * pq, tol) is Position.BOUNDARY for s in ts):
                return p, q
    return None
