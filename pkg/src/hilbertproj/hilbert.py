"""The Hilbert metric on proper convex sets and on proper convex cones.

The normalization is ``d(x, y) = log [a, x, y, b]`` with no factor 1/2, so on
the round disk it is twice the curvature -1 hyperbolic distance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_vector
from .cones import ConvexCone
from .convex import ConvexBody
from .errors import ImageEscapes, NotAutomorphism, NotInCone, NotInterior, NotProper
from .groups import preserves_body
from .projective import ProjPoint, proj_apply
from .reports import CheckReport

CHECK_TOL = 1e-9


def _log_ratio(num: float, den: float) -> float:
    if np.isinf(num) and np.isinf(den):
        return 0.0
    return float(np.log(num / den))


def _unit(u: np.ndarray) -> np.ndarray:
    u = u / np.max(np.abs(u))  # safe for subnormal differences
    return u / np.linalg.norm(u)


def _from_params(x_params, y_params) -> float:
    (lo_x, hi_x), (lo_y, hi_y) = x_params, y_params
    return _log_ratio(hi_x, hi_y) + _log_ratio(lo_y, lo_x)


def hilbert_distance(body: ConvexBody, x, y) -> float:
    """Hilbert distance between two interior points of a proper convex body.

    Boundary parameters are computed separately from ``x`` and from ``y``
    along ``u = y - x``, which keeps the four chord lengths accurate when a
    point is close to the boundary. Interior means strictly inside the
    defining inequalities; the boundary band of :func:`~hilbertproj.convex.contains`
    does not apply here.

    Raises
    ------
    NotProper
        If the body is tagged non-proper.
    NotInterior
        If either point is not an interior point.
    """
    if not body.proper:
        raise NotProper(f"{body!r} is not a proper convex set")
    xa, ya = body.affine(x), body.affine(y)
    for name, p in (("x", xa), ("y", ya)):
        if p is None or not body.margin(p) < 0:
            raise NotInterior(f"{name} is not an interior point")
    u = ya - xa
    if not np.any(u):
        return 0.0
    u = _unit(u)
    return _from_params(body.line_params(xa, u), body.line_params(ya, u))


def cone_hilbert_distance(C: ConvexCone, x, y) -> float:
    """Hilbert distance of an open cone viewed as a convex subset of R^n.

    The cone sits in the affine chart R^n of P(R^{n+1}); a chord endpoint at
    infinity drops its two factors from the cross-ratio. This metric is not
    invariant under rescaling a point: ``d(x, 2x) = log 2``.

    Raises
    ------
    NotInCone
        If either point is not in the open cone.
    """
    x = as_vector(x, length=C.ambient_dim)
    y = as_vector(y, length=C.ambient_dim)
    for name, p in (("x", x), ("y", y)):
        if not C.is_interior(p):
            raise NotInCone(f"{name} is not in the open cone")
    u = y - x
    if not np.any(u):
        return 0.0
    u = _unit(u)
    return _from_params(C.line_params(x, u), C.line_params(y, u))


def hopf_distance(x, y) -> float:
    """``max log(y_i/x_i) - min log(y_i/x_i)`` on the positive orthant.

    This is the Hilbert metric of the projectivized orthant (the simplex);
    it agrees with :func:`cone_hilbert_distance` on the orthant exactly when
    the ratios ``y_i / x_i`` straddle 1.
    """
    r = np.log(as_vector(y) / as_vector(x))
    return float(r.max() - r.min())


@dataclass
class MetricSample:
    """Batch of interior point pairs with their distances."""

    pairs: list = field(default_factory=list)
    distances: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.pairs) != len(self.distances):
            raise ValueError("pairs and distances must have the same length")
        if any(d < 0 for d in self.distances):
            raise ValueError("distances must be nonnegative")


def distance_batch(body: ConvexBody, pairs) -> MetricSample:
    pairs = list(pairs)
    return MetricSample(pairs, [hilbert_distance(body, x, y) for x, y in pairs])


def _push(T, body_from: ConvexBody, body_to: ConvexBody, x) -> ProjPoint:
    p = x if isinstance(x, ProjPoint) else body_from.chart.point(x)
    img = proj_apply(T, p)
    if not body_to.is_interior(img):
        raise ImageEscapes(f"image of {p!r} is not interior to the target")
    return img


def check_contraction(T, body1: ConvexBody, body2: ConvexBody, pairs,
                      tol: float = CHECK_TOL) -> CheckReport:
    """Sampled check that ``[T]`` does not increase Hilbert distance.

    ``margin`` is ``max d2(Tx, Ty) - d1(x, y)`` over the pairs.
    """
    worst = -np.inf
    for x, y in pairs:
        d1 = hilbert_distance(body1, x, y)
        d2 = hilbert_distance(body2, _push(T, body1, body2, x), _push(T, body1, body2, y))
        worst = max(worst, d2 - d1)
    return CheckReport("contraction", bool(worst <= tol), float(worst), tol,
                       {"pairs": len(pairs)})


def check_isometry(g, body: ConvexBody, pairs, tol: float = CHECK_TOL) -> CheckReport:
    """Sampled check that an automorphism preserves Hilbert distance.

    Raises
    ------
    NotAutomorphism
        If ``[g]`` does not preserve ``body``.
    """
    if not body.proper:
        raise NotProper(f"{body!r} is not a proper convex set")
    if not preserves_body(g, body):
        raise NotAutomorphism("map does not preserve the body")
    worst = 0.0
    for x, y in pairs:
        d = hilbert_distance(body, x, y)
        dg = hilbert_distance(body, _push(g, body, body, x), _push(g, body, body, y))
        worst = max(worst, abs(dg - d))
    return CheckReport("isometry", bool(worst <= tol), float(worst), tol, {"pairs": len(pairs)})
