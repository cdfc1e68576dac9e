"""Homogeneous coordinates, projectivized linear maps and cross-ratios.

Points of P(R^{n}) are stored as unit vectors whose first significant entry is
positive; linear maps are stored with operator norm one and the first
significant entry (column-major) positive. Both normal forms are idempotent.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._validation import as_matrix, as_vector
from .errors import (
    DegenerateConfiguration,
    DimensionMismatch,
    KernelPoint,
    NotCollinear,
    NotConverged,
)

RANK_TOL = 1e-10
COLLINEAR_TOL = 1e-9
# entries below this fraction of the largest one never decide the sign
_SIGN_TOL = 1e-12
_EPS = np.finfo(float).eps


def _fix_sign(flat: np.ndarray) -> float:
    big = np.max(np.abs(flat))
    idx = np.flatnonzero(np.abs(flat) > _SIGN_TOL * big)
    return -1.0 if flat[idx[0]] < 0 else 1.0


def canonical_vector(v) -> np.ndarray:
    """Unit-norm representative of ``[v]`` with first significant entry positive."""
    v = as_vector(v)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("the zero vector has no projective class")
    if abs(n - 1.0) > 4 * _EPS:
        v = v / n
    s = _fix_sign(v)
    return v if s > 0 else -v


def canonical_matrix(a) -> np.ndarray:
    """Operator-norm-one representative of ``[a]``, sign fixed column-major."""
    a = as_matrix(a)
    n = np.linalg.norm(a, 2)
    if n == 0.0:
        raise ValueError("the zero map has no projective class")
    if abs(n - 1.0) > 8 * _EPS:
        a = a / n
    s = _fix_sign(a.flatten(order="F"))
    return a if s > 0 else -a


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """A point of real projective space given by homogeneous coordinates."""

    coords: np.ndarray

    def __post_init__(self):
        c = canonical_vector(self.coords)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        """Projective dimension d (coordinates have length d+1)."""
        return self.coords.shape[0] - 1

    def isclose(self, other: "ProjPoint", tol: float = 1e-9) -> bool:
        if not isinstance(other, ProjPoint) or other.dim != self.dim:
            return False
        a, b = self.coords, other.coords
        return min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= tol

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.isclose(other)

    __hash__ = None

    def __repr__(self):
        return "ProjPoint([" + ":".join(f"{c:.6g}" for c in self.coords) + "])"


def proj_distance(p: ProjPoint, q: ProjPoint) -> float:
    """Sine of the angle between the lines ``p`` and ``q`` (0 iff equal, at most 1)."""
    if p.dim != q.dim:
        raise DimensionMismatch("points live in different projective spaces")
    u, v = p.coords, q.coords
    # sin = ||u - (u.v) v|| avoids the cancellation in sqrt(1 - cos^2)
    return float(min(np.linalg.norm(u - (u @ v) * v), 1.0))


@dataclass(frozen=True, eq=False)
class ProjLinearMap:
    """A projectivized linear map P(R^{d1+1}) -> P(R^{d2+1})."""

    matrix: np.ndarray

    def __post_init__(self):
        m = canonical_matrix(self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def source_dim(self) -> int:
        return self.matrix.shape[1] - 1

    @property
    def target_dim(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def rank(self) -> int:
        return kernel_and_rank(self)[0]

    def __call__(self, x: ProjPoint) -> ProjPoint:
        return proj_apply(self, x)

    def __matmul__(self, other: "ProjLinearMap") -> "ProjLinearMap":
        return ProjLinearMap(self.matrix @ other.matrix)

    def __repr__(self):
        return f"ProjLinearMap({self.matrix.tolist()!r})"


def as_map(T) -> ProjLinearMap:
    return T if isinstance(T, ProjLinearMap) else ProjLinearMap(T)


def as_point(x) -> ProjPoint:
    return x if isinstance(x, ProjPoint) else ProjPoint(x)


@dataclass(frozen=True, eq=False)
class AffineChart:
    """The affine chart ``{[v] : functional . v != 0}``.

    Affine coordinates of ``[v]`` are the entries of ``v / (functional . v)``
    with index :attr:`dropped` removed, where ``dropped`` is the first index
    of largest ``|functional|``. For ``functional = e_0`` this is the usual
    ``[1 : x_1 : ... : x_d] -> (x_1, ..., x_d)``.
    """

    functional: np.ndarray

    def __post_init__(self):
        f = as_vector(self.functional, name="functional").copy()
        if not np.any(f):
            raise ValueError("chart functional must be nonzero")
        f.setflags(write=False)
        object.__setattr__(self, "functional", f)

    @classmethod
    def standard(cls, d: int, index: int = 0) -> "AffineChart":
        f = np.zeros(d + 1)
        f[index] = 1.0
        return cls(f)

    @property
    def dim(self) -> int:
        return self.functional.shape[0] - 1

    @property
    def dropped(self) -> int:
        return int(np.argmax(np.abs(self.functional)))

    @property
    def keep(self) -> np.ndarray:
        return np.delete(np.arange(self.dim + 1), self.dropped)

    def in_chart(self, v, tol: float = 1e-12) -> bool:
        v = v.coords if isinstance(v, ProjPoint) else as_vector(v)
        return abs(self.functional @ v) > tol * np.linalg.norm(self.functional) * np.linalg.norm(v)

    def to_affine(self, v) -> np.ndarray:
        v = v.coords if isinstance(v, ProjPoint) else as_vector(v, length=self.dim + 1)
        s = self.functional @ v
        if s == 0.0:
            raise ValueError("point lies on the hyperplane at infinity of this chart")
        return (v / s)[self.keep]

    def lift(self, x) -> np.ndarray:
        """Homogeneous vector ``v`` with ``functional . v = 1`` over affine point ``x``."""
        x = as_vector(x, length=self.dim, name="affine point")
        v = np.empty(self.dim + 1)
        v[self.keep] = x
        k = self.dropped
        f = self.functional
        v[k] = (1.0 - f[self.keep] @ x) / f[k]
        return v

    def point(self, x) -> ProjPoint:
        return ProjPoint(self.lift(x))

    def frame(self) -> np.ndarray:
        """Matrix ``A`` with ``A @ v = (functional . v, affine-part of v)``."""
        n = self.dim + 1
        A = np.zeros((n, n))
        A[0] = self.functional
        A[np.arange(1, n), self.keep] = 1.0
        return A

    def affine_map_matrix(self, linear, shift) -> np.ndarray:
        """Homogeneous matrix acting as ``x -> linear @ x + shift`` in this chart."""
        d = self.dim
        M = as_matrix(linear, shape=(d, d))
        t = as_vector(shift, length=d)
        H = np.eye(d + 1)
        H[1:, 1:] = M
        H[1:, 0] = t
        A = self.frame()
        return np.linalg.solve(A, H @ A)


@dataclass(frozen=True, eq=False)
class ProjLine:
    """The projective line through two distinct points."""

    p: ProjPoint
    q: ProjPoint

    def __post_init__(self):
        if proj_distance(self.p, self.q) <= COLLINEAR_TOL:
            raise DegenerateConfiguration("a line needs two distinct points")

    def basis(self) -> np.ndarray:
        """Orthonormal 2 x (d+1) basis of the spanning plane."""
        q, _ = np.linalg.qr(np.stack([self.p.coords, self.q.coords]).T)
        return q.T

    def contains(self, x: ProjPoint, tol: float = COLLINEAR_TOL) -> bool:
        B = self.basis()
        r = x.coords - B.T @ (B @ x.coords)
        return np.linalg.norm(r) <= tol


def proj_apply(T, x, tol: float = RANK_TOL) -> ProjPoint:
    """Apply ``[T]`` to ``[x]``.

    Raises
    ------
    KernelPoint
        If ``||T x|| <= tol * ||T|| * ||x||``.
    """
    T = as_map(T)
    x = as_point(x)
    if T.source_dim != x.dim:
        raise DimensionMismatch(f"map acts on P^{T.source_dim}, point is in P^{x.dim}")
    y = T.matrix @ x.coords
    # canonical matrices have operator norm one
    if not np.any(y) or np.linalg.norm(y) <= tol * np.linalg.norm(x.coords):
        raise KernelPoint(f"{x!r} lies in the kernel of the map")
    return ProjPoint(y)


def kernel_and_rank(T, rel_tol: float = RANK_TOL) -> tuple[int, list[np.ndarray]]:
    """Numerical rank and an orthonormal kernel basis of a linear map.

    Singular values are counted iff they exceed ``rel_tol`` times the largest
    one. Kernel vectors are returned with their first significant entry
    positive.
    """
    M = T.matrix if isinstance(T, ProjLinearMap) else as_matrix(T)
    _, s, vh = np.linalg.svd(M)
    rank = int(np.sum(s > rel_tol * s[0])) if s.size and s[0] > 0 else 0
    kernel = [canonical_vector(v) for v in vh[rank:]]
    return rank, kernel


def proj_equal(T1, T2, tol: float = 1e-9) -> bool:
    """True iff ``T1 = lambda * T2`` for some nonzero scalar, up to ``tol``."""
    A, B = as_map(T1).matrix, as_map(T2).matrix
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")
    return min(np.linalg.norm(A - B), np.linalg.norm(A + B)) <= tol


def _homogeneous(p) -> np.ndarray:
    if isinstance(p, ProjPoint):
        return p.coords
    a = np.asarray(p, dtype=float)
    if a.ndim == 0:
        if np.isinf(a):
            return np.array([0.0, 1.0])
        return np.array([1.0, float(a)])
    return np.concatenate([[1.0], as_vector(a)])


def cross_ratio(a, x, y, b) -> float:
    """Cross-ratio ``|x-b||y-a| / (|x-a||y-b|)`` of four collinear points.

    Points may be :class:`ProjPoint` instances, real numbers (points of the
    real line, ``inf`` allowed) or affine coordinate arrays in the chart
    ``x_0 = 1``. The value is computed from 2x2 determinants in a basis of the
    common line, so it is chart independent and a point at infinity simply
    drops its two factors.
    """
    pts = np.stack([_homogeneous(p) for p in (a, x, y, b)])
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    _, s, vh = np.linalg.svd(pts)
    if s.size > 2 and s[2] > COLLINEAR_TOL * s[0]:
        raise NotCollinear(f"points span a plane (third singular value {s[2]:.3g})")
    c = pts @ vh[:2].T
    A, X, Y, B = c

    def det(u, v):
        return u[0] * v[1] - u[1] * v[0]

    xa, yb = det(X, A), det(Y, B)
    if abs(xa) <= COLLINEAR_TOL or abs(yb) <= COLLINEAR_TOL:
        raise DegenerateConfiguration("cross-ratio needs a != x and b != y")
    return abs(det(X, B) * det(Y, A) / (xa * yb))


def directional_limit(T, base, direction, steps: Iterable[float] = (1e-4, 1e-8, 1e-12)) -> ProjPoint:
    """Numerical limit of ``T([base + t * direction])`` as ``t -> 0``.

    Returns the image at the smallest step; callers compare several step
    sizes through :func:`proj_distance` when they need a convergence estimate.
    """
    T = as_map(T)
    v = as_vector(base)
    e = as_vector(direction, length=v.shape[0])
    return proj_apply(T, v + min(steps) * e, tol=0.0)


def discontinuity_witness(T, kernel_vector) -> tuple[np.ndarray, np.ndarray, float]:
    """Directions whose limits at a kernel point of ``T`` disagree.

    For a map of rank at least two, the top two right singular vectors have
    orthogonal images, so approaching ``[v]`` along them yields limits at
    projective distance 1.
    """
    T = as_map(T)
    rank, _ = kernel_and_rank(T)
    if rank < 2:
        raise DegenerateConfiguration("a rank-one map has no kernel discontinuity")
    v = as_vector(kernel_vector, length=T.source_dim + 1)
    if np.linalg.norm(T.matrix @ v) > RANK_TOL * np.linalg.norm(v):
        raise ValueError("vector is not in the kernel")
    _, _, vh = np.linalg.svd(T.matrix)
    e1, e2 = vh[0], vh[1]
    gap = proj_distance(directional_limit(T, v, e1), directional_limit(T, v, e2))
    return e1, e2, gap


def limit_of_maps(sequence: Sequence, tol: float = 1e-9, window: int = 3) -> ProjLinearMap:
    """Limit of a sequence of projective maps.

    Each term is normalized to operator norm one; the sign of every term is
    aligned with its predecessor (``[S] = [-S]``). The sequence is accepted as
    convergent when the last ``window`` successive Frobenius distances are all
    at most ``tol``; the final aligned term is returned. The limit may have
    lower rank than the terms.
    """
    mats = [as_map(s).matrix for s in sequence]
    if not mats:
        raise ValueError("empty sequence")
    shape = mats[0].shape
    if any(m.shape != shape for m in mats):
        raise DimensionMismatch("sequence mixes map dimensions")
    aligned = [mats[0]]
    for m in mats[1:]:
        prev = aligned[-1]
        aligned.append(m if np.linalg.norm(m - prev) <= np.linalg.norm(m + prev) else -m)
    steps = [np.linalg.norm(b - a) for a, b in zip(aligned[:-1], aligned[1:])]
    tail = steps[-window:]
    if steps and max(tail) > tol:
        raise NotConverged(f"tail steps {max(tail):.3g} exceed tolerance {tol:.3g}")
    return ProjLinearMap(aligned[-1])
