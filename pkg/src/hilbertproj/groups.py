"""Finitely generated matrix groups acting on projective space."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from ._validation import as_matrix
from .cones import ConvexCone
from .convex import ConvexBody
from .errors import DimensionMismatch, Exploded, NoConsistentSign
from .projective import ProjPoint, as_point, proj_equal

COND_LIMIT = 1e12
INVERSE_TOL = 1e-10
ORBIT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GroupGens:
    """Generator matrices of a subgroup of GL(n), with verified inverses."""

    generators: tuple
    inverses: tuple = None
    labels: tuple = None

    def __post_init__(self):
        gens = tuple(as_matrix(g, square=True, name="generator") for g in self.generators)
        if not gens:
            raise ValueError("a group needs at least one generator")
        n = gens[0].shape[0]
        if any(g.shape != (n, n) for g in gens):
            raise DimensionMismatch("generators have different sizes")
        for i, g in enumerate(gens):
            if np.linalg.cond(g) > COND_LIMIT:
                raise ValueError(f"generator {i} is singular or badly conditioned")
        invs = self.inverses
        if invs is None:
            invs = tuple(np.linalg.inv(g) for g in gens)
        else:
            invs = tuple(as_matrix(h, shape=(n, n), name="inverse") for h in invs)
            if len(invs) != len(gens):
                raise ValueError("inverses must match generators")
        for i, (g, h) in enumerate(zip(gens, invs)):
            err = np.linalg.norm(g @ h - np.eye(n))
            if err > INVERSE_TOL * max(1.0, np.linalg.norm(g) * np.linalg.norm(h)):
                raise ValueError(f"inverse of generator {i} is off by {err:.3g}")
        labels = self.labels
        if labels is None:
            labels = tuple(f"g{i}" for i in range(len(gens)))
        labels = tuple(str(s) for s in labels)
        if len(labels) != len(gens):
            raise ValueError("labels must match generators")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "inverses", invs)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_matrices(cls, mats: Sequence, labels: Sequence[str] | None = None) -> "GroupGens":
        return cls(tuple(mats), None, None if labels is None else tuple(labels))

    @property
    def size(self) -> int:
        return self.generators[0].shape[0]

    def __len__(self):
        return len(self.generators)

    def letters(self) -> list[tuple[str, np.ndarray]]:
        """Generators and inverses interleaved: ``a, a^-1, b, b^-1, ...``."""
        out = []
        for s, g, h in zip(self.labels, self.generators, self.inverses):
            out.append((s, g))
            out.append((s + "^-1", h))
        return out

    def conjugate(self, h) -> "GroupGens":
        """Generators ``h g h^{-1}``."""
        h = as_matrix(h, shape=(self.size, self.size))
        hi = np.linalg.inv(h)
        return GroupGens(tuple(h @ g @ hi for g in self.generators),
                         tuple(h @ g @ hi for g in self.inverses), self.labels)


@dataclass
class OrbitBall:
    """Orbit points ``w . base`` for words ``w`` of length at most ``radius``.

    Each point is listed once, with a shortest word reaching it (words are
    tuples of letter labels; ``()`` is the identity).
    """

    base: ProjPoint
    radius: int
    points: list[tuple[tuple[str, ...], ProjPoint]] = field(default_factory=list)

    def coords(self) -> np.ndarray:
        return np.array([p.coords for _, p in self.points])

    def __len__(self):
        return len(self.points)


class _HashGrid:
    def __init__(self, dim: int, tol: float):
        self.tol = tol
        self.cells: dict[tuple, list[np.ndarray]] = {}
        self.offsets = list(product((-1, 0, 1), repeat=dim))

    def _key(self, v):
        return tuple(np.floor(v / self.tol).astype(np.int64))

    def seen(self, v) -> bool:
        k = self._key(v)
        for off in self.offsets:
            for w in self.cells.get(tuple(a + b for a, b in zip(k, off)), ()):
                if min(np.linalg.norm(v - w), np.linalg.norm(v + w)) <= self.tol:
                    return True
        return False

    def add(self, v):
        self.cells.setdefault(self._key(v), []).append(v)


def orbit_ball(G: GroupGens, p, L: int, cap: int = 100_000, tol: float = ORBIT_TOL) -> OrbitBall:
    """Breadth-first enumeration of the orbit ball of radius ``L``.

    Points are deduplicated on a hash grid at ``tol``; only newly found points
    are expanded, so each orbit point is reached by a shortest word. A letter
    is never followed by its own inverse.

    Raises
    ------
    Exploded
        If more than ``cap`` distinct points are found.
    """
    if L < 0:
        raise ValueError("radius must be nonnegative")
    p = as_point(p)
    if p.dim + 1 != G.size:
        raise DimensionMismatch("base point and group act on different spaces")
    letters = G.letters()
    grid = _HashGrid(G.size, tol)
    grid.add(p.coords)
    ball = OrbitBall(p, L, [((), p)])
    frontier = [((), p.coords, None)]
    for _ in range(L):
        nxt = []
        for word, v, last in frontier:
            for idx, (label, g) in enumerate(letters):
                if last is not None and idx == last ^ 1:
                    continue
                w = ProjPoint(g @ v).coords
                if grid.seen(w):
                    continue
                grid.add(w)
                new_word = (label,) + word
                ball.points.append((new_word, ProjPoint(w)))
                if len(ball.points) > cap:
                    raise Exploded(f"orbit ball exceeded {cap} points")
                nxt.append((new_word, w, idx))
        frontier = nxt
    return ball


def preserves_body(g, body: ConvexBody, tol: float = 1e-9) -> bool:
    """Whether ``[g]`` maps ``body`` onto itself.

    Polyhedra: the vertices are permuted and no vertex is sent across the
    hyperplane at infinity. Ellipsoids: ``g^T M g`` is a positive multiple of
    the defining quadric ``M``. The non-proper affine chart: ``g`` preserves
    the chart hyperplane.
    """
    g = as_matrix(g, shape=(body.dim + 1, body.dim + 1))
    f = body.chart.functional
    if body.kind == "affine":
        fg = f @ g
        mu = fg @ f / (f @ f)
        return abs(mu) > 0 and np.linalg.norm(fg - mu * f) <= tol * np.linalg.norm(fg)
    if body.kind == "ellipsoid":
        M = body.homogeneous_quadric()
        Mp = g.T @ M @ g
        lam = np.sum(Mp * M) / np.sum(M * M)
        return lam > 0 and np.linalg.norm(Mp - lam * M) <= tol * np.linalg.norm(Mp)
    V = body.vertices
    lifted = np.array([body.chart.lift(v) for v in V]) @ g.T
    s = lifted @ f
    if np.any(np.abs(s) <= tol * np.linalg.norm(lifted, axis=1) * np.linalg.norm(f)):
        return False
    if not (np.all(s > 0) or np.all(s < 0)):
        return False
    images = lifted / s[:, None]
    images = images[:, body.chart.keep]
    scale = tol * body.diameter
    used = np.zeros(len(V), dtype=bool)
    for im in images:
        d = np.linalg.norm(V - im, axis=1)
        j = int(np.argmin(d))
        if d[j] > scale or used[j]:
            return False
        used[j] = True
    return True


def cone_lift(G: GroupGens, C: ConvexCone) -> GroupGens:
    """Lift projective generators to linear maps preserving the cone ``C``.

    Each generator is rescaled to determinant +-1 and its sign chosen so that
    an interior ray of ``C`` lands inside ``C``; ``e * Id`` is appended, so
    the result generates the group ``<lifts, e Id>``.

    Raises
    ------
    NoConsistentSign
        If neither sign keeps the test ray inside ``C``.
    """
    n = C.ambient_dim
    if G.size != n:
        raise DimensionMismatch("group and cone live in different dimensions")
    r = C.interior_point()
    lifted = []
    for label, g in zip(G.labels, G.generators):
        h = g / abs(np.linalg.det(g)) ** (1.0 / n)
        if C.is_interior(h @ r):
            lifted.append(h)
        elif C.is_interior(-h @ r):
            lifted.append(-h)
        else:
            raise NoConsistentSign(f"generator {label} does not preserve the cone up to sign")
    lifted.append(np.e * np.eye(n))
    return GroupGens.from_matrices(lifted, list(G.labels) + ["e"])


def centralizes(h, G: GroupGens, tol: float = 1e-9) -> bool:
    """Whether ``[h g] = [g h]`` for every generator ``g``."""
    h = as_matrix(h, shape=(G.size, G.size))
    return all(proj_equal(h @ g, g @ h, tol) for g in G.generators)
