"""Convex cones above convex bodies, commutants and invariant splittings."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _polyhedra
from ._linalg import column_space_rref, intertwiner_basis
from ._validation import as_matrix, as_vector, check_random_state
from .convex import ConvexBody, Position
from .errors import NotProper, SplitUnverified
from .reports import CheckReport

CONE_TOL = 1e-9
CLUSTER_TOL = 1e-8


class ConvexCone:
    """A proper open convex cone in R^n.

    Two representations: ``"rays"`` (finitely many extreme ray generators,
    with facet normals computed on construction) and ``"base"`` (the cone
    over an ellipsoid given in an affine chart of P(R^n)).
    """

    def __init__(self, kind: str, ambient_dim: int, *, rays=None, facets=None, body=None):
        self.kind = kind
        self.ambient_dim = ambient_dim
        self.rays = rays
        self.facets = facets
        self.body = body
        self._quadric = body.homogeneous_quadric() if body is not None else None

    @classmethod
    def from_rays(cls, rays) -> "ConvexCone":
        R = as_matrix(rays, name="rays")
        R = R / np.linalg.norm(R, axis=1, keepdims=True)
        n = R.shape[1]
        if np.linalg.matrix_rank(R) < n:
            raise ValueError("rays do not span the ambient space (empty interior)")
        if not _polyhedra.is_pointed(R):
            raise NotProper("rays do not span a pointed cone")
        return cls("rays", n, rays=R, facets=_polyhedra.cone_facets(R))

    @classmethod
    def from_body(cls, body: ConvexBody) -> "ConvexCone":
        if body.kind != "ellipsoid":
            raise ValueError("base cones are only built over ellipsoids; use cone_over")
        return cls("base", body.dim + 1, body=body)

    # -- membership ---------------------------------------------------------

    def _chart_value(self, z: np.ndarray) -> float:
        return float(self.body.chart.functional @ z)

    def classify(self, z, tol: float = CONE_TOL) -> Position:
        z = as_vector(z, length=self.ambient_dim)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return Position.BOUNDARY
        if self.kind == "rays":
            m = float(np.min(self.facets @ z)) / nz
            if m > tol:
                return Position.INTERIOR
            return Position.BOUNDARY if m >= -tol else Position.EXTERIOR
        s = self._chart_value(z)
        if s <= tol * nz * np.linalg.norm(self.body.chart.functional):
            return Position.EXTERIOR
        m = self.body.margin(self.body.chart.to_affine(z)) / self.body.diameter
        if m < -tol:
            return Position.INTERIOR
        return Position.BOUNDARY if m <= tol else Position.EXTERIOR

    def is_interior(self, z) -> bool:
        return self.classify(z, tol=0.0) is Position.INTERIOR

    def line_params(self, x: np.ndarray, u: np.ndarray) -> tuple[float, float]:
        """``lo < 0 < hi`` with ``x + t u`` in the cone iff ``lo < t < hi``.

        Either end may be infinite.
        """
        if self.kind == "rays":
            vals = self.facets @ x
            rate = self.facets @ u
            pos, neg = rate > 0, rate < 0
            lo = np.max(-vals[pos] / rate[pos]) if np.any(pos) else -np.inf
            hi = np.min(-vals[neg] / rate[neg]) if np.any(neg) else np.inf
            return float(lo), float(hi)
        M = self._quadric
        a = u @ M @ u
        b = 2.0 * (x @ M @ u)
        c = x @ M @ x
        if a == 0.0:
            if b > 0:
                return -np.inf, -c / b
            if b < 0:
                return -c / b, np.inf
            return -np.inf, np.inf
        disc = max(b * b - 4.0 * a * c, 0.0)
        q = -0.5 * (b + np.copysign(np.sqrt(disc), b))
        r1, r2 = sorted((q / a, c / q))
        if a > 0:
            return r1, r2
        return (-np.inf, r1) if r1 > 0 else (r2, np.inf)

    def interior_point(self) -> np.ndarray:
        if self.kind == "rays":
            return self.rays.sum(axis=0)
        return self.body.chart.lift(self.body.center)

    def sample_interior(self, n: int, seed=None) -> np.ndarray:
        rng = check_random_state(seed)
        if self.kind == "rays":
            w = rng.exponential(size=(n, len(self.rays))) + 1e-3
            return w @ self.rays
        base = self.body.sample_interior(n, rng)
        scale = rng.uniform(0.5, 2.0, size=(n, 1))
        return scale * np.array([self.body.chart.lift(p) for p in base])

    def is_proper(self) -> bool:
        if self.kind == "rays":
            return _polyhedra.is_pointed(self.rays)
        return self.body.proper

    def __repr__(self):
        if self.kind == "rays":
            return f"ConvexCone(rays={len(self.rays)}, dim={self.ambient_dim})"
        return f"ConvexCone(base={self.body!r})"


def cone_over(body: ConvexBody) -> ConvexCone:
    """The open cone ``{t v : t > 0, [v] in body, functional . v = 1}``."""
    if not body.proper:
        raise NotProper(f"{body!r} is not proper; its cone contains lines")
    if body.kind == "ellipsoid":
        return ConvexCone.from_body(body)
    rays = np.array([body.chart.lift(v) for v in body.vertices])
    return ConvexCone.from_rays(rays)


def orthant(n: int) -> ConvexCone:
    return ConvexCone.from_rays(np.eye(n))


def _generator_list(G) -> list[np.ndarray]:
    gens = getattr(G, "generators", G)
    return [np.asarray(g, dtype=float) for g in gens]


def commutant_basis(G) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of ``{X : X g = g X for every generator g}``."""
    gens = _generator_list(G)
    return intertwiner_basis(gens, gens)


@dataclass
class Decomposition:
    """``R^n = V_1 + ... + V_k`` with cones ``C_i`` in block coordinates.

    ``subspaces[i]`` is an ``n x k_i`` basis (columns) of ``V_i``;
    ``cones[i]`` lives in the coordinates of that basis. ``status[i]`` is
    ``"irreducible"``, ``"irreducible-nonabsolute"`` or ``"indecomposable"``.
    """

    subspaces: list[np.ndarray]
    cones: list[ConvexCone | None]
    status: list[str] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.subspaces)

    def change_of_basis(self) -> np.ndarray:
        return np.hstack(self.subspaces)

    def coordinate_maps(self) -> list[np.ndarray]:
        """Rows of the inverse basis: ``E_i`` with ``E_i @ z`` the ``V_i``-coordinates."""
        Minv = np.linalg.inv(self.change_of_basis())
        out, start = [], 0
        for Q in self.subspaces:
            out.append(Minv[start:start + Q.shape[1]])
            start += Q.shape[1]
        return out

    def projectors(self) -> list[np.ndarray]:
        """Block projections ``p_i = Q_i E_i`` along the complementary blocks."""
        return [Q @ E for Q, E in zip(self.subspaces, self.coordinate_maps())]


def _cluster(eigs: np.ndarray, tol: float) -> list[np.ndarray]:
    pts = np.stack([eigs.real, np.abs(eigs.imag)], axis=1)
    scale = max(1.0, float(np.abs(eigs).max()))
    labels = -np.ones(len(eigs), dtype=int)
    k = 0
    for i in range(len(eigs)):
        if labels[i] >= 0:
            continue
        stack = [i]
        labels[i] = k
        while stack:
            j = stack.pop()
            near = np.flatnonzero((np.linalg.norm(pts - pts[j], axis=1) <= tol * scale) & (labels < 0))
            labels[near] = k
            stack.extend(near.tolist())
        k += 1
    return [pts[labels == c].mean(axis=0) for c in range(k)]


def _invariant_subspaces(X: np.ndarray, centers: list[np.ndarray]) -> list[np.ndarray] | None:
    C = np.array(centers)
    out = []
    for idx in range(len(C)):
        def pick(re, im, idx=idx):
            d = np.linalg.norm(C - np.array([re, abs(im)]), axis=1)
            return int(np.argmin(d)) == idx
        _, Z, sdim = scipy.linalg.schur(X, output="real", sort=pick)
        if sdim == 0:
            return None
        out.append(Z[:, :sdim])
    if sum(V.shape[1] for V in out) != X.shape[0]:
        return None
    return out


def _split(gens: list[np.ndarray], Q: np.ndarray, rng, tol: float) -> list[tuple[np.ndarray, str]]:
    comm = intertwiner_basis(gens, gens)
    if len(comm) <= 1:
        return [(Q, "irreducible")]
    subspaces = None
    complex_type = False
    for _ in range(4):
        X = sum(c * B for c, B in zip(rng.normal(size=len(comm)), comm))
        eigs = np.linalg.eigvals(X)
        centers = _cluster(eigs, tol)
        if len(centers) > 1:
            subspaces = _invariant_subspaces(X, centers)
            if subspaces is not None:
                break
        else:
            complex_type = abs(centers[0][1]) > tol * max(1.0, float(np.abs(eigs).max()))
    if subspaces is None:
        if complex_type and len(comm) in (2, 4):
            return [(Q, "irreducible-nonabsolute")]
        return [(Q, "indecomposable")]
    out = []
    for V in subspaces:
        V = column_space_rref(V)
        pinv = np.linalg.pinv(V)
        sub = [pinv @ g @ V for g in gens]
        out.extend(_split(sub, Q @ V, rng, tol))
    return out


def _block_cone(C: ConvexCone, E: np.ndarray) -> ConvexCone:
    if C.kind != "rays":
        raise SplitUnverified("a cone over an ellipsoid is not a direct sum of cones")
    proj = C.rays @ E.T
    norms = np.linalg.norm(proj, axis=1)
    keep = norms > 1e-9
    if not np.any(keep):
        raise SplitUnverified("cone projects to zero on a block")
    R = proj[keep] / norms[keep, None]
    uniq: list[np.ndarray] = []
    for r in R:
        if not any(np.linalg.norm(r - u) <= 1e-9 for u in uniq):
            uniq.append(r)
    try:
        return ConvexCone.from_rays(np.array(uniq))
    except (ValueError, NotProper) as exc:
        raise SplitUnverified(f"projected cone is not proper: {exc}") from exc


def invariant_splitting(G, C: ConvexCone, seed: int = 0, n_samples: int = 200,
                        tol: float = CLUSTER_TOL) -> Decomposition:
    """Split ``R^n`` into irreducible invariant blocks and split ``C`` along them.

    A random element of the commutant (seeded) is block-diagonalized by an
    ordered real Schur decomposition, one eigenvalue cluster at a time
    (clusters merged at relative ``tol``; conjugate pairs stay together);
    each block is refined recursively until its commutant is
    one-dimensional. Block bases are returned in reduced echelon form and
    ordered by pivot. The cone splitting ``C = C_1 + ... + C_k`` is then
    checked on samples.

    Raises
    ------
    SplitUnverified
        When the subspaces split but the cone does not.
    """
    rng = check_random_state(seed)
    gens = _generator_list(G)
    n = C.ambient_dim
    leaves = _split(gens, np.eye(n), rng, tol)
    bases = [column_space_rref(Q) for Q, _ in leaves]
    order = sorted(range(len(bases)), key=lambda i: _first_pivot(bases[i]))
    bases = [bases[i] for i in order]
    status = [leaves[i][1] for i in order]
    if len(bases) == 1:
        return Decomposition([np.eye(n)], [C], status)
    D = Decomposition(bases, [None] * len(bases), status)
    D.cones = [_block_cone(C, E) for E in D.coordinate_maps()]
    report = verify_decomposition(C, gens, D, seed=rng, n_samples=n_samples)
    if not report.passed:
        raise SplitUnverified(f"cone does not split along the invariant blocks: {report.details}")
    return D


def _first_pivot(Q: np.ndarray) -> int:
    nz = np.flatnonzero(np.abs(Q[:, 0]) > 1e-12)
    return int(nz[0]) if nz.size else Q.shape[0]


def verify_decomposition(C: ConvexCone, G, D: Decomposition, seed=0, n_samples: int = 200,
                         tol: float = 1e-9) -> CheckReport:
    """Check block invariance and ``C = C_1 + ... + C_k`` on samples.

    Invariance residual per block is ``||g Q - Q Q^+ g Q|| / (||g|| ||Q||)``.
    The cone check decomposes sampled interior points of ``C`` and recombines
    sampled interior points of the ``C_i``; any sample that lands outside the
    open cone counts as a failure.
    """
    rng = check_random_state(seed)
    gens = _generator_list(G)
    M = D.change_of_basis()
    n = C.ambient_dim
    details: dict = {"k": D.k}
    if M.shape != (n, n) or np.linalg.matrix_rank(M) < n:
        return CheckReport("decomposition", False, np.inf, tol,
                           {**details, "reason": "subspaces are not independent and spanning"})
    inv_res = 0.0
    for Q in D.subspaces:
        P = Q @ np.linalg.pinv(Q)
        for g in gens:
            gQ = g @ Q
            r = np.linalg.norm(gQ - P @ gQ) / (np.linalg.norm(g) * np.linalg.norm(Q))
            inv_res = max(inv_res, float(r))
    details["invariance_residual"] = inv_res
    failures = 0
    if D.k == 1:
        cone_ok = True
    else:
        E = D.coordinate_maps()
        for z in C.sample_interior(n_samples, rng):
            if not all(Ci.is_interior(Ei @ z) for Ci, Ei in zip(D.cones, E)):
                failures += 1
        parts = [Ci.sample_interior(n_samples, rng) for Ci in D.cones]
        for j in range(n_samples):
            z = sum(Q @ p[j] for Q, p in zip(D.subspaces, parts))
            if not C.is_interior(z):
                failures += 1
        cone_ok = failures == 0
    details["cone_failures"] = failures
    passed = inv_res <= tol and cone_ok
    return CheckReport("decomposition", passed, inv_res, tol, details)
