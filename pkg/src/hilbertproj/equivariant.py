"""Equivariant linear maps between cones.

The maps ``S`` with ``S phi = tau(phi) S`` form a linear space; the ones
carrying the source cone into the open target cone form a convex open
subset of it. This module computes the space, tests cone inclusion, blends
two solutions, factors a solution through its kernel and recovers a
projective map from its boundary values.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ._linalg import intertwiner_basis
from ._validation import as_matrix, as_vector, check_random_state
from .cones import ConvexCone, _block_cone, invariant_splitting
from .convex import ConvexBody, Position, chord_endpoints, is_strictly_convex
from .errors import (DegenerateConfiguration, DimensionMismatch, ImageEscapes,
                     InconsistentBoundaryData, KernelNotInvariant, NoComplement,
                     NotComparable, NotInSpace, NotInterior)
from .groups import GroupGens
from .hilbert import cone_hilbert_distance
from .projective import (ProjLinearMap, ProjPoint, canonical_matrix, kernel_and_rank,
                         proj_apply, proj_distance, proj_equal)
from .reports import CheckReport

RESIDUAL_TOL = 1e-9
RECONSTRUCT_TOL = 1e-6


class Status(enum.Enum):
    STRICTLY_INSIDE = "StrictlyInside"
    ON_BOUNDARY = "OnBoundary"
    OUTSIDE = "Outside"


@dataclass(frozen=True, eq=False)
class Equivariance:
    """A homomorphism ``tau`` given on generators: ``phi_i -> image_gens[i]``."""

    source_gens: GroupGens
    image_gens: tuple

    def __post_init__(self):
        imgs = tuple(as_matrix(t, square=True, name="image generator") for t in self.image_gens)
        if len(imgs) != len(self.source_gens):
            raise ValueError("image generators must be aligned with source generators")
        m = imgs[0].shape[0]
        if any(t.shape != (m, m) for t in imgs):
            raise DimensionMismatch("image generators have different sizes")
        for i, t in enumerate(imgs):
            if np.linalg.cond(t) > 1e12:
                raise ValueError(f"image generator {i} is singular")
        object.__setattr__(self, "image_gens", imgs)

    @classmethod
    def identity(cls, G: GroupGens) -> "Equivariance":
        return cls(G, G.generators)

    @property
    def source_dim(self) -> int:
        return self.source_gens.size

    @property
    def target_dim(self) -> int:
        return self.image_gens[0].shape[0]

    def residual(self, S) -> float:
        """``max_i ||S phi_i - tau_i S|| / (||S|| max(||phi_i||, ||tau_i||))``."""
        S = np.asarray(S, dtype=float)
        nS = np.linalg.norm(S)
        if nS == 0.0:
            return 0.0
        worst = 0.0
        for phi, tau in zip(self.source_gens.generators, self.image_gens):
            r = np.linalg.norm(S @ phi - tau @ S)
            worst = max(worst, r / (nS * max(np.linalg.norm(phi, 2), np.linalg.norm(tau, 2))))
        return float(worst)


@dataclass(eq=False)
class EquivariantSpace:
    """Frobenius-orthonormal basis of the equivariant maps; may be empty."""

    basis: list[np.ndarray]
    source_cone: ConvexCone | None
    target_cone: ConvexCone | None
    equivariance: Equivariance | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def combine(self, coeffs) -> np.ndarray:
        c = as_vector(coeffs, length=self.dim, name="coefficients")
        return sum(ci * B for ci, B in zip(c, self.basis))

    def coefficients(self, S) -> tuple[np.ndarray, float]:
        """Least-squares coordinates of ``S`` and the relative distance to the span."""
        S = np.asarray(S, dtype=float)
        c = np.array([np.sum(B * S) for B in self.basis])
        res = np.linalg.norm(S - self.combine(c)) if self.dim else np.linalg.norm(S)
        return c, float(res / max(np.linalg.norm(S), 1e-300))

    def contains(self, S, tol: float = RESIDUAL_TOL) -> bool:
        return self.coefficients(S)[1] <= tol


def equivariant_solution_space(E: Equivariance, C1: ConvexCone | None = None,
                               C2: ConvexCone | None = None) -> EquivariantSpace:
    """All ``S`` with ``S phi_i = tau(phi_i) S`` for every generator."""
    if C1 is not None and C1.ambient_dim != E.source_dim:
        raise DimensionMismatch("source cone does not match the source group")
    if C2 is not None and C2.ambient_dim != E.target_dim:
        raise DimensionMismatch("target cone does not match the image group")
    basis = intertwiner_basis(list(E.source_gens.generators), list(E.image_gens))
    return EquivariantSpace(basis, C1, C2, E)


def maps_cone_to_cone(S, C1: ConvexCone, C2: ConvexCone, seed=0,
                      n_samples: int = 500) -> Status:
    """Whether ``S`` maps the open cone ``C1`` into the open cone ``C2``.

    For a ray cone the answer is exact: every extreme ray must land in the
    closure of ``C2`` and the image of the sum of the rays must be interior.
    For a cone over an ellipsoid, ``n_samples`` seeded interior rays are
    tested instead.
    """
    S = as_matrix(S, shape=(C2.ambient_dim, C1.ambient_dim), name="S")
    if not np.any(S):
        raise ValueError("S must be nonzero")
    if C1.kind == "rays":
        images = C1.rays @ S.T
        if any(C2.classify(z) is Position.EXTERIOR for z in images):
            return Status.OUTSIDE
        deep = S @ C1.rays.sum(axis=0)
        return Status.STRICTLY_INSIDE if C2.is_interior(deep) else Status.ON_BOUNDARY
    positions = [C2.classify(S @ z) for z in C1.sample_interior(n_samples, seed)]
    if any(p is Position.EXTERIOR for p in positions):
        return Status.OUTSIDE
    if all(p is Position.INTERIOR for p in positions):
        return Status.STRICTLY_INSIDE
    return Status.ON_BOUNDARY


@dataclass
class BlendResult:
    R: float
    interval: tuple[float, float]
    verified: bool
    grid: list[tuple[float, str]] = field(default_factory=list)


def blend_interval(S1, S2, sample, C1: ConvexCone, C2: ConvexCone, n_grid: int = 21,
                   inset: float = 1e-6, seed=0) -> BlendResult:
    """Open interval of ``lam`` for which ``lam S1 + (1 - lam) S2`` stays inside.

    ``R`` is the largest cone distance between ``S1 x`` and ``S2 x`` over the
    sample, and the guaranteed interval is ``(-e^-R, 1 + e^-R)``. The result
    is verified on an evenly spaced grid inset by ``inset`` from both ends.

    Raises
    ------
    NotComparable
        If some pair of images is not in the open target cone, so that their
        distance is infinite.
    """
    S1 = as_matrix(S1, shape=(C2.ambient_dim, C1.ambient_dim), name="S1")
    S2 = as_matrix(S2, shape=S1.shape, name="S2")
    R = 0.0
    for x in np.atleast_2d(np.asarray(sample, dtype=float)):
        a, b = S1 @ x, S2 @ x
        if not (C2.is_interior(a) and C2.is_interior(b)):
            raise NotComparable("images are not both in the open target cone")
        d = cone_hilbert_distance(C2, a, b)
        if not np.isfinite(d):
            raise NotComparable("images lie at infinite distance")
        R = max(R, d)
    m = float(np.exp(-R))
    lo, hi = -m, 1.0 + m
    grid = []
    for lam in np.linspace(lo + inset, hi - inset, n_grid):
        st = maps_cone_to_cone(lam * S1 + (1.0 - lam) * S2, C1, C2, seed=seed)
        grid.append((float(lam), st.value))
    verified = all(s == Status.STRICTLY_INSIDE.value for _, s in grid)
    return BlendResult(float(R), (lo, hi), verified, grid)


@dataclass(eq=False)
class Factorization:
    """``S0 = S_bar o p_W`` through the quotient by ``U = ker S0``.

    ``W_basis`` (columns) spans the invariant complement ``W`` and
    ``W_coords`` (rows) reads off ``W``-coordinates along ``U``, so
    ``projector = W_basis @ W_coords``. The quotient cone and group are
    expressed in ``W``-coordinates and ``injective_part`` maps those
    coordinates to the target.
    """

    U_basis: np.ndarray
    W_basis: np.ndarray
    W_coords: np.ndarray
    projector: np.ndarray
    quotient_cone: ConvexCone
    quotient_group: GroupGens
    injective_part: np.ndarray
    residuals: dict = field(default_factory=dict)


def _subspace_residual(A: np.ndarray, B: np.ndarray) -> float:
    """How far the columns of ``A`` are from the span of ``B``."""
    if A.size == 0:
        return 0.0
    if B.size == 0:
        return float(np.linalg.norm(A))
    q, _ = np.linalg.qr(B)
    return float(np.linalg.norm(A - q @ (q.T @ A)) / np.linalg.norm(A))


def factorize(S0, E: Equivariance, C1: ConvexCone, C2: ConvexCone, seed: int = 0,
              n_samples: int = 200, tol: float = RESIDUAL_TOL) -> Factorization:
    """Factor an equivariant cone map through the quotient by its kernel.

    The complement ``W`` is the sum of the irreducible blocks of the source
    splitting that are not contained in ``ker S0``.

    Raises
    ------
    KernelNotInvariant
        If ``S0`` is not equivariant or its kernel is not invariant.
    NoComplement
        If the kernel is not a sum of splitting blocks.
    ImageEscapes
        If ``S0`` does not map ``C1`` into the open cone ``C2``.
    """
    G = E.source_gens
    S0 = as_matrix(S0, shape=(E.target_dim, E.source_dim), name="S0")
    eq_res = E.residual(S0)
    if eq_res > tol:
        raise KernelNotInvariant(f"S0 is not equivariant (residual {eq_res:.3g})")
    if maps_cone_to_cone(S0, C1, C2, seed=seed) is not Status.STRICTLY_INSIDE:
        raise ImageEscapes("S0 does not map the source cone into the open target cone")
    n = E.source_dim
    _, kernel = kernel_and_rank(S0)
    U = np.array(kernel).T if kernel else np.zeros((n, 0))
    for phi in G.generators:
        if _subspace_residual(phi @ U, U) > tol:
            raise KernelNotInvariant("ker S0 is not invariant under the source group")
    if U.shape[1] == 0:
        Q_W, E_W, C_W, G_W = np.eye(n), np.eye(n), C1, G
    else:
        D = invariant_splitting(G, C1, seed=seed)
        coords = D.coordinate_maps()
        scale = np.linalg.norm(S0)
        in_U = [np.linalg.norm(S0 @ Q) <= tol * scale * np.linalg.norm(Q) for Q in D.subspaces]
        u_dim = sum(Q.shape[1] for Q, inside in zip(D.subspaces, in_U) if inside)
        if u_dim != U.shape[1] or all(in_U):
            raise NoComplement("ker S0 is not a sum of invariant blocks")
        Q_W = np.hstack([Q for Q, inside in zip(D.subspaces, in_U) if not inside])
        E_W = np.vstack([Ei for Ei, inside in zip(coords, in_U) if not inside])
        C_W = _block_cone(C1, E_W)
        G_W = GroupGens.from_matrices([E_W @ phi @ Q_W for phi in G.generators], G.labels)
    p_W = Q_W @ E_W
    S_bar = S0 @ Q_W
    if np.linalg.matrix_rank(S_bar, tol=1e-10 * max(np.linalg.norm(S_bar, 2), 1e-300)) < S_bar.shape[1]:
        raise NoComplement("factored map is not injective")
    f = Factorization(U, Q_W, E_W, p_W, C_W, G_W, S_bar)
    f.residuals = factorization_residuals(f, S0, G, C1, seed=seed, n_samples=n_samples)
    return f


def factorization_residuals(f: Factorization, S0, G: GroupGens, C1: ConvexCone,
                            seed=0, n_samples: int = 200) -> dict:
    """Relative residuals of the factorization identities, in operator norm
    and on sampled cone points."""
    S0 = np.asarray(S0, dtype=float)
    p = f.projector
    n0 = max(np.linalg.norm(S0, 2), 1e-300)
    res = {
        "idempotent": float(np.linalg.norm(p @ p - p, 2) / np.linalg.norm(p, 2)),
        "factor": float(np.linalg.norm(S0 - f.injective_part @ f.W_coords, 2) / n0),
        "commute": max(float(np.linalg.norm(p @ g - g @ p, 2) / (np.linalg.norm(g, 2) * np.linalg.norm(p, 2)))
                       for g in G.generators),
        "quotient_equivariance": max(
            float(np.linalg.norm(f.W_coords @ g - h @ f.W_coords, 2) / np.linalg.norm(g, 2))
            for g, h in zip(G.generators, f.quotient_group.generators)),
    }
    worst = 0.0
    for z in C1.sample_interior(n_samples, seed):
        lhs = S0 @ z
        rhs = f.injective_part @ (f.W_coords @ z)
        worst = max(worst, float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), 1e-300)))
        if not f.quotient_cone.is_interior(f.W_coords @ z):
            worst = np.inf
    res["sampled"] = worst
    return res


def _homogeneous(body: ConvexBody, x) -> np.ndarray:
    if isinstance(x, ProjPoint):
        return x.coords
    return body.chart.lift(x)


def boundary_reconstruct(body1: ConvexBody, body2: ConvexBody, pairs, seed=0,
                         n_checks: int = 20, tol: float = RECONSTRUCT_TOL) -> ProjLinearMap:
    """Recover a projective map from its values on boundary points.

    ``pairs`` holds ``(xi, eta)`` with ``xi`` on the boundary of ``body1`` and
    ``eta`` its image on the boundary of ``body2`` (affine chart points or
    :class:`ProjPoint`). ``T`` solves ``(T xi)_a eta_b - (T xi)_b eta_a = 0``
    in the least-squares sense; the fit is then checked through the
    two-chord construction: ``T(p)`` must be the intersection of the images
    of two chords through ``p``.

    Raises
    ------
    InconsistentBoundaryData
        If some incidence or construction residual exceeds ``tol``.
    DegenerateConfiguration
        If the samples do not determine ``T``.
    """
    if not is_strictly_convex(body1):
        raise ValueError("the source body must be strictly convex")
    pairs = list(pairs)
    X = np.array([_homogeneous(body1, a) for a, _ in pairs])
    Y = np.array([_homogeneous(body2, b) for _, b in pairs])
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    Y /= np.linalg.norm(Y, axis=1, keepdims=True)
    n1, n2 = X.shape[1], Y.shape[1]
    rows = []
    for xi, eta in zip(X, Y):
        for a in range(n2):
            for b in range(a + 1, n2):
                r = np.zeros((n2, n1))
                r[a] = eta[b] * xi
                r[b] = -eta[a] * xi
                rows.append(r.ravel())
    A = np.array(rows)
    if A.shape[0] < n1 * n2 - 1:
        raise DegenerateConfiguration("too few boundary samples")
    _, s, vh = np.linalg.svd(A)
    if s[n1 * n2 - 2] <= 1e-9 * s[0]:
        raise DegenerateConfiguration("boundary samples do not determine the map")
    T = vh[-1].reshape(n2, n1)
    images = X @ T.T
    norms = np.linalg.norm(images, axis=1)
    if np.any(norms <= 1e-12):
        raise InconsistentBoundaryData("a boundary sample falls in the kernel of the fit")
    U = images / norms[:, None]
    wedge = np.abs(U[:, :, None] * Y[:, None, :] - U[:, None, :] * Y[:, :, None]).max()
    if wedge > tol:
        raise InconsistentBoundaryData(f"incidence residual {wedge:.3g} exceeds {tol:g}")
    gap = _two_chord_gap(T, body1, seed, n_checks)
    if gap > tol:
        raise InconsistentBoundaryData(f"two-chord residual {gap:.3g} exceeds {tol:g}")
    return ProjLinearMap(T)


def _two_chord_gap(T: np.ndarray, body: ConvexBody, seed, n: int) -> float:
    rng = check_random_state(seed)
    worst = 0.0
    for p in body.sample_interior(n, rng):
        ends = []
        for _ in range(2):
            u = rng.normal(size=body.dim)
            ch = chord_endpoints(body, p, p + 1e-3 * body.diameter * u / np.linalg.norm(u))
            ends.append((T @ ch.a.coords, T @ ch.b.coords))
        (a1, b1), (a2, b2) = ends
        M = np.column_stack([a1, b1, -a2, -b2])
        _, _, vh = np.linalg.svd(M)
        c = vh[-1]
        meet = c[0] * a1 + c[1] * b1
        Tp = T @ body.chart.lift(p)
        worst = max(worst, proj_distance(ProjPoint(meet), ProjPoint(Tp)))
    return worst


def homotopy_agreement(T0, T1, body1: ConvexBody, body2: ConvexBody, ext_samples,
                       tol: float = 1e-8) -> CheckReport:
    """Staged comparison of two maps on boundary points of ``body1``.

    Stage ``"boundary"``: both maps send every sample to the boundary of
    ``body2`` (relative boundary band ``1e-9``). Stage ``"agree"``: the two images coincide for every sample.
    Stage ``"equal"``: the maps are projectively equal. The report's
    ``details["stages"]`` lists each stage with its measured gap;
    ``details["failed"]`` names the first failing stage.
    """
    T0 = np.asarray(T0, dtype=float)
    T1 = np.asarray(T1, dtype=float)
    on_bd, gap = 0.0, 0.0
    for x in ext_samples:
        v = _homogeneous(body1, x)
        a, b = proj_apply(T0, v), proj_apply(T1, v)
        for img in (a, b):
            y = body2.affine(img)
            m = np.inf if y is None else abs(body2.margin(y))
            on_bd = max(on_bd, m / body2.diameter)
        gap = max(gap, proj_distance(a, b))
    eq_gap = float(np.linalg.norm(canonical_matrix(T0) - canonical_matrix(T1)))
    eq_gap = min(eq_gap, float(np.linalg.norm(canonical_matrix(T0) + canonical_matrix(T1))))
    stages = [
        {"stage": "boundary", "passed": bool(on_bd <= 1e-9), "gap": float(on_bd)},
        {"stage": "agree", "passed": bool(gap <= tol), "gap": float(gap)},
        {"stage": "equal", "passed": bool(proj_equal(T0, T1, tol)), "gap": eq_gap},
    ]
    failed = next((s["stage"] for s in stages if not s["passed"]), None)
    return CheckReport("homotopy-agreement", failed is None, float(gap), tol,
                       {"stages": stages, "failed": failed})


def family_evaluate(space: EquivariantSpace, coeffs, n) -> ProjPoint:
    """Evaluate the map with coordinates ``coeffs`` in ``space`` at ``n``.

    Raises
    ------
    NotInSpace
        If the coefficients have the wrong length or the combined map does
        not carry the source cone into the target cone.
    NotInterior
        If ``n`` is not an interior point of the source.
    """
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.shape[0] != space.dim:
        raise NotInSpace(f"expected {space.dim} coefficients, got {c.shape[0]}")
    S = space.combine(c)
    if not np.any(S) or (space.source_cone is not None and space.target_cone is not None
                         and maps_cone_to_cone(S, space.source_cone, space.target_cone)
                         is not Status.STRICTLY_INSIDE):
        raise NotInSpace("combination does not map the source cone into the target cone")
    v = n.coords if isinstance(n, ProjPoint) else as_vector(n, length=S.shape[1])
    C1 = space.source_cone
    if C1 is not None and not (C1.is_interior(v) or C1.is_interior(-v)):
        raise NotInterior("evaluation point is not interior to the source")
    return proj_apply(S, v)
