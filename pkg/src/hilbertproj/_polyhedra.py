"""Brute-force facet and vertex enumeration for small polyhedra.

These routines enumerate subsets directly and are meant for ambient
dimension at most five, where the subset counts stay in the thousands.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.optimize import linprog

_TOL = 1e-9


def _dedupe_rows(rows: list[np.ndarray], tol: float = 1e-8) -> np.ndarray:
    out: list[np.ndarray] = []
    for r in rows:
        if not any(np.linalg.norm(r - o) <= tol for o in out):
            out.append(r)
    return np.array(out)


def cone_facets(rays: np.ndarray, tol: float = _TOL) -> np.ndarray:
    """Inward unit facet normals ``h`` of the closed cone spanned by ``rays``.

    The cone is ``{z : h . z >= 0 for every row h}``. Requires the rays to
    span the ambient space.
    """
    R = np.asarray(rays, dtype=float)
    R = R / np.linalg.norm(R, axis=1, keepdims=True)
    m, n = R.shape
    if np.linalg.matrix_rank(R) < n:
        raise ValueError("rays do not span the ambient space")
    found: list[np.ndarray] = []
    for subset in combinations(range(m), n - 1):
        S = R[list(subset)]
        if n > 1:
            _, s, vh = np.linalg.svd(S)
            if np.sum(s > 1e-10) < n - 1:
                continue
            h = vh[-1]
        else:
            h = np.ones(1)
        vals = R @ h
        if np.all(vals >= -tol):
            pass
        elif np.all(vals <= tol):
            h, vals = -h, -vals
        else:
            continue
        if np.max(vals) <= tol:
            continue
        found.append(h / np.linalg.norm(h))
    return _dedupe_rows(found)


def polytope_halfspaces(vertices: np.ndarray, tol: float = _TOL) -> tuple[np.ndarray, np.ndarray]:
    """Facets ``A x <= b`` (unit rows of ``A``) of the hull of ``vertices``."""
    V = np.asarray(vertices, dtype=float)
    lifted = np.hstack([np.ones((V.shape[0], 1)), V])
    H = cone_facets(lifted, tol)
    A, b = [], []
    for h in H:
        a = -h[1:]
        na = np.linalg.norm(a)
        if na <= 1e-12:
            continue
        A.append(a / na)
        b.append(h[0] / na)
    return np.array(A), np.array(b)


def halfspace_vertices(A: np.ndarray, b: np.ndarray, tol: float = _TOL) -> np.ndarray:
    """Vertices of the bounded polytope ``{x : A x <= b}``."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, d = A.shape
    scale = max(1.0, float(np.max(np.abs(b))))
    found = []
    for subset in combinations(range(m), d):
        S = A[list(subset)]
        if abs(np.linalg.det(S)) <= 1e-12:
            continue
        x = np.linalg.solve(S, b[list(subset)])
        if np.all(A @ x <= b + tol * scale):
            found.append(x)
    return _dedupe_rows(found, tol=1e-8 * scale)


def is_bounded(A: np.ndarray, b: np.ndarray) -> bool:
    """Whether ``{x : A x <= b}`` is bounded (and nonempty)."""
    d = A.shape[1]
    for i in range(d):
        for sgn in (1.0, -1.0):
            c = np.zeros(d)
            c[i] = -sgn
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * d, method="highs")
            if res.status != 0:
                return False
    return True


def chebyshev_center(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Center and radius of the largest ball inside ``{x : A x <= b}``."""
    m, d = A.shape
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(d + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.hstack([A, norms[:, None]]), b_ub=b,
                  bounds=[(None, None)] * d + [(0, None)], method="highs")
    if res.status != 0:
        raise ValueError("halfspace system is infeasible or unbounded")
    return res.x[:d], float(res.x[-1])


def is_pointed(rays: np.ndarray) -> bool:
    """True iff no convex combination of the rays vanishes.

    Solves the feasibility LP ``sum l_i r_i = 0, l >= 0, sum l_i = 1``; the
    cone is pointed (contains no line) exactly when it is infeasible.
    """
    R = np.asarray(rays, dtype=float)
    R = R / np.linalg.norm(R, axis=1, keepdims=True)
    m, n = R.shape
    A_eq = np.vstack([R.T, np.ones((1, m))])
    b_eq = np.concatenate([np.zeros(n), [1.0]])
    res = linprog(np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * m, method="highs")
    return res.status == 2


def active_rank(A: np.ndarray, b: np.ndarray, x: np.ndarray, tol: float) -> int:
    """Rank of the constraint normals active at ``x``."""
    act = np.abs(A @ x - b) <= tol
    if not np.any(act):
        return 0
    return int(np.linalg.matrix_rank(A[act], tol=1e-9))
