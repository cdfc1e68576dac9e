"""Null spaces of stacked Sylvester operators and basis normal forms."""
from __future__ import annotations

from typing import Sequence

import numpy as np

NULL_TOL = 1e-9


def rref(M: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with partial pivoting; returns (R, pivots)."""
    R = np.array(M, dtype=float, copy=True)
    rows, cols = R.shape
    scale = max(np.abs(R).max(initial=0.0), 1e-300)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = r + int(np.argmax(np.abs(R[r:, c])))
        if abs(R[p, c]) <= tol * scale:
            continue
        R[[r, p]] = R[[p, r]]
        R[r] /= R[r, c]
        for i in range(rows):
            if i != r:
                R[i] -= R[i, c] * R[r]
        pivots.append(c)
        r += 1
    R = R[:r]
    R[np.abs(R) <= 1e-13] = 0.0
    return R, pivots


def column_space_rref(Q: np.ndarray) -> np.ndarray:
    """Basis of the column space of ``Q`` in reduced echelon form (as columns).

    Coordinate subspaces come out as the coordinate vectors themselves.
    """
    R, _ = rref(np.asarray(Q, dtype=float).T)
    return R.T


def orthonormal_rows_rref(rows: np.ndarray) -> np.ndarray:
    """Orthonormal basis of a row space, Gram-Schmidt applied to its RREF."""
    if rows.shape[0] == 0:
        return rows
    R, _ = rref(rows)
    q, _ = np.linalg.qr(R.T)
    q = q.T
    # QR may flip signs; make the pivot entries positive again
    for i in range(q.shape[0]):
        j = np.flatnonzero(np.abs(q[i]) > 1e-12)[0]
        if q[i, j] < 0:
            q[i] = -q[i]
    q[np.abs(q) <= 1e-15] = 0.0
    return q


def intertwiner_basis(sources: Sequence[np.ndarray], targets: Sequence[np.ndarray],
                      rel_tol: float = NULL_TOL) -> list[np.ndarray]:
    """Orthonormal basis of ``{S : S @ sources[i] = targets[i] @ S for all i}``.

    Each constraint is vectorized row-major as
    ``(I kron phi^T - tau kron I) vec(S) = 0``; blocks are scaled to unit
    norm and the stacked null space is read off the SVD.
    """
    if len(sources) != len(targets):
        raise ValueError("sources and targets must be aligned")
    if not sources:
        raise ValueError("at least one generator is required")
    n1 = sources[0].shape[0]
    n2 = targets[0].shape[0]
    blocks = []
    for phi, tau in zip(sources, targets):
        op = np.kron(np.eye(n2), phi.T) - np.kron(tau, np.eye(n1))
        scale = max(np.linalg.norm(phi, 2), np.linalg.norm(tau, 2))
        blocks.append(op / scale)
    A = np.vstack(blocks)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    if s.size == 0 or s[0] <= 1e-14:
        rank = 0
    else:
        rank = int(np.sum(s > rel_tol * s[0]))
    null = orthonormal_rows_rref(vh[rank:])
    return [v.reshape(n2, n1) for v in null]
