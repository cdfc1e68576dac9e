"""Input coercion helpers shared by the public API."""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch


def as_vector(x, *, length: int | None = None, name: str = "vector") -> np.ndarray:
    """Return ``x`` as a finite 1-d float array, optionally of fixed length."""
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-dimensional, got shape {v.shape}")
    if length is not None and v.shape[0] != length:
        raise DimensionMismatch(f"{name} must have length {length}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def as_matrix(a, *, shape: tuple[int, int] | None = None, square: bool = False,
              name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    if shape is not None and m.shape != tuple(shape):
        raise DimensionMismatch(f"{name} must have shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def as_points(x, *, dim: int | None = None, name: str = "points") -> np.ndarray:
    """Return a 2-d array of row points."""
    p = np.asarray(x, dtype=float)
    if p.ndim == 1:
        p = p.reshape(-1, 1) if dim == 1 else p.reshape(1, -1)
    if p.ndim != 2:
        raise DimensionMismatch(f"{name} must be a list of points, got shape {p.shape}")
    if dim is not None and p.shape[1] != dim:
        raise DimensionMismatch(f"{name} must have {dim} columns, got {p.shape[1]}")
    return p


def check_random_state(seed) -> np.random.Generator:
    """Turn ``None``, an int, or a Generator into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
