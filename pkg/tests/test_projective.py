import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hilbertproj.errors import (DegenerateConfiguration, DimensionMismatch, KernelPoint,
                                NotCollinear, NotConverged)
from hilbertproj.projective import (AffineChart, ProjLine, ProjLinearMap, ProjPoint,
                                    canonical_matrix, canonical_vector, cross_ratio,
                                    directional_limit, discontinuity_witness, kernel_and_rank,
                                    limit_of_maps, proj_apply, proj_distance, proj_equal)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
nonzero_vec = arrays(float, 4, elements=finite).filter(lambda v: np.linalg.norm(v) > 1e-3)


def test_projpoint_canonical_form():
    p = ProjPoint([0.0, -3.0, 4.0])
    np.testing.assert_allclose(p.coords, [0.0, 0.6, -0.8])
    assert p == ProjPoint([0.0, 6.0, -8.0])
    assert p != ProjPoint([0.0, 6.0, 8.0])
    with pytest.raises(ValueError):
        ProjPoint([0.0, 0.0])


@given(nonzero_vec)
def test_canonical_vector_idempotent(v):
    c = canonical_vector(v)
    assert np.array_equal(canonical_vector(c), c)
    assert abs(np.linalg.norm(c) - 1.0) < 1e-15


@given(arrays(float, (3, 3), elements=finite).filter(lambda a: np.linalg.norm(a) > 1e-3))
def test_canonical_matrix_idempotent(a):
    c = canonical_matrix(a)
    assert np.array_equal(canonical_matrix(c), c)
    assert abs(np.linalg.norm(c, 2) - 1.0) < 1e-14


def test_projlinearmap_invariants():
    T = ProjLinearMap(np.diag([3.0, 1.0, 0.0]))
    assert T.source_dim == T.target_dim == 2
    assert T.rank == 2
    with pytest.raises(ValueError):
        ProjLinearMap(np.zeros((2, 2)))


def test_proj_apply_examples():
    assert proj_apply(np.eye(3), ProjPoint([1, 2, 3])) == ProjPoint([1, 2, 3])
    assert proj_apply(np.diag([1.0, 2.0, 3.0]), ProjPoint([1, 1, 1])) == ProjPoint([1, 2, 3])
    with pytest.raises(KernelPoint):
        proj_apply(np.diag([1.0, 1.0, 0.0]), ProjPoint([0, 0, 1]))
    with pytest.raises(DimensionMismatch):
        proj_apply(np.eye(3), ProjPoint([1, 2]))


@given(nonzero_vec, st.floats(0.01, 100) | st.floats(-100, -0.01))
def test_proj_apply_scale_invariance(v, lam):
    rng = np.random.default_rng(0)
    T = rng.normal(size=(4, 4))
    assert proj_apply(lam * T, v) == proj_apply(T, v)


def test_kernel_and_rank_examples():
    r, K = kernel_and_rank(np.diag([1.0, 1.0, 0.0]))
    assert r == 2 and len(K) == 1
    np.testing.assert_allclose(K[0], [0, 0, 1])
    r, K = kernel_and_rank(np.eye(4))
    assert r == 4 and K == []
    r, K = kernel_and_rank(np.outer([1, 0, 0], [1, 0, 0]))
    assert r == 1
    B = np.array(K)
    np.testing.assert_allclose(B @ B.T, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(B[:, 0], 0, atol=1e-12)


def test_kernel_matches_scipy_null_space():
    from scipy.linalg import null_space
    rng = np.random.default_rng(3)
    A = rng.normal(size=(3, 2)) @ rng.normal(size=(2, 5))
    r, K = kernel_and_rank(A)
    N = null_space(A)
    assert r == 2 and N.shape[1] == len(K) == 3
    # same subspace: projectors agree
    P1 = np.array(K).T @ np.array(K)
    np.testing.assert_allclose(P1, N @ N.T, atol=1e-10)


def test_proj_equal_examples():
    A = np.arange(1.0, 10.0).reshape(3, 3)
    assert proj_equal(A, 5 * A)
    assert proj_equal(A, -2 * A)
    assert not proj_equal(np.diag([1.0, 2.0]), np.diag([2.0, 1.0]))
    with pytest.raises(DimensionMismatch):
        proj_equal(np.eye(2), np.eye(3))


def test_rank_two_maps_agreeing_on_open_set_are_equal():
    rng = np.random.default_rng(1)
    T = rng.normal(size=(3, 2)) @ rng.normal(size=(2, 3))
    pts = rng.normal(size=(10, 3)) * 0.1 + np.array([1.0, 1.0, 1.0])
    images = [proj_apply(T, p) for p in pts]
    # fit the rank-2 map from the images by the incidence equations
    rows = []
    for p, q in zip(pts, images):
        y = q.coords
        for a, b in ((0, 1), (0, 2), (1, 2)):
            r = np.zeros((3, 3))
            r[a], r[b] = y[b] * p, -y[a] * p
            rows.append(r.ravel())
    S = np.linalg.svd(np.array(rows))[2][-1].reshape(3, 3)
    assert all(proj_apply(S, p) == q for p, q in zip(pts, images))
    assert proj_equal(canonical_matrix(S), canonical_matrix(T), 1e-8)


def test_cross_ratio_examples():
    assert cross_ratio(-1.0, 0.0, 0.5, 1.0) == pytest.approx(3.0, abs=1e-14)
    assert cross_ratio(-1.0, 0.3, 0.3, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert cross_ratio(0.0, 1.0, 2.0, np.inf) == pytest.approx(2.0, abs=1e-14)
    # infinite endpoint is the limit of finite ones
    assert cross_ratio(0.0, 1.0, 2.0, 1e9) == pytest.approx(2.0, rel=1e-8)
    with pytest.raises(DegenerateConfiguration):
        cross_ratio(0.0, 0.0, 1.0, 2.0)
    with pytest.raises(NotCollinear):
        cross_ratio([0, 0], [1, 0], [0, 1], [2, 0])


def test_cross_ratio_planar_points():
    a, x, y, b = (np.array([t, 2 * t + 1]) for t in (-1.0, 0.0, 0.5, 1.0))
    assert cross_ratio(a, x, y, b) == pytest.approx(3.0, rel=1e-12)


@given(st.lists(st.floats(-5, 5), min_size=5, max_size=5, unique=True))
def test_cross_ratio_cocycle_and_invariance(ts):
    a, x, y, z, b = sorted(ts)
    if min(np.diff([a, x, y, z, b])) < 1e-3:
        return
    lhs = cross_ratio(a, x, y, b) * cross_ratio(a, y, z, b)
    assert lhs == pytest.approx(cross_ratio(a, x, z, b), rel=1e-9)
    g = np.array([[2.0, 1.0], [0.5, 3.0]])
    P = [ProjPoint(g @ np.array([1.0, t])) for t in (a, x, y, b)]
    assert cross_ratio(*P) == pytest.approx(cross_ratio(a, x, y, b), rel=1e-9)


def test_affine_chart_round_trip():
    chart = AffineChart(np.array([1.0, 1.0, 1.0]))
    x = np.array([0.2, 0.3])
    v = chart.lift(x)
    assert chart.functional @ v == pytest.approx(1.0)
    np.testing.assert_allclose(chart.to_affine(3.0 * v), x)
    e0 = AffineChart.standard(2)
    H = e0.affine_map_matrix(2 * np.eye(2), [1.0, -1.0])
    np.testing.assert_allclose(e0.to_affine(H @ e0.lift(x)), 2 * x + [1.0, -1.0])


def test_proj_line_contains():
    L = ProjLine(ProjPoint([1, 0, 0]), ProjPoint([0, 1, 0]))
    assert L.contains(ProjPoint([2, 3, 0]))
    assert not L.contains(ProjPoint([1, 1, 1]))


def test_directional_limits_at_kernel_point():
    T = np.diag([1.0, 1.0, 0.0])
    e1, e2, e3 = np.eye(3)
    l1 = directional_limit(T, e3, e1)
    l2 = directional_limit(T, e3, e2)
    assert proj_distance(l1, l2) >= 0.5
    _, _, gap = discontinuity_witness(T, e3)
    assert gap >= 0.5
    base = np.array([1.0, 2.0, 3.0])
    ref = proj_apply(T, base)
    for d in (e1, e2, e3, np.array([1.0, -1.0, 2.0])):
        assert proj_distance(directional_limit(T, base, d), ref) <= 1e-9


def test_limit_of_maps():
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert proj_equal(limit_of_maps([A, A, A]).matrix, canonical_matrix(A))
    seq = [np.diag([1.0, 2.0 ** -k]) for k in range(45)]
    L = limit_of_maps(seq)
    assert proj_equal(L.matrix, np.diag([1.0, 0.0]))
    assert L.rank == 1
    # sign flips between terms are not a failure of convergence
    assert proj_equal(limit_of_maps([(-1) ** k * s for k, s in enumerate(seq)]).matrix,
                      np.diag([1.0, 0.0]))
    with pytest.raises(NotConverged):
        limit_of_maps([np.diag([1.0, (-1.0) ** n]) for n in range(10)])


@settings(max_examples=50)
@given(nonzero_vec, nonzero_vec)
def test_proj_distance_properties(u, v):
    p, q = ProjPoint(u), ProjPoint(v)
    d = proj_distance(p, q)
    assert 0.0 <= d <= 1.0
    assert d == pytest.approx(proj_distance(q, p), abs=1e-12)
    assert proj_distance(p, ProjPoint(-2.5 * u)) <= 1e-12
