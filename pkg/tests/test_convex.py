import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from hilbertproj.convex import (ConvexBody, NotEnumerable, Position, chord_endpoints, contains,
                                extreme_points, is_extreme, is_strictly_convex, segment_witness)
from hilbertproj.errors import CoincidentPoints, NotInterior, NotProper
from hilbertproj.projective import AffineChart, ProjPoint

DISK = ConvexBody.ellipsoid([0.0, 0.0], np.eye(2))
SIMPLEX = ConvexBody.polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
SQUARE = ConvexBody.polytope([[-1, -1], [1, -1], [1, 1], [-1, 1]])
INTERVAL = ConvexBody.interval(-1.0, 1.0)


def bisect_boundary(body, x, u, hi=10.0):
    """Largest t with x + t u inside, by bisection on membership alone."""
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if body.is_interior(body.chart.point(x + mid * u)):
            lo = mid
        else:
            hi = mid
    return lo


def test_contains_examples():
    assert contains(DISK, ProjPoint([1, 0, 0])) is Position.INTERIOR
    assert contains(DISK, ProjPoint([1, 1, 0])) is Position.BOUNDARY
    assert contains(SIMPLEX, ProjPoint([1, 1, 1])) is Position.EXTERIOR
    assert contains(DISK, ProjPoint([0, 1, 0])) is Position.EXTERIOR  # off the chart


def test_chord_endpoints_examples():
    ch = chord_endpoints(INTERVAL, [0.0], [0.5])
    np.testing.assert_allclose(ch.affine[[0, 3], 0], [-1.0, 1.0])
    ch = chord_endpoints(DISK, [0.0, 0.0], [0.5, 0.0])
    np.testing.assert_allclose(ch.affine[0], [-1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(ch.affine[3], [1.0, 0.0], atol=1e-15)
    x, y = np.array([1 / 3, 1 / 3]), np.array([0.5, 0.25])
    ch = chord_endpoints(SIMPLEX, x, y)
    u = y - x
    np.testing.assert_allclose(ch.affine[3], x + bisect_boundary(SIMPLEX, x, u) * u, atol=1e-10)
    np.testing.assert_allclose(ch.affine[0], x - bisect_boundary(SIMPLEX, x, -u) * u, atol=1e-10)


def test_chord_endpoint_errors():
    with pytest.raises(NotInterior):
        chord_endpoints(DISK, [0.0, 0.0], [1.0, 0.0])
    with pytest.raises(CoincidentPoints):
        chord_endpoints(DISK, [0.1, 0.0], [0.1, 0.0])
    with pytest.raises(NotProper):
        chord_endpoints(ConvexBody.affine_space(2), [0.0, 0.0], [1.0, 0.0])


@pytest.mark.parametrize("body", [DISK, SIMPLEX, SQUARE, INTERVAL,
                                  ConvexBody.ellipsoid([1.0, 2.0, 0.0], np.diag([1.0, 4.0, 9.0]))])
def test_chord_consistency(body):
    rng = np.random.default_rng(0)
    P = body.sample_interior(20, rng)
    for x, y in zip(P[:10], P[10:]):
        ch = chord_endpoints(body, x, y)
        assert contains(body, ch.a) is Position.BOUNDARY
        assert contains(body, ch.b) is Position.BOUNDARY
        for t in np.linspace(0.02, 0.98, 20):
            p = ch.affine[0] + t * (ch.affine[3] - ch.affine[0])
            assert contains(body, p) is Position.INTERIOR
        # order a, x, y, b along the chord
        u = y - x
        assert (ch.affine[0] - x) @ u < 0 < (ch.affine[3] - y) @ u


def test_vertex_and_halfspace_representations_agree():
    H = ConvexBody.halfspaces([[-1, 0], [0, -1], [1, 1]], [0, 0, 1])
    rng = np.random.default_rng(1)
    P = SIMPLEX.sample_interior(20, rng)
    for x, y in zip(P[:10], P[10:]):
        np.testing.assert_allclose(chord_endpoints(SIMPLEX, x, y).affine,
                                   chord_endpoints(H, x, y).affine, atol=1e-9)


def test_facets_match_qhull():
    rng = np.random.default_rng(2)
    V = rng.normal(size=(12, 3))
    hull = ConvexHull(V)
    body = ConvexBody.polytope(V[hull.vertices])
    ours = np.hstack([body.normals, body.offsets[:, None]])
    theirs = hull.equations / np.linalg.norm(hull.equations[:, :3], axis=1, keepdims=True)
    theirs[:, 3] *= -1
    # Qhull may triangulate facets; compare the sets of distinct planes
    distinct = np.unique(np.round(theirs, 9), axis=0)
    assert len(np.unique(np.round(ours, 9), axis=0)) == len(distinct)
    for row in ours:
        assert np.min(np.linalg.norm(distinct - row, axis=1)) < 1e-8


def test_polytope_rejects_non_extreme_vertex():
    with pytest.raises(ValueError):
        ConvexBody.polytope([[0, 0], [1, 0], [0, 1], [0.5, 0.0]])
    body = ConvexBody.polytope([[0, 0], [1, 0], [0, 1], [0.2, 0.2]], prune=True)
    assert len(body.vertices) == 3


def test_non_proper_halfspaces_rejected():
    with pytest.raises(NotProper):
        ConvexBody.halfspaces([[-1, 0], [0, -1]], [0, 0])


def test_extreme_points():
    assert len(extreme_points(SIMPLEX)) == 3
    corners = extreme_points(SQUARE)
    assert len(corners) == 4
    assert all(is_extreme(SQUARE, c) for c in corners)
    assert not is_extreme(SQUARE, [1.0, 0.0])
    samp = extreme_points(DISK)
    assert isinstance(samp, NotEnumerable)
    pts = samp.sampler(100, 0)
    cands = DISK.sample_boundary(60, 1)
    for p in pts:
        assert contains(DISK, p) is Position.BOUNDARY
        assert is_extreme(DISK, p)
    assert all(segment_witness(DISK, p, cands) is None for p in pts[:20])


def test_segment_witness_on_square():
    bd = SQUARE.sample_boundary(200, 0)
    bd = np.vstack([bd, SQUARE.vertices])
    for v in SQUARE.vertices:
        assert segment_witness(SQUARE, v, bd) is None
    for mid in ([1.0, 0.0], [0.0, -1.0]):
        assert segment_witness(SQUARE, mid, bd) is not None


def test_is_strictly_convex():
    assert is_strictly_convex(DISK)
    assert not is_strictly_convex(SIMPLEX)
    assert is_strictly_convex(INTERVAL)


def test_interval_cone_chart():
    body = ConvexBody.interval(-1, 1, AffineChart.standard(1))
    assert body.dim == 1


@settings(max_examples=40)
@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.floats(-np.pi, np.pi))
def test_ellipsoid_chords_hit_boundary(a, b, angle):
    R = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    Q = R @ np.diag([a, b]) @ R.T
    body = ConvexBody.ellipsoid([0.3, -0.2], Q)
    x, y = body.sample_interior(2, 7)
    ch = chord_endpoints(body, x, y)
    for p in (ch.affine[0], ch.affine[3]):
        w = p - body.center
        assert w @ body.shape @ w == pytest.approx(1.0, abs=1e-12)
