import numpy as np
import pytest

from hilbertproj.catalog import catalog_build
from hilbertproj.cones import cone_over, orthant
from hilbertproj.convex import ConvexBody
from hilbertproj.equivariant import (Equivariance, Status, blend_interval, boundary_reconstruct,
                                     equivariant_solution_space, factorize, family_evaluate,
                                     homotopy_agreement, maps_cone_to_cone)
from hilbertproj.errors import (DegenerateConfiguration, ImageEscapes, InconsistentBoundaryData,
                                KernelNotInvariant, NotComparable, NotInSpace, NotInterior)
from hilbertproj.groups import GroupGens
from hilbertproj.projective import AffineChart, ProjPoint, kernel_and_rank, proj_equal

DISK = ConvexBody.ellipsoid([0.0, 0.0], np.eye(2))
SIMPLEX111 = ConvexBody.polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], AffineChart(np.ones(3)))


def boundary_pairs(T, body, n, seed=0):
    xs = body.sample_boundary(n, seed)
    return [(x, body.affine(ProjPoint(T @ body.chart.lift(x)))) for x in xs]


def test_solution_space_examples():
    G = GroupGens.from_matrices([np.diag([2.0, 3.0])])
    space = equivariant_solution_space(Equivariance.identity(G))
    assert space.dim == 2
    for B in space.basis:
        assert np.allclose(B, np.diag(np.diag(B)))
    assert space.contains(np.diag([1.0, -4.0]))
    assert not space.contains(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert equivariant_solution_space(Equivariance.identity(GroupGens.from_matrices([np.eye(3)]))).dim == 9
    lor = catalog_build("lorentz")
    assert equivariant_solution_space(Equivariance.identity(lor.group)).dim <= 1


def test_solution_space_between_different_actions():
    # S diag(2,3) = 3 S forces S to vanish on the first coordinate
    G = GroupGens.from_matrices([np.diag([2.0, 3.0])])
    space = equivariant_solution_space(Equivariance(G, (np.array([[3.0]]),)))
    assert space.dim == 1
    np.testing.assert_allclose(np.abs(space.basis[0]), [[0.0, 1.0]], atol=1e-12)
    assert equivariant_solution_space(Equivariance(G, (np.array([[5.0]]),))).dim == 0


@pytest.mark.parametrize("name", ["torus-orthant:2", "klein-disk", "product-orthant", "lorentz"])
def test_solutions_are_equivariant(name):
    scene = catalog_build(name)
    E = Equivariance.identity(scene.group)
    space = equivariant_solution_space(E, scene.cone, scene.cone)
    rng = np.random.default_rng(2)
    S = space.combine(rng.normal(size=space.dim))
    assert E.residual(S) <= 1e-9
    # covariance on points and stability of the kernel
    x = scene.cone.interior_point()
    for g in scene.group.generators:
        np.testing.assert_allclose(S @ (g @ x), g @ (S @ x), atol=1e-9 * np.linalg.norm(g) * np.linalg.norm(x))
    _, K = kernel_and_rank(S)
    for k in K:
        for g in scene.group.generators:
            assert np.linalg.norm(S @ (g @ k)) <= 1e-9 * np.linalg.norm(S) * np.linalg.norm(g)


def test_maps_cone_to_cone_examples():
    C = orthant(2)
    assert maps_cone_to_cone(np.eye(2), C, C) is Status.STRICTLY_INSIDE
    assert maps_cone_to_cone(np.array([[1.0, 1.0], [0.0, 1.0]]), C, C) is Status.STRICTLY_INSIDE
    assert maps_cone_to_cone(np.diag([1.0, 0.0]), C, C) is Status.ON_BOUNDARY
    assert maps_cone_to_cone(np.diag([1.0, -1.0]), C, C) is Status.OUTSIDE
    D = cone_over(DISK)
    assert maps_cone_to_cone(np.eye(3), D, D) is Status.STRICTLY_INSIDE
    assert maps_cone_to_cone(np.diag([1.0, 0.5, 0.5]), D, D) is Status.STRICTLY_INSIDE
    assert maps_cone_to_cone(np.diag([1.0, 3.0, 3.0]), D, D) is Status.OUTSIDE


def test_blend_interval_orthant():
    C = orthant(2)
    sample = C.sample_interior(50, 0)
    res = blend_interval(np.eye(2), np.diag([1.0, 2.0]), sample, C, C)
    assert res.R == pytest.approx(np.log(2), abs=1e-9)
    assert res.interval == pytest.approx((-0.5, 1.5), abs=1e-12)
    assert res.verified and len(res.grid) == 21


def test_blend_interval_is_sharp_for_orthant():
    # the blend is diag(1, 2 - lam), inside exactly for lam < 2; the guaranteed
    # interval sits inside (-inf, 2)
    C = orthant(2)
    S1, S2 = np.eye(2), np.diag([1.0, 2.0])
    lo, hi = blend_interval(S1, S2, C.sample_interior(10, 0), C, C).interval
    assert maps_cone_to_cone(2.0 * S1 - S2, C, C) is Status.ON_BOUNDARY
    assert lo > -np.inf and hi < 2.0


def test_blend_interval_not_comparable():
    C = orthant(2)
    with pytest.raises(NotComparable):
        blend_interval(np.eye(2), np.diag([1.0, 0.0]), [[1.0, 1.0]], C, C)


def test_factorize_product_orthant():
    scene = catalog_build("product-orthant")
    G = scene.group
    E = Equivariance(G, tuple(g[:2, :2] for g in G.generators))
    S0 = np.hstack([np.eye(2), np.zeros((2, 2))])
    f = factorize(S0, E, scene.cone, orthant(2))
    p = f.projector
    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    np.testing.assert_allclose(f.injective_part @ f.W_coords, S0, atol=1e-12)
    assert max(f.residuals.values()) <= 1e-9
    assert np.linalg.matrix_rank(f.injective_part) == 2
    assert f.U_basis.shape == (4, 2)


def test_factorize_injective_is_trivial():
    scene = catalog_build("torus-orthant", 2)
    E = Equivariance.identity(scene.group)
    f = factorize(np.diag([1.0, 2.0, 3.0]), E, scene.cone, scene.cone)
    np.testing.assert_allclose(f.projector, np.eye(3))
    assert f.U_basis.shape == (3, 0)


def test_factorize_collapses_torus_orthant():
    scene = catalog_build("torus-orthant", 3)
    G = scene.group
    E = Equivariance(G, tuple(g[:1, :1] for g in G.generators))
    S0 = np.eye(4)[:1]
    f = factorize(S0, E, scene.cone, orthant(1))
    assert f.W_basis.shape == (4, 1)
    assert max(f.residuals.values()) <= 1e-9


def test_factorize_one_block_gives_lower_torus_orthant():
    scene = catalog_build("torus-orthant", 3)
    G = scene.group
    E = Equivariance(G, tuple(g[:3, :3] for g in G.generators))
    f = factorize(np.eye(4)[:3], E, scene.cone, orthant(3))
    lower = catalog_build("torus-orthant", 2)
    quotient = [h for h in f.quotient_group.generators if not np.allclose(h, np.eye(3))]
    assert len(quotient) == 3
    for h, g in zip(quotient, lower.group.generators):
        np.testing.assert_allclose(h, g, atol=1e-12)
    assert max(f.residuals.values()) <= 1e-9


def test_factorize_errors():
    scene = catalog_build("torus-orthant", 2)
    E = Equivariance.identity(scene.group)
    with pytest.raises(KernelNotInvariant):
        factorize(np.ones((3, 3)), E, scene.cone, scene.cone)
    with pytest.raises(ImageEscapes):
        factorize(np.diag([1.0, 1.0, 0.0]), E, scene.cone, scene.cone)


def test_boundary_reconstruct_identity_and_boost():
    scene = catalog_build("klein-disk")
    T = scene.group.generators[0]
    for M in (np.eye(3), T, T @ scene.group.generators[1]):
        rec = boundary_reconstruct(DISK, DISK, boundary_pairs(M, DISK, 12))
        assert proj_equal(rec.matrix, M, 1e-8)


def test_boundary_reconstruct_corrupted():
    T = catalog_build("klein-disk").group.generators[0]
    pairs = boundary_pairs(T, DISK, 12)
    x, y = pairs[5]
    a = np.arctan2(y[1], y[0]) + 0.05
    pairs[5] = (x, np.array([np.cos(a), np.sin(a)]))
    with pytest.raises(InconsistentBoundaryData):
        boundary_reconstruct(DISK, DISK, pairs)


def test_boundary_reconstruct_degenerate():
    with pytest.raises(DegenerateConfiguration):
        boundary_reconstruct(DISK, DISK, boundary_pairs(np.eye(3), DISK, 2))
    with pytest.raises(ValueError):
        boundary_reconstruct(SIMPLEX111, SIMPLEX111, [])


def test_homotopy_agreement_stages():
    scene = catalog_build("klein-disk")
    T = scene.group.generators[0]
    ext = DISK.sample_boundary(30, 0)
    rep = homotopy_agreement(T, 3.0 * T, DISK, DISK, ext)
    assert rep.passed and rep.details["failed"] is None
    other = catalog_build("klein-disk").group.generators[1]
    rep = homotopy_agreement(T, other, DISK, DISK, ext)
    assert not rep.passed and rep.details["failed"] == "agree"
    rep = homotopy_agreement(np.eye(3), np.diag([1.0, 0.5, 0.5]), DISK, DISK, ext)
    assert rep.details["failed"] == "boundary"


def test_homotopy_agreement_on_simplex_vertices_only():
    # diagonal maps fix every vertex but are not projectively equal
    D = np.diag([1.0, 2.0, 3.0])
    rep = homotopy_agreement(np.eye(3), D, SIMPLEX111, SIMPLEX111, SIMPLEX111.vertices)
    assert rep.details["failed"] == "equal"
    mids = 0.5 * (SIMPLEX111.vertices + np.roll(SIMPLEX111.vertices, 1, axis=0))
    rep = homotopy_agreement(np.eye(3), D, SIMPLEX111, SIMPLEX111, mids)
    assert rep.details["failed"] == "agree"


def test_family_evaluate():
    scene = catalog_build("torus-orthant", 2)
    space = equivariant_solution_space(Equivariance.identity(scene.group), scene.cone, scene.cone)
    c1, _ = space.coefficients(np.diag([1.0, 2.0, 3.0]))
    c2, _ = space.coefficients(np.diag([3.0, 1.0, 1.0]))
    n = np.ones(3)
    assert family_evaluate(space, c1, n) == ProjPoint([1, 2, 3])
    # a segment of maps traces a projective segment of images
    pts = np.array([family_evaluate(space, t * c1 + (1 - t) * c2, n).coords for t in (0.0, 0.3, 1.0)])
    assert np.linalg.svd(pts, compute_uv=False)[-1] <= 1e-12
    with pytest.raises(NotInSpace):
        family_evaluate(space, c1[:2], n)
    with pytest.raises(NotInSpace):
        family_evaluate(space, c1 - 2 * c2, n)
    with pytest.raises(NotInterior):
        family_evaluate(space, c1, [1.0, -1.0, 1.0])
