"""Built-in scenes: a convex body, a group preserving it and its cone."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .cones import ConvexCone, cone_over
from .convex import ConvexBody
from .errors import UnknownScene
from .groups import GroupGens, preserves_body
from .projective import AffineChart

SCENES = ("torus-affine", "torus-orthant", "klein-disk", "product-orthant", "lorentz")


@dataclass(frozen=True, eq=False)
class Scene:
    """A body, a group of projective automorphisms of it and the cone above it.

    ``expected`` records what the library should re-derive: extra
    automorphisms (``"aut_generators"``), the number of irreducible blocks
    of the cone splitting (``"blocks"``) and a default orbit radius
    (``"orbit_radius"``). ``cone`` is ``None`` for non-proper bodies.
    """

    name: str
    body: ConvexBody
    group: GroupGens
    cone: ConvexCone | None
    tags: tuple[str, ...]
    expected: dict = field(default_factory=dict)

    @property
    def proper(self) -> bool:
        return "proper" in self.tags


def _boost(n: int, axis: int, rapidity: float) -> np.ndarray:
    g = np.eye(n)
    c, s = np.cosh(rapidity), np.sinh(rapidity)
    g[0, 0] = g[axis, axis] = c
    g[0, axis] = g[axis, 0] = s
    return g


def _rotation(n: int, i: int, j: int, angle: float) -> np.ndarray:
    g = np.eye(n)
    c, s = np.cos(angle), np.sin(angle)
    g[i, i] = g[j, j] = c
    g[i, j], g[j, i] = -s, s
    return g


def _torus_affine(d: int) -> Scene:
    chart = AffineChart.standard(d)
    body = ConvexBody.affine_space(d, chart)
    gens = []
    for i in range(d):
        g = np.eye(d + 1)
        g[i + 1, 0] = 1.0
        gens.append(g)
    group = GroupGens.from_matrices(gens, [f"a{i + 1}" for i in range(d)])
    return Scene(f"torus-affine:{d}", body, group, None, ("non-proper",),
                 {"orbit_radius": 4})


def _torus_orthant(d: int) -> Scene:
    n = d + 1
    chart = AffineChart(np.ones(n))
    V = np.vstack([np.zeros(d), np.eye(d)])
    body = ConvexBody.polytope(V, chart)
    gens = [np.diag(np.exp(np.eye(n)[i])) for i in range(n)]
    group = GroupGens.from_matrices(gens, [f"t{i}" for i in range(n)])
    aut = []
    for i, j in combinations(range(n), 2):
        P = np.eye(n)
        P[[i, j]] = P[[j, i]]
        aut.append(P)
    aut += [np.diag(np.exp(0.37 * np.eye(n)[i])) for i in range(n)]
    tags = ("proper", "reducible") + (("strictly_convex",) if d == 1 else ())
    return Scene(f"torus-orthant:{d}", body, group, cone_over(body), tags,
                 {"aut_generators": aut, "blocks": n, "orbit_radius": 12})


def _klein_disk() -> Scene:
    body = ConvexBody.ellipsoid(np.zeros(2), np.eye(2))
    group = GroupGens.from_matrices([_boost(3, 1, 1.0), _boost(3, 2, 1.0)], ["b1", "b2"])
    return Scene("klein-disk", body, group, cone_over(body),
                 ("proper", "strictly_convex", "irreducible"),
                 {"blocks": 1, "orbit_radius": 6})


def _product_orthant() -> Scene:
    chart = AffineChart(np.ones(4))
    V = np.vstack([np.zeros(3), np.eye(3)])
    body = ConvexBody.polytope(V, chart)
    D = np.diag([np.e, 1.0])
    A = np.array([[0.0, 1.0], [np.e, 0.0]])
    I = np.eye(2)
    Z = np.zeros((2, 2))

    def blk(X, Y):
        return np.block([[X, Z], [Z, Y]])

    group = GroupGens.from_matrices([blk(D, I), blk(A, I), blk(I, D), blk(I, A)],
                                    ["d1", "a1", "d2", "a2"])
    return Scene("product-orthant", body, group, cone_over(body), ("proper", "reducible"),
                 {"blocks": 2, "orbit_radius": 10})


def _lorentz() -> Scene:
    body = ConvexBody.ellipsoid(np.zeros(3), np.eye(3))
    g1 = _boost(4, 1, 1.0)
    g2 = _rotation(4, 1, 3, 0.7) @ _boost(4, 2, 1.0)
    group = GroupGens.from_matrices([g1, g2], ["b", "c"])
    return Scene("lorentz", body, group, cone_over(body),
                 ("proper", "strictly_convex", "irreducible"),
                 {"blocks": 1, "orbit_radius": 5})


def parse_scene_name(spec: str) -> tuple[str, int | None]:
    """Split ``"name:d"`` into the name and an optional dimension."""
    name, _, arg = spec.partition(":")
    if name not in SCENES:
        raise UnknownScene(f"unknown scene {name!r}; choose from {', '.join(SCENES)}")
    if not arg:
        return name, None
    try:
        return name, int(arg)
    except ValueError:
        raise UnknownScene(f"bad dimension {arg!r} in scene {spec!r}") from None


def catalog_build(name: str, d: int | None = None) -> Scene:
    """Build a catalog scene; ``name`` may carry the dimension as ``"name:d"``.

    Raises
    ------
    UnknownScene
        For names outside :data:`SCENES`.
    """
    base, parsed = parse_scene_name(name)
    d = parsed if d is None else d
    if base == "torus-affine":
        scene = _torus_affine(2 if d is None else d)
    elif base == "torus-orthant":
        scene = _torus_orthant(2 if d is None else d)
    elif base == "klein-disk":
        scene = _klein_disk()
    elif base == "product-orthant":
        scene = _product_orthant()
    else:
        scene = _lorentz()
    if d is not None and d < 1:
        raise ValueError("dimension must be positive")
    for g in scene.group.generators:
        if not preserves_body(g, scene.body):
            raise AssertionError(f"catalog generator does not preserve {scene.name}")
    return scene


def default_scenes() -> list[Scene]:
    """The scenes exercised by the full check run."""
    return [catalog_build(s) for s in ("torus-affine:2", "torus-orthant:2", "torus-orthant:3",
                                       "klein-disk", "product-orthant", "lorentz")]
