"""JSON encodings of bodies, groups, cones, maps and equivariances.

Body::

    {"type": "polytope", "chart": [1, 0, 0], "vertices": [[...], ...]}
    {"type": "ellipsoid", "center": [...], "shape": [[...]], "chart": [...]}
    {"type": "interval", "lo": -1, "hi": 1}
    {"type": "halfspaces", "normals": [[...]], "offsets": [...]}
    {"type": "affine", "dim": 2}

``chart`` is optional and defaults to the functional ``e_0``. A scene file
is ``{"body": ..., "group": ...}``; a bare body is accepted as a scene with
the trivial group.

Group: ``{"generators": [{"label": "a", "matrix": [[...]]}, ...]}``.
Cone: ``{"type": "rays", "rays": [[...]]}`` or ``{"type": "base", "body": ...}``.
Map: ``{"matrix": [[...]]}``.
Equivariance: ``{"source": [[[...]]], "image": [[[...]]]}`` (lists of matrices).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .catalog import SCENES, Scene, catalog_build
from .cones import ConvexCone, cone_over
from .convex import ConvexBody
from .equivariant import Equivariance
from .errors import NotProper
from .groups import GroupGens
from .projective import AffineChart


def _chart(obj: dict, d: int) -> AffineChart:
    f = obj.get("chart")
    return AffineChart.standard(d) if f is None else AffineChart(np.asarray(f, dtype=float))


def body_from_json(obj: dict) -> ConvexBody:
    kind = obj.get("type")
    if kind == "polytope":
        V = np.asarray(obj["vertices"], dtype=float)
        return ConvexBody.polytope(V, _chart(obj, V.shape[1]), prune=bool(obj.get("prune", False)))
    if kind == "ellipsoid":
        c = np.asarray(obj["center"], dtype=float)
        return ConvexBody.ellipsoid(c, np.asarray(obj["shape"], dtype=float), _chart(obj, c.shape[0]))
    if kind == "interval":
        return ConvexBody.interval(obj["lo"], obj["hi"], _chart(obj, 1))
    if kind == "halfspaces":
        A = np.asarray(obj["normals"], dtype=float)
        return ConvexBody.halfspaces(A, np.asarray(obj["offsets"], dtype=float), _chart(obj, A.shape[1]))
    if kind == "affine":
        d = int(obj["dim"])
        return ConvexBody.affine_space(d, _chart(obj, d), box=float(obj.get("box", 10.0)))
    raise ValueError(f"unknown body type {kind!r}")


def body_to_json(body: ConvexBody) -> dict:
    out: dict[str, Any] = {"type": body.kind, "chart": body.chart.functional.tolist()}
    if body.kind == "polytope":
        out["vertices"] = body.vertices.tolist()
    elif body.kind == "ellipsoid":
        out["center"] = body.center.tolist()
        out["shape"] = body.shape.tolist()
    elif body.kind == "interval":
        out["lo"], out["hi"] = float(body.vertices[0, 0]), float(body.vertices[1, 0])
    elif body.kind == "halfspaces":
        out["normals"] = body.normals.tolist()
        out["offsets"] = body.offsets.tolist()
    else:
        out["dim"] = body.dim
        out["box"] = body.box
    return out


def group_from_json(obj: dict) -> GroupGens:
    gens = obj["generators"]
    return GroupGens.from_matrices([np.asarray(g["matrix"], dtype=float) for g in gens],
                                   [g.get("label", f"g{i}") for i, g in enumerate(gens)])


def group_to_json(G: GroupGens) -> dict:
    return {"generators": [{"label": s, "matrix": g.tolist()}
                           for s, g in zip(G.labels, G.generators)]}


def cone_from_json(obj: dict) -> ConvexCone:
    kind = obj.get("type")
    if kind == "rays":
        return ConvexCone.from_rays(np.asarray(obj["rays"], dtype=float))
    if kind == "base":
        return ConvexCone.from_body(body_from_json(obj["body"]))
    raise ValueError(f"unknown cone type {kind!r}")


def cone_to_json(C: ConvexCone) -> dict:
    if C.kind == "rays":
        return {"type": "rays", "rays": C.rays.tolist()}
    return {"type": "base", "body": body_to_json(C.body)}


def map_from_json(obj: dict) -> np.ndarray:
    return np.asarray(obj["matrix"], dtype=float)


def equivariance_from_json(obj: dict) -> Equivariance:
    src = [np.asarray(m, dtype=float) for m in obj["source"]]
    img = [np.asarray(m, dtype=float) for m in obj["image"]]
    return Equivariance(GroupGens.from_matrices(src, obj.get("labels")), tuple(img))


def scene_from_json(obj: dict, name: str = "custom") -> Scene:
    body_obj = obj.get("body", obj)
    body = body_from_json(body_obj)
    if "group" in obj:
        group = group_from_json(obj["group"])
    else:
        group = GroupGens.from_matrices([np.eye(body.dim + 1)], ["id"])
    try:
        cone = cone_from_json(obj["cone"]) if "cone" in obj else cone_over(body)
    except NotProper:
        cone = None
    tags = ("proper",) if body.proper else ("non-proper",)
    return Scene(obj.get("name", name), body, group, cone, tags, dict(obj.get("expected", {})))


def scene_to_json(scene: Scene) -> dict:
    out = {"name": scene.name, "tags": list(scene.tags), "body": body_to_json(scene.body),
           "group": group_to_json(scene.group)}
    if scene.cone is not None:
        out["cone"] = cone_to_json(scene.cone)
    exp = {}
    for k, v in scene.expected.items():
        exp[k] = [np.asarray(m).tolist() for m in v] if k == "aut_generators" else v
    out["expected"] = exp
    return out


def read_json(path) -> Any:
    with open(path) as fh:
        return json.load(fh)


def load_scene(spec: str) -> Scene:
    """A catalog name (``"name"`` or ``"name:d"``) or a path to a scene JSON file."""
    if spec.partition(":")[0] in SCENES and not Path(spec).exists():
        return catalog_build(spec)
    return scene_from_json(read_json(spec), name=Path(spec).stem)


def dumps(obj: Any) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation)."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"
