"""Scene documents: a JSON description of objects, points and geodesics.

Schema (all coordinates are model coordinates)::

    {
      "dimension": 2,
      "objects": [
        {"name": "k1", "kind": "sphere", "center": [x, y], "radius_h": r},
        {"name": "k2", "kind": "sphere", "carrier": {"center": [x, y], "radius": rho}},
        {"name": "h", "kind": "horosphere", "ideal": [ux, uy], "through": [x, y]},
        {"name": "b", "kind": "hypersphere", "baseline": BASELINE, "distance_h": h, "side": 1},
        {"name": "g", "kind": "geodesic", "baseline": BASELINE}
      ],
      "points": [{"name": "P", "coords": [x, y], "ideal": false}],
      "geodesics": [{"name": "g1", "through": ["P", "Q"]},
                    {"name": "g2", "endpoints": [[ux, uy], [vx, vy]]}],
      "radical": [["k1", "k2"]],
      "clip": {"center": [x, y], "radius_h": R},
      "style": {"stroke_width": 0.006, "size": 512, "colors": {...}}
    }

``BASELINE`` is ``{"normal": [...]}`` (through the origin),
``{"center": [...], "radius": r}`` (orthogonal carrier) or
``{"endpoints": [[...], [...]]}`` (ideal endpoints, plane only).
Any object may be given by ``carrier`` instead of intrinsic parameters; its
classification must then match ``kind``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import HypowError, InvariantViolation, SchemaError
from .model import (
    Geodesic,
    GeneralizedSphere,
    Hyperplane,
    Kind,
    ModelPoint,
    ModelSurface,
    Plane,
    Sphere,
    from_surface,
    geodesic_through,
    horosphere_from,
    hypersphere_branch,
    sphere_from_center_radius,
)

KINDS = tuple(k.value for k in Kind)

DEFAULT_COLORS = {
    "boundary": "#000000",
    "sphere": "#1f77b4",
    "horosphere": "#2ca02c",
    "hypersphere": "#d62728",
    "geodesic": "#7f7f7f",
    "radical": "#9467bd",
    "point": "#000000",
}


@dataclass(frozen=True)
class Style:
    stroke_width: float = 0.006
    size: int = 512
    font_size: float = 0.045
    colors: dict = field(default_factory=lambda: dict(DEFAULT_COLORS))

    def color(self, key: str) -> str:
        return self.colors.get(key, DEFAULT_COLORS.get(key, "#000000"))


@dataclass(frozen=True, eq=False)
class SceneObject:
    name: str
    sphere: GeneralizedSphere
    #: parameters as they will be emitted (normalized floats)
    params: dict

    @property
    def kind(self) -> Kind:
        return self.sphere.kind


@dataclass(frozen=True, eq=False)
class Scene:
    dimension: int
    objects: dict[str, SceneObject]
    points: dict[str, ModelPoint]
    geodesics: dict[str, Geodesic]
    radical: tuple[tuple[str, str], ...] = ()
    clip: Optional[tuple[ModelPoint, float]] = None
    style: Style = field(default_factory=Style)

    def object(self, name: str) -> GeneralizedSphere:
        try:
            return self.objects[name].sphere
        except KeyError:
            raise SchemaError(f"objects: no object named {name!r}") from None

    def point(self, name: str) -> ModelPoint:
        try:
            return self.points[name]
        except KeyError:
            raise SchemaError(f"points: no point named {name!r}") from None


# ---------------------------------------------------------------------------
# field readers


def _require(doc: dict, key: str, path: str) -> Any:
    if key not in doc:
        raise SchemaError(f"{path}: missing key {key!r}")
    return doc[key]


def _number(v: Any, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}: expected a number, got {type(v).__name__}")
    x = float(v)
    if not math.isfinite(x):
        raise SchemaError(f"{path}: number must be finite")
    return x


def _vector(v: Any, path: str, dim: int) -> np.ndarray:
    if not isinstance(v, list) or len(v) != dim:
        raise SchemaError(f"{path}: expected a list of {dim} numbers")
    return np.array([_number(x, f"{path}[{i}]") for i, x in enumerate(v)])


def _name(v: Any, path: str) -> str:
    if not isinstance(v, str) or not v:
        raise SchemaError(f"{path}: name must be a non-empty string")
    return v


def _object_dict(v: Any, path: str) -> dict:
    if not isinstance(v, dict):
        raise SchemaError(f"{path}: expected an object")
    return v


def _list(doc: dict, key: str, path: str) -> list:
    v = doc.get(key, [])
    if not isinstance(v, list):
        raise SchemaError(f"{path}.{key}: expected a list")
    return v


def _surface(doc: dict, path: str, dim: int) -> ModelSurface:
    doc = _object_dict(doc, path)
    if "normal" in doc:
        return Plane(_vector(doc["normal"], f"{path}.normal", dim), _number(doc.get("offset", 0.0), f"{path}.offset"))
    if "center" in doc:
        return Sphere(_vector(doc["center"], f"{path}.center", dim), _number(_require(doc, "radius", path), f"{path}.radius"))
    raise SchemaError(f"{path}: expected 'normal' or 'center'/'radius'")


def _baseline(doc: Any, path: str, dim: int) -> Hyperplane:
    doc = _object_dict(doc, path)
    if "endpoints" in doc:
        ends = doc["endpoints"]
        if not isinstance(ends, list) or len(ends) != 2:
            raise SchemaError(f"{path}.endpoints: expected two ideal points")
        if dim != 2:
            raise SchemaError(f"{path}.endpoints: only valid in dimension 2")
        u, v = (ModelPoint(_vector(e, f"{path}.endpoints[{i}]", dim), ideal=True) for i, e in enumerate(ends))
        return Geodesic(u, v).as_hyperplane()
    return Hyperplane(_surface(doc, path, dim))


def _surface_params(S: ModelSurface) -> dict:
    if isinstance(S, Plane):
        return {"normal": [float(x) for x in S.unit_normal], "offset": S.offset}
    return {"center": [float(x) for x in S.center], "radius": S.radius}


def _parse_object(doc: dict, path: str, dim: int) -> SceneObject:
    name = _name(_require(doc, "name", path), f"{path}.name")
    kind = _require(doc, "kind", path)
    if kind not in KINDS:
        raise SchemaError(f"{path}.kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    try:
        if "carrier" in doc:
            surf = _surface(doc["carrier"], f"{path}.carrier", dim)
            S = from_surface(surf)
            if S.kind.value != kind:
                raise InvariantViolation(f"carrier classifies as {S.kind.value}, not {kind}")
            return SceneObject(name, S, {"carrier": _surface_params(surf)})
        if kind == "sphere":
            c = _vector(_require(doc, "center", path), f"{path}.center", dim)
            r = _number(_require(doc, "radius_h", path), f"{path}.radius_h")
            S = sphere_from_center_radius(ModelPoint(c), r)
            return SceneObject(name, S, {"center": [float(x) for x in c], "radius_h": r})
        if kind == "horosphere":
            u = _vector(_require(doc, "ideal", path), f"{path}.ideal", dim)
            p = _vector(_require(doc, "through", path), f"{path}.through", dim)
            S = horosphere_from(ModelPoint(u, ideal=True), ModelPoint(p))
            return SceneObject(name, S, {"ideal": [float(x) for x in S.ideal.coords], "through": [float(x) for x in p]})
        base_doc = _require(doc, "baseline", path)
        H = _baseline(base_doc, f"{path}.baseline", dim)
        base_params = _surface_params(H.surface)
        if kind == "geodesic":
            return SceneObject(name, GeneralizedSphere(Kind.GEODESIC, H.surface), {"baseline": base_params})
        h = _number(_require(doc, "distance_h", path), f"{path}.distance_h")
        side = doc.get("side", 1)
        if side not in (1, -1) or isinstance(side, bool):
            raise SchemaError(f"{path}.side: expected 1 or -1")
        S = hypersphere_branch(H, h, int(side))
        return SceneObject(name, S, {"baseline": base_params, "distance_h": h, "side": int(side)})
    except SchemaError:
        raise
    except HypowError as e:
        raise InvariantViolation(f"{path} ({name}): {e.code}: {e}") from e


def parse_scene(document: Any) -> Scene:
    """Validate a scene document (a JSON string or an already-decoded dict)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise SchemaError(f"$: invalid JSON: {e.msg} at line {e.lineno}") from None
    doc = _object_dict(document, "$")
    dim = doc.get("dimension", 2)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2:
        raise SchemaError("$.dimension: expected an integer >= 2")

    names: set[str] = set()

    def claim(name: str, path: str) -> str:
        if name in names:
            raise SchemaError(f"{path}: duplicate name {name!r}")
        names.add(name)
        return name

    objects: dict[str, SceneObject] = {}
    for i, od in enumerate(_list(doc, "objects", "$")):
        path = f"$.objects[{i}]"
        obj = _parse_object(_object_dict(od, path), path, dim)
        objects[claim(obj.name, f"{path}.name")] = obj

    points: dict[str, ModelPoint] = {}
    for i, pd in enumerate(_list(doc, "points", "$")):
        path = f"$.points[{i}]"
        pd = _object_dict(pd, path)
        name = claim(_name(_require(pd, "name", path), f"{path}.name"), f"{path}.name")
        ideal = pd.get("ideal", False)
        if not isinstance(ideal, bool):
            raise SchemaError(f"{path}.ideal: expected a boolean")
        try:
            points[name] = ModelPoint(_vector(_require(pd, "coords", path), f"{path}.coords", dim), ideal=ideal)
        except HypowError as e:
            raise InvariantViolation(f"{path} ({name}): {e.code}: {e}") from e

    geodesics: dict[str, Geodesic] = {}
    for i, gd in enumerate(_list(doc, "geodesics", "$")):
        path = f"$.geodesics[{i}]"
        gd = _object_dict(gd, path)
        name = claim(_name(_require(gd, "name", path), f"{path}.name"), f"{path}.name")
        try:
            if "endpoints" in gd:
                ends = gd["endpoints"]
                if not isinstance(ends, list) or len(ends) != 2:
                    raise SchemaError(f"{path}.endpoints: expected two ideal points")
                u, v = (ModelPoint(_vector(e, f"{path}.endpoints[{j}]", dim), ideal=True) for j, e in enumerate(ends))
                geodesics[name] = Geodesic(u, v)
                continue
            thr = _require(gd, "through", path)
            if not isinstance(thr, list) or len(thr) != 2:
                raise SchemaError(f"{path}.through: expected two point names")
            ends = []
            for j, ref in enumerate(thr):
                if ref not in points:
                    raise SchemaError(f"{path}.through[{j}]: unknown point {ref!r}")
                ends.append(points[ref])
            geodesics[name] = geodesic_through(*ends)
        except SchemaError:
            raise
        except HypowError as e:
            raise InvariantViolation(f"{path} ({name}): {e.code}: {e}") from e

    radical = []
    for i, pair in enumerate(_list(doc, "radical", "$")):
        path = f"$.radical[{i}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(f"{path}: expected two object names")
        for j, ref in enumerate(pair):
            if ref not in objects:
                raise SchemaError(f"{path}[{j}]: unknown object {ref!r}")
        radical.append((pair[0], pair[1]))

    clip = None
    if "clip" in doc:
        cd = _object_dict(doc["clip"], "$.clip")
        c = _vector(_require(cd, "center", "$.clip"), "$.clip.center", dim)
        r = _number(_require(cd, "radius_h", "$.clip"), "$.clip.radius_h")
        if not r > 0.0:
            raise InvariantViolation("$.clip.radius_h: clip radius must be positive")
        try:
            clip = (ModelPoint(c), r)
        except HypowError as e:
            raise InvariantViolation(f"$.clip.center: {e.code}: {e}") from e

    style = _parse_style(doc.get("style", {}))
    return Scene(dim, objects, points, geodesics, tuple(radical), clip, style)


def _parse_style(sd: Any) -> Style:
    sd = _object_dict(sd, "$.style")
    base = Style()
    sw = _number(sd.get("stroke_width", base.stroke_width), "$.style.stroke_width")
    fs = _number(sd.get("font_size", base.font_size), "$.style.font_size")
    size = sd.get("size", base.size)
    if isinstance(size, bool) or not isinstance(size, int) or size <= 0:
        raise SchemaError("$.style.size: expected a positive integer")
    colors = dict(DEFAULT_COLORS)
    for k, v in _object_dict(sd.get("colors", {}), "$.style.colors").items():
        if not isinstance(v, str):
            raise SchemaError(f"$.style.colors.{k}: expected a string")
        colors[k] = v
    return Style(sw, size, fs, colors)


def emit_scene(scene: Scene) -> dict:
    """Inverse of ``parse_scene``: a JSON-ready document."""
    doc: dict = {"dimension": scene.dimension, "objects": [], "points": [], "geodesics": []}
    for name, obj in scene.objects.items():
        doc["objects"].append({"name": name, "kind": obj.kind.value, **obj.params})
    for name, P in scene.points.items():
        doc["points"].append({"name": name, "coords": [float(x) for x in P.coords], "ideal": P.ideal})
    for name, G in scene.geodesics.items():
        ends = [[float(x) for x in G.u.coords], [float(x) for x in G.v.coords]]
        doc["geodesics"].append({"name": name, "endpoints": ends})
    if scene.radical:
        doc["radical"] = [list(p) for p in scene.radical]
    if scene.clip is not None:
        doc["clip"] = {"center": [float(x) for x in scene.clip[0].coords], "radius_h": scene.clip[1]}
    st = scene.style
    doc["style"] = {"stroke_width": st.stroke_width, "size": st.size, "font_size": st.font_size, "colors": dict(st.colors)}
    return doc


def load_scene(path: str) -> Scene:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise SchemaError(f"cannot read scene file {path!r}: {e.strerror}") from None
    return parse_scene(text)
