"""Deterministic Poincaré-disk SVG output.

The document is written by hand rather than through a plotting library so
that bytes depend only on the scene: every coordinate has exactly nine
fractional digits and objects are emitted in name order. Model ``y`` points
up; SVG ``y`` points down, so coordinates are flipped on output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from .errors import HypowError, UnsupportedDimension
from .model import Hyperplane, ModelSurface, Plane, sphere_from_center_radius
from .radical import RadicalKind, radical_surface
from .scene import Scene

#: a carrier counts as inside the closed disk up to this slack
INSIDE_TOL = 1e-9
VIEW_MARGIN = 0.08


@dataclass(frozen=True)
class RenderOptions:
    labels: bool = True
    title: Optional[str] = None


def fmt(v: float) -> str:
    s = f"{v:.9f}"
    return "0.000000000" if s == "-0.000000000" else s


def _xy(p) -> str:
    return f"{fmt(float(p[0]))} {fmt(-float(p[1]))}"


def _full_circle(c: np.ndarray, r: float) -> str:
    a = c + np.array([r, 0.0])
    b = c - np.array([r, 0.0])
    R = fmt(r)
    return f"M {_xy(a)} A {R} {R} 0 1 0 {_xy(b)} A {R} {R} 0 1 0 {_xy(a)} Z"


def _unit_circle_hits(c: np.ndarray, r: float) -> Optional[tuple[np.ndarray, np.ndarray]]:
    nc = float(np.linalg.norm(c))
    if nc < 1e-15:
        return None
    q = (1.0 + nc * nc - r * r) / 2.0
    along = q / nc
    h2 = 1.0 - along * along
    if h2 <= 0.0:
        return None
    e = c / nc
    perp = np.array([-e[1], e[0]])
    base = along * e
    h = math.sqrt(h2)
    p1, p2 = base + h * perp, base - h * perp
    # land exactly on the boundary
    return p1 / np.linalg.norm(p1), p2 / np.linalg.norm(p2)


def clip_surface(S: ModelSurface) -> Optional[str]:
    """Path data for the part of a carrier inside the closed unit disk."""
    if isinstance(S, Plane):
        n = S.unit_normal
        d = S.offset
        if abs(d) >= 1.0:
            return None
        perp = np.array([-n[1], n[0]])
        h = math.sqrt(1.0 - d * d)
        return f"M {_xy(d * n + h * perp)} L {_xy(d * n - h * perp)}"
    c, r = S.center, S.radius
    nc = float(np.linalg.norm(c))
    if nc + r <= 1.0 + INSIDE_TOL:
        return _full_circle(c, r)
    if nc - r >= 1.0 or r - nc >= 1.0:
        return None
    hits = _unit_circle_hits(c, r)
    if hits is None:
        return None
    p1, p2 = hits
    mid = c - r * c / nc
    ang = lambda p: math.atan2(p[1] - c[1], p[0] - c[0])  # noqa: E731
    t1, t2, tm = ang(p1), ang(p2), ang(mid)
    span = (t2 - t1) % (2.0 * math.pi)
    ccw = (tm - t1) % (2.0 * math.pi) <= span
    if not ccw:
        span = 2.0 * math.pi - span
    large = 1 if span > math.pi else 0
    # counterclockwise in the model is clockwise on screen (sweep flag 0)
    sweep = 0 if ccw else 1
    R = fmt(r)
    return f"M {_xy(p1)} A {R} {R} 0 {large} {sweep} {_xy(p2)}"


def _path(d: str, cls: str, name: str, color: str, width: float, dash: bool = False) -> str:
    extra = f' stroke-dasharray="{fmt(4 * width)} {fmt(3 * width)}"' if dash else ""
    return (
        f'<path class="{cls}" data-name="{escape(name)}" d="{d}" fill="none" '
        f'stroke="{color}" stroke-width="{fmt(width)}"{extra}/>'
    )


def render_svg(scene: Scene, options: RenderOptions = RenderOptions()) -> str:
    if scene.dimension != 2:
        raise UnsupportedDimension("SVG rendering needs a planar scene")
    st = scene.style
    w = st.stroke_width
    lo = -1.0 - VIEW_MARGIN
    span = 2.0 * (1.0 + VIEW_MARGIN)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{st.size}" height="{st.size}" '
        f'viewBox="{fmt(lo)} {fmt(lo)} {fmt(span)} {fmt(span)}">',
    ]
    if options.title:
        out.append(f"<title>{escape(options.title)}</title>")
    out.append(
        f'<circle class="boundary" cx="{fmt(0.0)}" cy="{fmt(0.0)}" r="{fmt(1.0)}" fill="none" '
        f'stroke="{st.color("boundary")}" stroke-width="{fmt(w)}"/>'
    )
    if scene.clip is not None:
        clip = sphere_from_center_radius(*scene.clip).surface
        out.append(_path(clip_surface(clip), "clip", "clip", st.color("geodesic"), w / 2, dash=True))

    for name in sorted(scene.objects):
        obj = scene.objects[name]
        d = clip_surface(obj.sphere.surface)
        if d is not None:
            out.append(_path(d, obj.kind.value, name, st.color(obj.kind.value), w))

    for name in sorted(scene.geodesics):
        d = clip_surface(scene.geodesics[name].as_hyperplane().surface)
        out.append(_path(d, "geodesic", name, st.color("geodesic"), w))

    for a, b in sorted(scene.radical):
        tag = f"{a}|{b}"
        try:
            res = radical_surface(scene.object(a), scene.object(b))
        except HypowError as e:
            out.append(f"<!-- radical {escape(tag)}: {e.code} -->")
            continue
        if res.hyperplane is None:
            out.append(f"<!-- radical {escape(tag)}: {res.variant.value} -->")
            continue
        d = clip_surface(res.hyperplane.surface)
        out.append(_path(d, "radical", tag, st.color("radical"), w, dash=res.variant is RadicalKind.BASELINE))

    fs = st.font_size
    for name in sorted(scene.points):
        P = scene.points[name]
        x = P.coords
        out.append(
            f'<circle class="point" data-name="{escape(name)}" cx="{fmt(x[0])}" cy="{fmt(-x[1])}" '
            f'r="{fmt(2.5 * w)}" fill="{st.color("point")}"/>'
        )
        if options.labels:
            out.append(
                f'<text x="{fmt(x[0] + 1.5 * fs / 3)}" y="{fmt(-x[1] - fs / 3)}" '
                f'font-size="{fmt(fs)}" font-family="serif">{escape(name)}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def hyperplane_path(H: Hyperplane) -> Optional[str]:
    return clip_surface(H.surface)

