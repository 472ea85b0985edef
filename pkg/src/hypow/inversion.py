"""Inversion in Euclidean space, in the hyperbolic ball and on the sphere.

Hyperbolic inversion about ``O`` with radius ``r`` is the Euclidean inversion
of radius ``tanh(r/2)`` once ``O`` sits at the origin; it is undefined on the
closed hyperbolic ball of radius ``2 artanh(tanh^2(r/2))`` about ``O``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    AntipodalDegeneracy,
    CenterSingularity,
    InvariantViolation,
    NoIntersection,
    OutsideDomain,
    PoleSingularity,
)
from .model import (
    GeneralizedSphere,
    ModelPoint,
    ModelSurface,
    Plane,
    Sphere,
    apply_isometry_point,
    euclidean_invert_surface,
    from_surface,
    hyperbolic_distance,
    sphere_from_center_radius,
    translate_to_origin,
)

#: extra clearance demanded between a cycle and the forbidden ball
CYCLE_DOMAIN_MARGIN = 1e-9


@dataclass(frozen=True, eq=False)
class InversionSphere:
    """Center and (intrinsic) radius of an inversion.

    ``center`` is a ModelPoint for hyperbolic inversion, a vector for the
    Euclidean case, and a unit vector for the spherical case.
    """

    center: Union[ModelPoint, np.ndarray]
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise InvariantViolation(f"inversion radius must be positive, got {self.radius!r}")
        if isinstance(self.center, ModelPoint):
            if self.center.ideal:
                raise InvariantViolation("hyperbolic inversion center must be finite")
        else:
            c = np.array(self.center, dtype=float)
            c.setflags(write=False)
            object.__setattr__(self, "center", c)


def _center_vec(w: InversionSphere) -> np.ndarray:
    return w.center.coords if isinstance(w.center, ModelPoint) else w.center


# ---------------------------------------------------------------------------
# Euclidean


def euclidean_invert_point(w: InversionSphere, x) -> np.ndarray:
    O = _center_vec(w)
    rel = np.asarray(x, dtype=float) - O
    d2 = float(rel @ rel)
    if d2 <= 1e-28:
        raise CenterSingularity("cannot invert the center of inversion")
    return O + w.radius**2 * rel / d2


def euclidean_invert_sphere(w: InversionSphere, S: ModelSurface) -> ModelSurface:
    return euclidean_invert_surface(_center_vec(w), w.radius**2, S)


def negative_invert_point(w: InversionSphere, x) -> np.ndarray:
    """Inversion followed by the point reflection in the center."""
    O = _center_vec(w)
    return 2.0 * O - euclidean_invert_point(w, x)


def negative_invert_sphere(w: InversionSphere, S: ModelSurface) -> ModelSurface:
    O = _center_vec(w)
    img = euclidean_invert_sphere(w, S)
    if isinstance(img, Sphere):
        return Sphere(2.0 * O - img.center, img.radius)
    n = -img.unit_normal
    return Plane(n, float(n @ (2.0 * O - img.offset * img.unit_normal)))


# ---------------------------------------------------------------------------
# hyperbolic


def hyperbolic_domain_radius(r: float) -> float:
    """Radius of the closed ball about the center where inversion is undefined."""
    t = math.tanh(r / 2.0)
    return 2.0 * math.atanh(t * t)


def hyperbolic_invert_point(w: InversionSphere, P: ModelPoint) -> ModelPoint:
    O = w.center
    if not isinstance(O, ModelPoint):
        O = ModelPoint(O)
    if P.ideal:
        raise OutsideDomain("ideal points are not in the domain")
    dom = hyperbolic_domain_radius(w.radius)
    if hyperbolic_distance(O, P) <= dom + 1e-12:
        raise OutsideDomain(
            f"point is within the forbidden ball of radius {dom!r} about the center"
        )
    T = translate_to_origin(O)
    x = T.vector(P.coords)
    tau = math.tanh(w.radius / 2.0)
    x = x * (tau * tau / float(x @ x))
    return apply_isometry_point(T, ModelPoint(x))


def domain_boundary(w: InversionSphere) -> GeneralizedSphere:
    """The hyperbolic sphere bounding the forbidden ball."""
    O = w.center if isinstance(w.center, ModelPoint) else ModelPoint(w.center)
    return sphere_from_center_radius(O, hyperbolic_domain_radius(w.radius))


def _closest_approach(S: ModelSurface) -> float:
    """Euclidean distance from the origin to the surface."""
    if isinstance(S, Plane):
        return abs(S.offset)
    return abs(float(np.linalg.norm(S.center)) - S.radius)


def hyperbolic_invert_cycle(w: InversionSphere, S: GeneralizedSphere) -> GeneralizedSphere:
    """Image of a cycle whose carrier avoids the forbidden ball.

    Returns the classified image carrier; circles map to circles, geodesics
    to arcs orthogonal to the domain boundary, hypersphere branches to arcs
    crossing it non-orthogonally.
    """
    O = w.center if isinstance(w.center, ModelPoint) else ModelPoint(w.center)
    T = translate_to_origin(O)
    carrier = T.surface(S.surface)
    tau = math.tanh(w.radius / 2.0)
    gap = _closest_approach(carrier)
    dom = hyperbolic_domain_radius(w.radius)
    if gap >= 1.0 or 2.0 * math.atanh(gap) <= dom + CYCLE_DOMAIN_MARGIN:
        raise OutsideDomain("cycle meets the forbidden ball of the inversion")
    img = euclidean_invert_surface(np.zeros(carrier.dim), tau * tau, carrier)
    return from_surface(T.surface(img))


# ---------------------------------------------------------------------------
# spherical


@dataclass(frozen=True, eq=False)
class SphericalCircle:
    pole: np.ndarray
    colatitude: float

    def __post_init__(self):
        p = np.array(self.pole, dtype=float)
        p = p / np.linalg.norm(p)
        p.setflags(write=False)
        object.__setattr__(self, "pole", p)
        if not 0.0 < self.colatitude < math.pi:
            raise InvariantViolation("colatitude must lie in (0, pi)")


def great_circle_hits(P: np.ndarray, t: np.ndarray, C: SphericalCircle) -> list[float]:
    """Signed arclengths ``s`` in (-pi, pi] with ``cos(s)P + sin(s)t`` on ``C``."""
    A = float(P @ C.pole)
    B = float(t @ C.pole)
    R = math.hypot(A, B)
    c = math.cos(C.colatitude)
    if R < abs(c) or R == 0.0:
        return []
    phi = math.atan2(B, A)
    delta = math.acos(max(-1.0, min(1.0, c / R)))
    out = []
    for s in (phi - delta, phi + delta):
        s = math.remainder(s, 2.0 * math.pi)
        out.append(s)
    return out


def _tan_product(hits: list[float]) -> float:
    return abs(math.tan(hits[0] / 2.0) * math.tan(hits[1] / 2.0))


def spherical_power_product(P, C: SphericalCircle) -> float:
    """``tan(d(P,A)/2) tan(d(P,B)/2)`` along the great circle through ``P``
    and the pole of ``C``."""
    P = np.asarray(P, dtype=float)
    P = P / np.linalg.norm(P)
    if abs(float(-P @ C.pole) - math.cos(C.colatitude)) <= 1e-12:
        raise AntipodalDegeneracy("point is antipodal to a point of the circle")
    t = C.pole - float(P @ C.pole) * P
    nt = np.linalg.norm(t)
    if nt < 1e-12:
        # P is a pole: any direction
        k = int(np.argmin(np.abs(P)))
        e = np.zeros_like(P)
        e[k] = 1.0
        t = e - float(e @ P) * P
        nt = np.linalg.norm(t)
    hits = great_circle_hits(P, t / nt, C)
    if not hits:
        raise NoIntersection("meridian misses the circle")
    return _tan_product(hits)


def spherical_secant_products(P, C: SphericalCircle, count: int, rng: np.random.Generator) -> list[float]:
    """Products along random great circles through ``P`` that meet ``C``."""
    P = np.asarray(P, dtype=float)
    P = P / np.linalg.norm(P)
    out: list[float] = []
    guard = 0
    while len(out) < count:
        guard += 1
        if guard > 1000 * count:
            raise NoIntersection("too few great circles meet the circle")
        t = rng.standard_normal(P.shape[0])
        t = t - float(t @ P) * P
        nt = np.linalg.norm(t)
        if nt < 1e-12:
            continue
        hits = great_circle_hits(P, t / nt, C)
        if hits:
            out.append(_tan_product(hits))
    return out


def spherical_distance(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return math.atan2(float(np.linalg.norm(a - (a @ b) * b)), float(a @ b))


def spherical_invert_point(w: InversionSphere, P) -> np.ndarray:
    O = np.asarray(_center_vec(w), dtype=float)
    O = O / np.linalg.norm(O)
    P = np.asarray(P, dtype=float)
    P = P / np.linalg.norm(P)
    t = P - float(P @ O) * O
    nt = float(np.linalg.norm(t))
    d = math.atan2(nt, float(P @ O))
    if d <= 1e-12 or d >= math.pi - 1e-12:
        raise PoleSingularity("point coincides with the center or its antipode")
    d2 = 2.0 * math.atan(math.tan(w.radius / 2.0) ** 2 / math.tan(d / 2.0))
    return math.cos(d2) * O + math.sin(d2) * (t / nt)
