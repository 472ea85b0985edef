"""Poincare ball substrate: points, model surfaces, isometries, geodesics and
generalized spheres (spheres, horospheres, hypersphere branches, geodesic
hyperplanes).

Everything is immutable.  Coordinates are float64 numpy arrays marked
read-only; all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    CoincidentPoints,
    IdealPointArgument,
    InvariantViolation,
    NumericError,
    OutsideModel,
    PointAtTangency,
    SingularPoint,
)

#: finite points must satisfy |x| < 1 - BALL_GUARD
BALL_GUARD = 1e-12
#: ideal points must satisfy ||x| - 1| <= IDEAL_TOL
IDEAL_TOL = 1e-9
#: classification tolerance on the tangency/orthogonality residuals
CLASSIFY_EPS = 1e-9
#: hyperplane orthogonality residual allowed on construction
ORTHO_TOL = 1e-9
#: below this norm a translation is the identity
IDENTITY_NORM = 1e-14

Vector = np.ndarray


def _vec(x) -> Vector:
    a = np.array(x, dtype=float).reshape(-1)
    a.setflags(write=False)
    return a


def _unit(x: Vector) -> Vector:
    n = np.linalg.norm(x)
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    return x / n


# ---------------------------------------------------------------------------
# points and surfaces


@dataclass(frozen=True, eq=False)
class ModelPoint:
    """Point of the open unit ball, or an ideal point of its boundary."""

    coords: Vector
    ideal: bool = False

    def __post_init__(self):
        c = _vec(self.coords)
        norm = float(np.linalg.norm(c))
        if self.ideal:
            if abs(norm - 1.0) > IDEAL_TOL:
                raise InvariantViolation(f"ideal point has norm {norm!r}, expected 1")
            c = _vec(c / norm)
        elif not norm < 1.0 - BALL_GUARD:
            raise OutsideModel(f"point with norm {norm!r} is not inside the unit ball")
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def __repr__(self):
        tag = "ideal" if self.ideal else "point"
        return f"{tag}({', '.join(repr(float(x)) for x in self.coords)})"


def point(*coords) -> ModelPoint:
    if len(coords) == 1 and np.ndim(coords[0]) == 1:
        coords = coords[0]
    return ModelPoint(_vec(coords))


def ideal_point(*coords) -> ModelPoint:
    if len(coords) == 1 and np.ndim(coords[0]) == 1:
        coords = coords[0]
    v = np.array(coords, dtype=float)
    return ModelPoint(v / np.linalg.norm(v), ideal=True)


def origin(n: int = 2) -> ModelPoint:
    return ModelPoint(np.zeros(n))


@dataclass(frozen=True, eq=False)
class Sphere:
    """Euclidean sphere ``|x - center| = radius`` in model space."""

    center: Vector
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        r = float(self.radius)
        if not r > 0.0 or not math.isfinite(r):
            raise InvariantViolation(f"sphere radius must be positive, got {r!r}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def __repr__(self):
        return f"Sphere({list(map(float, self.center))}, {self.radius!r})"


@dataclass(frozen=True, eq=False)
class Plane:
    """Affine hyperplane ``<unit_normal, x> = offset``.

    A non-unit normal is normalized on construction (offset rescaled).
    """

    unit_normal: Vector
    offset: float = 0.0

    def __post_init__(self):
        n = np.array(self.unit_normal, dtype=float).reshape(-1)
        norm = np.linalg.norm(n)
        if norm == 0.0:
            raise InvariantViolation("plane normal must be nonzero")
        if abs(norm - 1.0) <= 1e-15:
            # already unit; keep the bits so emitted scenes are stable
            norm = 1.0
        object.__setattr__(self, "unit_normal", _vec(n / norm))
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @property
    def dim(self) -> int:
        return self.unit_normal.shape[0]

    def __repr__(self):
        return f"Plane({list(map(float, self.unit_normal))}, {self.offset!r})"


ModelSurface = Union[Sphere, Plane]


def surface_coefficients(S: ModelSurface) -> tuple[float, Vector, float]:
    """Homogeneous coefficients ``(alpha, beta, gamma)`` with
    ``S = {alpha |x|^2 - 2<beta, x> + gamma = 0}``."""
    if isinstance(S, Sphere):
        c = S.center
        return 1.0, c, float(c @ c) - S.radius**2
    return 0.0, -0.5 * S.unit_normal, -S.offset


def surfaces_close(a: ModelSurface, b: ModelSurface, tol: float = 1e-9) -> bool:
    if isinstance(a, Sphere) and isinstance(b, Sphere):
        return (
            np.linalg.norm(a.center - b.center) <= tol * max(1.0, np.linalg.norm(a.center))
            and abs(a.radius - b.radius) <= tol * max(1.0, a.radius)
        )
    if isinstance(a, Plane) and isinstance(b, Plane):
        for s in (1.0, -1.0):
            if (
                np.linalg.norm(a.unit_normal - s * b.unit_normal) <= tol
                and abs(a.offset - s * b.offset) <= tol
            ):
                return True
    return False


def euclidean_invert_surface(center: Vector, radius_sq: float, S: ModelSurface) -> ModelSurface:
    """Image of a sphere or plane under Euclidean inversion in
    ``|x - center|^2 = radius_sq``."""
    O = np.asarray(center, dtype=float)
    if isinstance(S, Sphere):
        rel = S.center - O
        k = float(rel @ rel) - S.radius**2
        scale = max(float(rel @ rel), S.radius**2, 1.0)
        if abs(k) <= 1e-12 * scale:
            # sphere through the inversion center
            n = _unit(rel)
            return Plane(n, float(n @ O) + radius_sq / (2.0 * S.radius))
        return Sphere(O + radius_sq * rel / k, radius_sq * S.radius / abs(k))
    n = S.unit_normal
    s = float(n @ O) - S.offset
    if abs(s) <= 1e-12:
        return S
    return Sphere(O - radius_sq * n / (2.0 * s), radius_sq / (2.0 * abs(s)))


def euclidean_invert_vector(center: Vector, radius_sq: float, x: Vector) -> Vector:
    rel = np.asarray(x, dtype=float) - center
    d2 = float(rel @ rel)
    if d2 <= 1e-28:
        raise SingularPoint("point coincides with the inversion center")
    return center + radius_sq * rel / d2


# ---------------------------------------------------------------------------
# geodesic hyperplanes


def _orthogonal_radius(center: Vector, radius: float) -> float:
    """The double nearest ``sqrt(|center|^2 - 1)``, evaluated in exact arithmetic.

    Carriers of far-off hyperplanes have huge centers; rounding the radius
    independently of the center would leave an orthogonality defect of
    several ulps of ``|center|^2``.
    """
    target = sum(Fraction(float(x)) ** 2 for x in center) - 1
    if target <= 0:
        return radius
    r = math.sqrt(float(target))
    cands = (np.nextafter(r, 0.0), r, np.nextafter(r, math.inf))
    return float(min(cands, key=lambda v: abs(target - Fraction(float(v)) ** 2)))


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Geodesic hyperplane: a model surface orthogonal to the unit sphere.

    Orientation: the positive side of a Sphere-variant hyperplane is its
    exterior (the side containing the origin); for the Plane variant it is
    ``<n, x> > 0`` where ``n`` is canonicalized to have its first nonzero
    component positive.
    """

    surface: ModelSurface

    def __post_init__(self):
        S = self.surface
        if isinstance(S, Plane):
            lead = S.unit_normal[np.abs(S.unit_normal) > 1e-12]
            if lead.size and lead[0] < 0:
                S = Plane(-S.unit_normal, -S.offset)
                object.__setattr__(self, "surface", S)
        if isinstance(S, Sphere):
            c2 = float(S.center @ S.center)
            res = c2 - 1.0 - S.radius**2
            if abs(res) > ORTHO_TOL * max(1.0, c2):
                raise InvariantViolation(f"sphere is not orthogonal to the unit sphere (residual {res:.3e})")
            object.__setattr__(self, "surface", Sphere(S.center, _orthogonal_radius(S.center, S.radius)))
        elif abs(S.offset) > 1e-12:
            raise InvariantViolation(f"plane hyperplane must pass through the origin (offset {S.offset:.3e})")

    @property
    def dim(self) -> int:
        return self.surface.dim

    def orthogonality_residual(self) -> float:
        S = self.surface
        if isinstance(S, Sphere):
            return abs(float(S.center @ S.center) - 1.0 - S.radius**2)
        return abs(S.offset)

    def side_value(self, x) -> np.ndarray | float:
        """Signed level function, positive on the positive side."""
        x = np.asarray(x, dtype=float)
        S = self.surface
        if isinstance(S, Sphere):
            d = x - S.center
            return np.sum(d * d, axis=-1) - S.radius**2
        return x @ S.unit_normal

    def midpoint(self) -> Vector:
        """The point of the hyperplane closest to the origin."""
        S = self.surface
        if isinstance(S, Plane):
            return np.zeros(S.dim)
        C = S.center
        nC = float(np.linalg.norm(C))
        return C / (nC * (nC + S.radius))

    def axis(self) -> Vector:
        """Unit normal of the hyperplane at its midpoint, pointing to the positive side."""
        S = self.surface
        if isinstance(S, Plane):
            return S.unit_normal
        return -_unit(S.center)

    def same_as(self, other: "Hyperplane", tol: float = 1e-10) -> bool:
        return surfaces_close(self.surface, other.surface, tol)

    def reflection(self) -> "Isometry":
        S = self.surface
        if isinstance(S, Sphere):
            return Isometry((SphereInversion(S.center, S.radius**2),))
        return Isometry((PlaneReflection(S.unit_normal, 0.0),))

    @classmethod
    def through_origin(cls, normal) -> "Hyperplane":
        return cls(Plane(normal, 0.0))


def distance_to_hyperplane(x, H: Hyperplane, signed: bool = False):
    """Hyperbolic distance from finite point(s) ``x`` to ``H``."""
    x = np.asarray(x, dtype=float)
    S = H.surface
    denom = 1.0 - np.sum(x * x, axis=-1)
    if isinstance(S, Sphere):
        val = H.side_value(x) / (S.radius * denom)
    else:
        val = 2.0 * (x @ S.unit_normal) / denom
    d = np.arcsinh(val)
    return d if signed else np.abs(d)


# ---------------------------------------------------------------------------
# isometries


@dataclass(frozen=True, eq=False)
class SphereInversion:
    center: Vector
    radius_sq: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))

    def vector(self, x: Vector) -> Vector:
        rel = x - self.center
        d2 = float(rel @ rel)
        if d2 <= 1e-28:
            raise SingularPoint("point coincides with an inversion center")
        return self.center + self.radius_sq * rel / d2

    def surface(self, S: ModelSurface) -> ModelSurface:
        return euclidean_invert_surface(self.center, self.radius_sq, S)

    def inverse(self):
        return self


@dataclass(frozen=True, eq=False)
class OrthogonalMap:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def vector(self, x: Vector) -> Vector:
        return self.matrix @ x

    def surface(self, S: ModelSurface) -> ModelSurface:
        if isinstance(S, Sphere):
            return Sphere(self.matrix @ S.center, S.radius)
        return Plane(self.matrix @ S.unit_normal, S.offset)

    def inverse(self):
        return OrthogonalMap(self.matrix.T)


@dataclass(frozen=True, eq=False)
class PlaneReflection:
    normal: Vector
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "normal", _vec(_unit(np.asarray(self.normal, dtype=float))))

    def vector(self, x: Vector) -> Vector:
        return x - 2.0 * (float(x @ self.normal) - self.offset) * self.normal

    def surface(self, S: ModelSurface) -> ModelSurface:
        if isinstance(S, Sphere):
            return Sphere(self.vector(S.center), S.radius)
        m = self.normal
        n2 = S.unit_normal - 2.0 * float(S.unit_normal @ m) * m
        p2 = self.vector(S.offset * S.unit_normal)
        return Plane(n2, float(n2 @ p2))

    def inverse(self):
        return self


Primitive = Union[SphereInversion, OrthogonalMap, PlaneReflection]


@dataclass(frozen=True, eq=False)
class Isometry:
    """Ball-preserving map given as a sequence of primitives applied in order."""

    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __call__(self, P: ModelPoint) -> ModelPoint:
        return apply_isometry_point(self, P)

    def vector(self, x) -> Vector:
        x = np.asarray(x, dtype=float)
        for s in self.steps:
            x = s.vector(x)
        return x

    def surface(self, S: ModelSurface) -> ModelSurface:
        return apply_isometry_surface(self, S)

    def inverse(self) -> "Isometry":
        return Isometry(tuple(s.inverse() for s in reversed(self.steps)))

    def then(self, other: "Isometry") -> "Isometry":
        """``other`` applied after ``self``."""
        return Isometry(self.steps + other.steps)


IDENTITY = Isometry(())


def translate_to_origin(a: ModelPoint) -> Isometry:
    """Involutive isometry swapping ``a`` and the origin.

    Inversion in the sphere centered at ``a/|a|^2`` with squared radius
    ``(1 - |a|^2)/|a|^2``, which is orthogonal to the unit sphere.
    """
    if a.ideal:
        raise IdealPointArgument("cannot translate an ideal point to the origin")
    x = a.coords
    n2 = float(x @ x)
    if math.sqrt(n2) <= IDENTITY_NORM:
        return IDENTITY
    return Isometry((SphereInversion(x / n2, (1.0 - n2) / n2),))


def apply_isometry_point(T: Isometry, P: ModelPoint) -> ModelPoint:
    x = T.vector(P.coords)
    if P.ideal:
        return ModelPoint(x / np.linalg.norm(x), ideal=True)
    n = float(np.linalg.norm(x))
    if n >= 1.0 - BALL_GUARD:
        # rounding at the guard band; pull back inside
        x = x * ((1.0 - 2 * BALL_GUARD) / n)
    return ModelPoint(x)


def apply_isometry_surface(T: Isometry, S: ModelSurface) -> ModelSurface:
    for s in T.steps:
        S = s.surface(S)
    return S


def householder_to(target: Vector) -> np.ndarray:
    """Orthogonal matrix sending the last basis vector to the unit ``target``."""
    n = target.shape[0]
    e = np.zeros(n)
    e[-1] = 1.0
    w = e - target
    ww = float(w @ w)
    if ww < 1e-30:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(w, w) / ww


# ---------------------------------------------------------------------------
# distance and geodesics


def hyperbolic_distance(P: ModelPoint, Q: ModelPoint) -> float:
    """``2 artanh |T_P(Q)|`` in a cancellation-free form."""
    if P.ideal or Q.ideal:
        raise IdealPointArgument("distance to an ideal point is infinite")
    p, q = P.coords, Q.coords
    diff = p - q
    d2 = float(diff @ diff)
    if d2 == 0.0:
        return 0.0
    gap = (1.0 - float(p @ p)) * (1.0 - float(q @ q))
    return 2.0 * math.atanh(math.sqrt(d2 / (d2 + gap)))


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Hyperbolic line, stored by its two ideal endpoints."""

    u: ModelPoint
    v: ModelPoint

    def __post_init__(self):
        if not (self.u.ideal and self.v.ideal):
            raise InvariantViolation("geodesic endpoints must be ideal points")
        if np.linalg.norm(self.u.coords - self.v.coords) < 1e-9:
            raise CoincidentPoints("geodesic endpoints coincide")

    @property
    def dim(self) -> int:
        return self.u.dim

    def is_diameter(self) -> bool:
        return float(np.linalg.norm(self.u.coords + self.v.coords)) <= 1e-9

    def circle(self) -> Optional[tuple[Vector, float]]:
        """Euclidean carrier circle (center, radius), ``None`` for a diameter."""
        if self.is_diameter():
            return None
        u, v = self.u.coords, self.v.coords
        m = u + v
        mm = float(m @ m)
        # 1 + <u,v> = |u+v|^2 / 2 without cancellation
        return 2.0 * m / mm, float(np.linalg.norm(u - v)) / math.sqrt(mm)

    def apex(self) -> ModelPoint:
        """Point of the geodesic closest to the origin."""
        u, v = self.u.coords, self.v.coords
        k = min(max(float(u @ v), -1.0), 1.0)
        s = math.sqrt(1.0 + k) / (math.sqrt(2.0) + math.sqrt(1.0 - k))
        m = u + v
        nm = np.linalg.norm(m)
        if nm < 1e-300:
            return ModelPoint(np.zeros(self.dim))
        return ModelPoint(s * m / nm)

    def incidence_residual(self, P: ModelPoint) -> float:
        """Euclidean distance of ``P`` from the carrier (first order)."""
        x = P.coords
        u, v = self.u.coords, self.v.coords
        if self.dim == 2:
            xin, off = x, 0.0
        else:
            B = _plane_basis(u, v) if not self.is_diameter() else u[:, None]
            xin = B @ (B.T @ x)
            off = float(np.linalg.norm(x - xin))
        m = u + v
        s = float(np.linalg.norm(m))
        if s <= 1e-15:
            # a diameter: distance from the line through the origin along u
            along = float(xin @ u) * u
            return math.hypot(off, float(np.linalg.norm(xin - along)))
        if self.dim == 2:
            # the normal is perpendicular to u - v, which is well conditioned
            w = u - v
            mh = np.array([-w[1], w[0]]) / float(np.linalg.norm(w))
            if float(mh @ m) < 0.0:
                mh = -mh
        else:
            mh = m / s
        # carrier: s/2 (|x|^2 + 1) - 2<mh, x> = 0, well scaled for near-diameters
        g = 0.5 * s * (float(xin @ xin) + 1.0) - 2.0 * float(mh @ xin)
        grad = float(np.linalg.norm(s * xin - 2.0 * mh))
        return math.hypot(off, abs(g) / grad)

    def points(self, params: Sequence[float]) -> list[ModelPoint]:
        """Points at signed hyperbolic arclength ``params`` from the apex."""
        a = self.apex()
        T = translate_to_origin(a)
        d = T.vector(self.u.coords)
        d = d / np.linalg.norm(d)
        return [apply_isometry_point(T, ModelPoint(math.tanh(s / 2.0) * d)) for s in params]

    def as_hyperplane(self) -> Hyperplane:
        if self.dim != 2:
            raise InvariantViolation("a geodesic is a hyperplane only in dimension 2")
        circ = self.circle()
        if circ is None:
            u = self.u.coords
            return Hyperplane(Plane(np.array([-u[1], u[0]]), 0.0))
        c, R = circ
        return Hyperplane(Sphere(c, R))


def _plane_basis(a: Vector, b: Vector) -> np.ndarray:
    """Orthonormal basis (as columns) of span(a, b)."""
    e1 = _unit(a)
    w = b - (b @ e1) * e1
    nw = np.linalg.norm(w)
    if nw < 1e-300:
        return e1[:, None]
    return np.stack([e1, w / nw], axis=1)


def geodesic_through(P: ModelPoint, Q: ModelPoint) -> Geodesic:
    """The geodesic through two distinct (finite or ideal) points.

    The carrier center ``c`` lies in ``span(P, Q)`` and satisfies
    ``2<c, X> = 1 + |X|^2`` for every point ``X`` of an orthogonal circle,
    which gives a 2x2 linear system.
    """
    if P.ideal and Q.ideal:
        return Geodesic(P, Q)
    if P.ideal:
        P, Q = Q, P
    p, q = P.coords, Q.coords
    if Q.ideal:
        if np.linalg.norm(p - q) < 1e-12:
            raise CoincidentPoints("finite point coincides with the ideal point")
    elif hyperbolic_distance(P, Q) < 1e-12:
        raise CoincidentPoints("points coincide")
    if float(p @ p) < float(q @ q):
        p, q = q, p
    pp, qq = float(p @ p), float(q @ q)
    np_ = math.sqrt(pp)
    e1 = p / np_
    q1 = float(q @ e1)
    w = q - q1 * e1
    q2 = float(np.linalg.norm(w))
    if q2 <= 1e-12 * math.sqrt(max(qq, 1e-300)) or q2 < 1e-300:
        # collinear with the origin: a diameter
        return Geodesic(ModelPoint(e1, ideal=True), ModelPoint(-e1, ideal=True))
    e2 = w / q2
    # in-plane coordinates of the carrier center, scaled by its norm to avoid overflow
    c1 = (1.0 + pp) / (2.0 * np_)
    c2 = ((1.0 + qq) / 2.0 - c1 * q1) / q2
    cn = math.hypot(c1, c2)
    d1, d2 = c1 / cn, c2 / cn
    x0 = (d1 * e1 + d2 * e2) / cn
    b = math.sqrt(max(0.0, 1.0 - 1.0 / cn / cn))
    perp = -d2 * e1 + d1 * e2
    return Geodesic(ModelPoint(x0 + b * perp, ideal=True), ModelPoint(x0 - b * perp, ideal=True))


# ---------------------------------------------------------------------------
# generalized spheres


class Kind(str, Enum):
    SPHERE = "sphere"
    HOROSPHERE = "horosphere"
    BRANCH = "hypersphere"
    GEODESIC = "geodesic"


def classify_model_sphere(S: ModelSurface, eps: float = CLASSIFY_EPS) -> Kind:
    """Kind of the hyperbolic object carried by a model surface."""
    if isinstance(S, Plane):
        d = abs(S.offset)
        if d >= 1.0 - eps:
            raise OutsideModel(f"plane at distance {d!r} misses the open ball")
        return Kind.GEODESIC if d <= eps else Kind.BRANCH
    c = float(np.linalg.norm(S.center))
    rho = S.radius
    if c - rho >= 1.0 - eps or rho - c >= 1.0 - eps:
        raise OutsideModel(f"{S!r} does not meet the open unit ball")
    delta = c + rho - 1.0
    if delta < -eps:
        return Kind.SPHERE
    if abs(delta) <= eps:
        return Kind.HOROSPHERE
    omega = c * c - 1.0 - rho * rho
    if abs(omega) <= eps * max(1.0, c * c):
        return Kind.GEODESIC
    return Kind.BRANCH


@dataclass(frozen=True, eq=False)
class GeneralizedSphere:
    """A classified cycle/sphere together with its model carrier.

    Only the intrinsic fields relevant to ``kind`` are set:
    ``center``/``radius_h`` (sphere), ``ideal``/``through`` (horosphere),
    ``baseline``/``distance_h``/``side`` (hypersphere branch).
    """

    kind: Kind
    surface: ModelSurface
    center: Optional[ModelPoint] = None
    radius_h: Optional[float] = None
    ideal: Optional[ModelPoint] = None
    through: Optional[ModelPoint] = None
    baseline: Optional[Hyperplane] = None
    distance_h: Optional[float] = None
    side: Optional[int] = None

    def __post_init__(self):
        got = classify_model_sphere(self.surface)
        if got is not self.kind:
            raise InvariantViolation(f"surface classifies as {got.value}, not {self.kind.value}")

    @property
    def dim(self) -> int:
        return self.surface.dim

    def __repr__(self):
        k = self.kind
        if k is Kind.SPHERE:
            extra = f"center={self.center!r}, radius_h={self.radius_h!r}"
        elif k is Kind.HOROSPHERE:
            extra = f"ideal={self.ideal!r}"
        elif k is Kind.BRANCH:
            extra = f"distance_h={self.distance_h!r}, side={self.side:+d}"
        else:
            extra = ""
        return f"GeneralizedSphere({k.value}, {self.surface!r}, {extra})"


def sphere_from_center_radius(center: ModelPoint, r_h: float) -> GeneralizedSphere:
    if center.ideal:
        raise IdealPointArgument("sphere center must be finite")
    if not r_h > 0.0:
        raise InvariantViolation(f"sphere radius must be positive, got {r_h!r}")
    rho = math.tanh(r_h / 2.0)
    base = Sphere(np.zeros(center.dim), rho)
    surf = translate_to_origin(center).surface(base)
    return GeneralizedSphere(Kind.SPHERE, surf, center=center, radius_h=float(r_h))


def horosphere_from(u: ModelPoint, through: ModelPoint) -> GeneralizedSphere:
    if not u.ideal:
        raise InvariantViolation("horosphere needs an ideal point")
    if through.ideal:
        raise IdealPointArgument("horosphere reference point must be finite")
    p, e = through.coords, u.coords
    gap = 1.0 - float(p @ e)
    if np.linalg.norm(p - e) < 1e-12 or gap <= 0.0:
        raise PointAtTangency("reference point coincides with the ideal point")
    lam = (1.0 - float(p @ p)) / (2.0 * gap)
    surf = Sphere(lam * e, 1.0 - lam)
    return GeneralizedSphere(Kind.HOROSPHERE, surf, ideal=u, through=through)


def _baseline_frame(baseline: Hyperplane) -> Isometry:
    """Isometry taking ``{x_n = 0}`` (positive side ``x_n > 0``) onto the
    baseline with its orientation."""
    axis = baseline.axis() if isinstance(baseline.surface, Plane) else _unit(baseline.surface.center)
    Q = OrthogonalMap(householder_to(axis))
    b = baseline.midpoint()
    if isinstance(baseline.surface, Plane):
        return Isometry((Q,))
    return Isometry((Q,)).then(translate_to_origin(ModelPoint(b)))


def hypersphere_branch(baseline: Hyperplane, h: float, side: int) -> GeneralizedSphere:
    """Branch at hyperbolic distance ``h`` from ``baseline`` on ``side``.

    In the frame where the baseline is ``{x_n = 0}`` the carrier passes through
    the equator and the apex ``side * tanh(h/2) e_n``.
    """
    if not h > 0.0:
        raise InvariantViolation(f"hypersphere distance must be positive, got {h!r}")
    if side not in (1, -1):
        raise InvariantViolation(f"side must be +1 or -1, got {side!r}")
    n = baseline.dim
    t = math.tanh(h / 2.0)
    m = (t * t - 1.0) / (2.0 * t)
    c = np.zeros(n)
    c[-1] = side * m
    frame = _baseline_frame(baseline)
    surf = frame.surface(Sphere(c, math.sqrt(1.0 + m * m)))
    return GeneralizedSphere(
        Kind.BRANCH, surf, baseline=baseline, distance_h=float(h), side=int(side)
    )


def _branch_apex(S: ModelSurface) -> Vector:
    if isinstance(S, Plane):
        return S.offset * S.unit_normal
    c = S.center
    nc = float(np.linalg.norm(c))
    return (nc - S.radius) * c / nc


def _baseline_of(S: ModelSurface) -> Hyperplane:
    """Geodesic hyperplane through the boundary trace of a crossing surface."""
    if isinstance(S, Plane):
        d = S.offset
        return Hyperplane(Sphere(S.unit_normal / d, math.sqrt(1.0 / (d * d) - 1.0)))
    c = S.center
    nc = float(np.linalg.norm(c))
    q = (1.0 + nc * nc - S.radius**2) / 2.0
    if abs(q) <= 1e-12 * nc:
        return Hyperplane(Plane(c / nc, 0.0))
    C = c / q
    D = nc / abs(q)
    return Hyperplane(Sphere(C, math.sqrt(max(D * D - 1.0, 0.0))))


def from_surface(S: ModelSurface) -> GeneralizedSphere:
    """Classify a model surface and recover the intrinsic parameters."""
    kind = classify_model_sphere(S)
    if kind is Kind.SPHERE:
        c = S.center
        nc = float(np.linalg.norm(c))
        if nc <= 1e-15:
            return GeneralizedSphere(kind, S, center=ModelPoint(np.zeros(S.dim)), radius_h=2.0 * math.atanh(S.radius))
        a1, a2 = math.atanh(nc - S.radius), math.atanh(nc + S.radius)
        ctr = ModelPoint(math.tanh((a1 + a2) / 2.0) * c / nc)
        return GeneralizedSphere(kind, S, center=ctr, radius_h=a2 - a1)
    if kind is Kind.HOROSPHERE:
        c = S.center
        nc = float(np.linalg.norm(c))
        u = c / nc
        thr = ModelPoint((nc - S.radius) * u)
        return GeneralizedSphere(kind, S, ideal=ModelPoint(u, ideal=True), through=thr)
    if kind is Kind.BRANCH:
        base = _baseline_of(S)
        apex = _branch_apex(S)
        h = float(distance_to_hyperplane(apex, base))
        side = 1 if base.side_value(apex) > 0 else -1
        return GeneralizedSphere(kind, S, baseline=base, distance_h=h, side=side)
    return GeneralizedSphere(kind, S)


def apply_isometry_sphere(T: Isometry, S: GeneralizedSphere) -> GeneralizedSphere:
    return from_surface(T.surface(S.surface))


def branch_completion(S: GeneralizedSphere) -> ModelSurface:
    """Full carrier of a branch; its outside part is the unit-sphere inverse
    of the opposite branch."""
    if S.kind is not Kind.BRANCH:
        raise InvariantViolation("branch_completion needs a hypersphere branch")
    return S.surface


def other_branch(S: GeneralizedSphere) -> GeneralizedSphere:
    if S.kind is not Kind.BRANCH:
        raise InvariantViolation("other_branch needs a hypersphere branch")
    return hypersphere_branch(S.baseline, S.distance_h, -S.side)


def unit_inverse_surface(S: ModelSurface) -> ModelSurface:
    return euclidean_invert_surface(np.zeros(S.dim), 1.0, S)


# ---------------------------------------------------------------------------
# geodesic / surface intersection


class Regime(str, Enum):
    ON_OBJECT = "on_object"
    ON_OTHER_BRANCH = "on_other_branch"
    IDEAL = "ideal"


@dataclass(frozen=True, eq=False)
class Hit:
    """One intersection of a geodesic with a generalized sphere's carrier.

    ``point`` is the hyperbolic point hit (for ``on_other_branch`` the point on
    the opposite branch); ``factor`` is ``tanh(d/2)``, ``coth(d/2)`` or 1
    measured from the reference point; ``param`` is the signed coordinate
    along the translated diameter.
    """

    point: ModelPoint
    regime: Regime
    factor: float
    param: float


def line_surface_params(d: Vector, S: ModelSurface) -> list[float]:
    """Parameters ``t`` with ``t d`` on ``S`` (``d`` a unit vector)."""
    if isinstance(S, Plane):
        nd = float(S.unit_normal @ d)
        if abs(nd) < 1e-15:
            return []
        return [S.offset / nd]
    c = S.center
    b = float(d @ c)
    k = float(c @ c) - S.radius**2
    disc = b * b - k
    if disc < 0.0:
        if disc > -1e-14 * max(1.0, b * b):
            return [b, b]
        return []
    r = math.sqrt(disc)
    # numerically stable pair with product k
    t1 = b + r if b >= 0 else b - r
    if t1 == 0.0:
        return [0.0, 0.0]
    return sorted([t1, k / t1])


def intersect_geodesic(
    G: Geodesic, S: GeneralizedSphere, through: Optional[ModelPoint] = None
) -> list[Hit]:
    """Intersections of ``G`` with the full carrier of ``S``.

    The reference point (``through`` if given, else the apex of ``G``) is moved
    to the origin so ``G`` becomes a diameter; hits are labeled by the norm of
    the Euclidean intersection parameter.
    """
    ref = through if through is not None else G.apex()
    T = translate_to_origin(ref)
    d = T.vector(G.u.coords)
    d = d / np.linalg.norm(d)
    carrier = T.surface(S.surface)
    hits = []
    for t in line_surface_params(d, carrier):
        a = abs(t)
        if abs(a - 1.0) <= IDEAL_TOL:
            x = ModelPoint(math.copysign(1.0, t) * d, ideal=True)
            hits.append(Hit(apply_isometry_point(T, x), Regime.IDEAL, 1.0, t))
        elif a < 1.0:
            hits.append(Hit(apply_isometry_point(T, ModelPoint(t * d)), Regime.ON_OBJECT, a, t))
        elif S.kind is Kind.BRANCH:
            hits.append(Hit(apply_isometry_point(T, ModelPoint(d / t)), Regime.ON_OTHER_BRANCH, a, t))
    return hits


# ---------------------------------------------------------------------------
# sampling helpers


def _random_unit(rng: np.random.Generator, n: int) -> Vector:
    while True:
        v = rng.standard_normal(n)
        nv = np.linalg.norm(v)
        if nv > 1e-12:
            return v / nv


def sample_on_object(
    S: GeneralizedSphere, count: int, rng: np.random.Generator, margin: float = 1e-3
) -> list[ModelPoint]:
    """Random points of ``S`` itself (carrier inside the ball, ``|x| < 1 - margin``)."""
    surf = S.surface
    n = surf.dim
    lim = 1.0 - margin
    out: list[ModelPoint] = []
    if isinstance(surf, Plane):
        d = surf.offset
        if abs(d) >= lim:
            raise NumericError("object has no points inside the sampling margin")
        rad = math.sqrt(lim * lim - d * d)
        while len(out) < count:
            w = _random_unit(rng, n)
            w = w - (w @ surf.unit_normal) * surf.unit_normal
            if np.linalg.norm(w) < 1e-12:
                continue
            r = rad * rng.random() ** (1.0 / (n - 1))
            out.append(ModelPoint(d * surf.unit_normal + r * w / np.linalg.norm(w)))
        return out
    c, rho = surf.center, surf.radius
    nc = float(np.linalg.norm(c))
    if nc <= 1e-12:
        if rho >= lim:
            raise NumericError("object has no points inside the sampling margin")
        return [ModelPoint(rho * _random_unit(rng, n)) for _ in range(count)]
    # directions d from the center with |c + rho d| < lim form a cap about -c
    axis = -c / nc
    kappa = (lim * lim - nc * nc - rho * rho) / (2.0 * rho * nc)
    if kappa <= -1.0:
        raise NumericError("object has no points inside the sampling margin")
    theta_max = math.acos(max(-1.0, min(1.0, -kappa)))
    while len(out) < count:
        w = _random_unit(rng, n)
        w = w - (w @ axis) * axis
        nw = np.linalg.norm(w)
        if nw < 1e-12:
            continue
        th = theta_max * rng.random()
        x = c + rho * (math.cos(th) * axis + math.sin(th) * w / nw)
        if float(np.linalg.norm(x)) < lim:
            out.append(ModelPoint(x))
    return out


def sample_on_hyperplane(
    H: Hyperplane, count: int, rng: np.random.Generator, max_distance: float = 3.0
) -> list[ModelPoint]:
    """Random points of ``H`` within hyperbolic distance ``max_distance`` of its midpoint."""
    mid = ModelPoint(H.midpoint())
    T = translate_to_origin(mid)
    img = T.surface(H.surface)
    nrm = img.unit_normal if isinstance(img, Plane) else _unit(img.center)
    out = []
    for _ in range(count):
        w = _random_unit(rng, H.dim)
        w = w - (w @ nrm) * nrm
        nw = np.linalg.norm(w)
        if nw < 1e-12:
            continue
        s = rng.uniform(0.0, max_distance)
        X = apply_isometry_point(T, ModelPoint(math.tanh(s / 2.0) * w / nw))
        out.append(ModelPoint(_snap_to_carrier(X.coords, H.surface)))
    return out


def _snap_to_carrier(x: Vector, S: ModelSurface) -> Vector:
    """One Newton step onto ``S`` with the defect evaluated exactly.

    Mapping a point through an isometry costs a few ulps of the carrier's
    center; near a large carrier that leaves it ~1e-14 off the surface.
    """
    if isinstance(S, Plane):
        f = float(sum(Fraction(float(a)) * Fraction(float(b)) for a, b in zip(x, S.unit_normal)) - Fraction(S.offset))
        return x - f * S.unit_normal
    d = x - S.center
    f = float(sum((Fraction(float(a)) - Fraction(float(c))) ** 2 for a, c in zip(x, S.center)) - Fraction(S.radius) ** 2)
    return x - f * d / (2.0 * float(d @ d))

