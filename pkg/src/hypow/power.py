"""Power of a point with respect to spheres, horospheres and hypersphere branches.

The primary quantity is the *signed* power: the Euclidean power of the origin
with respect to the carrier after the query point has been moved to the
origin.  Its absolute value is the tanh/tanh (or tanh/coth) secant product;
the sign is negative when the moved origin is enclosed by the carrier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (
    CarrierDegenerate,
    IdealPointArgument,
    InvariantViolation,
    NoIntersection,
    NoTangent,
    UnsupportedKind,
)
from .model import (
    IDEAL_TOL,
    Geodesic,
    GeneralizedSphere,
    Kind,
    ModelPoint,
    ModelSurface,
    Plane,
    Sphere,
    geodesic_through,
    hyperbolic_distance,
    line_surface_params,
    sample_on_object,
    surface_coefficients,
    translate_to_origin,
    unit_inverse_surface,
)

#: |signed| at or below this counts as lying on the object
ON_TOL = 1e-10
#: |product - 1| at or below this counts as lying on a branch's baseline
BASELINE_TOL = 1e-9

INF = math.inf
#: above this |signed| the transform loses digits; the value is re-evaluated exactly
EXACT_ABOVE = 16.0


class PowerRegime(str, Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"
    ON_OBJECT = "on_object"
    ON_OTHER_BRANCH = "on_other_branch"
    ON_BASELINE = "on_baseline"


@dataclass(frozen=True)
class PowerValue:
    signed: float
    product: float
    regime: PowerRegime

    def as_dict(self) -> dict:
        return {"signed": self.signed, "product": self.product, "regime": self.regime.value}


def euclidean_power(p, S: Sphere) -> float:
    p = np.asarray(p, dtype=float)
    d = p - S.center
    return float(d @ d) - S.radius**2


def closed_form_power(a, surface: ModelSurface):
    """Signed power of model point(s) ``a`` without any transformation.

    With ``surface = {alpha|x|^2 - 2<beta,x> + gamma = 0}`` the value is
    ``(alpha|a|^2 - 2<a,beta> + gamma) / (alpha - 2<a,beta> + gamma|a|^2)``.
    Accepts an ``(..., n)`` array and broadcasts.
    """
    a = np.asarray(a, dtype=float)
    alpha, beta, gamma = surface_coefficients(surface)
    s = np.sum(a * a, axis=-1)
    lin = 2.0 * (a @ beta)
    num = alpha * s - lin + gamma
    den = alpha - lin + gamma * s
    with np.errstate(divide="ignore", invalid="ignore"):
        return num / den


def exact_closed_form_power(a, surface: ModelSurface) -> float:
    """``closed_form_power`` for one point, evaluated in rational arithmetic
    and rounded once.

    Near a branch's opposite sheet the denominator cancels and the power's
    gradient grows like its square; float evaluation then loses up to
    ~1e-12 relative accuracy.
    """
    x = [Fraction(float(v)) for v in a]
    if isinstance(surface, Sphere):
        alpha = Fraction(1)
        beta = [Fraction(float(v)) for v in surface.center]
        gamma = sum(b * b for b in beta) - Fraction(surface.radius) ** 2
    else:
        alpha = Fraction(0)
        beta = [-Fraction(float(v)) / 2 for v in surface.unit_normal]
        gamma = -Fraction(surface.offset)
    s = sum(v * v for v in x)
    lin = 2 * sum(u * v for u, v in zip(x, beta))
    den = alpha - lin + gamma * s
    if den == 0:
        return INF
    return float((alpha * s - lin + gamma) / den)


def transform_power(P: ModelPoint, surface: ModelSurface) -> float:
    """Euclidean power of the origin w.r.t. the carrier moved by ``P -> 0``."""
    if P.ideal:
        raise IdealPointArgument("power is defined for finite points only")
    img = translate_to_origin(P).surface(surface)
    if isinstance(img, Plane):
        raise CarrierDegenerate("carrier passes through the inversion center of the translation")
    c = img.center
    nc = float(np.linalg.norm(c))
    return (nc - img.radius) * (nc + img.radius)


def _check_kind(S: GeneralizedSphere) -> None:
    if S.kind is Kind.GEODESIC:
        raise UnsupportedKind("power with respect to a geodesic hyperplane is not defined")


def signed_power(P: ModelPoint, S: GeneralizedSphere) -> PowerValue:
    _check_kind(S)
    if S.kind is Kind.BRANCH:
        # on the opposite branch the power is infinite; detect it through the
        # reciprocal value to avoid dividing by a vanishing denominator
        try:
            other = transform_power(P, unit_inverse_surface(S.surface))
        except CarrierDegenerate:
            other = None
        if other is not None and abs(other) <= ON_TOL:
            return PowerValue(INF, INF, PowerRegime.ON_OTHER_BRANCH)
    try:
        signed = transform_power(P, S.surface)
    except CarrierDegenerate:
        signed = _secant_fallback(P, S)
        if math.isinf(signed):
            return PowerValue(INF, INF, PowerRegime.ON_OTHER_BRANCH)
    if abs(signed) > EXACT_ABOVE and math.isfinite(signed):
        signed = exact_closed_form_power(P.coords, S.surface)
    product = abs(signed)
    if product <= ON_TOL:
        return PowerValue(signed, product, PowerRegime.ON_OBJECT)
    if S.kind is Kind.BRANCH and abs(product - 1.0) <= BASELINE_TOL:
        return PowerValue(signed, product, PowerRegime.ON_BASELINE)
    return PowerValue(signed, product, PowerRegime.INTERIOR if signed < 0 else PowerRegime.EXTERIOR)


def _secant_fallback(P: ModelPoint, S: GeneralizedSphere) -> float:
    """Secant product along an arbitrary geodesic through ``P``."""
    n = P.dim
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        G = geodesic_through(P, ModelPoint(e, ideal=True)) if np.linalg.norm(P.coords - e) > 1e-9 else None
        if G is None:
            continue
        try:
            return secant_product(P, S, G)
        except NoIntersection:
            continue
    raise CarrierDegenerate("no secant through the point meets the carrier")


def branch_power(P: ModelPoint, S: GeneralizedSphere) -> PowerValue:
    """Power with respect to a hypersphere branch, measured against its full
    carrier: 0 on the branch, +inf on the opposite branch, 1 on the baseline."""
    if S.kind is not Kind.BRANCH:
        raise UnsupportedKind("branch_power needs a hypersphere branch")
    return signed_power(P, S)


def tangent_length(P: ModelPoint, S: GeneralizedSphere) -> float:
    s = signed_power(P, S).signed
    if not 0.0 < s < 1.0:
        raise NoTangent(f"no real tangent from this point (signed power {s!r})")
    return 2.0 * math.atanh(math.sqrt(s))


def secant_product(P: ModelPoint, S: GeneralizedSphere, G: Geodesic) -> float:
    """Signed secant product along ``G`` through ``P``.

    After ``P`` is moved to the origin the secant is a diameter and each
    carrier hit at parameter ``t`` contributes ``|t|``: that is
    ``tanh(d/2)`` inside the ball and ``coth(d/2)`` for the completion of the
    opposite branch; ideal hits contribute 1.
    """
    _check_kind(S)
    res = G.incidence_residual(P)
    if res > 1e-10:
        raise InvariantViolation(f"geodesic does not pass through the point (residual {res:.2e})")
    T = translate_to_origin(P)
    d = T.vector(G.u.coords)
    d = d / np.linalg.norm(d)
    carrier = T.surface(S.surface)
    ts = line_surface_params(d, carrier)
    if isinstance(carrier, Plane):
        if not ts:
            raise NoIntersection("secant misses the carrier")
        return INF
    if len(ts) < 2:
        raise NoIntersection("secant misses the carrier")
    prod = 1.0
    for t in ts:
        a = abs(t)
        prod *= 1.0 if abs(a - 1.0) <= IDEAL_TOL else a
    return math.copysign(prod, ts[0] * ts[1]) if prod != 0.0 else 0.0


# ---------------------------------------------------------------------------
# distance-based secant sampling (independent of the translation route)


@dataclass(frozen=True)
class SecantSample:
    product: float
    first: ModelPoint
    second: Optional[ModelPoint]
    regimes: tuple[str, str]

    @property
    def cross_branch(self) -> bool:
        return "on_other_branch" in self.regimes


def tanh_half_distance(p: np.ndarray, x: np.ndarray) -> float:
    """``tanh(d(p, x)/2)`` from coordinates; exact 1 for an ideal ``x``.

    Unlike going through ``arccosh`` this keeps full absolute accuracy for
    points next to the boundary, where the factor is ``1 - O(1 - |x|)``.
    """
    diff = p - x
    dd = float(diff @ diff)
    den = dd + max(1.0 - float(p @ p), 0.0) * max(1.0 - float(x @ x), 0.0)
    return math.sqrt(dd / den) if den > 0.0 else 1.0


def _factor(P: ModelPoint, x: np.ndarray) -> tuple[float, str, Optional[ModelPoint]]:
    r = float(np.linalg.norm(x))
    p = P.coords
    if r <= 1.0:
        f = tanh_half_distance(p, x)
        if 1.0 - r <= IDEAL_TOL:
            return f, "ideal", None
        return f, "on_object", ModelPoint(x)
    # outside the ball: the hit completes the opposite branch
    b = x / (r * r)
    f = 1.0 / tanh_half_distance(p, b)
    if r - 1.0 <= IDEAL_TOL:
        return f, "ideal", None
    return f, "on_other_branch", ModelPoint(b)


def _second_hit(G: Geodesic, S: ModelSurface, A: np.ndarray) -> Optional[np.ndarray]:
    """The other intersection of the geodesic carrier with ``S`` given one hit
    ``A``, by reflecting ``A`` across the line of symmetry."""
    u, v = G.u.coords, G.v.coords
    circ = G.circle()
    # orthonormal basis of the plane holding the geodesic
    e1 = u
    w = v - (v @ e1) * e1
    nw = np.linalg.norm(w)
    if circ is None or nw < 1e-12:
        if isinstance(S, Plane):
            return None
        e = u
        cp = S.center
        s = 2.0 * float(e @ cp) - float(A @ e)
        return s * e
    e2 = w / nw
    proj = lambda x: (x @ e1) * e1 + (x @ e2) * e2  # noqa: E731
    cg, _ = circ
    if isinstance(S, Plane):
        npj = proj(S.unit_normal)
        if np.linalg.norm(npj) < 1e-15:
            return None
        npj = npj / np.linalg.norm(npj)
        chord = (npj @ e1) * e2 - (npj @ e2) * e1
        return A - 2.0 * float((A - cg) @ chord) * chord
    cp = proj(S.center)
    ell = cp - cg
    nl = np.linalg.norm(ell)
    if nl < 1e-15:
        return None
    ell = ell / nl
    rel = A - cg
    return cg + 2.0 * float(rel @ ell) * ell - rel


def sample_secant_products(
    P: ModelPoint, S: GeneralizedSphere, count: int, rng: np.random.Generator
) -> list[SecantSample]:
    """Products along ``count`` random secants through ``P``.

    Each secant is the geodesic through ``P`` and a random point ``A`` of the
    object; the second carrier hit is found in original model coordinates and
    every factor comes from ``hyperbolic_distance``.
    """
    _check_kind(S)
    out: list[SecantSample] = []
    guard = 0
    while len(out) < count:
        guard += 1
        if guard > 100 * count + 100:
            raise NoIntersection("could not draw enough secants")
        (A,) = sample_on_object(S, 1, rng)
        if hyperbolic_distance(P, A) < 1e-6:
            continue
        G = geodesic_through(P, A)
        X2 = _second_hit(G, S.surface, A.coords)
        f1, r1, _ = _factor(P, A.coords)
        if X2 is None:
            out.append(SecantSample(INF, A, None, (r1, "infinity")))
            continue
        f2, r2, B = _factor(P, X2)
        out.append(SecantSample(f1 * f2, A, B, (r1, r2)))
    return out
