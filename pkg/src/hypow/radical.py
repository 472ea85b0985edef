"""Radical hyperplanes of generalized spheres and radical centers of triples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (
    CarrierDegenerate,
    HypowError,
    DegeneratePair,
    NoCommonPoint,
    NoEqualPowerPoint,
    UnsupportedDimension,
    UnsupportedKind,
)
from .model import (
    GeneralizedSphere,
    Hyperplane,
    Kind,
    ModelPoint,
    ModelSurface,
    Plane,
    Sphere,
    hyperbolic_distance,
    line_surface_params,
    surface_coefficients,
    surfaces_close,
    translate_to_origin,
)
from .power import closed_form_power, transform_power

#: bracket/bisection settings for the equal-power search
SEGMENT_SAMPLES = 65
GRID_SIZE = 64
BISECT_XTOL = 1e-14
EQUAL_POWER_TOL = 1e-12
#: degenerate-pair detection
CONCENTRIC_TOL = 1e-10
#: stay this far inside the ball while searching
SEARCH_RADIUS = 1.0 - 1e-6
#: the exact polish must agree with the constructed hyperplane this closely
POLISH_AGREEMENT = 1e-6


class RadicalKind(str, Enum):
    HYPERPLANE = "hyperplane"
    EMPTY = "empty"
    BASELINE = "baseline"
    EVERYWHERE = "everywhere"


@dataclass(frozen=True, eq=False)
class RadicalResult:
    variant: RadicalKind
    hyperplane: Optional[Hyperplane] = None

    @property
    def has_hyperplane(self) -> bool:
        return self.hyperplane is not None


def _power_gap(x: np.ndarray, S1: GeneralizedSphere, S2: GeneralizedSphere) -> float:
    P = ModelPoint(x)
    try:
        return transform_power(P, S1.surface) - transform_power(P, S2.surface)
    except CarrierDegenerate:
        return math.nan


def _anchor(S: GeneralizedSphere) -> np.ndarray:
    surf = S.surface
    if isinstance(surf, Plane):
        return surf.offset * surf.unit_normal
    return surf.center


def _clip_segment(a: np.ndarray, b: np.ndarray, full_line: bool) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Part of segment (or whole line) ``a b`` inside ``|x| <= SEARCH_RADIUS``."""
    d = b - a
    dd = float(d @ d)
    if dd < 1e-30:
        return None
    # |a + t d|^2 = R^2
    p = float(a @ d) / dd
    q = (float(a @ a) - SEARCH_RADIUS**2) / dd
    disc = p * p - q
    if disc <= 0.0:
        return None
    r = math.sqrt(disc)
    lo, hi = -p - r, -p + r
    if not full_line:
        lo, hi = max(lo, 0.0), min(hi, 1.0)
    if hi - lo <= 1e-12:
        return None
    return a + lo * d, a + hi * d


def _bisect(f, a: np.ndarray, b: np.ndarray, fa: float, xtol: float = BISECT_XTOL) -> np.ndarray:
    lo, hi = 0.0, 1.0
    d = b - a
    scale = max(float(np.linalg.norm(d)), 1e-300)
    while (hi - lo) * scale > xtol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(a + mid * d)
        if fm == 0.0:
            return a + mid * d
        if (fm < 0) == (fa < 0):
            lo, fa = mid, fm
        else:
            hi = mid
    x_lo, x_hi = a + lo * d, a + hi * d
    return x_lo if abs(f(x_lo)) <= abs(f(x_hi)) else x_hi


def _gap_values(X: np.ndarray, S1: GeneralizedSphere, S2: GeneralizedSphere) -> np.ndarray:
    """Closed-form power gap on an array of points, used to locate brackets.

    The sign of each closed-form denominator is returned alongside: a sign
    change there is a pole of the power, not a root of the gap.
    """
    dens = []
    for S in (S1, S2):
        alpha, beta, gamma = surface_coefficients(S.surface)
        dens.append(alpha - 2.0 * (X @ beta) + gamma * np.sum(X * X, axis=-1))
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        gap = closed_form_power(X, S1.surface) - closed_form_power(X, S2.surface)
    return gap, np.sign(dens[0]) * 2 + np.sign(dens[1])


def _search_path(f, pts: np.ndarray, vals: np.ndarray, poles: np.ndarray) -> Optional[np.ndarray]:
    """Refine the first genuine root among sign changes of ``vals`` along ``pts``."""
    ok = np.isfinite(vals)
    for i in range(len(pts) - 1):
        if not (ok[i] and ok[i + 1]) or poles[i] != poles[i + 1]:
            continue
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0 and f(pts[i]) == 0.0:
            return pts[i]
        if (fa < 0) != (fb < 0):
            fa = f(pts[i])
            if not math.isfinite(fa):
                continue
            x = _bisect(f, pts[i], pts[i + 1], fa)
            if abs(f(x)) < EQUAL_POWER_TOL:
                return x
    return None


def equal_power_point(S1: GeneralizedSphere, S2: GeneralizedSphere) -> ModelPoint:
    """A finite point with equal signed power with respect to both spheres.

    Search order: the segment between the carrier centers, the full chord
    through them, then a coarse grid over the plane spanned by the centers
    and the origin; sign changes are refined by bisection.
    """
    for S in (S1, S2):
        if S.kind is Kind.GEODESIC:
            raise UnsupportedKind("radical surfaces of geodesic hyperplanes are not defined")
    n = S1.dim
    a, b = _anchor(S1), _anchor(S2)
    if surfaces_close(S1.surface, S2.surface, 1e-12):
        x = a if np.linalg.norm(a) < SEARCH_RADIUS else a * (0.5 / np.linalg.norm(a))
        return ModelPoint(x)

    f = lambda x: _power_gap(x, S1, S2)  # noqa: E731
    ts = np.linspace(0.0, 1.0, SEGMENT_SAMPLES)
    for full in (False, True):
        seg = _clip_segment(a, b, full)
        if seg is None:
            continue
        p0, p1 = seg
        pts = p0 + ts[:, None] * (p1 - p0)
        found = _search_path(f, pts, *_gap_values(pts, S1, S2))
        if found is not None:
            return ModelPoint(found)

    # grid over the plane through the origin and both anchors
    e1 = b - a if np.linalg.norm(b - a) > 1e-12 else (a if np.linalg.norm(a) > 1e-12 else np.eye(n)[0])
    e1 = e1 / np.linalg.norm(e1)
    w = a - (a @ e1) * e1
    if np.linalg.norm(w) < 1e-12:
        w = np.eye(n)[int(np.argmin(np.abs(e1)))]
        w = w - (w @ e1) * e1
    e2 = w / np.linalg.norm(w)
    g = np.linspace(-SEARCH_RADIUS, SEARCH_RADIUS, GRID_SIZE)
    grid = g[:, None, None] * e1 + g[None, :, None] * e2
    inside = np.linalg.norm(grid, axis=2) < SEARCH_RADIUS
    gv, pv = _gap_values(grid.reshape(-1, n), S1, S2)
    vals = np.where(inside, gv.reshape(GRID_SIZE, GRID_SIZE), np.nan)
    poles = pv.reshape(GRID_SIZE, GRID_SIZE)
    for i in range(GRID_SIZE):
        for pts, v, pl in ((grid[i], vals[i], poles[i]), (grid[:, i], vals[:, i], poles[:, i])):
            if np.count_nonzero(np.isfinite(v)) >= 2:
                found = _search_path(f, pts, v, pl)
                if found is not None:
                    return ModelPoint(found)
    raise NoEqualPowerPoint("no point with equal power was found")


def _degenerate(S1: GeneralizedSphere, S2: GeneralizedSphere) -> Optional[RadicalResult]:
    if surfaces_close(S1.surface, S2.surface, 1e-12):
        return RadicalResult(RadicalKind.EVERYWHERE)
    k1, k2 = S1.kind, S2.kind
    if k1 is Kind.SPHERE and k2 is Kind.SPHERE:
        if hyperbolic_distance(S1.center, S2.center) <= CONCENTRIC_TOL:
            return RadicalResult(RadicalKind.EMPTY)
    if k1 is Kind.BRANCH and k2 is Kind.BRANCH and S1.baseline.same_as(S2.baseline, CONCENTRIC_TOL):
        return RadicalResult(RadicalKind.BASELINE, S1.baseline)
    if k1 is Kind.HOROSPHERE and k2 is Kind.HOROSPHERE:
        if np.linalg.norm(S1.ideal.coords - S2.ideal.coords) <= CONCENTRIC_TOL:
            return RadicalResult(RadicalKind.EMPTY)
    return None


def radical_surface(S1: GeneralizedSphere, S2: GeneralizedSphere) -> RadicalResult:
    """Locus of equal signed power, as a geodesic hyperplane when it exists.

    A point ``Q`` of the locus is moved to the origin; there the locus is the
    Euclidean radical hyperplane of the moved carriers, which passes through
    the origin; its preimage is returned.
    """
    for S in (S1, S2):
        if S.kind is Kind.GEODESIC:
            raise UnsupportedKind("radical surfaces of geodesic hyperplanes are not defined")
    deg = _degenerate(S1, S2)
    if deg is not None:
        return deg
    try:
        Q = equal_power_point(S1, S2)
    except NoEqualPowerPoint:
        return RadicalResult(RadicalKind.EMPTY)
    H = _radical_through(Q, S1, S2)
    if H is None:
        return RadicalResult(RadicalKind.EMPTY)
    if isinstance(H, RadicalResult):
        return H
    # a point found near the boundary makes the translation ill-conditioned;
    # repeat from the equal-power point next to the apex of the first answer
    Q2 = _apex_point(H, S1, S2)
    if Q2 is not None and np.linalg.norm(Q2) < np.linalg.norm(Q.coords):
        H2 = _radical_through(ModelPoint(Q2), S1, S2)
        if isinstance(H2, Hyperplane):
            H = H2
    return RadicalResult(RadicalKind.HYPERPLANE, _polish(H, S1, S2))


def _exact_coefficients(S: ModelSurface) -> tuple[Fraction, list[Fraction], Fraction]:
    if isinstance(S, Sphere):
        beta = [Fraction(float(v)) for v in S.center]
        return Fraction(1), beta, sum(b * b for b in beta) - Fraction(S.radius) ** 2
    return Fraction(0), [-Fraction(float(v)) / 2 for v in S.unit_normal], -Fraction(S.offset)


def _polish(H: Hyperplane, S1: GeneralizedSphere, S2: GeneralizedSphere) -> Hyperplane:
    """Replace ``H`` by the correctly rounded radical hyperplane.

    The locus lies in the pencil spanned by the two carriers and is the
    member orthogonal to the unit sphere (equal quadratic and constant
    coefficients). Solving for it in rational arithmetic removes the
    ~1e-14 drift of the two floating-point translations, which matters
    near a branch's opposite sheet where the power gradient is ~1e10.
    """
    a1, b1, g1 = _exact_coefficients(S1.surface)
    a2, b2, g2 = _exact_coefficients(S2.surface)
    lam, mu = a2 - g2, g1 - a1
    alpha = lam * a1 + mu * a2
    beta = [lam * u + mu * v for u, v in zip(b1, b2)]
    if alpha == 0:
        cand = Plane([float(v) for v in beta], 0.0)
    else:
        center = np.array([float(v / alpha) for v in beta])
        if not np.all(np.isfinite(center)) or float(np.linalg.norm(center)) <= 1.0:
            return H
        cand = Sphere(center, math.sqrt(max(float(center @ center) - 1.0, 0.0)) or 1.0)
    try:
        P = Hyperplane(cand)
    except HypowError:
        return H
    return P if P.same_as(H, POLISH_AGREEMENT) else H


def _radical_through(Q: ModelPoint, S1: GeneralizedSphere, S2: GeneralizedSphere):
    T = translate_to_origin(Q)
    C1, C2 = T.surface(S1.surface), T.surface(S2.surface)
    if not (isinstance(C1, Sphere) and isinstance(C2, Sphere)):
        return None
    normal = C2.center - C1.center
    if np.linalg.norm(normal) < 1e-14:
        return RadicalResult(RadicalKind.EVERYWHERE)
    return Hyperplane(T.surface(Plane(normal, 0.0)))


def _apex_point(H: Hyperplane, S1: GeneralizedSphere, S2: GeneralizedSphere) -> Optional[np.ndarray]:
    """Equal-power point on the diameter through the apex of ``H``."""
    surf = H.surface
    if isinstance(surf, Plane):
        return None
    c = surf.center
    nc = float(np.linalg.norm(c))
    e = c / nc
    apex = (nc - surf.radius) * e
    f = lambda x: _power_gap(x, S1, S2)  # noqa: E731
    fa = f(apex)
    if fa == 0.0:
        return apex
    step = 1e-9
    while step < 0.5:
        lo, hi = apex - step * e, apex + step * e
        if max(np.linalg.norm(lo), np.linalg.norm(hi)) >= SEARCH_RADIUS:
            return None
        flo, fhi = f(lo), f(hi)
        if flo * fa < 0.0:
            return _bisect(f, lo, apex, flo, 0.0)
        if fhi * fa < 0.0:
            return _bisect(f, apex, hi, fa, 0.0)
        step *= 8.0
    return None


# ---------------------------------------------------------------------------
# radical center (plane only)


def _hyperplane_hits_2d(A: Hyperplane, B: Hyperplane) -> list[np.ndarray]:
    a, b = A.surface, B.surface
    if isinstance(a, Plane) and isinstance(b, Plane):
        if abs(a.unit_normal[0] * b.unit_normal[1] - a.unit_normal[1] * b.unit_normal[0]) < 1e-15:
            return []
        return [np.zeros(2)]
    if isinstance(b, Plane):
        a, b = b, a
    if isinstance(a, Plane):
        d = np.array([-a.unit_normal[1], a.unit_normal[0]])
        return [t * d for t in line_surface_params(d, b)]
    c1, c2 = a.center, b.center
    dvec = c2 - c1
    dist = float(np.linalg.norm(dvec))
    if dist < 1e-15:
        return []
    along = (a.radius**2 - b.radius**2 + dist * dist) / (2.0 * dist)
    h2 = a.radius**2 - along * along
    if h2 < 0.0:
        return []
    e = dvec / dist
    perp = np.array([-e[1], e[0]])
    base = c1 + along * e
    h = math.sqrt(h2)
    return [base + h * perp, base - h * perp]


def _crossing_angle(A: Hyperplane, B: Hyperplane, x: np.ndarray) -> float:
    def normal(H):
        S = H.surface
        return S.unit_normal if isinstance(S, Plane) else (x - S.center) / S.radius

    return abs(float(normal(A) @ normal(B)))


def radical_center(S1: GeneralizedSphere, S2: GeneralizedSphere, S3: GeneralizedSphere) -> ModelPoint:
    """Common point of the three pairwise radical geodesics in the plane.

    The two radical geodesics meeting at the widest angle are intersected.
    """
    if S1.dim != 2:
        raise UnsupportedDimension("radical centers are computed in the hyperbolic plane only")
    pairs = [(S1, S2), (S1, S3), (S2, S3)]
    hyps = []
    for a, b in pairs:
        r = radical_surface(a, b)
        if r.hyperplane is None:
            raise DegeneratePair(f"radical locus of a pair is {r.variant.value}")
        hyps.append(r.hyperplane)
    best = None
    for i, j in ((0, 1), (0, 2), (1, 2)):
        for x in _hyperplane_hits_2d(hyps[i], hyps[j]):
            if float(np.linalg.norm(x)) < 1.0 - 1e-12:
                score = _crossing_angle(hyps[i], hyps[j], x)
                if best is None or score < best[0]:
                    best = (score, x)
    if best is None:
        raise NoCommonPoint("radical axes do not meet inside the disk")
    return ModelPoint(best[1])


def incidence_residual(H: Hyperplane, x) -> float:
    """Euclidean distance from ``x`` to the carrier of ``H``."""
    x = np.asarray(x, dtype=float)
    S = H.surface
    if isinstance(S, Plane):
        return abs(float(S.unit_normal @ x) - S.offset)
    return abs(float(np.linalg.norm(x - S.center)) - S.radius)
