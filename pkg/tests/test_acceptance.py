"""Acceptance criteria 1-10.

Each test records one pass/fail line (printed in the terminal summary) and
then asserts. Tolerances are the stated ones; nothing is relaxed here.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import (
    circle_cos,
    radical_oracle,
    random_branch,
    random_horosphere,
    random_hyperplane,
    random_object,
    random_point,
    random_sphere,
    random_unit,
    side_oracle,
)
from golden_cases import CASES, produce, read_expected
from hypow.diagram import Arrangement, assign_cells, disk_area, estimate_density
from hypow.errors import DegeneratePair, NoCommonPoint, OutsideDomain
from hypow.inversion import (
    InversionSphere,
    domain_boundary,
    euclidean_invert_sphere,
    hyperbolic_domain_radius,
    hyperbolic_invert_cycle,
    hyperbolic_invert_point,
    negative_invert_sphere,
)
from hypow.model import (
    Kind,
    ModelPoint,
    Plane,
    Sphere,
    euclidean_invert_vector,
    from_surface,
    geodesic_through,
    horosphere_from,
    hyperbolic_distance,
    ideal_point,
    other_branch,
    point,
    sample_on_hyperplane,
    sample_on_object,
    sphere_from_center_radius,
    surfaces_close,
    translate_to_origin,
)
from hypow.power import (
    PowerRegime,
    branch_power,
    closed_form_power,
    euclidean_power,
    sample_secant_products,
    signed_power,
    transform_power,
)
from hypow.radical import RadicalKind, incidence_residual, radical_center, radical_surface

SECANTS = 64


def finish(acceptance, number, ok, detail):
    acceptance(number, ok, detail)
    assert ok, detail


def generic_config(rng, n, kind=None):
    """A random object and a point off the object and off its opposite sheet."""
    while True:
        S = random_object(rng, n, kind)
        P = random_point(rng, n, 0.9)
        v = signed_power(P, S)
        if v.regime in (PowerRegime.EXTERIOR, PowerRegime.INTERIOR):
            return P, S, v


# ---------------------------------------------------------------------------
# 1


def test_criterion_1_secant_invariance(acceptance):
    rng = np.random.default_rng(1001)
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for n, m in ((2, 1000), (3, 200)):
        for _ in range(m):
            P, S, _ = generic_config(rng, n)
            prods = [s.product for s in sample_secant_products(P, S, SECANTS, rng)]
            assert len(prods) == SECANTS
            worst = max(worst, max(prods) - min(prods))
            count += 1
    dt = time.perf_counter() - t0
    ok = worst < 1e-9 and dt < 30.0
    finish(acceptance, 1, ok, f"{count} configurations, max spread {worst:.3e} (< 1e-9), {dt:.1f} s (< 30 s)")


# ---------------------------------------------------------------------------
# 2


def test_criterion_2_branch_power(acceptance):
    rng = np.random.default_rng(1002)
    worst, count, tries = 0.0, 0, 0
    while count < 500:
        tries += 1
        n = 2 if count % 3 else 3
        P, S, _ = generic_config(rng, n, "hypersphere")
        samples = sample_secant_products(P, S, SECANTS, rng)
        same = [s.product for s in samples if not s.cross_branch]
        cross = [s.product for s in samples if s.cross_branch]
        if not same or not cross:
            continue
        worst = max(worst, max(same + cross) - min(same + cross))
        count += 1
    ok = worst < 1e-9
    finish(acceptance, 2, ok, f"{count} branch configurations ({tries} drawn), "
           f"max same/cross disagreement {worst:.3e} (< 1e-9)")


# ---------------------------------------------------------------------------
# 3


def test_criterion_3_oracle_equivalence(acceptance):
    rng = np.random.default_rng(1003)
    worst = 0.0
    for i in range(1000):
        P, S, v = generic_config(rng, 2 + i % 2)
        a = transform_power(P, S.surface)
        b = float(closed_form_power(P.coords, S.surface))
        sign = -1.0 if v.signed < 0 else 1.0
        prods = [sign * s.product for s in sample_secant_products(P, S, SECANTS, rng)]
        c = max(prods, key=lambda x: abs(x - b))
        worst = max(worst, abs(a - b), abs(a - c), abs(b - c))
    ok = worst < 1e-9
    finish(acceptance, 3, ok, f"1000 cases, max pairwise difference {worst:.3e} (< 1e-9)")


# ---------------------------------------------------------------------------
# 4


def test_criterion_4_reciprocity(acceptance):
    rng = np.random.default_rng(1004)
    worst_rec, worst_base, count = 0.0, 0.0, 0
    while count < 500:
        n = 2 + count % 2
        S = random_branch(rng, n)
        P = random_point(rng, n, 0.9)
        a, b = branch_power(P, S), branch_power(P, other_branch(S))
        if not (math.isfinite(a.signed) and math.isfinite(b.signed)) or a.product == 0.0 or b.product == 0.0:
            continue
        worst_rec = max(worst_rec, abs(a.signed * b.signed - 1.0))
        for X in sample_on_hyperplane(S.baseline, 4, rng):
            worst_base = max(worst_base, abs(branch_power(X, S).product - 1.0))
        count += 1
    ok = worst_rec < 1e-9 and worst_base < 1e-9
    finish(acceptance, 4, ok, f"500 cases, reciprocity residual {worst_rec:.3e}, "
           f"baseline residual {worst_base:.3e} (both < 1e-9)")


# ---------------------------------------------------------------------------
# 5


def hyp_point_at(O: ModelPoint, direction, d):
    T = translate_to_origin(O)
    return ModelPoint(T.vector(math.tanh(d / 2.0) * np.asarray(direction)))


def _kind_transitions(rng, per_kind=100):
    """Check properties (2)-(4) on random cycles; returns (checked, failures)."""
    checked, bad = {"sphere": 0, "geodesic": 0, "hypersphere": 0}, []
    while min(checked.values()) < per_kind:
        w = InversionSphere(random_point(rng, 2, 0.6), rng.uniform(0.3, 2.0))
        B = domain_boundary(w).surface
        kind = min(checked, key=checked.get)
        if kind == "sphere":
            S = random_sphere(rng)
        elif kind == "geodesic":
            S = from_surface(random_hyperplane(rng).surface)
        else:
            S = random_branch(rng)
        try:
            img = hyperbolic_invert_cycle(w, S)
        except OutsideDomain:
            continue
        C = img.surface
        if kind == "sphere":
            ok = img.kind is Kind.SPHERE
            for X in sample_on_object(S, 4, rng):
                y = hyperbolic_invert_point(w, X).coords
                ok &= abs(float(np.linalg.norm(y - C.center)) - C.radius) < 1e-9
        elif isinstance(C, Plane):
            # a line meets a circle orthogonally iff it runs through its center
            resid = abs(float(C.unit_normal @ B.center) - C.offset)
            ok = resid < 1e-9 if kind == "geodesic" else resid > 1e-6
        else:
            cs = abs(circle_cos(C.center, C.radius, B.center, B.radius))
            ok = cs < 1e-9 if kind == "geodesic" else 1e-6 < cs < 1.0
        if not ok:
            bad.append(kind)
        checked[kind] += 1
    return sum(checked.values()), bad


def test_criterion_5_inversion_contract(acceptance):
    rng = np.random.default_rng(1005)
    worst_eq, worst_inv, count = 0.0, 0.0, 0
    while count < 1000:
        n = 2 + count % 2
        O = random_point(rng, n, 0.9)
        r = rng.uniform(0.2, 3.0)
        P = random_point(rng, n, 0.9)
        w = InversionSphere(O, r)
        if hyperbolic_distance(O, P) <= hyperbolic_domain_radius(r) + 1e-9:
            continue
        Q = hyperbolic_invert_point(w, P)
        lhs = math.tanh(hyperbolic_distance(O, P) / 2.0) * math.tanh(hyperbolic_distance(O, Q) / 2.0)
        worst_eq = max(worst_eq, abs(lhs - math.tanh(r / 2.0) ** 2))
        back = hyperbolic_invert_point(w, Q)
        worst_inv = max(worst_inv, float(np.linalg.norm(back.coords - P.coords)))
        count += 1

    bracket_bad = 0
    for i in range(1000):
        n = 2 + i % 2
        O = random_point(rng, n, 0.7)
        r = rng.uniform(0.2, 3.0)
        w = InversionSphere(O, r)
        dom = hyperbolic_domain_radius(r)
        u = random_unit(rng, n)
        try:
            inside_ok = np.linalg.norm(hyperbolic_invert_point(w, hyp_point_at(O, u, dom + 1e-7)).coords) < 1.0
        except OutsideDomain:
            inside_ok = False
        try:
            hyperbolic_invert_point(w, hyp_point_at(O, u, dom - 1e-7))
            outside_ok = False
        except OutsideDomain:
            outside_ok = True
        bracket_bad += not (inside_ok and outside_ok)

    cycles, kind_bad = _kind_transitions(rng)
    ok = worst_eq < 1e-10 and worst_inv < 1e-10 and bracket_bad == 0 and not kind_bad and cycles >= 300
    finish(acceptance, 5, ok, f"defining equation {worst_eq:.3e}, involution {worst_inv:.3e} (< 1e-10) on 1000 points; "
           f"bracketing failures {bracket_bad}/1000; kind transitions {cycles - len(kind_bad)}/{cycles}")


# ---------------------------------------------------------------------------
# 6

KIND_PAIRS = [(a, b) for i, a in enumerate(("sphere", "horosphere", "hypersphere"))
              for b in ("sphere", "horosphere", "hypersphere")[i:]]


def orthogonality_residual(S) -> float:
    """``| |c|^2 - R^2 - 1 |`` of the stored carrier, evaluated exactly."""
    if isinstance(S, Plane):
        return abs(S.offset)
    c = [Fraction(float(v)) for v in S.center]
    return float(abs(sum(v * v for v in c) - Fraction(S.radius) ** 2 - 1))


def reflect(S, x):
    if isinstance(S, Plane):
        return x - 2.0 * (float(S.unit_normal @ x) - S.offset) * S.unit_normal
    return euclidean_invert_vector(S.center, S.radius**2, x)


def test_criterion_6_radical_hyperplane(acceptance):
    rng = np.random.default_rng(1006)
    t0 = time.perf_counter()
    tally = {"hyperplane": 0, "baseline": 0, "empty": 0, "everywhere": 0}
    worst_orth = worst_gap = worst_perp = 0.0
    empty_mismatch = 0
    failing_pairs = 0
    for i in range(500):
        n = 2 if i % 10 < 7 else 3
        ka, kb = KIND_PAIRS[i % len(KIND_PAIRS)]
        S1, S2 = random_object(rng, n, ka), random_object(rng, n, kb)
        res = radical_surface(S1, S2)
        tally[res.variant.value] += 1
        if res.variant is RadicalKind.EMPTY:
            empty_mismatch += radical_oracle(S1, S2)[0] != "empty"
            continue
        if res.hyperplane is None:
            continue
        H = res.hyperplane.surface
        worst_orth = max(worst_orth, orthogonality_residual(H))
        pair_gap = 0.0
        for X in sample_on_hyperplane(res.hyperplane, 100, rng):
            a, b = signed_power(X, S1).signed, signed_power(X, S2).signed
            pair_gap = max(pair_gap, abs(a - b) if math.isfinite(a) and math.isfinite(b) else math.inf)
        failing_pairs += pair_gap >= 1e-8
        worst_gap = max(worst_gap, pair_gap)
        if S1.kind is Kind.SPHERE and S2.kind is Kind.SPHERE and res.variant is RadicalKind.HYPERPLANE:
            G = geodesic_through(S1.center, S2.center)
            worst_perp = max(worst_perp, G.incidence_residual(ModelPoint(reflect(H, S1.center.coords))))
    dt = time.perf_counter() - t0
    ok = (worst_orth < 1e-9 and worst_gap < 1e-8 and worst_perp < 1e-8 and empty_mismatch == 0 and dt < 60.0)
    finish(acceptance, 6, ok, f"500 pairs {tally}; orthogonality {worst_orth:.3e} (< 1e-9); "
           f"max |pow1-pow2| {worst_gap:.3e} (< 1e-8, {failing_pairs} pairs over); "
           f"perpendicularity {worst_perp:.3e} (< 1e-8); empty verdicts off-oracle {empty_mismatch}; {dt:.1f} s (< 60 s)")


# ---------------------------------------------------------------------------
# 7


def radical_plane(k: Sphere, l: Sphere) -> Plane:
    nrm = l.center - k.center
    rhs = (l.center @ l.center - l.radius**2 - k.center @ k.center + k.radius**2) / 2.0
    s = float(np.linalg.norm(nrm))
    return Plane(nrm / s, rhs / s)


def same_plane(a: Plane, b: Plane, tol: float) -> bool:
    return surfaces_close(a, b, tol) or surfaces_close(a, Plane(-b.unit_normal, -b.offset), tol)


def orthogonal_pair(rng):
    M = rng.standard_normal(2)
    t = random_unit(rng)
    nrm = np.array([-t[1], t[0]])
    a = rng.uniform(0.3, 2.0)
    s1 = rng.uniform(0.2, 3.0) * rng.choice([-1, 1])
    s2 = -a * a / s1
    w1 = InversionSphere(M + s1 * nrm, math.sqrt(a * a + s1 * s1))
    w2 = InversionSphere(M + s2 * nrm, math.sqrt(a * a + s2 * s2))
    tc = rng.uniform(-3.0, 3.0)
    return w1, w2, Sphere(M + tc * nrm, math.sqrt(a * a + tc * tc))


def test_criterion_7_inversion_properties(acceptance):
    rng = np.random.default_rng(1007)
    # radical-axis property: inversion (and negative inversion) centered on the
    # radical hyperplane of k, l maps it to the radical hyperplane of the images
    axis_bad, axis_worst, count = 0, 0.0, 0
    while count < 300:
        n = 2 + count % 2
        k = Sphere(rng.standard_normal(n), rng.uniform(0.3, 2.0))
        l = Sphere(rng.standard_normal(n), rng.uniform(0.3, 2.0))
        if np.linalg.norm(k.center - l.center) < 0.1:
            continue
        H = radical_plane(k, l)
        O = 3.0 * rng.standard_normal(n)
        O = O - (O @ H.unit_normal - H.offset) * H.unit_normal
        if min(abs(euclidean_power(O, k)), abs(euclidean_power(O, l))) < 1e-2:
            continue
        w = InversionSphere(O, rng.uniform(0.3, 3.0))
        for inv in (euclidean_invert_sphere, negative_invert_sphere):
            k2, l2 = inv(w, k), inv(w, l)
            if isinstance(k2, Plane) or isinstance(l2, Plane):
                continue
            axis_bad += not same_plane(H, radical_plane(k2, l2), 1e-8)
            for _ in range(10):
                t = rng.standard_normal(n)
                x = H.offset * H.unit_normal + t - (t @ H.unit_normal) * H.unit_normal
                r = abs(euclidean_power(x, k2) - euclidean_power(x, l2))
                axis_worst = max(axis_worst, r)
        count += 1

    # orthogonal-inversion property: inverting c in either orthogonal circle agrees
    coinc_worst = 0.0
    for _ in range(300):
        w1, w2, c = orthogonal_pair(rng)
        i1, i2 = euclidean_invert_sphere(w1, c), euclidean_invert_sphere(w2, c)
        if isinstance(i1, Plane) or isinstance(i2, Plane):
            d = 0.0 if surfaces_close(i1, i2, 1e-10) else math.inf
        else:
            # deviation on the scale of the image, the measure surfaces_close uses
            d = max(float(np.linalg.norm(i1.center - i2.center)) / max(1.0, float(np.linalg.norm(i1.center))),
                    abs(i1.radius - i2.radius) / max(1.0, i1.radius))
        coinc_worst = max(coinc_worst, d)

    ok = axis_bad == 0 and axis_worst < 1e-8 and coinc_worst < 1e-10
    finish(acceptance, 7, ok, f"radical-axis property: 300 instances, {axis_bad} axis mismatches, "
           f"equal-power residual {axis_worst:.3e} (< 1e-8); orthogonal-inversion property: 300 instances, "
           f"max scaled deviation {coinc_worst:.3e} (< 1e-10)")


# ---------------------------------------------------------------------------
# 8


def test_criterion_8_radical_center(acceptance):
    rng = np.random.default_rng(1008)
    makers = (random_sphere, random_horosphere, random_branch)
    worst, count, skipped = 0.0, 0, 0
    while count < 200:
        S = [makers[int(rng.integers(3))](rng) for _ in range(3)]
        try:
            C = radical_center(*S)
        except (DegeneratePair, NoCommonPoint):
            skipped += 1
            continue
        for a, b in ((0, 1), (0, 2), (1, 2)):
            H = radical_surface(S[a], S[b]).hyperplane
            worst = max(worst, incidence_residual(H, C.coords))
        count += 1
    ok = worst < 1e-8
    finish(acceptance, 8, ok, f"200 triples ({skipped} without a common point skipped), "
           f"max incidence residual {worst:.3e} (< 1e-8)")


# ---------------------------------------------------------------------------
# 9


def test_criterion_9_power_diagram(acceptance):
    r_ball, r_clip = 0.8, 2.0
    C = point(0.2, -0.1)
    A = Arrangement(2, {0: sphere_from_center_radius(C, r_ball)}, clip=(C, r_clip))
    exact_area = 4.0 * math.pi * math.sinh(r_ball / 2.0) ** 2
    exact_density = exact_area / (4.0 * math.pi * math.sinh(r_clip / 2.0) ** 2)
    t0 = time.perf_counter()
    rep = estimate_density(A, samples=1_000_000, seed=2024)
    dt = time.perf_counter() - t0
    z_area = abs(rep.cells[0].object_area - exact_area) / rep.cells[0].object_area_se
    z_density = abs(rep.density - exact_density) / rep.density_se

    B = Arrangement(2, {
        0: sphere_from_center_radius(point(0.3, 0.2), 0.6),
        1: sphere_from_center_radius(point(-0.4, 0.1), 0.9),
        2: horosphere_from(ideal_point(0.0, -1.0), point(0.05, -0.3)),
        3: sphere_from_center_radius(point(0.1, 0.6), 0.3),
    })
    rng = np.random.default_rng(2025)
    rr = 0.999 * np.sqrt(rng.random(100_000))
    th = rng.uniform(0.0, 2.0 * math.pi, 100_000)
    X = np.stack([rr * np.cos(th), rr * np.sin(th)], axis=1)
    agree = float(np.mean(assign_cells(X, B) == side_oracle(B, X)))

    assert abs(disk_area(r_ball) - exact_area) < 1e-12
    ok = z_area < 3.0 and z_density < 3.0 and dt < 60.0 and agree >= 0.999
    finish(acceptance, 9, ok, f"single ball at 1e6 samples: area {z_area:.2f} SE, density {z_density:.2f} SE (< 3), "
           f"{dt:.1f} s (< 60 s); radical-side agreement {agree:.5f} (>= 0.999)")


# ---------------------------------------------------------------------------
# 10


def test_criterion_10_cli_determinism(acceptance):
    lines = []
    ok = True
    for case in CASES:
        first, second = produce(case), produce(case)
        expected = read_expected(case)
        same_runs = first == second
        same_golden = first == expected
        ok &= same_runs and same_golden
        lines.append(f"{case}: {len(first)} files, runs equal {same_runs}, golden equal {same_golden}")
    finish(acceptance, 10, ok, "; ".join(lines))


@pytest.mark.parametrize("case", sorted(CASES))
def test_golden_files(case):
    """Per-file diff for a readable failure when a golden output drifts."""
    got, expected = produce(case), read_expected(case)
    assert sorted(got) == sorted(expected)
    for name in expected:
        assert got[name] == expected[name], f"{case}/{name} differs from the golden file"
