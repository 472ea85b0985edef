"""Shared random generators, independent oracles and the acceptance summary."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hypow.diagram import Arrangement
from hypow.model import (
    Hyperplane,
    Isometry,
    ModelPoint,
    OrthogonalMap,
    Plane,
    Sphere,
    horosphere_from,
    hypersphere_branch,
    distance_to_hyperplane,
    sphere_from_center_radius,
    surface_coefficients,
    translate_to_origin,
)
from hypow.power import closed_form_power

# ---------------------------------------------------------------------------
# random objects


def random_point(rng, n=2, max_norm=0.9) -> ModelPoint:
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    return ModelPoint(v * max_norm * rng.random() ** (1.0 / n))


def random_unit(rng, n=2) -> np.ndarray:
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_isometry(rng, n=2, max_norm=0.8) -> Isometry:
    """Translation composed with a random rotation or reflection."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return translate_to_origin(random_point(rng, n, max_norm)).then(Isometry((OrthogonalMap(q),)))


def random_hyperplane(rng, n=2, max_norm=0.6) -> Hyperplane:
    H = Hyperplane(Plane(random_unit(rng, n), 0.0))
    return Hyperplane(translate_to_origin(random_point(rng, n, max_norm)).surface(H.surface))


def random_sphere(rng, n=2):
    return sphere_from_center_radius(random_point(rng, n, 0.7), rng.uniform(0.2, 1.5))


def random_horosphere(rng, n=2):
    u = ModelPoint(random_unit(rng, n), ideal=True)
    return horosphere_from(u, random_point(rng, n, 0.5))


def random_branch(rng, n=2):
    return hypersphere_branch(random_hyperplane(rng, n), rng.uniform(0.2, 1.5), int(rng.choice([-1, 1])))


GENERATORS = {"sphere": random_sphere, "horosphere": random_horosphere, "hypersphere": random_branch}


def random_object(rng, n=2, kind=None):
    if kind is None:
        kind = ("sphere", "horosphere", "hypersphere")[int(rng.integers(3))]
    return GENERATORS[kind](rng, n)


# ---------------------------------------------------------------------------
# oracles


def radical_oracle(S1, S2):
    """Closed-form radical locus of two model carriers.

    With carriers ``alpha|x|^2 - 2<beta,x> + gamma = 0`` the equal-power
    condition factors into a sphere ``|x - C|^2 = |C|^2 - 1`` with
    ``C = -w/A`` or, when ``A = 0``, the plane ``<x, w> = 0``. The locus is
    empty inside the ball when ``|C| <= 1``.
    """
    a1, b1, g1 = surface_coefficients(S1.surface)
    a2, b2, g2 = surface_coefficients(S2.surface)
    A = a1 * g2 - a2 * g1
    w = (a2 - g2) * b1 + (g1 - a1) * b2
    if abs(A) <= 1e-14 * max(1.0, float(np.linalg.norm(w))):
        return ("plane", Plane(w, 0.0))
    C = -w / A
    cc = float(C @ C)
    if cc <= 1.0:
        return ("empty", None)
    return ("sphere", Sphere(C, math.sqrt(cc - 1.0)))


def circle_cos(c1, r1, c2, r2) -> float:
    """Cosine of the crossing angle of two circles (|.| > 1: they do not meet)."""
    d2 = float(np.sum((np.asarray(c1) - np.asarray(c2)) ** 2))
    return (r1 * r1 + r2 * r2 - d2) / (2.0 * r1 * r2)


def side_oracle(A: Arrangement, X: np.ndarray) -> np.ndarray:
    """Winner by pairwise radical-side tests: i beats j on i's side of H_ij."""
    ids = A.ids
    m = len(ids)
    beats = np.ones((len(X), m), dtype=bool)
    for a in range(m):
        for b in range(a + 1, m):
            Si, Sj = A.objects[ids[a]], A.objects[ids[b]]
            kind, surf = radical_oracle(Si, Sj)
            assert kind != "empty"
            H = Hyperplane(surf)
            side = distance_to_hyperplane(X, H, signed=True)
            # orient with one reference point off the hyperplane
            ref = np.array([[0.0, 0.0]]) if abs(distance_to_hyperplane(np.zeros(2), H, signed=True)) > 1e-3 else np.array([[0.5, 0.5]])
            gi = closed_form_power(ref, Si.surface)[0] - closed_form_power(ref, Sj.surface)[0]
            s_ref = distance_to_hyperplane(ref[0], H, signed=True)
            i_wins = (side * s_ref > 0) == (gi < 0)
            beats[:, a] &= i_wins
            beats[:, b] &= ~i_wins
    winner = np.full(len(X), -1)
    rows, cols = np.nonzero(beats)
    winner[rows] = np.asarray(ids)[cols]
    return winner


# ---------------------------------------------------------------------------
# acceptance summary

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one acceptance criterion; printed in the terminal summary."""

    def record(number: int, ok: bool, detail: str) -> None:
        _ACCEPTANCE[number] = (ok, detail)
        print(f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
