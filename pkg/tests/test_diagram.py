import math

import numpy as np
import pytest

from conftest import random_isometry, side_oracle
from hypow.diagram import (
    Arrangement,
    CellReport,
    assign_cell,
    assign_cells,
    body_contains,
    cell_boundaries_2d,
    disk_area,
    estimate_density,
    power_matrix,
)
from hypow.errors import EmptyArrangement, InvariantViolation, UnsupportedDimension
from hypow.model import (
    Hyperplane,
    ModelPoint,
    Plane,
    apply_isometry_point,
    apply_isometry_sphere,
    from_surface,
    horosphere_from,
    hypersphere_branch,
    ideal_point,
    origin,
    point,
    sample_on_hyperplane,
    sphere_from_center_radius,
)
from hypow.power import signed_power
from hypow.radical import RadicalKind, incidence_residual, radical_center


def uniform_disk(rng, m, radius=0.999):
    r = radius * np.sqrt(rng.random(m))
    th = rng.uniform(0.0, 2.0 * math.pi, m)
    return np.stack([r * np.cos(th), r * np.sin(th)], axis=1)


def sym_pair():
    return Arrangement(2, {
        0: sphere_from_center_radius(point(0.0, 0.4), 0.5),
        1: sphere_from_center_radius(point(0.0, -0.4), 0.5),
    }, clip=(origin(), 2.5))


def generic_scene():
    return Arrangement(2, {
        0: sphere_from_center_radius(point(0.3, 0.2), 0.6),
        1: sphere_from_center_radius(point(-0.4, 0.1), 0.9),
        2: horosphere_from(ideal_point(0.0, -1.0), point(0.05, -0.3)),
    }, clip=(origin(), 3.0))


class TestAssign:
    def test_single_object(self):
        A = Arrangement(2, {0: sphere_from_center_radius(point(0.2, 0.1), 0.4)})
        X = uniform_disk(np.random.default_rng(0), 500)
        assert np.all(assign_cells(X, A) == 0)
        assert assign_cell(point(-0.7, 0.3), A) == 0

    def test_symmetric_pair(self):
        A = sym_pair()
        assert assign_cell(point(0.3, 0.2), A) == 0
        assert assign_cell(point(-0.5, -0.01), A) == 1
        for x in (-0.8, 0.0, 0.45):
            assert assign_cell(point(x, 0.0), A) == 0

    def test_empty(self):
        A = Arrangement(2, {})
        with pytest.raises(EmptyArrangement):
            assign_cell(origin(), A)
        with pytest.raises(EmptyArrangement):
            assign_cells(np.zeros((1, 2)), A)

    def test_geodesic_rejected(self):
        with pytest.raises(InvariantViolation):
            Arrangement(2, {0: from_surface(Plane([1.0, 0.0], 0.0))})

    def test_consistency_with_scalar_power(self):
        A = Arrangement(2, {
            3: sphere_from_center_radius(point(0.3, 0.2), 0.6),
            1: hypersphere_branch(Hyperplane.through_origin([1.0, 1.0]), 0.4, -1),
            2: horosphere_from(ideal_point(0.0, -1.0), point(0.05, -0.3)),
        })
        rng = np.random.default_rng(1)
        X = uniform_disk(rng, 400, 0.95)
        vec = assign_cells(X, A)
        for x, v in zip(X, vec):
            P = ModelPoint(x)
            i = assign_cell(P, A)
            assert i == v
            pi = signed_power(P, A.objects[i]).signed
            for S in A.objects.values():
                assert pi <= signed_power(P, S).signed + 1e-12

    def test_power_matrix_infinite_on_opposite_sheet(self):
        S = hypersphere_branch(Hyperplane.through_origin([0.0, 1.0]), math.log(3.0), 1)
        A = Arrangement(2, {0: S})
        M = power_matrix(np.array([[0.0, -0.5], [0.0, 0.5]]), A)
        assert M[0, 0] == math.inf or abs(M[0, 0]) > 1e12
        assert abs(M[1, 0]) < 1e-15

    def test_radical_side_agreement(self):
        A = generic_scene()
        X = uniform_disk(np.random.default_rng(2), 100_000)
        agree = np.mean(assign_cells(X, A) == side_oracle(A, X))
        assert agree >= 0.999

    def test_boundary_coherence(self):
        A = sym_pair()
        for (i, j, res) in cell_boundaries_2d(A):
            H = res.hyperplane
            rng = np.random.default_rng(3)
            for X in sample_on_hyperplane(H, 50, rng):
                a = signed_power(X, A.objects[i]).signed
                b = signed_power(X, A.objects[j]).signed
                assert abs(a - b) < 1e-8
                assert assign_cell(X, A) == min(i, j)


class TestBoundaries:
    def test_two_spheres(self):
        out = cell_boundaries_2d(sym_pair())
        assert len(out) == 1 and out[0][:2] == (0, 1)
        assert out[0][2].variant is RadicalKind.HYPERPLANE

    def test_concurrent(self):
        A = Arrangement(2, {
            0: sphere_from_center_radius(point(0.3, 0.2), 0.6),
            1: sphere_from_center_radius(point(-0.4, 0.1), 0.9),
            2: sphere_from_center_radius(point(0.05, -0.5), 0.4),
        })
        walls = cell_boundaries_2d(A)
        assert len(walls) == 3
        C = radical_center(*A.objects.values())
        for _, _, res in walls:
            assert incidence_residual(res.hyperplane, C.coords) < 1e-8

    def test_concentric_tagged(self):
        C = point(0.1, 0.1)
        A = Arrangement(2, {0: sphere_from_center_radius(C, 0.3), 1: sphere_from_center_radius(C, 0.8)})
        assert cell_boundaries_2d(A)[0][2].variant is RadicalKind.EMPTY


class TestBodies:
    def test_disk_area(self):
        assert abs(disk_area(1e-4) / (math.pi * 1e-8) - 1.0) < 1e-8
        assert abs(disk_area(2.0) - 2.0 * math.pi * (math.cosh(2.0) - 1.0)) < 1e-12

    def test_hyperball_is_two_sided(self):
        H = Hyperplane.through_origin([0.0, 1.0])
        S = hypersphere_branch(H, 0.5, 1)
        t = math.tanh(0.25)
        X = np.array([[0.0, 0.9 * t], [0.0, -0.9 * t], [0.0, 1.1 * t], [0.0, -1.1 * t]])
        assert list(body_contains(S, X)) == [True, True, False, False]

    def test_ball_and_horoball(self):
        S = sphere_from_center_radius(point(0.2, 0.0), 0.5)
        X = np.array([[0.2, 0.0], [0.9, 0.0]])
        assert list(body_contains(S, X)) == [True, False]
        Hs = horosphere_from(ideal_point(1.0, 0.0), point(0.5, 0.0))
        assert list(body_contains(Hs, np.array([[0.8, 0.0], [0.2, 0.0]]))) == [True, False]


def single_ball(r_ball=0.8, r_clip=2.0):
    C = point(0.2, -0.1)
    return Arrangement(2, {0: sphere_from_center_radius(C, r_ball)}, clip=(C, r_clip)), disk_area(r_ball) / disk_area(r_clip)


class TestDensity:
    def test_single_ball(self):
        A, exact = single_ball()
        rep = estimate_density(A, samples=200_000, seed=5)
        assert abs(rep.density - exact) < 3.0 * rep.density_se
        assert abs(rep.cells[0].density - exact) < 3.0 * rep.cells[0].density_se
        assert abs(rep.clip_area - rep.clip_area_exact) < 0.02 * rep.clip_area_exact

    def test_report_invariants(self):
        rep = estimate_density(generic_scene(), samples=50_000, seed=6)
        assert sum(c.samples for c in rep.cells) == rep.samples
        for c in rep.cells:
            assert 0.0 <= c.density <= 1.0
            assert c.cell_area >= 0.0 and c.object_area >= 0.0
        rows = rep.rows()
        assert rows[-1][0] == "all" and len(rows) == len(rep.cells) + 1
        assert len(CellReport.CSV_HEADER) == len(rows[0])

    def test_empty_objects(self):
        rep = estimate_density(Arrangement(2, {}, clip=(origin(), 1.0)), samples=1000, seed=0)
        assert rep.density == 0.0 and rep.cells == ()

    def test_symmetric_cells(self):
        rep = estimate_density(sym_pair(), samples=200_000, seed=7)
        a, b = rep.cells
        assert abs(a.cell_area - b.cell_area) < 3.0 * math.hypot(a.cell_area_se, b.cell_area_se)

    def test_convergence_rate(self):
        A, _ = single_ball()
        lo = estimate_density(A, samples=10_000, seed=8)
        hi = estimate_density(A, samples=1_000_000, seed=9)
        assert 7.0 < lo.density_se / hi.density_se < 13.0

    def test_isometry_invariance(self):
        A = generic_scene()
        T = random_isometry(np.random.default_rng(10), 2, 0.5)
        B = Arrangement(2, {i: apply_isometry_sphere(T, S) for i, S in A.objects.items()},
                        clip=(apply_isometry_point(T, A.clip[0]), A.clip[1]))
        ra = estimate_density(A, samples=200_000, seed=11)
        rb = estimate_density(B, samples=200_000, seed=12)
        for ca, cb in zip(ra.cells, rb.cells):
            assert abs(ca.density - cb.density) < 3.0 * math.hypot(ca.density_se, cb.density_se) + 1e-12

    def test_deterministic_and_worker_independent(self):
        A = generic_scene()
        r1 = estimate_density(A, samples=100_000, seed=13, chunk=10_000)
        r2 = estimate_density(A, samples=100_000, seed=13, chunk=10_000, workers=4)
        assert r1 == r2
        r3 = estimate_density(A, samples=100_000, seed=14, chunk=10_000)
        assert r3 != r1

    def test_errors(self):
        with pytest.raises(UnsupportedDimension):
            estimate_density(Arrangement(3, {}, clip=(origin(3), 1.0)), samples=10)
        with pytest.raises(InvariantViolation):
            estimate_density(Arrangement(2, {}), samples=10)

