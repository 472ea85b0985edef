"""Hyperbolic power diagrams of generalized-sphere arrangements.

Cells are assigned by minimum signed power. Areas and packing densities in
the hyperbolic plane are estimated by Monte Carlo over a clip disk; samples
are uniform in the Euclidean disk and weighted by the conformal area factor
``(2 / (1 - |x|^2))^2``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmptyArrangement, InvariantViolation, UnsupportedDimension
from .model import (
    GeneralizedSphere,
    Kind,
    ModelPoint,
    Sphere,
    distance_to_hyperplane,
    sphere_from_center_radius,
)
from .power import closed_form_power, signed_power
from .radical import RadicalResult, radical_surface

#: powers within this of the minimum count as a tie (lowest id wins)
TIE_TOL = 1e-12
DEFAULT_CHUNK = 65536


@dataclass(frozen=True, eq=False)
class Arrangement:
    """Objects keyed by integer id, plus an optional clip disk ``(center, r_h)``."""

    dimension: int
    objects: dict[int, GeneralizedSphere]
    clip: Optional[tuple[ModelPoint, float]] = None

    def __post_init__(self):
        objs = dict(sorted(self.objects.items()))
        for i, S in objs.items():
            if S.dim != self.dimension:
                raise InvariantViolation(f"object {i} has dimension {S.dim}, expected {self.dimension}")
            if S.kind is Kind.GEODESIC:
                raise InvariantViolation(f"object {i} is a geodesic hyperplane; it has no power")
        object.__setattr__(self, "objects", objs)

    @property
    def ids(self) -> list[int]:
        return list(self.objects)


def assign_cell(P: ModelPoint, A: Arrangement) -> int:
    if not A.objects:
        raise EmptyArrangement("arrangement has no objects")
    vals = [signed_power(P, S).signed for S in A.objects.values()]
    lo = min(vals)
    for i, v in zip(A.ids, vals):
        if v <= lo + TIE_TOL:
            return i
    raise AssertionError("unreachable")


def power_matrix(X: np.ndarray, A: Arrangement) -> np.ndarray:
    """Signed powers of the rows of ``X`` (shape ``(N, n)``), one column per id."""
    X = np.asarray(X, dtype=float)
    cols = [closed_form_power(X, S.surface) for S in A.objects.values()]
    M = np.stack(cols, axis=1) if cols else np.empty((X.shape[0], 0))
    # points on an opposite branch have infinite power
    return np.where(np.isnan(M), np.inf, M)


def assign_cells(X: np.ndarray, A: Arrangement) -> np.ndarray:
    """Vectorized ``assign_cell``; returns an array of ids."""
    if not A.objects:
        raise EmptyArrangement("arrangement has no objects")
    M = power_matrix(X, A)
    lo = M.min(axis=1)
    first = np.argmax(M <= lo[:, None] + TIE_TOL, axis=1)
    return np.asarray(A.ids)[first]


def body_contains(S: GeneralizedSphere, X: np.ndarray) -> np.ndarray:
    """Membership in the closed body bounded by ``S`` (ball, horoball, hyperball)."""
    X = np.asarray(X, dtype=float)
    if S.kind is Kind.BRANCH:
        return distance_to_hyperplane(X, S.baseline) <= S.distance_h
    return closed_form_power(X, S.surface) <= 0.0


def disk_area(r_h: float) -> float:
    """Area of a hyperbolic disk of radius ``r_h``."""
    return 4.0 * math.pi * math.sinh(r_h / 2.0) ** 2


@dataclass(frozen=True)
class CellStats:
    id: int
    samples: int
    cell_area: float
    cell_area_se: float
    object_area: float
    object_area_se: float
    density: float
    density_se: float


@dataclass(frozen=True)
class CellReport:
    cells: tuple[CellStats, ...]
    samples: int
    seed: int
    clip_area: float
    clip_area_exact: float
    covered_area: float
    covered_area_se: float
    density: float
    density_se: float

    CSV_HEADER = (
        "id", "samples", "cell_area", "cell_area_se", "object_area",
        "object_area_se", "density", "density_se",
    )

    def rows(self) -> list[tuple]:
        out = [
            (c.id, c.samples, c.cell_area, c.cell_area_se, c.object_area,
             c.object_area_se, c.density, c.density_se)
            for c in self.cells
        ]
        out.append(("all", self.samples, self.clip_area, 0.0, self.covered_area,
                    self.covered_area_se, self.density, self.density_se))
        return out


@dataclass
class _Sums:
    """Per-id running sums; ``x`` is the weighted cell indicator and ``y = x*b``."""

    m: int
    count: np.ndarray = field(init=False)
    sx: np.ndarray = field(init=False)
    sxx: np.ndarray = field(init=False)
    sy: np.ndarray = field(init=False)
    sxy: np.ndarray = field(init=False)
    sw: float = 0.0
    sww: float = 0.0

    def __post_init__(self):
        z = lambda: np.zeros(self.m)  # noqa: E731
        self.count, self.sx, self.sxx, self.sy, self.sxy = (
            np.zeros(self.m, dtype=np.int64), z(), z(), z(), z()
        )

    def merge(self, o: "_Sums") -> None:
        self.count += o.count
        self.sx += o.sx
        self.sxx += o.sxx
        self.sy += o.sy
        self.sxy += o.sxy
        self.sw += o.sw
        self.sww += o.sww


def _mean_se(s: float, ss: float, N: int) -> tuple[float, float]:
    mean = s / N
    var = max(ss / N - mean * mean, 0.0)
    return mean, math.sqrt(var / max(N - 1, 1))


def _chunk(A: Arrangement, ctr: np.ndarray, rho: float, area_e: float,
           m: int, ss: np.random.SeedSequence) -> _Sums:
    rng = np.random.default_rng(ss)
    n_ids = len(A.objects)
    r = rho * np.sqrt(rng.random(m))
    th = 2.0 * math.pi * rng.random(m)
    X = ctr + np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    w = (2.0 / (1.0 - np.sum(X * X, axis=1))) ** 2 * area_e
    cells = assign_cells(X, A) if n_ids else np.empty(0, dtype=int)
    out = _Sums(n_ids)
    out.sw, out.sww = float(w.sum()), float((w * w).sum())
    for k, (i, S) in enumerate(A.objects.items()):
        mask = cells == i
        wk = w[mask]
        b = body_contains(S, X[mask])
        out.count[k] = int(mask.sum())
        out.sx[k] = wk.sum()
        out.sxx[k] = (wk * wk).sum()
        out.sy[k] = wk[b].sum()
        out.sxy[k] = (wk[b] ** 2).sum()
    return out


def estimate_density(
    A: Arrangement,
    samples: int = 1_000_000,
    seed: int = 0,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> CellReport:
    """Monte Carlo cell areas and per-cell packing densities inside the clip disk.

    Chunks draw from independent child streams of ``seed``, so the result
    does not depend on ``workers``.
    """
    if A.dimension != 2:
        raise UnsupportedDimension("density estimation is implemented for the hyperbolic plane")
    if A.clip is None:
        raise InvariantViolation("density estimation needs an explicit clip disk")
    if samples < 2:
        raise InvariantViolation("need at least two samples")
    c, r_h = A.clip
    carrier = sphere_from_center_radius(c, r_h).surface
    assert isinstance(carrier, Sphere)
    ctr, rho = np.asarray(carrier.center), carrier.radius
    area_e = math.pi * rho * rho

    sizes = [chunk] * (samples // chunk)
    if samples % chunk:
        sizes.append(samples % chunk)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    job = lambda k: _chunk(A, ctr, rho, area_e, sizes[k], streams[k])  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, range(len(sizes))))
    else:
        parts = [job(k) for k in range(len(sizes))]
    tot = _Sums(len(A.objects))
    for p in parts:
        tot.merge(p)

    N = samples
    stats = []
    for k, i in enumerate(A.ids):
        ca, ca_se = _mean_se(float(tot.sx[k]), float(tot.sxx[k]), N)
        oa, oa_se = _mean_se(float(tot.sy[k]), float(tot.sxy[k]), N)
        dens, dens_se = _ratio(*(float(v[k]) for v in (tot.sx, tot.sxx, tot.sy, tot.sxy)), N)
        stats.append(CellStats(i, int(tot.count[k]), ca, ca_se, oa, oa_se, dens, dens_se))
    clip_area, _ = _mean_se(tot.sw, tot.sww, N)
    cov, cov_se = _mean_se(float(tot.sy.sum()), float(tot.sxy.sum()), N)
    # y = w*b and x = w over the whole clip; E[x*y] = E[y^2]
    dens, dens_se = _ratio(tot.sw, tot.sww, float(tot.sy.sum()), float(tot.sxy.sum()), N)
    return CellReport(tuple(stats), N, seed, clip_area, disk_area(r_h), cov, cov_se, dens, dens_se)


def _ratio(sx: float, sxx: float, sy: float, syy: float, N: int) -> tuple[float, float]:
    """Ratio of means ``y/x`` and its delta-method standard error, for
    ``y = x * b`` with binary ``b`` (so ``E[xy] = E[y^2]``)."""
    if sx <= 0.0:
        return 0.0, 0.0
    mx, my = sx / N, sy / N
    R = my / mx
    vx = sxx / N - mx * mx
    vy = syy / N - my * my
    cxy = syy / N - mx * my
    var = (vy - 2.0 * R * cxy + R * R * vx) / (N * mx * mx)
    return R, math.sqrt(max(var, 0.0))


def cell_boundaries_2d(A: Arrangement) -> list[tuple[int, int, RadicalResult]]:
    """Radical locus of every pair of ids; the cell walls lie on these."""
    ids = A.ids
    return [
        (ids[a], ids[b], radical_surface(A.objects[ids[a]], A.objects[ids[b]]))
        for a in range(len(ids))
        for b in range(a + 1, len(ids))
    ]
