"""Matplotlib figures for diagram reports (PNG, Agg backend)."""

from __future__ import annotations

import math
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .diagram import Arrangement, CellReport, assign_cells  # noqa: E402
from .model import ModelSurface, Plane, sphere_from_center_radius  # noqa: E402
from .radical import radical_surface  # noqa: E402

STYLE = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "svg.hashsalt": "hypow",
}

#: sample points shown in the cell scatter
SCATTER_POINTS = 20000


def carrier_polyline(S: ModelSurface, count: int = 721) -> Optional[np.ndarray]:
    """Points of a carrier inside the closed unit disk (NaN-separated pieces)."""
    if isinstance(S, Plane):
        n, d = S.unit_normal, S.offset
        if abs(d) >= 1.0:
            return None
        perp = np.array([-n[1], n[0]])
        h = math.sqrt(1.0 - d * d)
        t = np.linspace(-h, h, 2)
        return d * n + t[:, None] * perp
    th = np.linspace(0.0, 2.0 * math.pi, count)
    pts = S.center + S.radius * np.stack([np.cos(th), np.sin(th)], axis=1)
    pts[np.sum(pts * pts, axis=1) > 1.0] = np.nan
    return pts


def diagram_figure(A: Arrangement, report: CellReport, path: str, seed: int = 0) -> None:
    """Two panels: cells in the disk with the objects and radical geodesics,
    and per-cell density with one-standard-error bars."""
    with plt.rc_context(STYLE):
        fig, (ax, bx) = plt.subplots(1, 2, figsize=(9.0, 4.2), gridspec_kw={"width_ratios": [1.1, 1.0]})

        rng = np.random.default_rng(seed)
        r = np.sqrt(rng.random(SCATTER_POINTS)) * (1.0 - 1e-6)
        th = 2.0 * math.pi * rng.random(SCATTER_POINTS)
        X = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
        if A.objects:
            cells = assign_cells(X, A)
            ax.scatter(X[:, 0], X[:, 1], c=cells, s=0.4, cmap="tab10", vmin=0, vmax=9, alpha=0.35, linewidths=0)

        t = np.linspace(0.0, 2.0 * math.pi, 721)
        ax.plot(np.cos(t), np.sin(t), color="black", lw=1.0)
        if A.clip is not None:
            clip = carrier_polyline(sphere_from_center_radius(*A.clip).surface)
            ax.plot(clip[:, 0], clip[:, 1], color="0.4", lw=0.8, ls="--")
        for i, S in A.objects.items():
            pts = carrier_polyline(S.surface)
            if pts is not None:
                ax.plot(pts[:, 0], pts[:, 1], color="black", lw=1.0)
        ids = A.ids
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                res = radical_surface(A.objects[ids[a]], A.objects[ids[b]])
                if res.hyperplane is not None:
                    pts = carrier_polyline(res.hyperplane.surface)
                    if pts is not None:
                        ax.plot(pts[:, 0], pts[:, 1], color="tab:purple", lw=0.8, ls=":")
        ax.set_aspect("equal")
        ax.set_xlim(-1.05, 1.05)
        ax.set_ylim(-1.05, 1.05)
        ax.set_axis_off()
        ax.set_title("power diagram cells")

        cells_ = report.cells
        xs = np.arange(len(cells_))
        bx.bar(xs, [c.density for c in cells_], yerr=[c.density_se for c in cells_],
               color="0.75", edgecolor="black", capsize=3)
        bx.axhline(report.density, color="tab:red", lw=1.0, label=f"overall {report.density:.4f}")
        bx.set_xticks(xs, [str(c.id) for c in cells_])
        bx.set_xlabel("cell id")
        bx.set_ylabel("density in cell")
        bx.set_ylim(0.0, 1.0)
        bx.legend(frameon=False, loc="upper right")
        bx.set_title(f"Monte Carlo, {report.samples} samples")

        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
