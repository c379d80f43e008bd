"""Workspace figures rendered to SVG with matplotlib (no pyplot state)."""
from __future__ import annotations

import math

import contourpy
import matplotlib
import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import PathPatch, Polygon
from matplotlib.path import Path

from .mechanism import DEFAULT_MODES, JointConfig, forward_kinematics, slider_positions
from .workspace import grid_frame, singularity_loci

RECT_GID = "inscribed-rectangle"

STYLE = {
    "svg.hashsalt": "pkm-synth",
    "svg.fonttype": "none",
    "font.size": 8,
    "axes.linewidth": 0.6,
    "xtick.direction": "in",
    "ytick.direction": "in",
}


def _filled_paths(grid, mask):
    u, v = grid.axes()
    gen = contourpy.contour_generator(u, v, mask.astype(float), fill_type=contourpy.FillType.OuterCode)
    filled, codes = gen.filled(0.5, 1.5)
    paths = []
    for pts, code in zip(filled, codes):
        wx, wy = grid.to_world(pts[:, 0], pts[:, 1])
        paths.append(Path(np.column_stack([wx, wy]), code))
    return paths


def workspace_figure(design, grid, rect, title="", modes=DEFAULT_MODES):
    """Figure with feasible region, t-connected region, loci, rectangle and mechanism."""
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(5.0, 4.2))
        ax = fig.add_subplot(1, 1, 1)
        for path in _filled_paths(grid, grid.feasible):
            ax.add_patch(PathPatch(path, facecolor="0.88", edgecolor="none", zorder=1))
        for path in _filled_paths(grid, grid.component):
            ax.add_patch(PathPatch(path, facecolor="#a6c8e0", edgecolor="#1f4e79", lw=0.8, zorder=2,
                                   gid="t-connected-region"))

        styles = {"parallel": dict(color="#b2182b", ls="--", lw=0.8),
                  "serial": dict(color="#4d4d4d", ls=":", lw=0.8)}
        # loci do not depend on the rectangle orientation; an axis-aligned
        # raster covers both legs' reach limits
        loci_grid = grid if grid.angle == 0.0 else grid_frame(design, max(grid.nx, grid.ny) - 2)
        seen = set()
        for locus in singularity_loci(design, loci_grid, modes):
            label = None if locus.kind in seen else f"{locus.kind} singularity"
            seen.add(locus.kind)
            ax.plot(locus.points[:, 0], locus.points[:, 1], zorder=3, label=label, **styles[locus.kind])

        ax.add_patch(Polygon(rect.corners(), closed=True, fill=False, edgecolor="k", lw=1.2,
                             zorder=4, gid=RECT_GID))

        half = 0.5 * design.delta_rho
        q = JointConfig(half, half)
        c, d = slider_positions(design, q)
        p = forward_kinematics(design, q, modes)
        for base, u in ((design.A, design.u1), (design.B, design.u2)):
            end = base + u * design.delta_rho
            ax.plot([base.x, end.x], [base.y, end.y], color="k", lw=2.5, solid_capstyle="butt", zorder=5)
        ax.plot([c.x, p.x, d.x], [c.y, p.y, d.y], color="#2166ac", lw=1.2, marker="o", ms=3, zorder=6)
        ax.annotate("P", (p.x, p.y), textcoords="offset points", xytext=(3, 3))

        ax.set_aspect("equal")
        ax.autoscale_view()
        ax.set_xlabel("x / L")
        ax.set_ylabel("y / L")
        ax.legend(loc="lower right", frameon=False, fontsize=6)
        if title:
            ax.set_title(f"{title}: S = {rect.area:.3f} L$^2$, {math.degrees(rect.angle) % 90:.2f}$^\\circ$")
        fig.tight_layout()
    return fig


def save_svg(fig, path) -> None:
    with matplotlib.rc_context(STYLE):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
