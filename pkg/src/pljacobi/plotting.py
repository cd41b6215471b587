"""Deterministic SVG overlays of mesh, smooth contour and Jacobi edges.

Figures are composed through the object-oriented matplotlib API (no pyplot,
no global state) and written with a fixed hash salt and no date metadata, so
identical inputs produce byte-identical SVG documents.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.collections import LineCollection
from matplotlib.figure import Figure

from .jacobi import JacobiSet
from .mesh import SimplicialComplex
from .oracle import ContourSet

#: fixed id salt; makes matplotlib's generated SVG ids input-deterministic
SVG_HASHSALT = "pljacobi"

#: mesh layers above this edge count are rasterized inside the SVG to keep
#: file sizes sane on fine grids
MESH_RASTER_THRESHOLD = 100_000


@dataclass
class ExportStyle:
    """Stroke colors and widths of the three overlay layers."""

    mesh_color: str = "#c8c8c8"
    mesh_width: float = 0.3
    contour_color: str = "#1b7837"
    contour_width: float = 1.4
    jacobi_color: str = "#d62728"
    jacobi_width: float = 1.5
    figsize: float = 7.0
    show_mesh: bool = True
    title: str | None = None


def render_overlay(
    c: SimplicialComplex,
    jset: JacobiSet | None = None,
    contour: ContourSet | None = None,
    style: ExportStyle | None = None,
) -> Figure:
    """Figure with mesh (light), contour (solid) and Jacobi edges (bold).

    Jacobi edges are drawn with multiplicity-dependent stroke width.  The
    viewport is fixed to the mesh bounding box, equal aspect, y up.
    """
    style = style or ExportStyle()
    if c.positions.shape[1] != 2:
        raise ValueError("overlay rendering needs a plane mesh")
    fig = Figure(figsize=(style.figsize, style.figsize))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot(111)

    if style.show_mesh:
        mesh_segs = c.positions[c.edges]
        ax.add_collection(
            LineCollection(
                mesh_segs,
                colors=style.mesh_color,
                linewidths=style.mesh_width,
                rasterized=len(c.edges) > MESH_RASTER_THRESHOLD,
                zorder=1,
            )
        )

    if contour is not None and not contour.is_empty():
        ax.add_collection(
            LineCollection(
                [p for p in contour.polylines if len(p) >= 2],
                colors=style.contour_color,
                linewidths=style.contour_width,
                zorder=2,
            )
        )

    if jset is not None and len(jset):
        for mult in sorted(set(int(m) for m in jset.multiplicities)):
            sel = jset.multiplicities == mult
            ax.add_collection(
                LineCollection(
                    c.positions[jset.edges[sel]],
                    colors=style.jacobi_color,
                    linewidths=style.jacobi_width * (1.0 + 0.6 * (mult - 1)),
                    zorder=3,
                )
            )

    xmin, ymin, xmax, ymax = c.bbox()
    pad = 0.02 * max(xmax - xmin, ymax - ymin)
    ax.set_xlim(xmin - pad, xmax + pad)
    ax.set_ylim(ymin - pad, ymax + pad)
    ax.set_aspect("equal")
    ax.set_axis_off()
    if style.title:
        ax.set_title(style.title)
    fig.tight_layout(pad=0.2)
    return fig


def export_svg(fig: Figure, path) -> None:
    """Write the figure as SVG with byte-deterministic output."""
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASHSALT}):
        fig.savefig(path, format="svg", metadata={"Date": None}, dpi=200)


def export_overlay_svg(
    c: SimplicialComplex,
    jset: JacobiSet | None,
    contour: ContourSet | None,
    path,
    style: ExportStyle | None = None,
) -> None:
    """Render and write in one step."""
    export_svg(render_overlay(c, jset, contour, style), path)
