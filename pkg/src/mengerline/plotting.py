"""SVG rendering of a build for 2D coordinate sources."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Circle

from .builder import BuildResult
from .errors import InputError
from .metric import FiniteMetricSpace, Measure

__all__ = ["render_build_svg"]


def render_build_svg(space: FiniteMetricSpace, measure: Measure,
                     result: BuildResult, path: str | Path) -> None:
    """Write a deterministic SVG: points sized by mass, the path polyline,
    and stop balls as outlined circles."""
    if space.coords is None:
        raise InputError("plotting needs a coordinate source")
    if space.coords.shape[1] != 2:
        raise InputError("plotting supports 2D coordinates only")
    # fixed hash salt keeps the SVG ids stable across runs
    plt.rcParams["svg.hashsalt"] = "mengerline"
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    coords = space.coords
    w = measure.weights
    wmax = float(w.max()) if w.size else 1.0
    sizes = 4.0 + 36.0 * (w / wmax if wmax > 0 else w)
    ax.scatter(coords[:, 0], coords[:, 1], s=sizes, c="#30506d",
               linewidths=0, zorder=2)
    seq = result.sequence
    if len(seq) > 1:
        pts = coords[list(seq)]
        ax.plot(pts[:, 0], pts[:, 1], "-", color="#c04a30", linewidth=1.2,
                zorder=3)
    final = result.cascade.final
    for y, m in sorted(final.H.items()):
        center = coords[final.q_inverse[y]]
        ax.add_patch(Circle((center[0], center[1]), 2.0 ** (-m + 3),
                            fill=False, edgecolor="#7a7a7a", linewidth=0.8,
                            linestyle="--", zorder=1))
    ax.set_aspect("equal")
    ax.set_title(f"length {result.final_length:.6g} / bound {result.length_bound:.6g}")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
