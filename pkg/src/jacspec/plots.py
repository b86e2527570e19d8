"""Standalone SVG line charts of the density sweeps.

Output is deterministic: the SVG hash salt is pinned, the date metadata is
stripped, and glyphs are embedded as path data so the files carry no
external references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

matplotlib.rcParams["svg.hashsalt"] = "jacspec"


@dataclass(frozen=True)
class PlotSpec:
    series: list[tuple[float, float]]  # (x, f), plotted in x order
    title: str
    path: str
    xlabel: str = "x"
    ylabel: str = "f(x)"
    hole_radius: float | None = None  # annotated exclusion radius around 0


def density_plot_spec(xs, fs, alpha: float, path: str) -> PlotSpec:
    """Finite, sorted plot data for one sweep; the x=0 hole is left open."""
    pts = sorted(
        (float(x), float(f))
        for x, f in zip(xs, fs)
        if math.isfinite(x) and math.isfinite(f)
    )
    if not pts:
        raise ValueError("no finite points to plot")
    hole = min(abs(x) for x, _ in pts)
    return PlotSpec(
        series=pts,
        title=f"spectral density, alpha = {alpha:g}",
        path=path,
        hole_radius=hole,
    )


def render(spec: PlotSpec) -> str:
    """Write the spec as a self-contained SVG; returns the path."""
    xs = [p[0] for p in spec.series]
    fs = [p[1] for p in spec.series]
    if any(xs[i] > xs[i + 1] for i in range(len(xs) - 1)):
        raise ValueError("plot series must be sorted by x")
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    try:
        neg = [(x, f) for x, f in spec.series if x < 0]
        pos = [(x, f) for x, f in spec.series if x > 0]
        # the two branches are drawn separately so no segment bridges the hole
        for branch in (neg, pos):
            if branch:
                ax.plot([p[0] for p in branch], [p[1] for p in branch],
                        color="#1f77b4", linewidth=1.2)
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(spec.ylabel)
        ax.set_title(spec.title)
        ax.grid(True, alpha=0.3)
        if spec.hole_radius is not None:
            ax.axvspan(-spec.hole_radius, spec.hole_radius, color="0.85", zorder=0)
        fig.savefig(spec.path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return spec.path
