"""Batch rendering of convergence figures from sweep CSVs."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .records import SchemaError, aggregate, read_records_file


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    output_image: str
    # (legend label, exponent) pairs; each draws a c * N^exponent guide
    guide_rates: tuple[tuple[str, float], ...] = ()
    log_y_only: bool = False


@dataclass(frozen=True)
class RenderResult:
    """Written files plus the pixel-free data behind the figure."""

    paths: tuple[str, ...]
    series: list[tuple[str, int, float, float, float]]
    x_scale: str
    y_scale: str


def _sibling_formats(path: str) -> tuple[str, ...]:
    stem, ext = os.path.splitext(path)
    ext = ext.lower()
    if ext == ".svg":
        return (path, stem + ".png")
    if ext == ".png":
        return (path, stem + ".svg")
    raise SchemaError(f"output must end in .png or .svg, got {path!r}")


def render(plot_spec: PlotSpec) -> RenderResult:
    """One mean curve per method with an interquartile band, optional rate
    guide lines, written as both PNG and SVG."""
    records = read_records_file(plot_spec.input_csv)
    series = aggregate(records)
    paths = _sibling_formats(plot_spec.output_image)

    by_method: dict[str, list[tuple[int, float, float, float]]] = {}
    for method, n, mean, q25, q75 in series:
        by_method.setdefault(method, []).append((n, mean, q25, q75))

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for method, rows in by_method.items():
        ns = np.array([r[0] for r in rows], dtype=float)
        means = np.array([r[1] for r in rows])
        q25 = np.array([r[2] for r in rows])
        q75 = np.array([r[3] for r in rows])
        (line,) = ax.plot(ns, means, marker="o", markersize=3.5, label=method)
        ax.fill_between(ns, q25, q75, alpha=0.2, color=line.get_color(), linewidth=0)

    if plot_spec.guide_rates:
        all_ns = sorted({row[1] for row in series})
        ns = np.array(all_ns, dtype=float)
        # anchor each guide at the largest mean over the smallest N so the
        # reference slopes sit above the data
        ref = max(mean for _, n, mean, _, _ in series if n == all_ns[0])
        for label, exponent in plot_spec.guide_rates:
            scale = ref / ns[0] ** exponent
            ax.plot(ns, scale * ns**exponent, linestyle="--", color="gray", linewidth=1)
            ax.annotate(
                label,
                (ns[-1], scale * ns[-1] ** exponent),
                textcoords="offset points",
                xytext=(4, 0),
                fontsize=8,
                color="gray",
            )

    ax.set_yscale("log")
    if not plot_spec.log_y_only:
        ax.set_xscale("log")
    ax.set_xlabel("number of nodes N")
    ax.set_ylabel("squared error")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    for path in paths:
        fig.savefig(path)
    plt.close(fig)
    return RenderResult(
        paths=paths,
        series=series,
        x_scale=ax.get_xscale(),
        y_scale=ax.get_yscale(),
    )
