"""Figures from the engine's CSV output: population pyramids, count
histograms, and sentiment-grid heatmaps."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PLOT_KINDS = ("pyramid", "heatmap", "hist")


class PlotError(Exception):
    pass


def _read_rows(text: str, columns: tuple[str, ...]) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [c for c in columns if c not in reader.fieldnames]:
        raise PlotError(f"CSV must have columns {', '.join(columns)}")
    rows = list(reader)
    if not rows:
        raise PlotError("CSV has no data rows")
    return rows


def load_pyramid_csv(text: str) -> dict[tuple[str, str], list[tuple[int, str, int, int]]]:
    rows = _read_rows(text, ("generator", "prompt", "bin", "label", "female", "male"))
    out: dict[tuple[str, str], list] = {}
    try:
        for r in rows:
            key = (r["generator"], r["prompt"])
            out.setdefault(key, []).append(
                (int(r["bin"]), r["label"], int(r["female"]), int(r["male"]))
            )
    except (TypeError, ValueError) as e:
        raise PlotError(f"malformed pyramid CSV: {e}") from None
    for key, bins in out.items():
        bins.sort()
    return out


def build_pyramid_figure(pyramids: dict) -> plt.Figure:
    """One subplot per (generator, prompt): females left, males right,
    one horizontal bar per age bin on each side."""
    n = len(pyramids)
    ncols = min(n, 3)
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.2 * ncols, 3.2 * nrows), squeeze=False
    )
    for ax in axes.flat:
        ax.set_visible(False)
    for ax, (key, bins) in zip(axes.flat, sorted(pyramids.items())):
        ax.set_visible(True)
        labels = [b[1] for b in bins]
        females = [b[2] for b in bins]
        males = [b[3] for b in bins]
        y = range(len(bins))
        ax.barh(y, [-f for f in females], color="tab:red", label="female")
        ax.barh(y, males, color="tab:blue", label="male")
        ax.set_yticks(list(y))
        ax.set_yticklabels(labels, fontsize=7)
        ax.axvline(0, color="black", linewidth=0.6)
        limit = max([*females, *males, 1])
        ax.set_xlim(-limit, limit)
        ax.set_xticks([-limit, 0, limit])
        ax.set_xticklabels([str(limit), "0", str(limit)], fontsize=7)
        ax.set_title(f"{key[0]} / {key[1]}", fontsize=9)
        ax.set_xlabel("count", fontsize=8)
    handles, labels_ = axes.flat[0].get_legend_handles_labels()
    fig.legend(handles, labels_, loc="lower right", fontsize=8)
    fig.tight_layout()
    return fig


def load_hist_csv(text: str) -> dict[str, dict[str, dict[int, float]]]:
    """prompt -> generator -> {count: percentage}."""
    rows = _read_rows(text, ("generator", "prompt", "count", "percentage"))
    out: dict[str, dict[str, dict[int, float]]] = {}
    try:
        for r in rows:
            out.setdefault(r["prompt"], {}).setdefault(r["generator"], {})[
                int(r["count"])
            ] = float(r["percentage"])
    except (TypeError, ValueError) as e:
        raise PlotError(f"malformed histogram CSV: {e}") from None
    return out


def build_hist_figure(hists: dict) -> plt.Figure:
    """One subplot per prompt; bars grouped by generator over count values."""
    n = len(hists)
    fig, axes = plt.subplots(n, 1, figsize=(7, 3.0 * n), squeeze=False)
    for ax, prompt in zip(axes.flat, sorted(hists)):
        per_gen = hists[prompt]
        generators = sorted(per_gen)
        counts = sorted({c for d in per_gen.values() for c in d})
        width = 0.8 / len(generators)
        for j, g in enumerate(generators):
            xs = [i + j * width for i in range(len(counts))]
            ys = [per_gen[g].get(c, 0.0) for c in counts]
            ax.bar(xs, ys, width=width, label=g)
        ax.set_xticks([i + 0.4 for i in range(len(counts))])
        ax.set_xticklabels([str(c) for c in counts], fontsize=8)
        ax.set_ylabel("% of images", fontsize=8)
        ax.set_xlabel("people detected", fontsize=8)
        ax.set_title(f"prompt {prompt}", fontsize=9)
        ax.legend(fontsize=7)
    fig.tight_layout()
    return fig


def load_grid_csv(text: str) -> np.ndarray:
    """An 8x8 sentiment grid: eight rows of eight values, no header."""
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise PlotError("CSV has no data rows")
    try:
        grid = np.array([[float(v) for v in line.split(",")] for line in rows])
    except ValueError as e:
        raise PlotError(f"malformed grid CSV: {e}") from None
    if grid.shape != (8, 8):
        raise PlotError(f"grid CSV must be 8x8, got {grid.shape[0]}x{grid.shape[1]}")
    return grid


def build_heatmap_figure(grid: np.ndarray) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(5, 4))
    image = ax.imshow(grid, cmap="viridis", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(8))
    ax.set_yticks(range(8))
    ax.set_xlabel("patch column")
    ax.set_ylabel("patch row")
    fig.colorbar(image, ax=ax, label="sentiment")
    fig.tight_layout()
    return fig


def plot(csv_path: Path, kind: str, out_path: Path) -> Path:
    """Render one figure from an engine CSV; no file is written on error."""
    if kind not in PLOT_KINDS:
        raise PlotError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    text = Path(csv_path).read_text(encoding="utf-8")
    if kind == "pyramid":
        fig = build_pyramid_figure(load_pyramid_csv(text))
    elif kind == "hist":
        fig = build_hist_figure(load_hist_csv(text))
    else:
        fig = build_heatmap_figure(load_grid_csv(text))
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
