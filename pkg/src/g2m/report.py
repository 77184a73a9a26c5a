"""Reporting: heatmap PNGs, summary tables, and per-color / per-type CSVs.

Everything here is a pure function of persisted run data, so regenerating a
report never changes a number. The color scale is anchored at the random
baseline (1/c) rather than zero, which is what the accuracy heatmaps are
meant to show: structure above chance.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path

import numpy as np
from PIL import Image
from PIL.PngImagePlugin import PngInfo

from .grid_gen import _expand_cells_to_pixels
from .metrics import AccuracyGrid
from .patch_geometry import InteractionType, PatchConfig, accuracy_by_type, type_distribution

UNDEFINED_RGB = (128, 128, 128)


@dataclass(frozen=True)
class Colormap:
    """Piecewise-linear RGB map over [0, 1]."""

    name: str
    points: tuple[tuple[float, tuple[int, int, int]], ...]

    def __post_init__(self):
        values = [v for v, _ in self.points]
        if len(values) < 2 or values != sorted(set(values)) or values[0] != 0.0 or values[-1] != 1.0:
            raise ValueError("control values must increase strictly from 0 to 1")

    def rgb(self, t: float) -> tuple[int, int, int]:
        t = min(max(t, 0.0), 1.0)
        for (v0, c0), (v1, c1) in zip(self.points, self.points[1:]):
            if t <= v1:
                f = 0.0 if v1 == v0 else (t - v0) / (v1 - v0)
                return tuple(int(round(a + (b - a) * f)) for a, b in zip(c0, c1))
        return self.points[-1][1]


BLUE_WHITE_RED = Colormap("blue-white-red", (
    (0.0, (0, 0, 255)),
    (0.5, (255, 255, 255)),
    (1.0, (255, 0, 0)),
))


def render_heatmap(acc_grid: AccuracyGrid, colormap: Colormap = BLUE_WHITE_RED,
                   baseline: float = 0.0, image_size: int = 512) -> np.ndarray:
    """Per-cell accuracy as an RGB raster, one solid block per grid cell.

    Accuracies map linearly from [baseline, 1] onto the colormap and clip
    below the baseline; unevaluated cells render neutral gray.
    """
    if not np.any(acc_grid.totals > 0):
        raise ValueError("empty accuracy grid: nothing to report")
    acc = acc_grid.accuracy()
    n = acc_grid.n
    cells = np.empty((n, n, 3), dtype=np.uint8)
    span = max(1.0 - baseline, 1e-12)
    for r in range(n):
        for c in range(n):
            if acc_grid.totals[r, c] == 0:
                cells[r, c] = UNDEFINED_RGB
            else:
                cells[r, c] = colormap.rgb((acc[r, c] - baseline) / span)
    return _expand_cells_to_pixels(cells, image_size)


def heatmap_png_bytes(acc_grid: AccuracyGrid, colormap: Colormap = BLUE_WHITE_RED,
                      baseline: float = 0.0, image_size: int = 512) -> bytes:
    """Deterministic PNG encoding of render_heatmap, with the scale anchor
    recorded in a text chunk."""
    raster = render_heatmap(acc_grid, colormap, baseline, image_size)
    info = PngInfo()
    info.add_text("g2m:baseline", repr(baseline))
    info.add_text("g2m:colormap", colormap.name)
    buf = io.BytesIO()
    Image.fromarray(raster, mode="RGB").save(buf, format="PNG", pnginfo=info)
    return buf.getvalue()


def format_pct(fraction: float) -> str:
    """Fraction -> one-decimal percentage, rounding half away from zero."""
    return str(Decimal(fraction * 100).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def format_exact_cell(exact: float, cell: float) -> str:
    return f"{format_pct(exact)} / {format_pct(cell)}"


def summary_table(runs: list[tuple[str, dict]]) -> list[dict]:
    """One row per (model, n) from aggregate payloads, 'Exact / Cell' style."""
    rows = []
    for label, agg in runs:
        rows.append({
            "model": label,
            "n": agg["n"],
            "exact_match_pct": format_pct(agg["exact_match"]),
            "cell_accuracy_pct": format_pct(agg["cell_accuracy"]),
            "exact_cell": format_exact_cell(agg["exact_match"], agg["cell_accuracy"]),
        })
    return rows


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def breakdown_reports(aggregate: dict, patch_config: PatchConfig,
                      out_dir: str | Path, label: str = "run") -> dict[str, Path]:
    """Emit summary.csv, iou.csv, interaction.csv, and heatmap.png for one
    aggregate payload."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = AccuracyGrid.from_json(aggregate["heatmap"])
    baseline = 1.0 / aggregate["c"]

    paths = {}
    paths["summary"] = out_dir / "summary.csv"
    row = summary_table([(label, aggregate)])[0]
    _write_csv(paths["summary"],
               ["model", "n", "exact_match_pct", "cell_accuracy_pct", "exact_cell"],
               [[row["model"], row["n"], row["exact_match_pct"],
                 row["cell_accuracy_pct"], row["exact_cell"]]])

    paths["iou"] = out_dir / "iou.csv"
    iou_rows = []
    for index, (name, value) in enumerate(aggregate["iou"].items()):
        iou_rows.append([index, name, "" if value is None else f"{value:.6f}"])
    _write_csv(paths["iou"], ["color_index", "color_name", "iou"], iou_rows)

    paths["interaction"] = out_dir / "interaction.csv"
    by_type = accuracy_by_type(grid, patch_config)
    dist = type_distribution(grid.n, patch_config)
    type_rows = [[t.label, dist[t], f"{by_type[t]:.6f}"]
                 for t in InteractionType if t in by_type]
    _write_csv(paths["interaction"], ["interaction_type", "cells", "mean_accuracy"],
               type_rows)

    paths["heatmap"] = out_dir / "heatmap.png"
    paths["heatmap"].write_bytes(heatmap_png_bytes(grid, baseline=baseline))
    return paths


def report_run(run_dir: str | Path, out_dir: str | Path | None = None,
               patch_len: int = 16, image_size: int = 512) -> dict[str, Path]:
    """Generate all report artifacts for a persisted run directory."""
    run_dir = Path(run_dir)
    aggregate = json.loads((run_dir / "aggregate.json").read_text())
    run_meta = json.loads((run_dir / "run.json").read_text())
    config = PatchConfig(image_size=image_size, patch_len=patch_len)
    return breakdown_reports(aggregate, config,
                             out_dir or (run_dir / "report"),
                             label=run_meta.get("adapter", "run"))
