"""Grid-cell vs. patch-lattice geometry: interaction types, area dominance,
and per-type accuracy breakdowns.

Cells use the rendered pixel intervals from grid_gen (floor tiling), not
ideal rational edges, because the encoder sees the rendered image. Image
borders (0 and image_size) count as patch boundaries, so a cell flush with
the border is Edge on that axis, never Interior.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from .grid_gen import cell_bounds
from .metrics import AccuracyGrid


class AxisClass(IntEnum):
    INTERIOR = 0
    EDGE = 1
    CROSS = 2

    @property
    def label(self) -> str:
        return self.name.capitalize()


class InteractionType(Enum):
    """Unordered pair of per-axis classes; exactly six values."""

    INT_INT = "Int-Int"
    INT_EDG = "Int-Edg"
    INT_CRO = "Int-Cro"
    EDG_EDG = "Edg-Edg"
    EDG_CRO = "Edg-Cro"
    CRO_CRO = "Cro-Cro"

    @property
    def label(self) -> str:
        return self.value

    @classmethod
    def from_axes(cls, a: AxisClass, b: AxisClass) -> "InteractionType":
        lo, hi = sorted((a, b))
        return _PAIR_TABLE[(lo, hi)]


_PAIR_TABLE = {
    (AxisClass.INTERIOR, AxisClass.INTERIOR): InteractionType.INT_INT,
    (AxisClass.INTERIOR, AxisClass.EDGE): InteractionType.INT_EDG,
    (AxisClass.INTERIOR, AxisClass.CROSS): InteractionType.INT_CRO,
    (AxisClass.EDGE, AxisClass.EDGE): InteractionType.EDG_EDG,
    (AxisClass.EDGE, AxisClass.CROSS): InteractionType.EDG_CRO,
    (AxisClass.CROSS, AxisClass.CROSS): InteractionType.CRO_CRO,
}


@dataclass(frozen=True)
class PatchConfig:
    """Patch lattice of a vision encoder over a square input."""

    image_size: int = 512
    patch_len: int = 16

    def __post_init__(self):
        if self.patch_len <= 0 or self.image_size <= 0:
            raise ValueError("image_size and patch_len must be positive")
        if self.image_size % self.patch_len != 0:
            raise ValueError(
                f"patch length {self.patch_len} does not divide image size {self.image_size}")

    @property
    def patches_per_side(self) -> int:
        return self.image_size // self.patch_len


def axis_class(interval: tuple[int, int], patch_len: int) -> AxisClass:
    """Classify a half-open pixel interval against boundaries k*patch_len.

    Cross if a boundary falls strictly inside; else Edge if either endpoint
    sits on a boundary; else Interior.
    """
    a, b = interval
    if not 0 <= a < b:
        raise ValueError(f"bad interval [{a}, {b})")
    if (a // patch_len + 1) * patch_len < b:
        return AxisClass.CROSS
    if a % patch_len == 0 or b % patch_len == 0:
        return AxisClass.EDGE
    return AxisClass.INTERIOR


def cell_interaction(row: int, col: int, n: int, config: PatchConfig) -> InteractionType:
    ay = axis_class(cell_bounds(row, n, config.image_size), config.patch_len)
    ax = axis_class(cell_bounds(col, n, config.image_size), config.patch_len)
    return InteractionType.from_axes(ay, ax)


def area_dominance(row: int, col: int, n: int, config: PatchConfig) -> float:
    """Largest fraction of the cell's area covered by any single patch."""
    y0, y1 = cell_bounds(row, n, config.image_size)
    x0, x1 = cell_bounds(col, n, config.image_size)
    p = config.patch_len

    def overlaps(a0, a1):
        return [min(a1, (k + 1) * p) - max(a0, k * p)
                for k in range(a0 // p, (a1 - 1) // p + 1)]

    best = max(oy * ox for oy in overlaps(y0, y1) for ox in overlaps(x0, x1))
    return best / ((y1 - y0) * (x1 - x0))


def _axis_classes(n: int, config: PatchConfig) -> list[AxisClass]:
    return [axis_class(cell_bounds(i, n, config.image_size), config.patch_len)
            for i in range(n)]


def type_distribution(n: int, config: PatchConfig) -> dict[InteractionType, int]:
    """Exact interaction-type counts over all n*n cells (sums to n^2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    classes = _axis_classes(n, config)
    counts = {ac: classes.count(ac) for ac in AxisClass}
    dist = {t: 0 for t in InteractionType}
    for ar in AxisClass:
        for ac in AxisClass:
            dist[InteractionType.from_axes(ar, ac)] += counts[ar] * counts[ac]
    return dist


def classification_grid(n: int, config: PatchConfig) -> np.ndarray:
    """n x n array of interaction types (object dtype), row/col indexed."""
    classes = _axis_classes(n, config)
    out = np.empty((n, n), dtype=object)
    for r in range(n):
        for c in range(n):
            out[r, c] = InteractionType.from_axes(classes[r], classes[c])
    return out


def accuracy_by_type(acc_grid: AccuracyGrid,
                     config: PatchConfig) -> dict[InteractionType, float]:
    """Mean per-cell accuracy grouped by interaction type.

    Types with no cells (or only unevaluated cells) are absent from the
    result rather than reported as zero.
    """
    n = acc_grid.n
    types = classification_grid(n, config)
    acc = acc_grid.accuracy()
    out: dict[InteractionType, float] = {}
    for t in InteractionType:
        mask = (types == t) & (acc_grid.totals > 0)
        if mask.any():
            out[t] = float(np.mean(acc[mask]))
    return out
