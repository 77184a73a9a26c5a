"""Exact Match, Cell Accuracy, pooled per-color IoU, and per-position
accuracy accumulation.

A prediction enters these functions as an array (possibly the wrong shape)
or None for a parse failure. Failures and shape mismatches score zero
everywhere, matching the complete-parse-error rule, and are excluded from
the IoU confusion pool because their cells cannot be aligned with truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Pair = tuple  # (pred: array-like | None, truth: array-like)


@dataclass
class AccuracyGrid:
    """Per-position correct / evaluated counts over a batch of grids."""

    hits: np.ndarray
    totals: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "AccuracyGrid":
        return cls(np.zeros((n, n), dtype=np.int64), np.zeros((n, n), dtype=np.int64))

    @property
    def n(self) -> int:
        return self.hits.shape[0]

    def accuracy(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(self.totals > 0, self.hits / np.maximum(self.totals, 1), np.nan)

    def merge(self, other: "AccuracyGrid") -> "AccuracyGrid":
        if other.n != self.n:
            raise ValueError("cannot merge accuracy grids of different sizes")
        return AccuracyGrid(self.hits + other.hits, self.totals + other.totals)

    def to_json(self) -> dict:
        return {"hits": self.hits.tolist(), "totals": self.totals.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "AccuracyGrid":
        return cls(np.asarray(obj["hits"], dtype=np.int64),
                   np.asarray(obj["totals"], dtype=np.int64))


def _as_scored(pred, truth: np.ndarray) -> np.ndarray | None:
    """Return the prediction as an array iff it is scoreable against truth
    (parsed and exactly the right shape); otherwise None."""
    if pred is None:
        return None
    arr = np.asarray(pred)
    if arr.shape != truth.shape:
        return None
    return arr


def exact_match(pred, truth) -> bool:
    truth = np.asarray(truth)
    arr = _as_scored(pred, truth)
    return arr is not None and bool(np.array_equal(arr, truth))


def cell_accuracy(pred, truth) -> float:
    truth = np.asarray(truth)
    arr = _as_scored(pred, truth)
    if arr is None:
        return 0.0
    return float(np.mean(arr == truth))


def random_baseline(c: int) -> float:
    """Expected cell accuracy of uniform guessing over c colors."""
    if c < 1:
        raise ValueError("c must be >= 1")
    return 1.0 / c


def confusion_counts(results: list[Pair], num_colors: int):
    """Pooled per-color TP / FP / FN over the scoreable results.

    Out-of-range predicted values contribute an FN for the true color but no
    FP (there is no color to charge it to).
    """
    tp = np.zeros(num_colors, dtype=np.int64)
    fp = np.zeros(num_colors, dtype=np.int64)
    fn = np.zeros(num_colors, dtype=np.int64)
    for pred, truth in results:
        truth = np.asarray(truth)
        arr = _as_scored(pred, truth)
        if arr is None:
            continue
        match = arr == truth
        tp += np.bincount(truth[match], minlength=num_colors)[:num_colors]
        fn += np.bincount(truth[~match], minlength=num_colors)[:num_colors]
        wrong = arr[~match]
        wrong = wrong[(wrong >= 0) & (wrong < num_colors)]
        fp += np.bincount(wrong, minlength=num_colors)[:num_colors]
    return tp, fp, fn


def color_iou(results: list[Pair], color: int, num_colors: int) -> float | None:
    """Pooled IoU for one color: tp / (tp + fp + fn); None when 0/0."""
    if not 0 <= color < num_colors:
        raise ValueError(f"color {color} out of range for {num_colors} colors")
    tp, fp, fn = confusion_counts(results, num_colors)
    denom = int(tp[color] + fp[color] + fn[color])
    if denom == 0:
        return None
    return float(tp[color]) / denom


def iou_table(results: list[Pair], num_colors: int) -> list[float | None]:
    tp, fp, fn = confusion_counts(results, num_colors)
    out = []
    for k in range(num_colors):
        denom = int(tp[k] + fp[k] + fn[k])
        out.append(None if denom == 0 else float(tp[k]) / denom)
    return out


def accumulate_heatmap(results: list[Pair]) -> AccuracyGrid:
    """Fold per-position correctness over a batch sharing one grid size.

    Every evaluated grid bumps totals everywhere; unscoreable predictions
    (failures, wrong shape) bump no hits, consistent with 0% cell accuracy.
    """
    if not results:
        raise ValueError("empty result batch")
    n = np.asarray(results[0][1]).shape[0]
    grid = AccuracyGrid.zeros(n)
    for pred, truth in results:
        truth = np.asarray(truth)
        if truth.shape != (n, n):
            raise ValueError(f"mixed grid sizes in batch: {truth.shape} vs ({n}, {n})")
        grid.totals += 1
        arr = _as_scored(pred, truth)
        if arr is not None:
            grid.hits += (arr == truth)
    return grid


def summarize(results: list[Pair], n: int, c: int,
              color_names: list[str] | None = None) -> dict:
    """Aggregate a result batch into the standard report payload."""
    grid = accumulate_heatmap(results)
    ious = iou_table(results, c)
    if color_names is None:
        color_names = [str(k) for k in range(c)]
    return {
        "n": n,
        "c": c,
        "count": len(results),
        "exact_match": float(np.mean([exact_match(p, t) for p, t in results])),
        "cell_accuracy": float(grid.hits.sum() / grid.totals.sum()),
        "iou": {color_names[k]: ious[k] for k in range(c)},
        "heatmap": grid.to_json(),
    }
