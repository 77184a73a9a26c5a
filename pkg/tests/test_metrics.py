import numpy as np
import pytest

import oracles
from g2m.metrics import (AccuracyGrid, accumulate_heatmap, cell_accuracy,
                         color_iou, confusion_counts, exact_match, iou_table,
                         random_baseline, summarize)


def test_exact_match_examples():
    truth = [[0, 1], [2, 0]]
    assert exact_match([[0, 1], [2, 0]], truth)
    assert not exact_match([[0, 1], [2, 1]], truth)
    assert not exact_match(None, truth)


def test_cell_accuracy_examples():
    m = np.arange(144).reshape(12, 12) % 3
    assert cell_accuracy(m, m) == 1.0
    assert cell_accuracy([[0, 1], [2, 1]], [[0, 1], [2, 0]]) == 0.75
    assert cell_accuracy([[0, 1, 0], [2, 0, 1]], [[0, 1], [2, 0]]) == 0.0


def test_exact_match_implies_full_cell_accuracy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        t = rng.integers(0, 3, (4, 4))
        p = t.copy()
        assert exact_match(p, t) and cell_accuracy(p, t) == 1.0
        p[1, 2] = (p[1, 2] + 1) % 3
        assert not exact_match(p, t) and cell_accuracy(p, t) < 1.0


def test_color_iou_examples():
    truth = np.array([[0, 1], [2, 0]])
    perfect = [(truth.copy(), truth)]
    for color in range(3):
        assert color_iou(perfect, color, 3) == 1.0
    allzero = [(np.zeros((2, 2), dtype=int), truth)]
    assert color_iou(allzero, 0, 3) == 0.5  # tp=2, fp=2, fn=0
    assert color_iou(allzero, 1, 3) == 0.0
    assert color_iou(allzero, 2, 3) == 0.0


def test_color_iou_undefined_marker():
    truth = np.zeros((2, 2), dtype=int)
    results = [(truth.copy(), truth)]
    assert color_iou(results, 2, 3) is None


def test_color_iou_invalid_color():
    truth = np.zeros((2, 2), dtype=int)
    with pytest.raises(ValueError):
        color_iou([(truth, truth)], 3, 3)


def test_constant_predictor_iou_penalized():
    # degenerate mapping never reaches 1.0 when truth uses >= 2 colors
    rng = np.random.default_rng(1)
    truth = rng.integers(0, 3, (6, 6))
    assert len(np.unique(truth)) >= 2
    results = [(np.zeros_like(truth), truth)]
    vals = [v for v in iou_table(results, 3) if v is not None]
    assert all(v < 1.0 for v in vals)


def test_random_baseline():
    assert abs(random_baseline(3) - 1 / 3) < 1e-12
    assert random_baseline(1) == 1.0
    assert random_baseline(10) == 0.1


def test_heatmap_examples():
    truth = np.array([[0, 1], [2, 0]])
    grid = accumulate_heatmap([(truth.copy(), truth), (truth.copy(), truth)])
    assert np.all(grid.accuracy() == 1.0)

    wrong_corner = truth.copy()
    wrong_corner[0, 0] = 1
    grid = accumulate_heatmap([(truth.copy(), truth), (wrong_corner, truth)])
    assert grid.accuracy()[0, 0] == 0.5
    assert grid.accuracy()[1, 1] == 1.0

    grid = accumulate_heatmap([(None, truth)] * 3)
    assert np.all(grid.hits == 0)
    assert np.all(grid.totals == 3)


def test_heatmap_rejects_mixed_sizes():
    with pytest.raises(ValueError):
        accumulate_heatmap([(None, np.zeros((2, 2))), (None, np.zeros((3, 3)))])


def _random_results(rng, batch, n=4, c=3):
    results = []
    for _ in range(batch):
        truth = rng.integers(0, c, (n, n))
        roll = rng.random()
        if roll < 0.2:
            pred = None                                   # parse failure
        elif roll < 0.35:
            pred = rng.integers(0, c, (n, n + 1))         # shape mismatch
        elif roll < 0.55:
            pred = truth.copy()                           # perfect
        else:
            pred = truth.copy()
            bad = rng.integers(0, n, (2, rng.integers(1, 6)))
            pred[bad[0], bad[1]] = rng.integers(0, c, bad.shape[1])
        results.append((pred, truth))
    return results


def test_metrics_match_bruteforce_oracle():
    rng = np.random.default_rng(7)
    results = _random_results(rng, 200)
    as_lists = [(None if p is None else np.asarray(p).tolist(), t.tolist())
                for p, t in results]

    for (p, t), (lp, lt) in zip(results, as_lists):
        assert exact_match(p, t) == oracles.exact_match_reference(lp, lt)
        assert cell_accuracy(p, t) == pytest.approx(oracles.cell_accuracy_reference(lp, lt))

    tp, fp, fn = confusion_counts(results, 3)
    otp, ofp, ofn = oracles.confusion_reference(as_lists, 3)
    assert tp.tolist() == otp and fp.tolist() == ofp and fn.tolist() == ofn

    grid = accumulate_heatmap(results)
    oh, ot = oracles.heatmap_reference(as_lists)
    assert grid.hits.tolist() == oh
    assert grid.totals.tolist() == ot


def test_cell_accuracy_consistent_with_heatmap():
    rng = np.random.default_rng(3)
    results = _random_results(rng, 50)
    grid = accumulate_heatmap(results)
    pooled = grid.hits.sum() / grid.totals.sum()
    mean_of_grids = np.mean([cell_accuracy(p, t) for p, t in results])
    assert pooled == pytest.approx(mean_of_grids)


def test_cell_partition_identity():
    # sum TP + mismatched cells among scored grids + n^2 * failed grids == n^2 * batch
    rng = np.random.default_rng(11)
    n, c, batch = 4, 3, 120
    results = _random_results(rng, batch, n=n, c=c)
    tp, _, fn = confusion_counts(results, c)
    failed = sum(1 for p, t in results
                 if p is None or np.asarray(p).shape != np.asarray(t).shape)
    assert tp.sum() + fn.sum() + failed * n * n == batch * n * n


def test_accuracy_grid_merge_additive():
    rng = np.random.default_rng(5)
    results = _random_results(rng, 30)
    whole = accumulate_heatmap(results)
    merged = accumulate_heatmap(results[:13]).merge(accumulate_heatmap(results[13:]))
    assert np.array_equal(whole.hits, merged.hits)
    assert np.array_equal(whole.totals, merged.totals)


def test_summarize_payload():
    truth = np.array([[0, 1], [2, 0]])
    payload = summarize([(truth.copy(), truth), (None, truth)], 2, 3,
                        color_names=["White", "Red", "Blue"])
    assert payload["count"] == 2
    assert payload["exact_match"] == 0.5
    assert payload["cell_accuracy"] == 0.5
    # the failed grid is excluded from the confusion pool entirely
    assert payload["iou"]["White"] == 1.0
    assert AccuracyGrid.from_json(payload["heatmap"]).totals.sum() == 8
