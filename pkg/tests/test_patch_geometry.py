import json
from pathlib import Path

import numpy as np
import pytest

import oracles
from g2m.metrics import AccuracyGrid
from g2m.patch_geometry import (AxisClass, InteractionType, PatchConfig,
                                accuracy_by_type, area_dominance, axis_class,
                                cell_interaction, classification_grid,
                                type_distribution)

GOLDEN = Path(__file__).parent / "golden"
CFG_512_16 = PatchConfig(512, 16)
CFG_448_14 = PatchConfig(448, 14)


def test_patch_config_requires_divisibility():
    assert CFG_512_16.patches_per_side == 32
    assert CFG_448_14.patches_per_side == 32
    with pytest.raises(ValueError):
        PatchConfig(512, 15)


def test_axis_class_examples():
    assert axis_class((16, 32), 16) == AxisClass.EDGE
    assert axis_class((10, 21), 16) == AxisClass.CROSS
    assert axis_class((17, 23), 16) == AxisClass.INTERIOR
    assert axis_class((0, 16), 16) == AxisClass.EDGE   # image border counts
    with pytest.raises(ValueError):
        axis_class((5, 5), 16)


def test_aligned_grids_are_pure_edge_edge():
    for n in (32, 64):
        dist = type_distribution(n, CFG_512_16)
        assert dist[InteractionType.EDG_EDG] == n * n
        assert sum(dist.values()) == n * n
        assert cell_interaction(n // 2, 3, n, CFG_512_16) == InteractionType.EDG_EDG


def test_n48_distribution():
    # per-axis pattern (Edge, Cross, Edge) repeating -> 4/9, 4/9, 1/9 of 2304
    dist = type_distribution(48, CFG_512_16)
    assert dist[InteractionType.EDG_EDG] == 1024
    assert dist[InteractionType.EDG_CRO] == 1024
    assert dist[InteractionType.CRO_CRO] == 256
    assert dist[InteractionType.INT_INT] == 0
    assert dist[InteractionType.INT_EDG] == 0
    assert dist[InteractionType.INT_CRO] == 0


def test_n65_matches_frozen_golden():
    golden = json.loads((GOLDEN / "interaction_hist_n65.json").read_text())
    dist = type_distribution(65, CFG_512_16)
    assert {t.label: v for t, v in dist.items() if v} == golden["histogram"]


@pytest.mark.parametrize("config", [CFG_512_16, CFG_448_14], ids=str)
def test_classifier_matches_pixel_scan(config):
    for n in (2, 7, 13, 20, 31, 33, 47, 48, 63, 64):
        grid = classification_grid(n, config)
        for r in range(n):
            for c in range(n):
                want = oracles.interaction_pixelscan(r, c, n, config.image_size,
                                                     config.patch_len)
                assert grid[r, c].label == want, (n, r, c)


def test_interaction_symmetry():
    for n in (9, 20, 48, 65 - 1):
        for r, c in ((0, 5), (3, 7), (1, 2)):
            assert cell_interaction(r, c, n, CFG_512_16) == cell_interaction(c, r, n, CFG_512_16)


def test_area_dominance_examples():
    for r in range(0, 32, 7):
        assert area_dominance(r, r, 32, CFG_512_16) == 1.0
    assert area_dominance(5, 9, 64, CFG_512_16) == 1.0
    # n=48 cell (1,1) spans [10,21) on both axes: best patch overlap 6x6 of 11x11
    assert area_dominance(1, 1, 48, CFG_512_16) == pytest.approx(36 / 121)


def test_area_dominance_matches_pixel_count():
    for n in (9, 20, 48):
        for r, c in ((0, 0), (1, 1), (4, 7), (n - 1, n // 2)):
            want = oracles.area_dominance_pixelcount(r, c, n, 512, 16)
            assert area_dominance(r, c, n, CFG_512_16) == pytest.approx(want)


def test_accuracy_by_type_uniform():
    grid = AccuracyGrid(hits=np.full((20, 20), 5), totals=np.full((20, 20), 5))
    by_type = accuracy_by_type(grid, CFG_512_16)
    assert by_type and all(v == 1.0 for v in by_type.values())


def test_accuracy_by_type_single_class_at_64():
    rng = np.random.default_rng(0)
    hits = rng.integers(0, 6, (64, 64))
    grid = AccuracyGrid(hits=hits, totals=np.full((64, 64), 5))
    by_type = accuracy_by_type(grid, CFG_512_16)
    assert set(by_type) == {InteractionType.EDG_EDG}
    assert by_type[InteractionType.EDG_EDG] == pytest.approx(float(np.mean(hits / 5)))


def test_accuracy_by_type_staircase_fixture():
    # Interior cells perfect, Edge cells mediocre, Cross cells wrong at n=47
    n = 47
    types = classification_grid(n, CFG_512_16)
    hits = np.zeros((n, n), dtype=np.int64)
    for r in range(n):
        for c in range(n):
            label = types[r, c].label
            if label == "Int-Int":
                hits[r, c] = 4
            elif "Cro" not in label:
                hits[r, c] = 2
    grid = AccuracyGrid(hits=hits, totals=np.full((n, n), 4))
    by_type = accuracy_by_type(grid, CFG_512_16)
    a_int = by_type[InteractionType.INT_INT]
    a_edge = by_type[InteractionType.EDG_EDG]
    a_cross = by_type[InteractionType.CRO_CRO]
    assert a_int >= a_edge >= a_cross
    assert a_int == 1.0 and a_cross == 0.0
