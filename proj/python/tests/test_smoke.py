import math

import numpy as np
import pytest

import acqbench as ab


def test_scorers_on_a_known_distribution():
    probs = np.array([[[0.7, 0.2, 0.1]]])
    assert ab.least_confident_scores(probs)[0] == pytest.approx(0.3)
    assert ab.margin_scores(probs)[0] == pytest.approx(-0.5)
    h = -(0.7 * math.log(0.7) + 0.2 * math.log(0.2) + 0.1 * math.log(0.1))
    assert ab.entropy_scores(probs)[0] == pytest.approx(h)
    assert ab.bald_scores(probs)[0] == pytest.approx(0.0, abs=1e-12)


def test_bad_tensor_shape_raises():
    with pytest.raises(ValueError):
        ab.entropy_scores(np.ones((2, 3)))


def test_selectors():
    assert sorted(ab.select_top_k([0.1, 0.9, 0.5, 0.7], 2)) == [1, 3]
    pool = np.array([[0.0], [1.0], [10.0]])
    labeled = np.array([[0.0]])
    assert ab.select_k_centers(pool, labeled, 1) == [2]


def test_statistics():
    a = [0.9, 0.91, 0.92, 0.93, 0.94]
    b = [0.5, 0.51, 0.52, 0.53, 0.54]
    assert ab.t_score(a, b) > ab.DEFAULT_CRITICAL
    assert ab.t_score(a, b) == pytest.approx(-ab.t_score(b, a))
    assert ab.winning_rate([a, a], [b, b]) == pytest.approx(1.0)


def test_schedules():
    phases = [ab.annealing_phase(t) for t in range(1, 11)]
    assert phases == ["explore"] * 5 + ["exploit"] * 5


def test_tiny_run_is_deterministic():
    cfg = {
        "dataset": {"kind": "grid_toy", "params": {"cells": 2, "n_per_cell": 10, "spread": 0.05}},
        "model": {"hidden": 8},
        "train": {"epochs": 5},
        "al": {"M": 4, "T": 2, "b": 2},
        "strategy": {"kind": "bald"},
        "seeds": [0, 1],
    }
    first = ab.run(cfg)
    assert len(first) == 2
    assert [r["n_labeled"] for r in first[0]["rounds"]] == [4, 6, 8]
    assert first == ab.run(cfg)


def test_bad_config_raises():
    with pytest.raises(ValueError):
        ab.run({"al": {"foo": 1}})
