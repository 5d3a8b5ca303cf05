import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from botforest.calibrate import PlattCalibrator, apply_platt, apply_platt_batch, fit_platt, platt_nll
from botforest.errors import SingleClassInput
from botforest.evalkit import roc_auc
from botforest.seeds import spawn_rng
from oracles import grid_platt_min_nll, grid_platt_min_nll_full, platt_targets


def test_apply_examples():
    assert apply_platt(PlattCalibrator(0.0, 0.0), 0.3) == 0.5
    assert apply_platt(PlattCalibrator(-10.0, 5.0), 0.5) == 0.5
    assert apply_platt(PlattCalibrator(-10.0, 5.0), 1.0) == pytest.approx(0.993307, abs=1e-6)


def test_apply_stable_for_large_logits():
    for a, s in ((-700.0, 1.0), (700.0, 1.0), (-700.0, -1.0), (900.0, 1.0)):
        p = apply_platt(PlattCalibrator(a, 0.0), s)
        assert 0.0 < p < 1.0


def test_apply_batch_matches_scalar():
    cal = PlattCalibrator(-7.3, 3.1)
    scores = np.linspace(0, 1, 11)
    batch = apply_platt_batch(cal, scores)
    for s, p in zip(scores, batch):
        assert apply_platt(cal, float(s)) == pytest.approx(float(p), abs=1e-12)


def test_symmetric_input_maps_half_to_half():
    pos = np.array([0.9, 0.8, 0.7, 0.6])
    scores = np.concatenate([pos, 1.0 - pos])
    labels = np.array([1, 1, 1, 1, 0, 0, 0, 0])
    cal = fit_platt(scores, labels)
    assert apply_platt(cal, 0.5) == pytest.approx(0.5, abs=1e-6)


def test_separable_input_orients_sigmoid():
    scores = np.array([0.9, 0.8, 0.85, 0.2, 0.1, 0.15])
    labels = np.array([1, 1, 1, 0, 0, 0])
    cal = fit_platt(scores, labels)
    assert cal.A < 0
    assert cal.converged


def test_single_class_rejected():
    with pytest.raises(SingleClassInput):
        fit_platt([0.1, 0.9], [1, 1])


def test_fit_deterministic():
    rng = spawn_rng(8)
    scores = rng.random(50)
    labels = (scores + rng.normal(0, 0.3, 50) > 0.5).astype(int)
    labels[0], labels[1] = 0, 1
    a = fit_platt(scores, labels)
    b = fit_platt(scores, labels)
    assert (a.A, a.B) == (b.A, b.B)


def test_ternary_grid_oracle_matches_full_scan():
    rng = spawn_rng(17)
    scores = rng.random(20)
    labels = (scores > 0.4).astype(int)
    coarse = dict(a_range=(-8.0, 4.0), b_range=(-5.0, 5.0), step=0.1)
    assert grid_platt_min_nll(scores, labels, **coarse) == pytest.approx(
        grid_platt_min_nll_full(scores, labels, **coarse), abs=1e-12)


def test_fit_beats_grid_oracle():
    rng = spawn_rng(23)
    for _ in range(5):
        n = int(rng.integers(15, 41))
        scores = np.round(rng.random(n), 3)
        labels = (scores + rng.normal(0, 0.25, n) > 0.5).astype(int)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        cal = fit_platt(scores, labels)
        fitted = platt_nll(cal.A, cal.B, scores, platt_targets(labels))
        oracle = grid_platt_min_nll(scores, labels)
        assert fitted <= oracle + 1e-3


def test_rank_preservation_keeps_auc():
    rng = spawn_rng(31)
    scores = rng.random(80)
    labels = (scores + rng.normal(0, 0.2, 80) > 0.5).astype(int)
    labels[:2] = (0, 1)
    cal = fit_platt(scores, labels)
    assert cal.A < 0
    assert roc_auc(scores, labels) == roc_auc(apply_platt_batch(cal, scores), labels)


@settings(max_examples=25, deadline=None)
@given(st.floats(-50, 10), st.floats(-20, 20),
       st.floats(0, 1, allow_nan=False))
def test_apply_always_open_interval(a, b, s):
    p = apply_platt(PlattCalibrator(a, b), s)
    assert 0.0 < p < 1.0
