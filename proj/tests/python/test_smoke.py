import math

import numpy as np
import pytest

import lapoleaf


def blob_problem(n=200, kept=0.1, seed=3):
    x, truth = lapoleaf.two_blobs(n, 4.0, seed)
    rng = np.random.default_rng(seed)
    y = np.full(n, np.nan)
    for c in (0, 1):
        idx = np.flatnonzero(truth == c)
        pick = rng.choice(idx, size=max(1, int(kept * len(idx))), replace=False)
        y[pick] = c
    return x, y, truth


def test_fit_labels_two_blobs():
    x, y, truth = blob_problem(n=400, kept=0.2)
    model = lapoleaf.fit(x, y)
    assert model.size == 400
    assert model.mode == "classification"
    assert model.distance_evaluations == 400 * 399 // 2
    labels = model.labels()
    assert labels.shape == (400,)
    hidden = np.isnan(y)
    assert np.mean(labels[hidden] == truth[hidden]) > 0.85
    assert np.all(labels[~hidden] == y[~hidden])
    scores = model.scores()
    assert scores.shape == (400, 2)
    assert np.all(np.argmax(scores, axis=1) == labels)


def test_tree_arrays():
    x, y, _ = blob_problem(n=80)
    model = lapoleaf.fit(x, y, percent=4.0)
    parents = model.parents
    assert parents.count(-1) == 1
    rho = model.rho
    for i, p in enumerate(parents):
        if p >= 0:
            assert rho[p] > rho[i] or (rho[p] == rho[i] and p < i)
    assert np.allclose(model.gamma, model.rho * model.delta)
    assert len(model.roots) == model.ng_star


def test_duplicates_merge():
    x = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [5.0, 5.0], [5.0, 5.1]])
    y = np.array([0, np.nan, np.nan, 1, np.nan])
    model = lapoleaf.fit(x, y, percent=50.0)
    assert model.size == 4
    assert model.row_map == [0, 0, 1, 2, 3]
    assert list(model.labels()) == [0, 0, 0, 1, 1]


def test_predict_new_and_round_trip(tmp_path):
    x, y, _ = blob_problem(seed=5, kept=0.3)
    model = lapoleaf.fit(x, y)
    path = tmp_path / "model.json"
    model.save(path)
    value, scores, row, merged = model.predict_new(np.array([4.1, 0.2]))
    assert value == 1
    assert row == 200 and not merged
    assert scores.shape == (2,)
    again = lapoleaf.Model.load(path)
    assert again.size == 200
    assert again.predict_new(np.array([4.1, 0.2]))[0] == value


def test_regression():
    t = np.arange(600)
    series = np.sin(2 * math.pi * t / 50)
    x = np.stack([series[i : i + 595] for i in range(5)], axis=1)
    y = series[5:600].copy()
    y[400:] = np.nan
    model = lapoleaf.fit(x, y, mode="regression", percent=5.0)
    pred = model.labels()
    assert np.max(np.abs(pred[400:] - series[405:600])) < 0.2


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError):
        lapoleaf.fit(np.zeros((3, 2)), np.zeros(4))
    with pytest.raises(lapoleaf.ValidationError):
        lapoleaf.fit(np.array([[0.0], [1.0], [2.0]]), np.array([0.5, np.nan, 1.0]))
    with pytest.raises(ValueError):
        lapoleaf.fit(np.array([[0.0], [1.0]]), np.array([np.nan, np.nan]), n_classes=2)
