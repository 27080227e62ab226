"""Difficulty classifier: training behavior, prediction, serialization."""

import math
from random import Random

import numpy as np
import pytest

import oracles
from kgquiz import _kernels
from kgquiz.errors import DimensionMismatch, MalformedLine, SingleClassData, UnknownEntity
from kgquiz.features import QuestionInstance
from kgquiz.model import (
    EASY,
    HARD,
    DifficultyModel,
    TrainConfig,
    classify,
    load_training_data,
    train,
)


def separable_data(n=200, d=2, seed=0, margin=0.0):
    """Points labeled by a known separating plane through the origin."""
    rng = np.random.RandomState(seed)
    plane = rng.normal(size=d)
    X, labels = [], []
    while len(X) < n:
        x = rng.normal(size=d)
        score = float(x @ plane)
        if abs(score) <= margin:
            continue
        X.append(x)
        labels.append(EASY if score > 0 else HARD)
    return [(np.array(x), lab) for x, lab in zip(X, labels)]


def noisy_planted_data(n=500, d=10, seed=0, noise=0.1):
    rng = np.random.RandomState(seed)
    plane = rng.normal(size=d)
    data = []
    for _ in range(n):
        x = rng.normal(size=d)
        label = EASY if float(x @ plane) > 0 else HARD
        if rng.rand() < noise:
            label = HARD if label == EASY else EASY
        data.append((x, label))
    return data


def accuracy(model, data):
    correct = sum(
        (EASY if model.predict_p_easy(fv) > 0.5 else HARD) == label
        for fv, label in data
    )
    return correct / len(data)


# --- training ----------------------------------------------------------------

def test_separable_training_accuracy():
    data = separable_data(200, margin=0.05)
    model = train(data)
    assert accuracy(model, data) >= 0.99


def test_single_class_rejected():
    data = [(np.zeros(2), EASY), (np.ones(2), EASY)]
    with pytest.raises(SingleClassData):
        train(data)
    with pytest.raises(SingleClassData):
        train(data[:1])


def test_dimension_mismatch_rejected():
    data = [(np.zeros(2), EASY), (np.zeros(3), HARD)]
    with pytest.raises(DimensionMismatch):
        train(data)


def test_training_deterministic():
    data = separable_data(80, seed=5)
    m1, m2 = train(data), train(data)
    assert np.array_equal(m1.weights, m2.weights)
    assert m1.bias == m2.bias


def test_zero_variance_slot_gets_unit_std():
    data = [
        (np.array([1.0, 0.3]), EASY),
        (np.array([1.0, -0.2]), HARD),
        (np.array([1.0, 0.4]), EASY),
        (np.array([1.0, -0.5]), HARD),
    ]
    model = train(data)
    assert model.std[0] == 1.0


def test_loss_nonincreasing_over_epoch_prefixes():
    data = separable_data(60, seed=9)
    X = np.array([fv for fv, _ in data])
    y = np.array([1.0 if lab == EASY else 0.0 for _, lab in data])
    mean, std = X.mean(axis=0), X.std(axis=0)
    std[std == 0] = 1.0
    Xs = (X - mean) / std
    losses = []
    for epochs in range(1, 40):
        w, b, _ = _kernels.logreg_fit_numpy(Xs, y, 0.1, epochs, 0.01, 1e-12)
        losses.append(_kernels.logreg_loss(Xs, y, w, b, 0.01))
    assert all(b <= a + 1e-15 for a, b in zip(losses, losses[1:]))


def test_huge_learning_rate_still_nonincreasing():
    # the step-halving retry keeps the loss monotone even at lr=50
    data = separable_data(60, seed=10)
    X = np.array([fv for fv, _ in data])
    y = np.array([1.0 if lab == EASY else 0.0 for _, lab in data])
    losses = []
    for epochs in range(1, 25):
        w, b, _ = _kernels.logreg_fit_numpy(X, y, 50.0, epochs, 0.01, 1e-12)
        losses.append(_kernels.logreg_loss(X, y, w, b, 0.01))
    assert all(b <= a + 1e-15 for a, b in zip(losses, losses[1:]))


def test_gradient_matches_central_differences_at_random_points():
    data = noisy_planted_data(80, d=6, seed=2)
    X = np.array([fv for fv, _ in data])
    y = np.array([1.0 if lab == EASY else 0.0 for _, lab in data])
    rng = np.random.RandomState(3)
    for _ in range(10):
        w = rng.normal(scale=2.0, size=6)
        b = float(rng.normal())
        gw, gb = _kernels.logreg_grad(X, y, w, b, 0.01)

        def f(params):
            return _kernels.logreg_loss(X, y, np.array(params[:-1]), params[-1], 0.01)

        fd = oracles.central_diff_gradient(f, list(w) + [b])
        for a_i, f_i in zip(list(gw) + [gb], fd):
            assert a_i == pytest.approx(f_i, rel=1e-4, abs=1e-8)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0)
    with pytest.raises(ValueError):
        TrainConfig(epochs=-5)


# --- prediction ----------------------------------------------------------------

def _identity_model(weights, bias):
    n = len(weights)
    return DifficultyModel(weights, bias, None, np.zeros(n), np.ones(n))


def test_predict_zero_model_is_half():
    model = _identity_model([0.0, 0.0], 0.0)
    assert model.predict_p_easy([3.0, -4.0]) == 0.5


def test_predict_monotone_in_bias():
    previous = 0.0
    for bias in (-2.0, -1.0, 0.0, 1.0, 2.0, 5.0):
        p = _identity_model([0.0], bias).predict_p_easy([0.0])
        assert p > previous
        previous = p


def test_predict_hand_sigmoid():
    model = _identity_model([1.0], 0.0)
    assert model.predict_p_easy([0.5]) == pytest.approx(1 / (1 + math.exp(-0.5)))
    assert model.predict_p_easy([0.5]) == pytest.approx(0.6225, abs=5e-5)


def test_predict_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        _identity_model([1.0, 2.0], 0.0).predict_p_easy([1.0])


def test_predict_monotone_in_positive_weight_feature():
    model = _identity_model([2.0, -1.0], 0.1)
    values = [model.predict_p_easy([x, 0.7]) for x in (-3, -1, 0, 1, 3)]
    assert values == sorted(values)


# --- classification ---------------------------------------------------------------

def test_classify_threshold(kg, tables, model):
    rng = Random(12)
    entities = sorted(kg.entities)
    for _ in range(50):
        answer = rng.choice(entities)
        cues = [e for e in rng.sample(entities, 3) if e != answer][:2]
        if not cues:
            continue
        inst = QuestionInstance(tuple(cues), answer)
        label = classify(model, inst, tables)
        from kgquiz.features import extract_features
        p = model.predict_p_easy(extract_features(
            inst, tables.salience, tables.links, kg, model.feature_groups))
        assert label == (EASY if p > 0.5 else HARD)


def test_classify_exact_boundary_is_hard(kg, tables):
    zero = DifficultyModel(np.zeros(30), 0.0, ("SAL", "COH", "TYPE"),
                           np.zeros(30), np.ones(30))
    inst = QuestionInstance((sorted(kg.entities)[0],), sorted(kg.entities)[1])
    assert classify(zero, inst, tables) == HARD


# --- serialization ------------------------------------------------------------------

def test_model_roundtrip_exact(tmp_path, training_data):
    model = train(training_data)
    path = tmp_path / "model.json"
    model.save(path)
    loaded = DifficultyModel.load(path)
    assert np.array_equal(loaded.weights, model.weights)
    assert loaded.bias == model.bias
    assert loaded.feature_groups == model.feature_groups
    assert np.array_equal(loaded.mean, model.mean)
    assert np.array_equal(loaded.std, model.std)
    assert loaded.config == model.config
    # a second save emits identical bytes
    loaded.save(tmp_path / "model2.json")
    assert (tmp_path / "model.json").read_bytes() == (tmp_path / "model2.json").read_bytes()


def test_model_file_field_names(tmp_path, training_data):
    import json
    model = train(training_data)
    model.save(tmp_path / "m.json")
    payload = json.loads((tmp_path / "m.json").read_text())
    assert set(payload) == {"weights", "bias", "groups", "standardization", "config"}
    assert set(payload["standardization"]) == {"mean", "std"}


# --- training data files --------------------------------------------------------------

def test_load_training_data(fixture_paths, kg, training_instances):
    assert len(training_instances) >= 150
    labels = {inst.label for inst in training_instances}
    assert labels == {EASY, HARD}


def test_load_training_data_validation(tmp_path, kg):
    path = tmp_path / "bad.tsv"
    path.write_text("easy\tGhost_Entity\tMinthaven\n")
    with pytest.raises(UnknownEntity):
        load_training_data(path, kg)
    path.write_text("sorta\tMinthaven\tOakvale\n")
    with pytest.raises(MalformedLine):
        load_training_data(path, kg)
    path.write_text("easy only two cols\n")
    with pytest.raises(MalformedLine):
        load_training_data(path, kg)
