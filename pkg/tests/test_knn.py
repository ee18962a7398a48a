"""Nearest-neighbor classification, tie-breaking, sweeps, and persistence."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from texstage import (
    BinaryLabel,
    FeatureVector,
    GlcmConfig,
    Model,
    StageLabel,
    TrainingSample,
    build_model,
    classify,
    distance,
    load_model,
    model_digest,
    save_model,
    sweep_k,
    to_binary,
)
from texstage.errors import (
    DatasetParseError,
    InvalidConfigError,
    InvalidModelError,
    ValidationError,
)

I, II, III = StageLabel.TYPE_I, StageLabel.TYPE_II, StageLabel.TYPE_III


def fv(*values):
    return FeatureVector(*values)


def sample(sid, label, *values):
    return TrainingSample(fv(*values), label, sid)


def random_dataset(rng, n):
    labels = [I, II, III]
    return [
        sample(f"s{i:03d}", labels[int(rng.integers(0, 3))], *rng.uniform(-5, 5, size=4))
        for i in range(n)
    ]


# --- labels ----------------------------------------------------------------


def test_stage_labels_are_totally_ordered_with_codes_and_phrases():
    assert I < II < III
    assert [l.code for l in StageLabel] == ["I", "II", "III"]
    assert I.phrase == "normal use"
    assert II.phrase == "early warning"
    assert III.phrase == "not recommended"
    assert str(II) == "Type II"
    for label in StageLabel:
        assert StageLabel.from_code(label.code) is label
    with pytest.raises(ValidationError):
        StageLabel.from_code("IV")


def test_binary_collapse():
    assert to_binary(I) is BinaryLabel.NORMAL_USE
    assert to_binary(II) is BinaryLabel.NORMAL_USE
    assert to_binary(III) is BinaryLabel.NOT_RECOMMENDED
    assert BinaryLabel.NORMAL_USE < BinaryLabel.NOT_RECOMMENDED
    assert str(BinaryLabel.NOT_RECOMMENDED) == "not recommended"


# --- distance --------------------------------------------------------------


def test_distance_hand_values():
    assert distance(fv(0, 3, 0, 4), fv(0, 0, 0, 0)) == 5.0
    assert distance(fv(1, 1, 1, 1), fv(1, 1, 1, 1)) == 0.0
    assert distance(fv(1, 0, 0, 0), fv(0, 0, 0, 0)) == 1.0


# --- classify --------------------------------------------------------------


def test_k1_returns_the_stored_label_for_a_stored_sample():
    rng = np.random.default_rng(0)
    train = random_dataset(rng, 12)
    model = build_model(train, k=1)
    for s in train:
        assert classify(model, s.features).label == s.label


def test_majority_vote_two_of_three():
    train = [
        sample("a", II, 1.0, 0, 0, 0),
        sample("b", II, 1.1, 0, 0, 0),
        sample("c", III, 1.2, 0, 0, 0),
        sample("d", I, 9.0, 0, 0, 0),
    ]
    pred = classify(build_model(train, k=3), fv(1.0, 0, 0, 0))
    assert pred.label == II
    assert [n.sample_id for n in pred.neighbors] == ["a", "b", "c"]


def test_vote_tie_goes_to_smaller_summed_distance():
    train = [
        sample("near-iii", III, 1.0, 0, 0, 0),
        sample("far-i", I, 2.0, 0, 0, 0),
        sample("padding", II, 50.0, 0, 0, 0),
    ]
    pred = classify(build_model(train, k=2), fv(0, 0, 0, 0))
    assert pred.label == III  # 1.0 beats 2.0 despite III being the higher label


def test_vote_tie_with_equal_distances_goes_to_lower_label():
    train = [
        sample("a", III, 1.0, 0, 0, 0),
        sample("b", I, -1.0, 0, 0, 0),
    ]
    pred = classify(build_model(train, k=2), fv(0, 0, 0, 0))
    assert pred.label == I


def test_equidistant_neighbors_cut_by_sample_id():
    # both at distance 1; only one fits into k=1
    train = [
        sample("zz", III, 1.0, 0, 0, 0),
        sample("aa", I, -1.0, 0, 0, 0),
    ]
    pred = classify(build_model(train, k=1), fv(0, 0, 0, 0))
    assert pred.neighbors[0].sample_id == "aa"
    assert pred.label == I


def test_neighbors_are_reported_in_rank_order_with_distances():
    rng = np.random.default_rng(1)
    train = random_dataset(rng, 20)
    model = build_model(train, k=7)
    q = fv(*rng.uniform(-5, 5, size=4))
    pred = classify(model, q)
    ds = [n.distance for n in pred.neighbors]
    assert ds == sorted(ds)
    assert len(pred.neighbors) == 7
    by_id = {s.sample_id: s for s in train}
    for n in pred.neighbors:
        assert n.distance == pytest.approx(distance(by_id[n.sample_id].features, q))


def test_prediction_is_invariant_to_training_order():
    rng = np.random.default_rng(2)
    train = random_dataset(rng, 30)
    queries = [fv(*rng.uniform(-5, 5, size=4)) for _ in range(20)]
    for k in (1, 3, 6):
        base = build_model(train, k=k)
        expected = [classify(base, q).label for q in queries]
        for trial in range(5):
            perm = list(train)
            rng.shuffle(perm)
            shuffled = build_model(perm, k=k)
            assert [classify(shuffled, q).label for q in queries] == expected


def test_prediction_is_invariant_to_uniform_scaling():
    rng = np.random.default_rng(3)
    train = random_dataset(rng, 25)
    queries = [fv(*rng.uniform(-5, 5, size=4)) for _ in range(10)]
    model = build_model(train, k=5)
    expected = [classify(model, q).label for q in queries]
    for c in (1e-3, 0.25, 7.0, 1e3):
        scaled_train = [TrainingSample(fv(*(c * v for v in s.features)), s.label, s.sample_id)
                        for s in train]
        scaled_model = build_model(scaled_train, k=5)
        got = [classify(scaled_model, fv(*(c * v for v in q))).label for q in queries]
        assert got == expected, c


def test_one_nn_matches_linear_scan_oracle():
    rng = np.random.default_rng(4)
    for _ in range(30):
        train = random_dataset(rng, int(rng.integers(5, 40)))
        model = build_model(train, k=1)
        q = fv(*rng.uniform(-5, 5, size=4))
        best = min(train, key=lambda s: (distance(s.features, q), s.sample_id))
        assert classify(model, q).label == best.label


# --- model validation ------------------------------------------------------


def test_model_rejects_bad_k_and_duplicates():
    train = random_dataset(np.random.default_rng(5), 6)
    with pytest.raises(InvalidConfigError):
        build_model(train, k=0)
    with pytest.raises(InvalidConfigError):
        build_model(train, k=7)
    with pytest.raises(InvalidModelError):
        build_model([], k=1)
    dup = train + [TrainingSample(train[0].features, train[0].label, train[0].sample_id)]
    with pytest.raises(InvalidModelError, match="duplicate"):
        build_model(dup, k=1)


def test_zscore_normalization_standardizes_before_distances():
    train = [
        sample("a", I, 0.0, 100.0, 0, 0),
        sample("b", I, 1.0, 200.0, 0, 0),
        sample("c", III, 2.0, 300.0, 0, 0),
        sample("d", III, 3.0, 400.0, 0, 0),
    ]
    model = build_model(train, k=1, normalization="zscore")
    means, stds = model.norm_stats
    feats = np.array([s.features for s in train])
    assert means == pytest.approx(tuple(feats.mean(axis=0)))
    assert stds[:2] == pytest.approx(tuple(feats.std(axis=0)[:2]))
    assert stds[2] == 1.0 and stds[3] == 1.0  # zero-variance dims left unscaled
    # distances reported by classify live in standardized space
    pred = classify(model, fv(0.0, 100.0, 0, 0))
    assert pred.neighbors[0].sample_id == "a"
    assert pred.neighbors[0].distance == 0.0


def test_zscore_stats_pairing_is_enforced():
    train = random_dataset(np.random.default_rng(6), 4)
    with pytest.raises(InvalidModelError):
        Model(samples=tuple(train), k=1, glcm_config=GlcmConfig(), normalization="zscore")
    with pytest.raises(InvalidModelError):
        Model(samples=tuple(train), k=1, glcm_config=GlcmConfig(),
              normalization="none", norm_stats=((0,) * 4, (1,) * 4))
    with pytest.raises(InvalidConfigError):
        build_model(train, k=1, normalization="robust")


# --- sweep -----------------------------------------------------------------


def test_sweep_rows_match_independent_reevaluation():
    rng = np.random.default_rng(7)
    train = random_dataset(rng, 24)
    eval_samples = random_dataset(rng, 15)
    result = sweep_k(train, eval_samples, 1, 8)
    assert [r.k for r in result.rows] == list(range(1, 9))
    for row in result.rows:
        model = build_model(train, row.k)
        correct = sum(classify(model, s.features).label == s.label for s in eval_samples)
        assert row.correct == correct
        assert row.accuracy == pytest.approx(correct / len(eval_samples))
    best = max(result.rows, key=lambda r: r.accuracy)
    assert result.rows[result.best_k - 1].accuracy == pytest.approx(best.accuracy)


def test_sweep_tie_selects_smallest_k():
    # one-class training set: every k predicts I, so all accuracies tie
    train = [sample(f"s{i}", I, float(i), 0, 0, 0) for i in range(20)]
    eval_samples = [sample("e0", I, 0.5, 0, 0, 0), sample("e1", I, 3.3, 0, 0, 0)]
    result = sweep_k(train, eval_samples, 4, 16)
    assert all(r.accuracy == 1.0 for r in result.rows)
    assert result.best_k == 4


def test_sweep_validates_bounds_and_eval_set():
    train = random_dataset(np.random.default_rng(8), 10)
    with pytest.raises(InvalidConfigError):
        sweep_k(train, train, 5, 4)
    with pytest.raises(InvalidConfigError):
        sweep_k(train, train, 1, 11)
    with pytest.raises(InvalidConfigError):
        sweep_k(train, train, 0, 4)
    from texstage.errors import InvalidInputError

    with pytest.raises(InvalidInputError):
        sweep_k(train, [], 1, 4)


# --- persistence -----------------------------------------------------------

NASTY = [0.1, -0.1, 1 / 3, math.pi, 1e-300, 5e-324, 123456.78901234567, 0.0]


def test_model_roundtrip_is_bit_exact(tmp_path):
    samples = tuple(
        sample(f"n{i}", [I, II, III][i % 3], *(NASTY[(i + j) % len(NASTY)] for j in range(4)))
        for i in range(8)
    )
    cfg = GlcmConfig(m=16, offsets=((0, 1), (1, -1)), symmetric=False, mode="standard")
    model = build_model(samples, k=4, glcm_config=cfg, normalization="zscore")
    path = tmp_path / "model.json"
    save_model(model, path)
    back = load_model(path)
    assert back == model
    assert model_digest(back) == model_digest(model)
    assert back.fingerprint == cfg.fingerprint()


def test_model_roundtrip_over_random_models(tmp_path):
    rng = np.random.default_rng(9)
    for i in range(20):
        train = random_dataset(rng, int(rng.integers(3, 30)))
        model = build_model(train, k=int(rng.integers(1, len(train) + 1)))
        path = tmp_path / f"m{i}.json"
        save_model(model, path)
        assert load_model(path) == model


def test_load_model_rejects_tampering(tmp_path):
    model = build_model(random_dataset(np.random.default_rng(10), 5), k=2)
    path = tmp_path / "model.json"
    save_model(model, path)

    doc = json.loads(path.read_text())
    doc["fingerprint"] = "0" * 64
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError, match="fingerprint"):
        load_model(path)

    doc = json.loads(save_and_read(model, path))
    doc["version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError, match="version"):
        load_model(path)

    path.write_text("{truncated")
    with pytest.raises(DatasetParseError):
        load_model(path)

    path.write_text("[1, 2]")
    with pytest.raises(DatasetParseError):
        load_model(path)

    doc = json.loads(save_and_read(model, path))
    del doc["samples"]
    path.write_text(json.dumps(doc))
    with pytest.raises(DatasetParseError):
        load_model(path)


def save_and_read(model, path):
    save_model(model, path)
    return path.read_text()


def test_load_model_rejects_bad_label_code(tmp_path):
    model = build_model(random_dataset(np.random.default_rng(11), 4), k=1)
    path = tmp_path / "model.json"
    save_model(model, path)
    doc = json.loads(path.read_text())
    doc["samples"][0]["label"] = "IX"
    path.write_text(json.dumps(doc))
    with pytest.raises((ValidationError, DatasetParseError)):
        load_model(path)


# --- digest ----------------------------------------------------------------


def test_model_digest_tracks_content():
    rng = np.random.default_rng(12)
    train = random_dataset(rng, 6)
    a = build_model(train, k=2)
    b = build_model(train, k=3)
    assert model_digest(a) != model_digest(b)
    assert model_digest(a) == model_digest(build_model(train, k=2))


@settings(max_examples=25)
@given(st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_any_finite_float_survives_the_json_roundtrip(x):
    s = sample("x", I, x, 0.0, 0.0, 0.0)
    blob = json.dumps({"v": list(s.features)})
    assert json.loads(blob)["v"][0] == x
