from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adavu.errors import DegenerateSkeletonError, FormatError, TrainingError, ValidationError
from adavu.recognizer import (
    CSV_HEADER, J, N_FEATURES, CentroidModel, SkeletonFrame, evaluate, extract_features, predict,
    read_skeleton_csv, train, write_skeleton_csv,
)
from adavu.synthetic import make_templates

CLASSES = ("C01", "C02", "C03", "C04")


@pytest.fixture(scope="module")
def templates():
    return make_templates(CLASSES, np.random.default_rng(7))


def yaw(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0, -s], [0, 1, 0], [s, 0, c]])


def test_skeleton_validation():
    with pytest.raises(ValidationError):
        SkeletonFrame(0, np.zeros((19, 3)))
    bad = np.ones((20, 3))
    bad[3, 1] = np.nan
    with pytest.raises(ValidationError):
        SkeletonFrame(0, bad)
    s = SkeletonFrame(0, np.ones((20, 3)))
    assert not s.joints.flags.writeable
    assert s == SkeletonFrame(0, np.ones((20, 3))) and hash(s) == hash(SkeletonFrame(0, np.ones((20, 3))))


def test_features_fixed_point(templates):
    f = extract_features(SkeletonFrame(0, templates.joints["C01"]))
    assert f.shape == (N_FEATURES,)
    assert np.allclose(f[3 * J["HipCenter"]: 3 * J["HipCenter"] + 3], 0)
    shoulder = f[3 * J["ShoulderCenter"]: 3 * J["ShoulderCenter"] + 3]
    assert np.linalg.norm(shoulder) == pytest.approx(1.0)
    d = f.reshape(20, 3)[J["ShoulderRight"]] - f.reshape(20, 3)[J["ShoulderLeft"]]
    assert d[0] > 0 and d[2] == pytest.approx(0, abs=1e-12)


def test_features_translation_and_scale(templates):
    base = templates.joints["C02"]
    f = extract_features(SkeletonFrame(0, base))
    assert np.allclose(extract_features(SkeletonFrame(0, base + [5, 0, 2])), f, atol=1e-9)
    assert np.allclose(extract_features(SkeletonFrame(0, base * 2)), f, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(-np.pi, np.pi), st.floats(0.3, 3.0),
       st.tuples(*[st.floats(-10, 10)] * 3), st.sampled_from(CLASSES))
def test_features_invariance_property(theta, scale, shift, cls):
    base = make_templates(CLASSES, np.random.default_rng(7)).joints[cls]
    moved = scale * base @ yaw(theta).T + np.array(shift)
    assert np.allclose(extract_features(SkeletonFrame(0, moved)), extract_features(SkeletonFrame(0, base)), atol=1e-9)


def test_degenerate_skeletons(templates):
    with pytest.raises(DegenerateSkeletonError, match="torso"):
        extract_features(SkeletonFrame(3, np.zeros((20, 3))))
    j = templates.joints["C01"].copy()
    j[J["ShoulderLeft"]] = j[J["ShoulderRight"]]
    with pytest.raises(DegenerateSkeletonError, match="shoulder"):
        extract_features(SkeletonFrame(3, j))


def test_one_example_per_class_gives_centroids(templates):
    rows = [(SkeletonFrame(0, templates.joints[c]), c) for c in reversed(CLASSES)]
    model = train(rows)
    assert model.classes == CLASSES and model.counts == (1, 1, 1, 1)
    for i, c in enumerate(CLASSES):
        assert np.array_equal(model.centroids[i], extract_features(SkeletonFrame(0, templates.joints[c])))
        assert predict(model, SkeletonFrame(0, templates.joints[c])) == (c, 0.0)
    doubled = train(rows + rows)
    assert np.allclose(doubled.centroids, model.centroids) and doubled.counts == (2, 2, 2, 2)


def test_tie_goes_to_smaller_id():
    cen = np.zeros((2, N_FEATURES))
    cen[0, 0], cen[1, 0] = -1.0, 1.0
    model = CentroidModel(("C01", "C02"), cen, (1, 1))
    from adavu.recognizer import predict_features
    assert predict_features(model, np.zeros(N_FEATURES)) == ("C01", 1.0)


def test_training_errors(templates):
    with pytest.raises(TrainingError):
        train([])
    with pytest.raises(TrainingError, match="C09"):
        train([(SkeletonFrame(0, templates.joints["C01"]), "C01")], classes=["C01", "C09"])
    with pytest.raises(TrainingError):
        CentroidModel(("b", "a"), np.zeros((2, N_FEATURES)), (1, 1))


def test_evaluate_confusion(templates):
    rng = np.random.default_rng(1)
    train_rows = [(templates.sample(c, rng), c) for c in CLASSES for _ in range(5)]
    model = train(train_rows)
    test_rows = [(templates.sample(c, rng), c) for c in CLASSES for _ in range(3)]
    ev = evaluate(model, test_rows)
    assert ev.total == 12 and ev.accuracy == ev.correct / ev.total
    for c in CLASSES:
        assert sum(ev.confusion[c].values()) == 3
    assert ev.correct == sum(ev.confusion[c][c] for c in CLASSES)
    assert evaluate(model, []).accuracy == 0.0


def test_model_json_roundtrip(tmp_path, templates):
    model = train([(SkeletonFrame(0, templates.joints[c]), c) for c in CLASSES])
    p = tmp_path / "m.json"
    model.save(p)
    back = CentroidModel.load(p)
    assert back.classes == model.classes and back.counts == model.counts
    assert np.array_equal(back.centroids, model.centroids)
    p.write_text("{")
    with pytest.raises(FormatError):
        CentroidModel.load(p)
    p.write_text('{"classes": ["a"]}')
    with pytest.raises(FormatError):
        CentroidModel.load(p)


def test_csv_roundtrip(tmp_path, templates):
    rng = np.random.default_rng(3)
    rows = [(templates.sample(c, rng, frame=i), c) for i, c in enumerate(CLASSES)]
    p = tmp_path / "s.csv"
    write_skeleton_csv(p, rows)
    assert read_skeleton_csv(p) == rows
    write_skeleton_csv(p, [(s, None) for s, _ in rows])
    assert p.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    assert [label for _, label in read_skeleton_csv(p)] == [None] * 4


def test_csv_errors(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("frame,x\n1,2\n")
    with pytest.raises(FormatError, match=":1"):
        read_skeleton_csv(p)
    p.write_text(",".join(CSV_HEADER) + "\n0," + ",".join(["1"] * 59) + "\n")
    with pytest.raises(FormatError, match=":2"):
        read_skeleton_csv(p)
    with pytest.raises(FormatError):
        read_skeleton_csv(tmp_path / "missing.csv")
