"""Key-posture classification from 20-joint skeleton frames.

Features are joint coordinates normalized for position, size and facing:
hip centre moved to the origin, scaled so the hip-to-shoulder-centre
distance is 1, and turned about the vertical axis until the shoulder line
has no depth component. A nearest-centroid model classifies the 60-vector.

Joint order is the Kinect v1 skeleton (listed in ``JOINTS``); skeleton CSV
files use it for the ``j1_x .. j20_z`` columns.
"""

from __future__ import annotations

import csv
import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateSkeletonError, FormatError, TrainingError, ValidationError

JOINTS = (
    "HipCenter", "Spine", "ShoulderCenter", "Head",
    "ShoulderLeft", "ElbowLeft", "WristLeft", "HandLeft",
    "ShoulderRight", "ElbowRight", "WristRight", "HandRight",
    "HipLeft", "KneeLeft", "AnkleLeft", "FootLeft",
    "HipRight", "KneeRight", "AnkleRight", "FootRight",
)
J = {name: i for i, name in enumerate(JOINTS)}
N_JOINTS = len(JOINTS)
N_FEATURES = 3 * N_JOINTS
_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class SkeletonFrame:
    frame: int
    joints: np.ndarray  # (20, 3) metres, read-only

    def __post_init__(self):
        arr = np.array(self.joints, dtype=float)
        if arr.shape != (N_JOINTS, 3):
            raise ValidationError(f"skeleton frame {self.frame}: expected {N_JOINTS}x3 joints, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"skeleton frame {self.frame}: non-finite coordinate")
        arr.flags.writeable = False
        object.__setattr__(self, "joints", arr)

    def __eq__(self, other):
        if not isinstance(other, SkeletonFrame):
            return NotImplemented
        return self.frame == other.frame and np.array_equal(self.joints, other.joints)

    def __hash__(self):
        return hash((self.frame, self.joints.tobytes()))


def extract_features(s: SkeletonFrame) -> np.ndarray:
    p = s.joints - s.joints[J["HipCenter"]]
    torso = float(np.linalg.norm(p[J["ShoulderCenter"]]))
    if torso < _EPS:
        raise DegenerateSkeletonError(f"skeleton frame {s.frame}: zero torso length")
    p = p / torso
    sx, _, sz = p[J["ShoulderRight"]] - p[J["ShoulderLeft"]]
    r = float(np.hypot(sx, sz))
    if r < _EPS:
        raise DegenerateSkeletonError(f"skeleton frame {s.frame}: shoulder line is vertical or collapsed")
    c, si = sx / r, sz / r
    # Rotate about y so the shoulder vector lands on +x.
    x = p[:, 0] * c + p[:, 2] * si
    z = -p[:, 0] * si + p[:, 2] * c
    out = np.column_stack((x, p[:, 1], z)).reshape(-1)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class CentroidModel:
    classes: tuple[str, ...]
    centroids: np.ndarray  # (k, 60)
    counts: tuple[int, ...]

    def __post_init__(self):
        cen = np.array(self.centroids, dtype=float)
        if not self.classes:
            raise TrainingError("a model needs at least one class")
        if list(self.classes) != sorted(set(self.classes)):
            raise TrainingError("model classes must be unique and sorted")
        if cen.shape != (len(self.classes), N_FEATURES) or not np.all(np.isfinite(cen)):
            raise TrainingError(f"centroids must be a finite {len(self.classes)}x{N_FEATURES} array")
        if len(self.counts) != len(self.classes):
            raise TrainingError("one training count per class required")
        cen.flags.writeable = False
        object.__setattr__(self, "centroids", cen)
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    def to_dict(self) -> dict:
        return {
            "model": "nearest-centroid",
            "features": "kinect20-normalized",
            "classes": list(self.classes),
            "counts": list(self.counts),
            "centroids": [[float(v) for v in row] for row in self.centroids],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> CentroidModel:
        try:
            return cls(tuple(doc["classes"]), np.array(doc["centroids"], dtype=float), tuple(doc["counts"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad model document: {exc}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> CentroidModel:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise FormatError(f"cannot read model: {exc.strerror or exc}", str(path)) from exc
        except json.JSONDecodeError as exc:
            raise FormatError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc
        return cls.from_dict(doc)


def train(labeled: Iterable[tuple[SkeletonFrame, str]], classes: Sequence[str] | None = None) -> CentroidModel:
    """Mean feature vector per posture id.

    ``classes`` optionally names classes that must be present; one without
    examples is a training error.
    """
    groups: dict[str, list[np.ndarray]] = defaultdict(list)
    for s, label in labeled:
        groups[label].append(extract_features(s))
    for c in classes or ():
        if not groups.get(c):
            raise TrainingError(f"class {c!r} has no training examples")
    if not groups:
        raise TrainingError("no training examples")
    names = sorted(groups)
    return CentroidModel(
        tuple(names),
        np.stack([np.mean(groups[c], axis=0) for c in names]),
        tuple(len(groups[c]) for c in names),
    )


def predict_features(model: CentroidModel, features: np.ndarray) -> tuple[str, float]:
    d = np.linalg.norm(model.centroids - np.asarray(features, dtype=float), axis=1)
    best = float(d.min())
    # Classes are sorted, so the first (near-)minimum is the lexicographic winner.
    i = int(np.flatnonzero(d <= best + 1e-12 * max(1.0, best))[0])
    return model.classes[i], float(d[i])


def predict(model: CentroidModel, s: SkeletonFrame) -> tuple[str, float]:
    return predict_features(model, extract_features(s))


@dataclass(frozen=True)
class Evaluation:
    accuracy: float
    correct: int
    total: int
    labels: tuple[str, ...]
    confusion: dict[str, dict[str, int]]

    def to_dict(self) -> dict:
        return {"accuracy": self.accuracy, "correct": self.correct, "total": self.total,
                "labels": list(self.labels), "confusion": self.confusion}


def evaluate(model: CentroidModel, labeled: Iterable[tuple[SkeletonFrame, str]]) -> Evaluation:
    """Accuracy and confusion counts (rows: true id, columns: predicted id)."""
    pairs = [(label, predict(model, s)[0]) for s, label in labeled]
    counts = Counter(pairs)
    labels = tuple(sorted(set(model.classes) | {t for t, _ in pairs}))
    confusion = {t: {p: counts.get((t, p), 0) for p in labels} for t in labels}
    correct = sum(n for (t, p), n in counts.items() if t == p)
    total = len(pairs)
    return Evaluation(correct / total if total else 0.0, correct, total, labels, confusion)


# -- CSV ----------------------------------------------------------------------

CSV_HEADER = ["frame"] + [f"j{i}_{a}" for i in range(1, N_JOINTS + 1) for a in "xyz"]


def read_skeleton_csv(path: str | Path) -> list[tuple[SkeletonFrame, str | None]]:
    """Rows of ``frame,j1_x,...,j20_z[,posture_id]``."""
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read skeleton file: {exc.strerror or exc}", str(path)) from exc
    out = []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[: len(CSV_HEADER)]] != CSV_HEADER:
            raise FormatError("header must be frame,j1_x,j1_y,j1_z,...,j20_z[,posture_id]", f"{path}:1")
        labelled = len(header) > len(CSV_HEADER)
        for lineno, row in enumerate(reader, 2):
            if not row or not "".join(row).strip():
                continue
            try:
                frame = int(row[0])
                coords = np.array([float(v) for v in row[1: len(CSV_HEADER)]]).reshape(N_JOINTS, 3)
            except (ValueError, IndexError) as exc:
                raise FormatError(f"bad skeleton row: {exc}", f"{path}:{lineno}") from exc
            label = row[len(CSV_HEADER)].strip() or None if labelled and len(row) > len(CSV_HEADER) else None
            try:
                out.append((SkeletonFrame(frame, coords), label))
            except ValidationError as exc:
                raise FormatError(str(exc), f"{path}:{lineno}") from exc
    return out


def write_skeleton_csv(path: str | Path, rows: Iterable[tuple[SkeletonFrame, str | None]]) -> None:
    rows = list(rows)
    labelled = any(label is not None for _, label in rows)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER + (["posture_id"] if labelled else []))
        for s, label in rows:
            vals = [s.frame] + [repr(float(v)) for v in s.joints.reshape(-1)]
            w.writerow(vals + ([label or ""] if labelled else []))
