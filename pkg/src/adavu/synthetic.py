"""Synthetic skeletons for exercising the posture recognizer.

A template is a set of limb angles on a fixed-proportion body. Templates
are drawn at random and kept only if their feature vectors lie at least
``min_separation`` (in torso units) from every template kept so far.
Samples add isotropic Gaussian joint noise, then an arbitrary placement in
the room (translation, yaw, uniform scale), which the features are meant to
ignore.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .recognizer import J, N_JOINTS, SkeletonFrame, extract_features

# K-frame counts (training, test) per posture class of the Natta recordings.
POSTURE_DATA_COUNTS: dict[str, tuple[int, int]] = {
    "C01": (6154, 1457), "C02": (3337, 873), "C03": (3279, 561), "C04": (1214, 219),
    "C05": (1192, 268), "C06": (1419, 541), "C07": (1250, 475), "C08": (284, 112),
    "C09": (306, 133), "C10": (397, 162), "C11": (408, 117), "C12": (229, 84),
    "C13": (235, 80), "C14": (393, 117), "C15": (404, 121), "C16": (150, 48),
    "C17": (161, 51), "C18": (323, 81), "C19": (175, 46), "C20": (168, 43),
    "C21": (19, 6), "C22": (21, 6), "C23": (118, 61),
}

TORSO = 0.5  # hip centre to shoulder centre, metres
_UPPER_ARM, _FOREARM, _HAND = 0.28, 0.25, 0.08
_THIGH, _SHIN, _FOOT = 0.42, 0.40, 0.12


def _unit(elev: float, azim: float) -> np.ndarray:
    """Direction with elevation from the horizontal plane and azimuth from +x towards +z."""
    return np.array([np.cos(elev) * np.cos(azim), np.sin(elev), np.cos(elev) * np.sin(azim)])


def _chain(start: np.ndarray, first: np.ndarray, second: np.ndarray, lengths) -> list[np.ndarray]:
    a = start + lengths[0] * first
    b = a + lengths[1] * second
    c = b + lengths[2] * second
    return [a, b, c]


def skeleton_from_angles(angles: np.ndarray) -> np.ndarray:
    """Body-frame joints (20x3) for 17 angles: per arm and leg (upper elev, upper azim,
    lower elev, lower azim), then head tilt."""
    a = np.asarray(angles, dtype=float)
    j = np.zeros((N_JOINTS, 3))
    j[J["Spine"]] = (0, 0.25, 0)
    j[J["ShoulderCenter"]] = (0, TORSO, 0)
    j[J["Head"]] = (0, TORSO + 0.2 * np.cos(a[16]), 0.2 * np.sin(a[16]))
    j[J["ShoulderLeft"]] = (-0.18, TORSO - 0.03, 0)
    j[J["ShoulderRight"]] = (0.18, TORSO - 0.03, 0)
    j[J["HipLeft"]] = (-0.1, -0.02, 0)
    j[J["HipRight"]] = (0.1, -0.02, 0)
    limbs = (
        ("ShoulderLeft", ("ElbowLeft", "WristLeft", "HandLeft"), (_UPPER_ARM, _FOREARM, _HAND), -1),
        ("ShoulderRight", ("ElbowRight", "WristRight", "HandRight"), (_UPPER_ARM, _FOREARM, _HAND), 1),
        ("HipLeft", ("KneeLeft", "AnkleLeft", "FootLeft"), (_THIGH, _SHIN, _FOOT), -1),
        ("HipRight", ("KneeRight", "AnkleRight", "FootRight"), (_THIGH, _SHIN, _FOOT), 1),
    )
    for k, (root, names, lengths, side) in enumerate(limbs):
        e1, z1, e2, z2 = a[4 * k: 4 * k + 4]
        first = _unit(e1, z1) * np.array([side, 1, 1])
        second = _unit(e2, z2) * np.array([side, 1, 1])
        for name, p in zip(names, _chain(j[J[root]], first, second, lengths)):
            j[J[name]] = p
    return j


def _random_angles(rng: np.random.Generator) -> np.ndarray:
    arms = [rng.uniform(-1.4, 1.4), rng.uniform(-0.6, 1.2), rng.uniform(-1.4, 1.4), rng.uniform(-0.6, 1.2)]
    arms2 = [rng.uniform(-1.4, 1.4), rng.uniform(-0.6, 1.2), rng.uniform(-1.4, 1.4), rng.uniform(-0.6, 1.2)]
    legs = [[rng.uniform(-1.57, -0.5), rng.uniform(-0.3, 1.0), rng.uniform(-1.57, -0.7), rng.uniform(-0.3, 1.0)]
            for _ in range(2)]
    return np.array(arms + arms2 + legs[0] + legs[1] + [rng.uniform(-0.4, 0.4)])


def place(joints: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random rigid placement: yaw, uniform scale and translation."""
    yaw = rng.uniform(-np.pi, np.pi)
    c, s = np.cos(yaw), np.sin(yaw)
    rot = np.array([[c, 0, -s], [0, 1, 0], [s, 0, c]])
    return rng.uniform(0.7, 1.4) * joints @ rot.T + rng.uniform(-3, 3, size=3)


@dataclass(frozen=True, eq=False)
class TemplateSet:
    classes: tuple[str, ...]
    joints: dict[str, np.ndarray]

    def sample(self, cls: str, rng: np.random.Generator, sigma: float = 0.02, frame: int = 0) -> SkeletonFrame:
        """Template ``cls`` with N(0, (sigma * torso)^2) noise on every coordinate, placed at random."""
        noisy = self.joints[cls] + rng.normal(0.0, sigma * TORSO, size=(N_JOINTS, 3))
        return SkeletonFrame(frame, place(noisy, rng))

    def min_separation(self) -> float:
        f = np.stack([extract_features(SkeletonFrame(0, self.joints[c])) for c in self.classes])
        d = np.linalg.norm(f[:, None, :] - f[None, :, :], axis=2)
        return float(d[~np.eye(len(f), dtype=bool)].min()) if len(f) > 1 else float("inf")


def make_templates(classes, rng: np.random.Generator, *, min_separation: float = 0.6,
                   max_tries: int = 10000) -> TemplateSet:
    kept: dict[str, np.ndarray] = {}
    feats: list[np.ndarray] = []
    tries = 0
    for cls in classes:
        while True:
            tries += 1
            if tries > max_tries:
                raise RuntimeError("could not place well-separated templates; lower min_separation")
            joints = skeleton_from_angles(_random_angles(rng))
            f = extract_features(SkeletonFrame(0, joints))
            if all(np.linalg.norm(f - g) >= min_separation for g in feats):
                kept[cls] = joints
                feats.append(f)
                break
    return TemplateSet(tuple(classes), kept)


def scaled_counts(scale: float = 1 / 50, minimum: int = 2) -> dict[str, tuple[int, int]]:
    """The K-frame counts shrunk by ``scale``, at least ``minimum`` each."""
    return {c: (max(minimum, round(tr * scale)), max(minimum, round(te * scale)))
            for c, (tr, te) in POSTURE_DATA_COUNTS.items()}
