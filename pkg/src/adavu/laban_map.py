"""Numeric Laban descriptors for key postures.

Codes:

* direction 0..11 -- 0 held in place under the body (no displacement), 1 Place,
  2/3 left/right side, 4/5 left/right forward, 6/7 left/right backward,
  8/9 left/right forward diagonal, 10/11 left/right backward diagonal
* level 0..3 -- 0 unset, 1 high, 2 middle, 3 low
* folding 0..6 -- 0 no fold, 6 full fold
* touch 0..10 -- 0 no touch, 1 full heel ... 3 whole foot ... 10 nail of toe

A mapping database stores one record per posture describing the left side and
a mirror flag per limb; ``expand_mirror`` derives the right side.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import jsonschema

from .errors import FormatError, LabanValidationError, UnknownPostureError

# Left/right images of each direction code; Place and "in place" map to themselves.
LATERAL = {0: 0, 1: 1, 2: 3, 3: 2, 4: 5, 5: 4, 6: 7, 7: 6, 8: 9, 9: 8, 10: 11, 11: 10}

DIRECTION_NAMES = {
    0: "In place", 1: "Place", 2: "Left Side", 3: "Right Side", 4: "Left Forward",
    5: "Right Forward", 6: "Left Backward", 7: "Right Backward", 8: "Left Forward Diagonal",
    9: "Right Forward Diagonal", 10: "Left Backward Diagonal", 11: "Right Backward Diagonal",
}
LEVEL_NAMES = {0: "unset", 1: "High", 2: "Mid", 3: "Low"}
TOUCH_NAMES = {
    0: "No touch", 1: "Full heel", 2: "One half heel", 3: "Whole foot", 4: "One eighth ball",
    5: "One fourth ball", 6: "One half ball", 7: "Full ball", 8: "Pad of toe", 9: "Full toe",
    10: "Nail of toe",
}
MAX_FOLD = 6


def _check(value, lo, hi, what):
    if isinstance(value, bool) or not isinstance(value, int) or not lo <= value <= hi:
        raise LabanValidationError(f"{what} must be an integer in {lo}..{hi}, got {value!r}")


@dataclass(frozen=True)
class LabanLimb:
    direction: int = 0
    level: int = 0

    def __post_init__(self):
        _check(self.direction, 0, 11, "direction")
        _check(self.level, 0, 3, "level")
        if self.direction > 0 and self.level == 0:
            raise LabanValidationError(f"direction {self.direction} needs a level")

    def lateral(self) -> LabanLimb:
        return replace(self, direction=LATERAL[self.direction])


@dataclass(frozen=True)
class LegLaban:
    limb: LabanLimb = LabanLimb()
    crossing: int = 0
    mirror: bool = False
    hip_support: bool = False
    knee_folding: int = 0
    touch: int = 0

    def __post_init__(self):
        _check(self.crossing, 0, 99, "leg crossing")
        _check(self.knee_folding, 0, MAX_FOLD, "knee folding")
        _check(self.touch, 0, 10, "touch")

    def lateral(self) -> LegLaban:
        return replace(self, limb=self.limb.lateral())


@dataclass(frozen=True)
class ArmLaban:
    limb: LabanLimb = LabanLimb()
    crossing: int = 0
    elbow_folding: int = 0
    body_inclusion: bool = False
    mirror: bool = False

    def __post_init__(self):
        _check(self.crossing, 0, 99, "arm crossing")
        _check(self.elbow_folding, 0, MAX_FOLD, "elbow folding")

    def lateral(self) -> ArmLaban:
        return replace(self, limb=self.limb.lateral())


def _same_codes(a, b) -> bool:
    return replace(a, mirror=False) == replace(b, mirror=False)


@dataclass(frozen=True)
class LabanFrame:
    """One posture on the staff.

    ``mirror`` on a leg (arm) pair is true exactly when the right side is the
    lateral image of the left side; for legs the supports must agree too.
    """

    measure: int | None
    left_support: LabanLimb
    right_support: LabanLimb
    left_leg: LegLaban
    right_leg: LegLaban
    left_arm: ArmLaban
    right_arm: ArmLaban
    head: LabanLimb
    posture_id: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.measure is not None:
            _check(self.measure, 0, 10**9, "measure")
        tag = f"measure {self.measure}" if self.measure is not None else f"posture {self.posture_id}"
        if (self.left_support.direction == 0 and self.right_support.direction == 0
                and not (self.left_leg.hip_support or self.right_leg.hip_support)):
            raise LabanValidationError(f"{tag}: no support and no hip support")
        if self.left_leg.mirror != self.right_leg.mirror or self.left_arm.mirror != self.right_arm.mirror:
            raise LabanValidationError(f"{tag}: left and right mirror flags disagree")
        if self.left_leg.mirror != self.legs_mirrored():
            raise LabanValidationError(f"{tag}: leg mirror flag does not match the leg codes")
        if self.left_arm.mirror != self.arms_mirrored():
            raise LabanValidationError(f"{tag}: arm mirror flag does not match the arm codes")

    def legs_mirrored(self) -> bool:
        return (_same_codes(self.right_leg, self.left_leg.lateral())
                and self.right_support == self.left_support.lateral())

    def arms_mirrored(self) -> bool:
        return _same_codes(self.right_arm, self.left_arm.lateral())

    @classmethod
    def assemble(cls, measure, left_support, right_support, left_leg, right_leg,
                 left_arm, right_arm, head, posture_id=None) -> LabanFrame:
        """Build a frame, setting the mirror flags from the codes."""
        legs = (_same_codes(right_leg, left_leg.lateral()) and right_support == left_support.lateral())
        arms = _same_codes(right_arm, left_arm.lateral())
        return cls(
            measure, left_support, right_support,
            replace(left_leg, mirror=legs), replace(right_leg, mirror=legs),
            replace(left_arm, mirror=arms), replace(right_arm, mirror=arms),
            head, posture_id,
        )

    def limbs(self) -> dict[str, LabanLimb]:
        return {
            "head": self.head,
            "left_arm": self.left_arm.limb,
            "right_arm": self.right_arm.limb,
            "left_leg": self.left_leg.limb,
            "right_leg": self.right_leg.limb,
            "left_support": self.left_support,
            "right_support": self.right_support,
        }


@dataclass(frozen=True)
class LabanScore:
    title: str
    frames: tuple[LabanFrame, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        for i, f in enumerate(self.frames):
            if f.measure != i:
                raise LabanValidationError(f"frame {i} has measure {f.measure}; measures must run 0,1,2,...")


def expand_mirror(half, right=None, *, mirror: bool | None = None):
    """Return ``(left, right)`` for a one-sided descriptor.

    With the mirror flag set the right side is the lateral image of ``half``;
    otherwise ``right`` must be supplied. Works for legs, arms and bare limbs
    (supports), where the flag is passed as ``mirror``.
    """
    if mirror is None:
        mirror = getattr(half, "mirror", False)
    if mirror:
        return half, half.lateral()
    if right is None:
        raise LabanValidationError("mirror flag is 0 but no right-side descriptor was given")
    return half, right


def swap_sides(frame: LabanFrame) -> LabanFrame:
    """Mirror a whole frame: each side takes the lateral image of the other."""
    return replace(
        frame,
        left_support=frame.right_support.lateral(),
        right_support=frame.left_support.lateral(),
        left_leg=frame.right_leg.lateral(),
        right_leg=frame.left_leg.lateral(),
        left_arm=frame.right_arm.lateral(),
        right_arm=frame.left_arm.lateral(),
        head=frame.head.lateral(),
    )


# -- mapping database ---------------------------------------------------------

LEG_FIELDS = ("support_direction", "support_level", "leg_direction", "leg_level", "leg_crossing",
              "hip_support", "knee_folding", "touch")
ARM_FIELDS = ("arm_direction", "arm_level", "arm_crossing", "elbow_folding", "body_inclusion")


@dataclass(frozen=True)
class MappingRecord:
    posture_id: str
    left_support: LabanLimb
    left_leg: LegLaban
    left_arm: ArmLaban
    head: LabanLimb
    right_support: LabanLimb | None = None
    right_leg: LegLaban | None = None
    right_arm: ArmLaban | None = None
    aliases: tuple[str, ...] = ()
    provenance: str = "derived"


@dataclass(frozen=True)
class MappingDB:
    version: int
    records: Mapping[str, MappingRecord]
    aliases: Mapping[str, str] = field(default_factory=dict)

    def resolve(self, posture_id: str) -> str:
        if posture_id in self.records:
            return posture_id
        if posture_id in self.aliases:
            return self.aliases[posture_id]
        raise UnknownPostureError(posture_id, "not in mapping database")

    def __contains__(self, posture_id: str) -> bool:
        return posture_id in self.records or posture_id in self.aliases

    def __len__(self) -> int:
        return len(self.records)


def _leg(rec: Mapping, mirror: bool) -> tuple[LabanLimb, LegLaban]:
    support = LabanLimb(rec["support_direction"], rec["support_level"])
    leg = LegLaban(
        limb=LabanLimb(rec["leg_direction"], rec["leg_level"]),
        crossing=rec["leg_crossing"],
        mirror=mirror,
        hip_support=bool(rec["hip_support"]),
        knee_folding=rec["knee_folding"],
        touch=rec["touch"],
    )
    return support, leg


def _arm(rec: Mapping, mirror: bool) -> ArmLaban:
    return ArmLaban(
        limb=LabanLimb(rec["arm_direction"], rec["arm_level"]),
        crossing=rec["arm_crossing"],
        elbow_folding=rec["elbow_folding"],
        body_inclusion=bool(rec["body_inclusion"]),
        mirror=mirror,
    )


def parse_record(posture_id: str, rec: Mapping) -> MappingRecord:
    where = f"mapping record {posture_id}"
    try:
        leg_mirror = bool(rec["leg_mirror"])
        arm_mirror = bool(rec["arm_mirror"])
        left_support, left_leg = _leg(rec, leg_mirror)
        left_arm = _arm(rec, arm_mirror)
        head = LabanLimb(rec["head_direction"], rec["head_level"])
        right_support = right_leg = right_arm = None
        if not leg_mirror:
            right_support, right_leg = _leg(rec["right_leg"], False)
        if not arm_mirror:
            right_arm = _arm(rec["right_arm"], False)
    except KeyError as exc:
        raise LabanValidationError(f"{where}: missing field {exc.args[0]!r}") from exc
    except LabanValidationError as exc:
        raise LabanValidationError(f"{where}: {exc}") from exc
    return MappingRecord(
        posture_id, left_support, left_leg, left_arm, head, right_support, right_leg, right_arm,
        tuple(rec.get("aliases", ())), rec.get("provenance", "derived"),
    )


def record_to_dict(r: MappingRecord) -> dict:
    def leg_fields(support: LabanLimb, leg: LegLaban) -> dict:
        return {
            "support_direction": support.direction, "support_level": support.level,
            "leg_direction": leg.limb.direction, "leg_level": leg.limb.level,
            "leg_crossing": leg.crossing, "hip_support": int(leg.hip_support),
            "knee_folding": leg.knee_folding, "touch": leg.touch,
        }

    def arm_fields(arm: ArmLaban) -> dict:
        return {
            "arm_direction": arm.limb.direction, "arm_level": arm.limb.level,
            "arm_crossing": arm.crossing, "elbow_folding": arm.elbow_folding,
            "body_inclusion": int(arm.body_inclusion),
        }

    out = {"aliases": list(r.aliases), "provenance": r.provenance}
    out.update(leg_fields(r.left_support, r.left_leg))
    out["leg_mirror"] = int(r.left_leg.mirror)
    out.update(arm_fields(r.left_arm))
    out["arm_mirror"] = int(r.left_arm.mirror)
    out["head_direction"], out["head_level"] = r.head.direction, r.head.level
    if r.right_leg is not None:
        out["right_leg"] = leg_fields(r.right_support, r.right_leg)
    if r.right_arm is not None:
        out["right_arm"] = arm_fields(r.right_arm)
    return out


def shipped_mapping_db_path() -> Path:
    return Path(str(resources.files("adavu") / "data" / "mapping_db.json"))


def load_mapping_db(path: str | Path | None = None) -> MappingDB:
    path = Path(path) if path is not None else shipped_mapping_db_path()
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read mapping database: {exc.strerror or exc}", str(path)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc
    schema = json.loads((resources.files("adavu") / "data" / "schemas" / "mapping_db.schema.json")
                        .read_text(encoding="utf-8"))
    err = next(iter(sorted(jsonschema.Draft202012Validator(schema).iter_errors(doc),
                           key=lambda e: list(e.absolute_path))), None)
    if err is not None:
        where = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        raise FormatError(err.message, f"{path}:{where}")
    records = {pid: parse_record(pid, rec) for pid, rec in doc["postures"].items()}
    aliases: dict[str, str] = {}
    for r in records.values():
        for a in r.aliases:
            if a in records or aliases.get(a, r.posture_id) != r.posture_id:
                raise LabanValidationError(f"mapping alias {a!r} is ambiguous")
            aliases[a] = r.posture_id
    db = MappingDB(doc["schema_version"], records, aliases)
    for pid in records:
        encode_posture(pid, db)  # every record must expand to a valid frame
    return db


def encode_posture(posture_id: str, db: MappingDB) -> LabanFrame:
    """Look up a posture and expand it into a two-sided frame (measure unset)."""
    r = db.records[db.resolve(posture_id)]
    left_support, right_support = expand_mirror(r.left_support, r.right_support, mirror=r.left_leg.mirror)
    left_leg, right_leg = expand_mirror(r.left_leg, r.right_leg)
    left_arm, right_arm = expand_mirror(r.left_arm, r.right_arm)
    try:
        return LabanFrame(None, left_support, right_support, left_leg, right_leg,
                          left_arm, right_arm, r.head, posture_id=r.posture_id)
    except LabanValidationError as exc:
        raise LabanValidationError(f"mapping record {r.posture_id}: {exc}") from exc


def build_score(posture_sequence: Sequence[str], db: MappingDB, title: str = "") -> LabanScore:
    frames = []
    for i, pid in enumerate(posture_sequence):
        try:
            frame = encode_posture(pid, db)
        except UnknownPostureError as exc:
            raise UnknownPostureError(pid, f"sequence position {i}") from exc
        frames.append(replace(frame, measure=i))
    return LabanScore(title, tuple(frames))
