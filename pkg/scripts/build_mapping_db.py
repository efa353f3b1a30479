"""Regenerate src/adavu/data/mapping_db.json from the key-posture ontology.

Each limb formation gets Laban codes written for a LEFT limb. A right limb in
formation F takes the lateral image of the left-side codes of F with Left and
Right swapped in its name, so mirror-image postures encode to mirror-image
frames by construction. Natta1P1 reproduces the published encoding; the other
records are derived from the formation semantics and marked as such.

Run from the repo root after ``pip install -e .``:
``python3 scripts/build_mapping_db.py``.
"""

from __future__ import annotations

import json
from pathlib import Path

from adavu.laban_map import (
    ArmLaban, LabanFrame, LabanLimb, LegLaban, MappingRecord, record_to_dict,
)
from adavu.ontology import flip_laterality, load_ontology

OUT = Path(__file__).resolve().parents[1] / "src" / "adavu" / "data" / "mapping_db.json"

# Postures whose Laban codes are published; every other record is derived here.
PUBLISHED = {
    "Natta1P1": {
        "support_direction": 1, "support_level": 3, "leg_direction": 0, "leg_level": 0,
        "leg_crossing": 0, "leg_mirror": 1, "hip_support": 0, "knee_folding": 3, "touch": 3,
        "arm_direction": 2, "arm_level": 2, "arm_crossing": 0, "elbow_folding": 1,
        "body_inclusion": 0, "arm_mirror": 1, "head_direction": 1, "head_level": 2,
    },
}

# formation: (support dir, support level, leg dir, leg level, crossing, hip, knee fold, touch)
LEG_CODES = {
    "Aayata": (1, 3, 0, 0, 0, 0, 3, 3),             # half-sit, weight on the whole foot
    "Samapadam": (1, 2, 0, 0, 0, 0, 0, 3),          # standing straight
    "Anchita": (0, 0, 2, 3, 0, 0, 0, 1),            # stretched to the side, heel on floor
    "Front Anchita": (0, 0, 4, 3, 0, 0, 0, 1),
    "Diagonal Anchita": (0, 0, 8, 3, 0, 0, 0, 1),
    "Kunchita": (1, 3, 0, 0, 0, 0, 4, 7),           # bent, raised on the ball
    "Prerita": (0, 0, 2, 3, 0, 0, 1, 8),            # stretched aside on the toe pad
    "Side Middle / Low": (0, 0, 2, 2, 0, 0, 0, 0),  # lifted off the floor
    "Front Swastikam": (4, 3, 0, 0, 1, 0, 3, 6),    # crossed in front on the half ball
    "Muzmandi": (1, 3, 0, 0, 0, 0, 6, 6),           # full sit on the half ball
}

# formation: (arm dir, arm level, crossing, elbow fold, body inclusion)
ARM_CODES = {
    "Natyarambhe": (2, 2, 0, 1, 0),
    "Side High": (2, 1, 0, 0, 0),
    "Side Middle": (2, 2, 0, 0, 0),
    "Side Low": (2, 3, 0, 0, 0),
    "Forward High": (4, 1, 0, 0, 0),
    "Forward Middle": (4, 2, 0, 0, 0),
    "Left Diagonal High": (8, 1, 0, 0, 0),
    "Above Head Natyarambhe": (1, 1, 0, 2, 0),
    "Kunchita": (2, 2, 0, 4, 1),
}

# Head codes are absolute (the head has a single column).
HEAD_CODES = {
    "Samam": (1, 2),
    "Udvahitam": (1, 1),
    "Adhomukham": (1, 3),
    "Left Paravrittam": (2, 2),
    "Right Paravrittam": (3, 2),
    "Left Ardha Paravrittam": (8, 2),
    "Right Ardha Paravrittam": (9, 2),
    "Left Adhomukham": (8, 3),
    "Right Adhomukham": (9, 3),
}


def left_leg(name: str) -> tuple[LabanLimb, LegLaban]:
    sd, sl, ld, ll, cross, hip, knee, touch = LEG_CODES[name]
    return LabanLimb(sd, sl), LegLaban(LabanLimb(ld, ll), cross, False, bool(hip), knee, touch)


def left_arm(name: str) -> ArmLaban:
    d, lvl, cross, elbow, incl = ARM_CODES[name]
    return ArmLaban(LabanLimb(d, lvl), cross, elbow, bool(incl))


def right_leg(name: str) -> tuple[LabanLimb, LegLaban]:
    support, leg = left_leg(flip_laterality(name))
    return support.lateral(), leg.lateral()


def right_arm(name: str) -> ArmLaban:
    return left_arm(flip_laterality(name)).lateral()


def main() -> None:
    reg = load_ontology()
    postures = {}
    for p in sorted(reg.postures.values(), key=lambda p: (p.class_id or p.posture_id)):
        ls, ll = left_leg(p.left_leg)
        rs, rl = right_leg(p.right_leg)
        la, ra = left_arm(p.left_arm), right_arm(p.right_arm)
        head = LabanLimb(*HEAD_CODES[p.head])
        frame = LabanFrame.assemble(None, ls, rs, ll, rl, la, ra, head, p.posture_id)
        legs_m, arms_m = frame.left_leg.mirror, frame.left_arm.mirror
        aliases = (p.class_id,) if p.class_id and p.class_id != p.posture_id else ()
        rec = MappingRecord(
            p.posture_id, frame.left_support, frame.left_leg, frame.left_arm, head,
            None if legs_m else frame.right_support, None if legs_m else frame.right_leg,
            None if arms_m else frame.right_arm, aliases,
            "paper" if p.posture_id in PUBLISHED else "derived",
        )
        out = record_to_dict(rec)
        for key, value in PUBLISHED.get(p.posture_id, {}).items():
            if out[key] != value:
                raise SystemExit(f"{p.posture_id}.{key} = {out[key]}, published value is {value}")
        postures[p.posture_id] = out
    doc = {"schema_version": 1, "postures": postures}
    OUT.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(postures)} records to {OUT}")


if __name__ == "__main__":
    main()
