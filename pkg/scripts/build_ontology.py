"""Regenerate the shipped ontology JSON under src/adavu/data/ontology.

The tables below are the single place where the domain knowledge is typed in;
the JSON files are derived artifacts checked into the package. Run from the
repo root: ``python3 scripts/build_ontology.py``.
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "adavu" / "data" / "ontology"
SCHEMA_VERSION = 1

BOLS = [
    "a", "da", "dha", "dhat", "dhi", "dhin", "dhit", "ding", "e", "gadu", "gin",
    "ha", "hat", "hi", "jag", "jham", "ka", "ki", "ku", "na", "ri", "ta",
    "tak", "tam", "tan", "tat", "tei", "tom", "tta", "ya", "yum",
]

LEG_FORMATIONS = [
    "Aayata", "Agratala Sanchara", "Anchita", "Back Swastikam", "Bend On Knee",
    "Bisamasuchi", "Diagonal Anchita", "Forward / Side Low", "Front Anchita",
    "Front Swastikam", "Kunchita", "Kuttana", "Motita Mandal", "Muzmandi",
    "Parsasuchi", "Parswa Aayata", "Prerita", "Samapadam", "Side Middle / Low",
    "Slip With Left Knee", "Slip With Right Knee", "Support",
]

# (position, left formation, right formation, mirror position name)
ASYMMETRIC_LEG_POSITIONS = [
    ("Ardha Prenkhanam", "Anchita", "Samapadam", None),
    ("Back Swastikam", "Aayata", "Back Swastikam", None),
    ("Chalan Chari", "Agratala Sanchara", "Samapadam", None),
    ("Diagonal Prenkhanam", "Aayata", "Diagonal Anchita", None),
    ("Ekapadam", "Bend On Knee", "Support", None),
    ("Front Prenkhanam", "Aayata", "Front Anchita", None),
    ("Front Swastikam", "Aayata", "Front Swastikam", None),
    ("Prerita", "Aayata", "Prerita", None),
    ("Garudamandalam", "Parsasuchi", "Bisamasuchi", None),
    ("Lolita Chari", "Aayata", "Forward / Side Low", None),
    ("Prenkhanam", "Aayata", "Anchita", None),
    ("Prenkhanam Above Floor", "Aayata", "Side Middle / Low", None),
    ("Aaleeda", "Aayata", "Kunchita", "Pratyaaleeda"),
    ("Pratyaaleeda", "Kunchita", "Aayata", "Aaleeda"),
]

# Rows printed under the symmetric heading although their two formations differ.
LISTED_SYMMETRIC_WITH_DISTINCT_FORMATIONS = [
    ("Ekapadam Bhramari", "Aayata", "Anchita"),
    ("Side Chankramanang", "Samapadam", "Motita Mandal"),
    ("Chankramanang", "Muzmandi", "Slip With Left Knee"),
    ("Back Chankramanang", "Kuttana", "Slip With Right Knee"),
]

SYMMETRIC_LEG_POSITIONS = ["Aayata", "Samapadam", "Muzmandi", "Kuttana", "Parswa Aayata"]

ARM_FORMATIONS = [
    "Above Head Natyarambhe", "Above Head Natyarambhe (Joined)", "Anchita",
    "Anchita Above Left Ear", "Anchita Above Right Ear", "Ardha Vithi",
    "Backward High", "Backward Low", "Backward Middle", "Cross Kunchita",
    "Diagonal High", "Diagonal Middle", "Elbow Down Anchita", "Forward High",
    "Forward High Above Head", "Forward Low", "Forward Middle", "Front Natyarambhe",
    "Katyang Behind Waist", "Kunchita", "Kunchita Above Shoulder",
    "Kunchita Natyarambhe", "Left Diagonal High", "Natyarambhe",
    "Right Diagonal High", "Right Diagonal Middle", "Side High",
    "Side High Natyarambhe", "Side Low", "Side Middle", "Utsanga",
]

HEAD_FORMATIONS = [
    "Samam", "Adhomukham", "Back Paravrittam", "Udvahitam", "Ardha Aalolitam",
    "Left Adhomukham", "Right Adhomukham", "Left Ardha Paravrittam",
    "Right Ardha Paravrittam", "Left Paravrittam", "Right Paravrittam",
    "Left Utshiptam", "Right Utshiptam",
]

HAND_FORMATIONS = [
    "Alapadma", "Avahitya", "Dola", "Kartarimukha", "Katakamukha", "Mrigashirsha",
    "Mushti", "Pataka", "Shikhara", "Suchi", "Tripataka",
]

LEG_SUPPORTS = ["Samapadam", "Araimandi", "Muzhumandi"]

# id, display name, aliases, taalam, bar length, slots ("B" = stick beat)
SOLLUKATTUS = [
    ("Joining_A", "Joining A", [], "Adi", 8, "tat dhit ta B tat dhit ta B"),
    ("Joining_B", "Joining B", [], "Adi", 8,
     "[dhit dhit] tei [dhit dhit] tei [dhit dhit] tei [dhit dhit] tei"),
    ("Joining_C", "Joining C", [], "Adi", 8, "tei tei [dhit dhit] tei tei tei [dhit dhit] tei"),
    ("KUMS", "Kartati-Utsanga-Mandi-Sarikkal", ["Kartati Utsanga Mandi Sarikkal"], "Roopakam", 6,
     "[tan gadu] [tat tat] [dhin na] [tan gadu] [tat tat] [dhin na]"),
    ("Kuditta_Mettu", "Kuditta Mettu", ["Mettu"], "Adi", 8, "tei hat tei hi tei hat tei hi"),
    ("Kuditta_Nattal_A", "Kuditta Nattal A", ["Nattal A"], "Adi", 8, "tat tei tam B dhit tei tam B"),
    ("Kuditta_Nattal_B", "Kuditta Nattal B", ["Nattal B"], "Adi", 8,
     "[tat tei] tam [dhit tei] tam [tat tei] tam [dhit dhit] tei"),
    ("Kuditta_Tattal", "Kuditta Tattal", ["Tattal"], "Adi", 8, "tat tei ta ha dhit tei ta ha"),
    ("Natta", "Natta", [], "Adi", 8,
     "[tei yum] [tat tat] [tei yum] ta [tei yum] [tat tat] [tei yum] ta"),
    ("Paikkal", "Paikkal", [], "Adi", 8,
     "[dhit tei da] [ta tei] [dhit tei da] [ta tei] [dhit tei da] [ta tei] [dhit tei da] [ta tei]"),
    ("Pakka", "Pakka", [], "Adi", 8, "ta tei tei tat dhit tei tei tat"),
    ("Sarika", "Sarika", [], "Adi", 8, "tei a tei e tei a tei e"),
    ("Tatta_A", "Tatta A", [], "Adi", 8, "[tei ya] tei [tei ya] tei [tei ya] tei [tei ya] tei"),
    ("Tatta_B", "Tatta B", [], "Roopakam", 6, "tei tei tam tei tei tam"),
    ("Tatta_C", "Tatta C", [], "Adi", 8,
     "[tei ya] [tei ya] [tei ya] tei [tei ya] [tei ya] [tei ya] tei"),
    ("Tatta_D", "Tatta D", [], "Adi", 8, "tei tei [tei tei] tam tei tei [tei tei] tam"),
    ("Tatta_E", "Tatta E", [], "Adi", 8, "tei tei tam B tei tei tam B"),
    ("Tatta_F", "Tatta F", [], "Adi", 8, "tei tei tat tat tei tei tam B"),
    ("Tatta_G", "Tatta G", [], "Roopakam", 6, "tei tei tei tei [dhit dhit] tei"),
    ("TTD", "Tei Tei Dhatta", ["Tei_Tei_Dhatta"], "Adi", 8,
     "[tei tei] [dhat ta] [dhit tei] [dhat ta] [tei tei] [dhat ta] [dhit tei] [dhat ta]"),
    ("Tirmana_A", "Tirmana A", [], "Roopakam", 12,
     "ta [tat ta] jham [ta ri] ta B jham [ta ri] jag [ta ri] tei B"),
    ("Tirmana_B", "Tirmana B", [], "Roopakam", 12,
     "[tat ding] [gin na] tom [tak ka] [tat ding] [gin na] tom [tak ka] [dhi ku] [tat ding] [gin na] tom"),
    ("Tirmana_C", "Tirmana C", [], "Roopakam", 12,
     "[ki ta ta ka] [dha ri ki ta] tom tak [ki ta ta ka] [dha ri ki ta] tom [tak ka] [dhi ku] "
     "[ki ta ta ka] [dha ri ki ta] tom"),
]

# family, variant range, taalam, sollukattu reference as written in the adavu list
ADAVU_FAMILIES = [
    ("Joining", [1], "Adi", "Joining A"),
    ("Joining", [2], "Adi", "Joining B"),
    ("Joining", [3], "Adi", "Joining C"),
    ("Kati or Kartari", [1], "Roopakam", "KUMS"),
    ("Kuditta Mettu", range(1, 5), "Adi", "Kuditta Mettu"),
    ("Kuditta Nattal", range(1, 4), "Adi", "Kuditta Nattal A"),
    ("Kuditta Nattal", range(4, 6), "Adi", "Kuditta Nattal B"),
    ("Kuditta Nattal", [6], "Adi", "Kuditta Nattal A"),
    ("Kuditta Tattal", range(1, 6), "Adi", "Kuditta Tattal"),
    ("Mandi", range(1, 3), "Roopakam", "KUMS"),
    ("Natta", range(1, 9), "Adi", "Natta"),
    ("Paikkal", range(1, 4), "Adi", "Paikkal"),
    ("Pakka", range(1, 5), "Adi", "Pakka"),
    ("Sarika", range(1, 5), "Adi", "Sarika"),
    ("Sarrikkal", range(1, 4), "Roopakam", "KUMS"),
    ("Tatta", range(1, 3), "Adi", "Tatta A"),
    ("Tatta", [3], "Roopakam", "Tatta B"),
    ("Tatta", [4], "Adi", "Tatta C"),
    ("Tatta", [5], "Adi", "Tatta D"),
    ("Tatta", [6], "Adi", "Tatta E"),
    ("Tatta", [7], "Adi", "Tatta F"),
    ("Tatta", [8], "Roopakam", "Tatta G"),
    ("Tei Tei Dhatta", range(1, 4), "Adi", "Tei Tei Dhatta"),
    ("Tirmana", [1], "Roopakam", "Tirmana A"),
    ("Tirmana", [2], "Roopakam", "Tirmana B"),
    ("Tirmana", [3], "Roopakam", "Tirmana C"),
    ("Utsanga", [1], "Roopakam", "KUMS"),
]

ADAVU_EXTRAS = {
    "Natta_1": {
        "posture_sequence": [
            "Natta1P2", "Natta1P1", "Natta1P3", "Natta1P1",
            "Natta1P2", "Natta1P1", "Natta1P3", "Natta1P1",
        ],
        # Recorded performances voice the [tat tat] slot as "tat ta".
        "accepted_bol_variants": {"2": [["tat", "ta"]], "6": [["tat", "ta"]]},
    },
}


def posture(pid, cls, legs, left_leg, right_leg, arms, head, *, support="Araimandi",
            hands=("Tripataka", "Tripataka"), symmetry, mirror_id=None, provenance="derived",
            spinal_bend=False):
    return {
        "posture_id": pid,
        "class_id": cls,
        "legs_position": legs,
        "left_leg": left_leg,
        "right_leg": right_leg,
        "left_arm": arms[0],
        "right_arm": arms[1],
        "head": head,
        "left_hand": hands[0],
        "right_hand": hands[1],
        "leg_support": support,
        "spinal_bend": spinal_bend,
        "symmetry": symmetry,
        "mirror_id": mirror_id,
        "provenance": provenance,
    }


NAT = ("Natyarambhe", "Natyarambhe")
A, M = "Asymmetric", "MirrorOfAsymmetric"

POSTURES = [
    posture("Natta1P1", "C01", "Aayata [S]", "Aayata", "Aayata", NAT, "Samam",
            symmetry="Symmetric", provenance="paper"),
    posture("Natta1P2", "C02", "Prenkhanam", "Aayata", "Anchita", NAT, "Samam",
            symmetry=A, mirror_id="Natta1P3", provenance="paper"),
    posture("Natta1P3", "C03", "Prenkhanam [M]", "Anchita", "Aayata", NAT, "Samam",
            symmetry=M, mirror_id="Natta1P2", provenance="paper"),
    posture("C04", "C04", "Prenkhanam", "Aayata", "Anchita", ("Natyarambhe", "Forward Middle"),
            "Right Paravrittam", symmetry=A, mirror_id="C05"),
    posture("C05", "C05", "Prenkhanam [M]", "Anchita", "Aayata", ("Forward Middle", "Natyarambhe"),
            "Left Paravrittam", symmetry=M, mirror_id="C04"),
    posture("C06", "C06", "Front Prenkhanam", "Aayata", "Front Anchita", NAT, "Samam",
            symmetry=A, mirror_id="C07"),
    posture("C07", "C07", "Front Prenkhanam [M]", "Front Anchita", "Aayata", NAT, "Samam",
            symmetry=M, mirror_id="C06"),
    posture("C08", "C08", "Diagonal Prenkhanam", "Aayata", "Diagonal Anchita",
            ("Natyarambhe", "Right Diagonal High"), "Right Ardha Paravrittam", symmetry=A, mirror_id="C09"),
    posture("C09", "C09", "Diagonal Prenkhanam [M]", "Diagonal Anchita", "Aayata",
            ("Left Diagonal High", "Natyarambhe"), "Left Ardha Paravrittam", symmetry=M, mirror_id="C08"),
    posture("C10", "C10", "Ardha Prenkhanam", "Anchita", "Samapadam", ("Side High", "Side High"),
            "Samam", support="Samapadam", symmetry=A, mirror_id="C11"),
    posture("C11", "C11", "Ardha Prenkhanam [M]", "Samapadam", "Anchita", ("Side High", "Side High"),
            "Samam", support="Samapadam", symmetry=M, mirror_id="C10"),
    posture("C12", "C12", "Prenkhanam Above Floor", "Aayata", "Side Middle / Low",
            ("Natyarambhe", "Side Middle"), "Right Paravrittam", symmetry=A, mirror_id="C13"),
    posture("C13", "C13", "Prenkhanam Above Floor [M]", "Side Middle / Low", "Aayata",
            ("Side Middle", "Natyarambhe"), "Left Paravrittam", symmetry=M, mirror_id="C12"),
    posture("C14", "C14", "Aaleeda", "Aayata", "Kunchita", NAT, "Samam", symmetry=A, mirror_id="C15"),
    posture("C15", "C15", "Pratyaaleeda", "Kunchita", "Aayata", NAT, "Samam", symmetry=M, mirror_id="C14"),
    posture("C16", "C16", "Samapadam [S]", "Samapadam", "Samapadam", ("Side Low", "Side Low"), "Samam",
            support="Samapadam", symmetry="Symmetric"),
    posture("C17", "C17", "Aayata [S]", "Aayata", "Aayata",
            ("Above Head Natyarambhe", "Above Head Natyarambhe"), "Udvahitam", symmetry="Symmetric"),
    posture("C18", "C18", "Aayata [S]", "Aayata", "Aayata", ("Kunchita", "Kunchita"), "Samam",
            symmetry="Symmetric"),
    posture("C19", "C19", "Prerita", "Aayata", "Prerita", ("Natyarambhe", "Side Middle"),
            "Right Adhomukham", symmetry=A, mirror_id="C20", spinal_bend=True),
    posture("C20", "C20", "Prerita [M]", "Prerita", "Aayata", ("Side Middle", "Natyarambhe"),
            "Left Adhomukham", symmetry=M, mirror_id="C19", spinal_bend=True),
    posture("C21", "C21", "Front Swastikam", "Aayata", "Front Swastikam", ("Forward High", "Forward High"),
            "Samam", symmetry=A, mirror_id="C22"),
    posture("C22", "C22", "Front Swastikam [M]", "Front Swastikam", "Aayata", ("Forward High", "Forward High"),
            "Samam", symmetry=M, mirror_id="C21"),
    posture("C23", "C23", "Muzmandi [S]", "Muzmandi", "Muzmandi", NAT, "Samam",
            support="Muzhumandi", symmetry="Symmetric"),
]


def parse_slots(text: str) -> list[list[str]]:
    slots, group = [], None
    for tok in text.replace("[", " [ ").replace("]", " ] ").split():
        if tok == "[":
            group = []
        elif tok == "]":
            slots.append(group)
            group = None
        elif group is not None:
            group.append(tok)
        else:
            slots.append(["StickBeat"] if tok == "B" else [tok])
    return slots


def adavus() -> list[dict]:
    out = []
    for family, variants, taalam, ref in ADAVU_FAMILIES:
        for v in variants:
            aid = f"{family.replace(' ', '_')}_{v}"
            rec = {"id": aid, "family": family, "variant": v, "taalam": taalam, "sollukattu": ref}
            rec.update(ADAVU_EXTRAS.get(aid, {}))
            out.append(rec)
    return sorted(out, key=lambda r: (r["family"], r["variant"]))


def vocabulary() -> dict:
    positions = []
    for name, left, right, mirror in ASYMMETRIC_LEG_POSITIONS:
        positions.append({"name": name, "left": left, "right": right, "symmetry": "Asymmetric",
                          "mirror_name": mirror or f"{name} [M]"})
    for name, left, right in LISTED_SYMMETRIC_WITH_DISTINCT_FORMATIONS:
        positions.append({"name": name, "left": left, "right": right, "symmetry": "Asymmetric",
                          "mirror_name": f"{name} [M]", "listed_as_symmetric": True})
    for name in SYMMETRIC_LEG_POSITIONS:
        positions.append({"name": f"{name} [S]", "left": name, "right": name, "symmetry": "Symmetric",
                          "mirror_name": f"{name} [S]"})
    return {
        "schema_version": SCHEMA_VERSION,
        "bols": BOLS,
        "stick_beat": "StickBeat",
        "leg_formations": LEG_FORMATIONS,
        "leg_positions": positions,
        "arm_formations": ARM_FORMATIONS,
        "head_formations": HEAD_FORMATIONS,
        "hand_formations": HAND_FORMATIONS,
        "leg_supports": LEG_SUPPORTS,
    }


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    docs = {
        "vocabulary.json": vocabulary(),
        "sollukattus.json": {
            "schema_version": SCHEMA_VERSION,
            "sollukattus": [
                {"id": sid, "name": name, "aliases": aliases, "taalam": taalam,
                 "bar_length": n, "slots": parse_slots(text)}
                for sid, name, aliases, taalam, n, text in SOLLUKATTUS
            ],
        },
        "adavus.json": {"schema_version": SCHEMA_VERSION, "adavus": adavus()},
        "postures.json": {"schema_version": SCHEMA_VERSION, "postures": POSTURES},
    }
    for name, doc in docs.items():
        (OUT / name).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
