"""Registry of Sollukattus, Adavus, limb vocabularies and key postures.

The registry is loaded from four JSON documents (``vocabulary.json``,
``sollukattus.json``, ``adavus.json``, ``postures.json``), each validated
against a JSON Schema shipped in ``adavu/data/schemas``. Structural problems
raise :class:`FormatError`; domain problems (unknown bols, dangling
references, arity mismatches) land in a :class:`ValidationReport`.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import jsonschema

from .diagnostics import Diagnostic, emit
from .errors import DomainError, FormatError, OntologyValidationError, UnknownPostureError, ValidationError
from .event_model import AnnotationRecord
from .vocabulary import BOL_TOKENS, STICK_BEAT

log = logging.getLogger("adavu")

ONTOLOGY_FILES = ("vocabulary.json", "sollukattus.json", "adavus.json", "postures.json")
SCHEMA_VERSION = 1


class Taalam(Enum):
    ADI = "Adi"
    ROOPAKAM = "Roopakam"


class Symmetry(Enum):
    SYMMETRIC = "Symmetric"
    ASYMMETRIC = "Asymmetric"
    MIRROR_OF_ASYMMETRIC = "MirrorOfAsymmetric"


class LegSupport(Enum):
    SAMAPADAM = "Samapadam"
    ARAIMANDI = "Araimandi"
    MUZHUMANDI = "Muzhumandi"


TAALAM_BAR_LENGTHS = {Taalam.ADI: {8}, Taalam.ROOPAKAM: {6, 12}}


@dataclass(frozen=True)
class BolToken:
    name: str

    def __post_init__(self):
        if self.name not in BOL_TOKENS:
            raise ValidationError(f"{self.name!r} is not in the bol vocabulary")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SollukattuDef:
    id: str
    taalam: Taalam
    bar_length: int
    slots: tuple[tuple[str, ...], ...]
    name: str = ""
    aliases: tuple[str, ...] = ()

    def slot_bols(self, index: int) -> tuple[str, ...]:
        """Vocalized bols of slot ``index`` (0-based); a stick beat yields ``()``."""
        return tuple(b for b in self.slots[index] if b != STICK_BEAT)


@dataclass(frozen=True)
class AdavuDef:
    id: str
    family: str
    variant: int
    sollukattu: str
    taalam: Taalam | None = None
    posture_sequence: tuple[str, ...] = ()
    accepted_bol_variants: Mapping[int, tuple[tuple[str, ...], ...]] = field(default_factory=dict)

    @property
    def title(self) -> str:
        return self.id.lower()


@dataclass(frozen=True)
class KeyPostureSpec:
    posture_id: str
    legs_position: str
    left_leg: str
    right_leg: str
    left_arm: str
    right_arm: str
    head: str
    leg_support: LegSupport
    spinal_bend: bool
    symmetry: Symmetry
    left_hand: str | None = None
    right_hand: str | None = None
    mirror_id: str | None = None
    # Labels, not composition: two postures with equal limbs are the same posture.
    class_id: str | None = field(default=None, compare=False)
    provenance: str = field(default="derived", compare=False)

    def to_dict(self) -> dict:
        return {
            "posture_id": self.posture_id,
            "class_id": self.class_id,
            "legs_position": self.legs_position,
            "left_leg": self.left_leg,
            "right_leg": self.right_leg,
            "left_arm": self.left_arm,
            "right_arm": self.right_arm,
            "head": self.head,
            "left_hand": self.left_hand,
            "right_hand": self.right_hand,
            "leg_support": self.leg_support.value,
            "spinal_bend": self.spinal_bend,
            "symmetry": self.symmetry.value,
            "mirror_id": self.mirror_id,
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class LegPositionDef:
    name: str
    left: str
    right: str
    symmetry: Symmetry
    mirror_name: str
    listed_as_symmetric: bool = False


@dataclass(frozen=True)
class Vocabulary:
    bols: frozenset[str]
    leg_formations: frozenset[str]
    arm_formations: frozenset[str]
    head_formations: frozenset[str]
    hand_formations: frozenset[str]
    leg_positions: Mapping[str, LegPositionDef]


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {"errors": list(self.errors), "warnings": list(self.warnings)}


def _key(name: str) -> str:
    return re.sub(r"[\s_\-]+", " ", name).strip().lower()


@dataclass(frozen=True)
class Registry:
    vocabulary: Vocabulary
    sollukattus: Mapping[str, SollukattuDef]
    adavus: Mapping[str, AdavuDef]
    postures: Mapping[str, KeyPostureSpec]
    report: ValidationReport
    _sollukattu_index: Mapping[str, str] = field(repr=False, default_factory=dict)
    _adavu_index: Mapping[str, str] = field(repr=False, default_factory=dict)
    _posture_index: Mapping[str, str] = field(repr=False, default_factory=dict)

    def resolve_sollukattu(self, name: str) -> SollukattuDef | None:
        sid = self._sollukattu_index.get(_key(name))
        return self.sollukattus[sid] if sid else None

    def sollukattu(self, name: str) -> SollukattuDef:
        s = self.resolve_sollukattu(name)
        if s is None:
            raise ValidationError(f"unknown sollukattu {name!r}")
        return s

    def adavu(self, name: str) -> AdavuDef:
        aid = self._adavu_index.get(_key(name))
        if aid is None:
            raise ValidationError(f"unknown adavu {name!r}")
        return self.adavus[aid]

    def canonical_posture_id(self, name: str) -> str:
        """Map a posture name or class id (``C01``) to its registry id."""
        pid = self._posture_index.get(name) or self._posture_index.get(_key(name))
        if pid is None:
            raise UnknownPostureError(name)
        return pid

    def posture(self, name: str) -> KeyPostureSpec:
        return self.postures[self.canonical_posture_id(name)]


# -- mirroring ----------------------------------------------------------------

_LATERAL_WORD = re.compile(r"\b(Left|Right)\b")
_MIRROR_SUFFIX = " [M]"
_NAMED_MIRRORS = {"Aaleeda": "Pratyaaleeda", "Pratyaaleeda": "Aaleeda"}


def flip_laterality(name: str | None) -> str | None:
    """``Left Paravrittam`` -> ``Right Paravrittam``; names without a side are unchanged."""
    if name is None:
        return None
    return _LATERAL_WORD.sub(lambda m: "Right" if m.group(1) == "Left" else "Left", name)


def mirror_position_name(name: str) -> str:
    if name in _NAMED_MIRRORS:
        return _NAMED_MIRRORS[name]
    if name.endswith(_MIRROR_SUFFIX):
        return name[: -len(_MIRROR_SUFFIX)]
    return name + _MIRROR_SUFFIX


def _mirror_id(pid: str) -> str:
    return pid[:-3] if pid.endswith("[M]") else pid + "[M]"


def mirror_posture(p: KeyPostureSpec, registry: Registry | None = None) -> KeyPostureSpec:
    """Swap left/right formations and flip lateral names.

    A symmetric posture is its own mirror; it is returned unchanged with a
    warning. When the mirror image is registered (``p.mirror_id``), its id and
    class id are taken over.
    """
    if p.symmetry is Symmetry.SYMMETRIC:
        log.warning("mirror of symmetric posture %s is itself", p.posture_id)
        return p
    new_id = p.mirror_id or _mirror_id(p.posture_id)
    class_id = None
    provenance = p.provenance
    if registry is not None and new_id in registry.postures:
        class_id = registry.postures[new_id].class_id
        provenance = registry.postures[new_id].provenance
    return replace(
        p,
        posture_id=new_id,
        mirror_id=p.posture_id,
        legs_position=mirror_position_name(p.legs_position),
        left_leg=flip_laterality(p.right_leg),
        right_leg=flip_laterality(p.left_leg),
        left_arm=flip_laterality(p.right_arm),
        right_arm=flip_laterality(p.left_arm),
        left_hand=flip_laterality(p.right_hand),
        right_hand=flip_laterality(p.left_hand),
        head=flip_laterality(p.head),
        symmetry=(Symmetry.MIRROR_OF_ASYMMETRIC if p.symmetry is Symmetry.ASYMMETRIC
                  else Symmetry.ASYMMETRIC),
        class_id=class_id,
        provenance=provenance,
    )


# -- loading ------------------------------------------------------------------

def shipped_ontology_dir() -> Path:
    return Path(str(resources.files("adavu") / "data" / "ontology"))


def _schema(name: str) -> dict:
    text = (resources.files("adavu") / "data" / "schemas" / name.replace(".json", ".schema.json")).read_text(
        encoding="utf-8")
    return json.loads(text)


def _read_json(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read ontology file: {exc.strerror or exc}", str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from exc


def _check_schema(doc: dict, name: str, path: Path) -> None:
    validator = jsonschema.Draft202012Validator(_schema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        raise FormatError(err.message, f"{path}:{where}")


def _collect_paths(paths) -> dict[str, Path]:
    if paths is None:
        paths = shipped_ontology_dir()
    if isinstance(paths, (str, Path)):
        paths = [paths]
    found: dict[str, Path] = {}
    for p in map(Path, paths):
        if p.is_dir():
            for name in ONTOLOGY_FILES:
                if (p / name).exists():
                    found[name] = p / name
        else:
            if p.name not in ONTOLOGY_FILES:
                raise FormatError(f"unrecognized ontology file name (expected one of {ONTOLOGY_FILES})", str(p))
            found[p.name] = p
    missing = [n for n in ONTOLOGY_FILES if n not in found]
    if missing:
        raise FormatError(f"ontology is missing {', '.join(missing)}", ", ".join(map(str, paths)))
    return found


def load_ontology(paths: str | Path | Iterable[str | Path] | None = None, *, strict: bool = True) -> Registry:
    """Load and cross-validate an ontology.

    ``paths`` is a directory holding the four JSON documents, a list of file
    paths, or ``None`` for the shipped ontology. With ``strict`` a report
    containing errors raises :class:`OntologyValidationError`; otherwise the
    registry is returned with the report attached.
    """
    files = _collect_paths(paths)
    docs = {}
    for name, path in files.items():
        doc = _read_json(path)
        _check_schema(doc, name, path)
        docs[name] = doc

    errors: list[str] = []
    warnings: list[str] = []

    vocab = _build_vocabulary(docs["vocabulary.json"], errors, warnings)
    sollukattus, s_index = _build_sollukattus(docs["sollukattus.json"], vocab, errors, warnings)
    postures, p_index = _build_postures(docs["postures.json"], errors)
    adavus, a_index = _build_adavus(docs["adavus.json"], sollukattus, s_index, p_index, errors, warnings)

    registry = Registry(
        vocabulary=vocab,
        sollukattus=sollukattus,
        adavus=adavus,
        postures=postures,
        report=ValidationReport(),
        _sollukattu_index=s_index,
        _adavu_index=a_index,
        _posture_index=p_index,
    )
    _validate_postures(registry, errors, warnings)
    report = ValidationReport(tuple(errors), tuple(warnings))
    registry = replace(registry, report=report)
    for w in warnings:
        log.info("ontology: %s", w)
    if strict and errors:
        raise OntologyValidationError(report)
    return registry


def _build_vocabulary(doc: dict, errors: list[str], warnings: list[str]) -> Vocabulary:
    bols = frozenset(doc["bols"]) | {doc["stick_beat"]}
    leg_formations = frozenset(doc["leg_formations"])
    positions = {}
    for rec in doc["leg_positions"]:
        pos = LegPositionDef(rec["name"], rec["left"], rec["right"], Symmetry(rec["symmetry"]),
                             rec["mirror_name"], rec.get("listed_as_symmetric", False))
        if pos.name in positions:
            errors.append(f"leg position {pos.name!r} defined twice")
        for side in (pos.left, pos.right):
            if side not in leg_formations:
                errors.append(f"leg position {pos.name!r} uses unknown formation {side!r}")
        if pos.symmetry is Symmetry.SYMMETRIC and pos.left != pos.right:
            errors.append(f"symmetric leg position {pos.name!r} has distinct formations")
        if pos.listed_as_symmetric:
            warnings.append(
                f"leg position {pos.name!r} is listed as symmetric but has distinct formations "
                f"{pos.left!r}/{pos.right!r}; stored as asymmetric"
            )
        positions[pos.name] = pos
    return Vocabulary(
        bols=bols,
        leg_formations=leg_formations,
        arm_formations=frozenset(doc["arm_formations"]),
        head_formations=frozenset(doc["head_formations"]),
        hand_formations=frozenset(doc["hand_formations"]),
        leg_positions=positions,
    )


def _build_sollukattus(doc, vocab: Vocabulary, errors, warnings):
    out: dict[str, SollukattuDef] = {}
    index: dict[str, str] = {}
    for rec in doc["sollukattus"]:
        s = SollukattuDef(
            id=rec["id"],
            name=rec.get("name", rec["id"]),
            aliases=tuple(rec.get("aliases", ())),
            taalam=Taalam(rec["taalam"]),
            bar_length=rec["bar_length"],
            slots=tuple(tuple(slot) for slot in rec["slots"]),
        )
        if s.id in out:
            errors.append(f"sollukattu {s.id!r} defined twice")
        out[s.id] = s
        if len(s.slots) != s.bar_length:
            errors.append(f"sollukattu {s.id}: {len(s.slots)} slots for bar length {s.bar_length}")
        if s.bar_length not in TAALAM_BAR_LENGTHS[s.taalam]:
            warnings.append(f"sollukattu {s.id}: bar length {s.bar_length} unusual for {s.taalam.value} taalam")
        for i, slot in enumerate(s.slots, 1):
            for bol in slot:
                if bol not in vocab.bols:
                    errors.append(f"sollukattu {s.id}: unknown bol {bol!r} at beat {i}")
            if STICK_BEAT in slot and len(slot) > 1:
                errors.append(f"sollukattu {s.id}: stick beat mixed with bols at beat {i}")
        for name in (s.id, s.name, *s.aliases):
            k = _key(name)
            if index.get(k, s.id) != s.id:
                errors.append(f"sollukattu name {name!r} is ambiguous ({index[k]} and {s.id})")
            index[k] = s.id
    return out, index


def _build_postures(doc, errors):
    out: dict[str, KeyPostureSpec] = {}
    index: dict[str, str] = {}
    for rec in doc["postures"]:
        p = KeyPostureSpec(
            posture_id=rec["posture_id"],
            class_id=rec.get("class_id"),
            legs_position=rec["legs_position"],
            left_leg=rec["left_leg"],
            right_leg=rec["right_leg"],
            left_arm=rec["left_arm"],
            right_arm=rec["right_arm"],
            head=rec["head"],
            left_hand=rec.get("left_hand"),
            right_hand=rec.get("right_hand"),
            leg_support=LegSupport(rec["leg_support"]),
            spinal_bend=rec["spinal_bend"],
            symmetry=Symmetry(rec["symmetry"]),
            mirror_id=rec.get("mirror_id"),
            provenance=rec.get("provenance", "derived"),
        )
        if p.posture_id in out:
            errors.append(f"posture {p.posture_id!r} defined twice")
        out[p.posture_id] = p
        for name in {p.posture_id, p.class_id} - {None}:
            if index.get(name, p.posture_id) != p.posture_id:
                errors.append(f"posture name {name!r} is ambiguous ({index[name]} and {p.posture_id})")
            index[name] = p.posture_id
            index.setdefault(_key(name), p.posture_id)
    return out, index


def _build_adavus(doc, sollukattus, s_index, p_index, errors, warnings):
    out: dict[str, AdavuDef] = {}
    index: dict[str, str] = {}
    for rec in doc["adavus"]:
        sid = s_index.get(_key(rec["sollukattu"]))
        if sid is None:
            errors.append(f"adavu {rec['id']}: dangling sollukattu reference {rec['sollukattu']!r}")
        variants = {
            int(beat): tuple(tuple(g) for g in groups)
            for beat, groups in rec.get("accepted_bol_variants", {}).items()
        }
        a = AdavuDef(
            id=rec["id"],
            family=rec["family"],
            variant=rec["variant"],
            sollukattu=sid or rec["sollukattu"],
            taalam=Taalam(rec["taalam"]) if "taalam" in rec else None,
            posture_sequence=tuple(rec.get("posture_sequence", ())),
            accepted_bol_variants=variants,
        )
        if a.id in out:
            errors.append(f"adavu {a.id!r} defined twice")
        out[a.id] = a
        for name in (a.id, f"{a.family} {a.variant}"):
            index[_key(name)] = a.id
        if sid is None:
            continue
        s = sollukattus[sid]
        if a.taalam is not None and a.taalam is not s.taalam:
            errors.append(f"adavu {a.id}: taalam {a.taalam.value} but sollukattu {sid} is {s.taalam.value}")
        if a.posture_sequence and len(a.posture_sequence) != s.bar_length:
            errors.append(
                f"adavu {a.id}: posture sequence has {len(a.posture_sequence)} entries for bar length {s.bar_length}"
            )
        for pid in a.posture_sequence:
            if pid not in p_index and _key(pid) not in p_index:
                errors.append(f"adavu {a.id}: unknown posture {pid!r} in posture sequence")
        for beat in variants:
            if not 1 <= beat <= s.bar_length:
                errors.append(f"adavu {a.id}: bol variant for beat {beat} outside bar of {s.bar_length}")
    return out, index


def _known(name: str | None, vocab: frozenset[str]) -> bool:
    # Vocabularies list one side of lateral pairs; the mirror name is implied.
    return name is None or name in vocab or flip_laterality(name) in vocab


def _validate_postures(reg: Registry, errors: list[str], warnings: list[str]) -> None:
    v = reg.vocabulary
    for p in reg.postures.values():
        tag = f"posture {p.posture_id}"
        for side, name in (("left leg", p.left_leg), ("right leg", p.right_leg)):
            if not _known(name, v.leg_formations):
                errors.append(f"{tag}: unknown {side} formation {name!r}")
        for side, name in (("left arm", p.left_arm), ("right arm", p.right_arm)):
            if not _known(name, v.arm_formations):
                errors.append(f"{tag}: unknown {side} formation {name!r}")
        if not _known(p.head, v.head_formations):
            errors.append(f"{tag}: unknown head formation {p.head!r}")
        for side, name in (("left hand", p.left_hand), ("right hand", p.right_hand)):
            if not _known(name, v.hand_formations):
                errors.append(f"{tag}: unknown {side} formation {name!r}")

        base_name = p.legs_position
        mirrored = p.symmetry is Symmetry.MIRROR_OF_ASYMMETRIC and base_name not in v.leg_positions
        if mirrored:
            base_name = mirror_position_name(base_name)
        pos = v.leg_positions.get(base_name)
        if pos is None:
            errors.append(f"{tag}: unknown legs position {p.legs_position!r}")
        else:
            want = (pos.right, pos.left) if mirrored else (pos.left, pos.right)
            if mirrored:
                want = (flip_laterality(want[0]), flip_laterality(want[1]))
            if (p.left_leg, p.right_leg) != want:
                errors.append(
                    f"{tag}: legs {p.left_leg!r}/{p.right_leg!r} do not form {p.legs_position!r}"
                )

        if p.symmetry is Symmetry.SYMMETRIC:
            if p.left_leg != p.right_leg or p.left_arm != p.right_arm or p.left_hand != p.right_hand:
                errors.append(f"{tag}: symmetric posture with distinct left/right formations")
            if p.mirror_id not in (None, p.posture_id):
                errors.append(f"{tag}: symmetric posture names a mirror {p.mirror_id!r}")
            continue

        if p.mirror_id is None:
            if p.symmetry is Symmetry.MIRROR_OF_ASYMMETRIC:
                errors.append(f"{tag}: mirror posture without a base posture")
            continue
        other = reg.postures.get(p.mirror_id)
        if other is None:
            errors.append(f"{tag}: dangling mirror reference {p.mirror_id!r}")
        elif mirror_posture(p, reg) != other:
            errors.append(f"{tag}: registered mirror {p.mirror_id} is not its left/right swap")


# -- queries ------------------------------------------------------------------

def expected_bol_sequence(s: SollukattuDef, bars: int) -> list[tuple[int, tuple[str, ...]]]:
    """Beat ordinals (global, from 1) with their vocalized bols over ``bars`` bars."""
    if bars < 1:
        raise DomainError(f"bars must be >= 1, got {bars}")
    return [
        (bar * s.bar_length + i + 1, s.slot_bols(i))
        for bar in range(bars)
        for i in range(s.bar_length)
    ]


@dataclass(frozen=True)
class Mismatch:
    beat: int
    aspect: str
    expected: object
    actual: object
    record: str

    def to_dict(self) -> dict:
        def plain(x):
            return list(x) if isinstance(x, tuple) else x
        return {"beat": self.beat, "aspect": self.aspect, "expected": plain(self.expected),
                "actual": plain(self.actual), "record": self.record}


@dataclass(frozen=True)
class DiagnosticsReport:
    adavu: str
    checked_beats: int
    mismatches: tuple[Mismatch, ...] = ()
    notes: tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "adavu": self.adavu,
            "checked_beats": self.checked_beats,
            "mismatches": [m.to_dict() for m in self.mismatches],
            "notes": [n.to_dict() for n in self.notes],
        }


def validate_performance(
    annotation: Sequence[AnnotationRecord],
    adavu: AdavuDef,
    registry: Registry,
) -> DiagnosticsReport:
    """Compare an annotated performance beat by beat against its Adavu definition.

    Beat ``b >= 1`` expects slot ``(b - 1) mod Λ`` of the sollukattu and posture
    ``posture_sequence[(b - 1) mod Λ]``. Beat 0 is the opening hold before the
    first beat: it expects no bol and the posture that closes a bar.
    """
    s = registry.sollukattu(adavu.sollukattu)
    n = s.bar_length
    seq = [registry.canonical_posture_id(p) for p in adavu.posture_sequence]
    notes: list[Diagnostic] = []
    mismatches: list[Mismatch] = []
    checked = 0
    for rec in annotation:
        pid = registry.canonical_posture_id(rec.posture_name)
        if rec.beat_number is None:
            emit(notes, "no-beat", f"record {rec.posture_name}@{rec.start_frame} has no beat number",
                 ref=rec.start_frame)
            continue
        b = rec.beat_number
        checked += 1
        where = f"{rec.posture_name}@{rec.start_frame}-{rec.end_frame}"
        pos = (b - 1) % n
        if seq and pid != seq[pos]:
            mismatches.append(Mismatch(b, "posture", seq[pos], pid, where))
        expected = s.slot_bols(pos) if b >= 1 else ()
        accepted = {expected, *adavu.accepted_bol_variants.get(pos + 1, ())} if b >= 1 else {()}
        actual = tuple(x.lower() for x in rec.bols)
        if actual not in accepted:
            mismatches.append(Mismatch(b, "bols", expected, actual, where))
    if checked == 0:
        emit(notes, "empty", "no beats checked")
    return DiagnosticsReport(adavu.id, checked, tuple(mismatches), tuple(notes))
