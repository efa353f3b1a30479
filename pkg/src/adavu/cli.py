"""Command-line pipeline: annotation or skeleton in, LabanXML + SVG + JSON reports out.

Exit codes: 0 success, 2 the input breaks a domain rule (unknown posture,
ontology errors, performance mismatches), 1 a file is missing or unreadable.
Diagnostics go to stderr; reports are JSON.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .diagnostics import Diagnostic
from .errors import (
    AdavuError, DegenerateSkeletonError, DomainError, FormatError, InsufficientDataError,
    TrainingError, UnknownPostureError, ValidationError,
)
from .event_model import (
    AnnotationRecord, AudioEvent, SyncKind, VideoKind, build_meter, build_video_events,
    detect_sync, label_bar_structure, lag_statistics, read_annotation, read_audio_events,
)
from .laban_map import build_score, load_mapping_db
from .labanxml import generate_xml, parse_xml
from .ontology import load_ontology, validate_performance
from .recognizer import CentroidModel, evaluate, predict, read_skeleton_csv, train
from .staff_renderer import render_svg

log = logging.getLogger("adavu")

EXIT_OK, EXIT_ENV, EXIT_INVALID = 0, 1, 2
DEFAULT_BAR_LENGTH = 8


@dataclass(frozen=True)
class PipelineConfig:
    command: str
    ontology: Path | None = None
    mapping_db: Path | None = None
    audio_events: Path | None = None
    annotation: Path | None = None
    skeleton: Path | None = None
    model: Path | None = None
    xml: Path | None = None
    bar_length: int | None = None
    period: float | None = None
    tolerance: float = 0.0
    adavu: str | None = None
    title: str | None = None
    out_xml: Path | None = None
    out_svg: Path | None = None
    report: Path | None = None
    verbose: int = 0

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> PipelineConfig:
        kw = {k: v for k, v in vars(ns).items() if k in cls.__dataclass_fields__ and v is not None}
        for k, v in kw.items():
            if cls.__dataclass_fields__[k].type == "Path | None":
                kw[k] = Path(v)
        return cls(**kw)

    def require(self, *names: str) -> None:
        missing = [f"--{n.replace('_', '-')}" for n in names if getattr(self, n) is None]
        if missing:
            raise FormatError(f"{self.command} needs {', '.join(missing)}")


@dataclass
class Outcome:
    report: dict
    status: int = EXIT_OK
    errors: list[str] = field(default_factory=list)


# -- helpers ------------------------------------------------------------------

def _r(x: float | None, nd: int = 6):
    return None if x is None else round(x, nd)


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _diag_list(diags: Sequence[Diagnostic]) -> list[dict]:
    return [d.to_dict() for d in diags]


def _records_from_skeleton(cfg: PipelineConfig) -> list[AnnotationRecord]:
    """Predict every skeleton frame and merge runs of the same posture into records."""
    model = CentroidModel.load(cfg.model)
    rows = sorted(read_skeleton_csv(cfg.skeleton), key=lambda r: r[0].frame)
    records: list[AnnotationRecord] = []
    run: list = []
    for s, _ in rows:
        pid, _ = predict(model, s)
        if run and (run[0] != pid or s.frame != run[2] + 1):
            records.append(AnnotationRecord(run[0], run[1], run[2]))
            run = []
        run = [pid, run[1] if run else s.frame, s.frame]
    if run:
        records.append(AnnotationRecord(run[0], run[1], run[2]))
    return records


def _meter_and_sync(audio: list[AudioEvent], records: list[AnnotationRecord], bar_length: int,
                    overridden: bool, tolerance: float, diags: list[Diagnostic]) -> dict:
    out: dict = {"meter": None, "beats": [], "summary": {}, "lag_s": None}
    if not audio:
        return out
    labelled = label_bar_structure(audio, bar_length, diagnostics=diags)
    try:
        meter = build_meter(labelled, bar_length, overridden=overridden)
        diags.extend(meter.diagnostics)
        out["meter"] = meter.to_dict()
    except InsufficientDataError as exc:
        diags.append(Diagnostic("too-few-beats", str(exc)))
    video = build_video_events(records)
    sync = detect_sync(labelled, video, tolerance, diagnostics=diags)
    by_audio = {s.audio_id: s for s in sync if s.video_id is not None}
    n_full = n_half = synced_full = synced_half = 0
    for e in labelled:
        if not (e.kind.is_full or e.kind.is_half):
            continue
        s = by_audio.get(e.id)
        if e.kind.is_full:
            n_full += 1
            synced_full += s is not None
        else:
            n_half += 1
            synced_half += s is not None
        out["beats"].append({
            "id": e.id, "time_s": e.time_s, "kind": e.kind.value, "bol": e.bol,
            "bar": e.bar_index, "beat_in_bar": e.beat_in_bar,
            "bar_label": e.bar_label.value if e.bar_label else None,
            "synced": s is not None,
            "video_id": s.video_id if s else None,
            "posture_id": s.posture_id if s else None,
            "lag_s": _r(s.lag_s) if s else None,
        })
    out["summary"] = {
        "full_beats": n_full, "half_beats": n_half,
        "synced_full_beats": synced_full, "synced_half_beats": synced_half,
        "unsynced_beats": n_full + n_half - synced_full - synced_half,
        "key_postures": sum(1 for v in video if v.kind is VideoKind.NO_MOTION),
        "bol_events": sum(1 for s in sync if s.kind in (SyncKind.BOL_AT_FULL_BEAT, SyncKind.BOL_AT_HALF_BEAT)),
    }
    stats = lag_statistics(sync)
    out["lag_s"] = {k: _r(v) for k, v in stats.items()} if stats else None
    return out


def _bar_length(cfg: PipelineConfig, registry=None) -> tuple[int, bool]:
    if cfg.bar_length is not None:
        return cfg.bar_length, True
    if cfg.adavu and registry is not None:
        adavu = registry.adavu(cfg.adavu)
        return registry.sollukattu(adavu.sollukattu).bar_length, False
    return DEFAULT_BAR_LENGTH, False


# -- commands -----------------------------------------------------------------

def cmd_transcribe(cfg: PipelineConfig) -> Outcome:
    if cfg.annotation is None and (cfg.skeleton is None or cfg.model is None):
        raise FormatError("transcribe needs --annotation, or --skeleton with --model")
    db = load_mapping_db(cfg.mapping_db)
    registry = load_ontology(cfg.ontology) if cfg.adavu else None
    if cfg.annotation is not None:
        records = read_annotation(cfg.annotation)
        source = "annotation"
    else:
        records = _records_from_skeleton(cfg)
        source = "skeleton"
    title = cfg.title if cfg.title is not None else (
        registry.adavu(cfg.adavu).title if registry else (cfg.annotation or cfg.skeleton).stem)
    diags: list[Diagnostic] = []
    errors: list[str] = []
    report: dict = {"command": "transcribe", "title": title, "source": source}

    for i, rec in enumerate(records, 1):
        if rec.posture_name not in db:
            errors.append(f"record {i} ({rec.posture_name}, frames {rec.start_frame}-{rec.end_frame}): "
                          f"unknown posture id {rec.posture_name!r}")
    report["postures"] = [
        {"record": i, "posture_id": r.posture_name, "start_frame": r.start_frame, "end_frame": r.end_frame,
         "beat_number": r.beat_number, "bols": list(r.bols)}
        for i, r in enumerate(records, 1)
    ]
    if errors:
        report.update(status="invalid", errors=errors, diagnostics=_diag_list(diags))
        return Outcome(report, EXIT_INVALID, errors)

    score = build_score([r.posture_name for r in records], db, title)
    xml = generate_xml(score)
    svg = render_svg(score, diagnostics=diags)
    report["measures"] = len(score.frames)

    bar_length, overridden = _bar_length(cfg, registry)
    if cfg.audio_events is not None:
        audio = read_audio_events(cfg.audio_events, period_s=cfg.period, diagnostics=diags)
        report.update(_meter_and_sync(audio, records, bar_length, overridden, cfg.tolerance, diags))

    if registry is not None:
        perf = validate_performance(records, registry.adavu(cfg.adavu), registry)
        report["validation"] = perf.to_dict()
        for m in perf.mismatches:
            errors.append(f"beat {m.beat} ({m.record}): {m.aspect} expected {m.expected}, got {m.actual}")

    if cfg.out_xml is not None:
        _write(cfg.out_xml, xml)
    if cfg.out_svg is not None:
        _write(cfg.out_svg, svg)
    report["outputs"] = {"xml": str(cfg.out_xml) if cfg.out_xml else None,
                         "svg": str(cfg.out_svg) if cfg.out_svg else None}
    report["diagnostics"] = _diag_list(diags)
    report["errors"] = errors
    report["status"] = "invalid" if errors else "ok"
    return Outcome(report, EXIT_INVALID if errors else EXIT_OK, errors)


def cmd_analyze_sync(cfg: PipelineConfig) -> Outcome:
    cfg.require("audio_events", "annotation")
    diags: list[Diagnostic] = []
    audio = read_audio_events(cfg.audio_events, period_s=cfg.period, diagnostics=diags)
    records = read_annotation(cfg.annotation)
    bar_length, overridden = _bar_length(cfg, load_ontology(cfg.ontology) if cfg.adavu else None)
    report = {"command": "analyze-sync", "tolerance_s": cfg.tolerance}
    report.update(_meter_and_sync(audio, records, bar_length, overridden, cfg.tolerance, diags))
    report["diagnostics"] = _diag_list(diags)
    return Outcome(report)


def cmd_validate_ontology(cfg: PipelineConfig) -> Outcome:
    reg = load_ontology(cfg.ontology, strict=False)
    report = {
        "command": "validate-ontology",
        "counts": {"sollukattus": len(reg.sollukattus), "adavus": len(reg.adavus),
                   "postures": len(reg.postures), "bols": len(reg.vocabulary.bols)},
        **reg.report.to_dict(),
    }
    return Outcome(report, EXIT_OK if reg.report.ok else EXIT_INVALID, list(reg.report.errors))


def cmd_render(cfg: PipelineConfig) -> Outcome:
    cfg.require("xml")
    try:
        text = cfg.xml.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read LabanXML: {exc.strerror or exc}", str(cfg.xml)) from exc
    diags: list[Diagnostic] = []
    score = parse_xml(text, diagnostics=diags)
    svg = render_svg(score, diagnostics=diags)
    if cfg.out_svg is not None:
        _write(cfg.out_svg, svg)
    else:
        sys.stdout.write(svg)
    return Outcome({"command": "render", "title": score.title, "measures": len(score.frames),
                    "diagnostics": _diag_list(diags)})


def _labelled(cfg: PipelineConfig):
    rows = read_skeleton_csv(cfg.skeleton)
    unlabelled = [s.frame for s, label in rows if label is None]
    if unlabelled:
        raise ValidationError(f"{len(unlabelled)} skeleton row(s) lack a posture_id, first at frame {unlabelled[0]}")
    return rows


def cmd_train(cfg: PipelineConfig) -> Outcome:
    cfg.require("skeleton", "model")
    model = train(_labelled(cfg))
    model.save(cfg.model)
    return Outcome({"command": "train", "model": str(cfg.model),
                    "classes": dict(zip(model.classes, model.counts))})


def cmd_predict(cfg: PipelineConfig) -> Outcome:
    cfg.require("skeleton", "model")
    model = CentroidModel.load(cfg.model)
    rows = read_skeleton_csv(cfg.skeleton)
    preds = []
    for s, label in rows:
        pid, dist = predict(model, s)
        preds.append({"frame": s.frame, "posture_id": pid, "distance": _r(dist), "label": label})
    report = {"command": "predict", "predictions": preds}
    if rows and all(label is not None for _, label in rows):
        report["evaluation"] = evaluate(model, rows).to_dict()
    return Outcome(report)


COMMANDS = {
    "transcribe": cmd_transcribe,
    "analyze-sync": cmd_analyze_sync,
    "validate-ontology": cmd_validate_ontology,
    "render": cmd_render,
    "train": cmd_train,
    "predict": cmd_predict,
}


# -- parser -------------------------------------------------------------------

def _positive_int(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("must be >= 2")
    return v


def _non_negative(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adavu", description="Transcribe Adavu performances into Labanotation.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ontology", help="ontology directory (default: shipped)")
    common.add_argument("--verbose", action="count", default=0, help="more log output on stderr")
    common.add_argument("--report", help="write the JSON report here (default: stdout, or none for transcribe)")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transcribe", parents=[common], help="annotation or skeleton -> LabanXML + SVG")
    t.add_argument("--mapping-db", help="Laban mapping database (default: shipped)")
    t.add_argument("--annotation", help="K-frame annotation CSV")
    t.add_argument("--skeleton", help="skeleton CSV, used with --model instead of --annotation")
    t.add_argument("--model", help="trained recognizer model JSON")
    t.add_argument("--audio-events", help="audio event CSV for meter and sync analysis")
    t.add_argument("--adavu", help="check the performance against this Adavu")
    t.add_argument("--title", help="score title")
    t.add_argument("--bar-length", type=_positive_int, help="beats per bar (overrides the taalam)")
    t.add_argument("--period", type=float, help="beat period in seconds (default: inferred)")
    t.add_argument("--tolerance", type=_non_negative, default=0.0, help="sync tolerance in seconds")
    t.add_argument("--out-xml", help="LabanXML output path")
    t.add_argument("--out-svg", help="SVG output path")

    s = sub.add_parser("analyze-sync", parents=[common], help="beat/posture synchronization report")
    s.add_argument("--audio-events", help="audio event CSV")
    s.add_argument("--annotation", help="K-frame annotation CSV")
    s.add_argument("--adavu", help="take the bar length from this Adavu's taalam")
    s.add_argument("--bar-length", type=_positive_int)
    s.add_argument("--period", type=float)
    s.add_argument("--tolerance", type=_non_negative, default=0.0)

    sub.add_parser("validate-ontology", parents=[common], help="load and cross-check an ontology")

    r = sub.add_parser("render", parents=[common], help="LabanXML -> SVG staff")
    r.add_argument("--xml", help="LabanXML input")
    r.add_argument("--out-svg", help="SVG output path (default: stdout)")

    tr = sub.add_parser("train", parents=[common], help="fit the posture recognizer")
    tr.add_argument("--skeleton", help="labelled skeleton CSV")
    tr.add_argument("--model", help="model JSON to write")

    pr = sub.add_parser("predict", parents=[common], help="classify skeleton frames")
    pr.add_argument("--skeleton", help="skeleton CSV")
    pr.add_argument("--model", help="model JSON")
    return p


def _setup_logging(verbose: int) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("adavu: %(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def run(cfg: PipelineConfig) -> int:
    try:
        outcome = COMMANDS[cfg.command](cfg)
    except (FormatError, OSError) as exc:
        print(f"adavu: error: {exc}", file=sys.stderr)
        return EXIT_ENV
    except (ValidationError, DomainError, InsufficientDataError, DegenerateSkeletonError,
            TrainingError, UnknownPostureError) as exc:
        print(f"adavu: invalid: {exc}", file=sys.stderr)
        if cfg.report is not None:
            _write(cfg.report, _dump({"command": cfg.command, "status": "invalid", "errors": [str(exc)]}))
        return EXIT_INVALID
    except AdavuError as exc:
        print(f"adavu: error: {exc}", file=sys.stderr)
        return EXIT_ENV
    for e in outcome.errors:
        print(f"adavu: invalid: {e}", file=sys.stderr)
    text = _dump(outcome.report)
    try:
        if cfg.report is not None:
            _write(cfg.report, text)
        elif cfg.command not in ("transcribe", "render"):
            sys.stdout.write(text)
    except OSError as exc:
        print(f"adavu: error: {exc}", file=sys.stderr)
        return EXIT_ENV
    return outcome.status


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    _setup_logging(ns.verbose)
    return run(PipelineConfig.from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
