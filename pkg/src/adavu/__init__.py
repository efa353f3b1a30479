"""Transcription of Bharatanatyam Adavu performances into Labanotation."""

from __future__ import annotations

from .errors import (
    AdavuError, DegenerateSkeletonError, DomainError, FormatError, InsufficientDataError,
    LabanValidationError, LabanXMLParseError, OntologyValidationError, OverlapError,
    TrainingError, UnknownPostureError, ValidationError,
)
from .event_model import (
    AnnotationRecord, AudioEvent, AudioKind, BarLabel, MeterEstimate, SyncEvent, SyncKind,
    VideoEvent, VideoKind, build_video_events, classify_onsets, detect_sync, estimate_tempo,
    frame_to_time, infer_period, label_bar_structure, time_to_frame,
)
from .laban_map import LabanFrame, LabanScore, build_score, encode_posture, load_mapping_db
from .labanxml import generate_xml, parse_xml
from .ontology import Registry, load_ontology, mirror_posture, validate_performance
from .recognizer import CentroidModel, SkeletonFrame, extract_features, predict, train
from .staff_renderer import StaffLayout, render_svg

__version__ = "0.1.0"

__all__ = [
    "AdavuError", "DegenerateSkeletonError", "DomainError", "FormatError", "InsufficientDataError",
    "LabanValidationError", "LabanXMLParseError", "OntologyValidationError", "OverlapError",
    "TrainingError", "UnknownPostureError", "ValidationError",
    "AnnotationRecord", "AudioEvent", "AudioKind", "BarLabel", "MeterEstimate", "SyncEvent", "SyncKind",
    "VideoEvent", "VideoKind", "build_video_events", "classify_onsets", "detect_sync", "estimate_tempo",
    "frame_to_time", "infer_period", "label_bar_structure", "time_to_frame",
    "LabanFrame", "LabanScore", "build_score", "encode_posture", "load_mapping_db",
    "generate_xml", "parse_xml",
    "Registry", "load_ontology", "mirror_posture", "validate_performance",
    "CentroidModel", "SkeletonFrame", "extract_features", "predict", "train",
    "StaffLayout", "render_svg",
]
