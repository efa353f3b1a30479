"""Exception hierarchy shared by every stage of the transcription pipeline.

Two families matter to callers (and to the CLI exit codes):

* ``ValidationError`` -- the input parsed fine but violates a domain rule
  (unknown posture, dangling ontology reference, out-of-range Laban code).
* ``FormatError`` -- the input could not be read or parsed at all.
"""

from __future__ import annotations


class AdavuError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(AdavuError, ValueError):
    """An argument lies outside the domain of an operation (negative time, Λ ≤ 1)."""


class InsufficientDataError(AdavuError, ValueError):
    """Too few events to compute a statistic."""


class ValidationError(AdavuError):
    """Well-formed input that breaks a domain rule."""


class FormatError(AdavuError):
    """Unparseable input. ``location`` names the file/line/element when known."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class OverlapError(ValidationError):
    """Two annotation records claim the same video frames."""


class UnknownPostureError(ValidationError):
    """A posture ID that neither the ontology nor the mapping DB knows."""

    def __init__(self, posture_id: str, context: str | None = None):
        self.posture_id = posture_id
        self.context = context
        msg = f"unknown posture id {posture_id!r}"
        super().__init__(f"{msg} ({context})" if context else msg)


class OntologyValidationError(ValidationError):
    """Raised by a strict ontology load when the validation report has errors."""

    def __init__(self, report):
        self.report = report
        lines = "; ".join(report.errors[:5])
        more = f" (+{len(report.errors) - 5} more)" if len(report.errors) > 5 else ""
        super().__init__(f"ontology has {len(report.errors)} validation error(s): {lines}{more}")


class LabanValidationError(ValidationError):
    """A Laban code outside its range, or a structurally incomplete LabanXML measure."""


class LabanXMLParseError(FormatError):
    """Malformed LabanXML text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message, f"line {line}" if line is not None else None)


class DegenerateSkeletonError(AdavuError, ValueError):
    """Skeleton whose torso or shoulder line collapses to a point."""


class TrainingError(AdavuError):
    """The recognizer cannot be trained on the supplied examples."""
