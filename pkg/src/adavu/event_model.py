"""Audio, video and sync event streams of an Adavu performance.

Audio events are beat instants (seconds), video events are frame ranges of
a 30 fps recording, and sync events pair the two. Everything here is a
frozen value object or a pure function.
"""

from __future__ import annotations

import bisect
import csv
import math
import statistics
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .diagnostics import Diagnostic, emit
from .errors import DomainError, FormatError, InsufficientDataError, OverlapError, ValidationError
from .vocabulary import split_bols

FPS = 30
STANDARD_BAR_LENGTHS = frozenset({6, 8, 12})
GRID_TOLERANCE = 0.25
OUTLIER_FRACTION = 0.20


class AudioKind(Enum):
    FULL_BEAT_BOL = "FullBeatBol"
    HALF_BEAT_BOL = "HalfBeatBol"
    QUARTER_BEAT_BOL = "QuarterBeatBol"
    FULL_BEAT_NO_BOL = "FullBeatNoBol"
    HALF_BEAT_NO_BOL = "HalfBeatNoBol"
    BOL_ONLY = "BolOnly"

    @property
    def needs_bol(self) -> bool:
        return self not in (AudioKind.FULL_BEAT_NO_BOL, AudioKind.HALF_BEAT_NO_BOL)

    @property
    def is_full(self) -> bool:
        return self in (AudioKind.FULL_BEAT_BOL, AudioKind.FULL_BEAT_NO_BOL)

    @property
    def is_half(self) -> bool:
        return self in (AudioKind.HALF_BEAT_BOL, AudioKind.HALF_BEAT_NO_BOL)


class BarLabel(Enum):
    DOWNBEAT = "Downbeat"
    UPBEAT = "Upbeat"


class VideoKind(Enum):
    NO_MOTION = "NoMotion"
    TRANSITION = "Transition"
    TRAJECTORY = "Trajectory"


class SyncKind(Enum):
    POSTURE_AT_FULL_BEAT = "PostureAtFullBeat"
    POSTURE_AT_HALF_BEAT = "PostureAtHalfBeat"
    BOL_AT_FULL_BEAT = "BolAtFullBeat"
    BOL_AT_HALF_BEAT = "BolAtHalfBeat"


@dataclass(frozen=True)
class AudioEvent:
    id: int
    kind: AudioKind
    time_s: float
    bol: str | None = None
    bar_label: BarLabel | None = None
    bar_index: int | None = None
    beat_in_bar: int | None = None

    def __post_init__(self):
        if self.id < 1:
            raise ValidationError(f"audio event id must be >= 1, got {self.id}")
        if not (self.time_s >= 0 and math.isfinite(self.time_s)):
            raise ValidationError(f"audio event {self.id}: bad time {self.time_s}")
        if self.kind.needs_bol and not self.bol:
            raise ValidationError(f"audio event {self.id}: {self.kind.value} requires a bol")
        if not self.kind.needs_bol and self.bol:
            raise ValidationError(f"audio event {self.id}: {self.kind.value} cannot carry bol {self.bol!r}")
        if self.bar_label is not None and not self.kind.is_full:
            raise ValidationError(f"audio event {self.id}: only full beats take a bar label")


@dataclass(frozen=True)
class VideoEvent:
    id: int
    kind: VideoKind
    frame_start: int
    frame_end: int
    posture_id: str | None = None
    trajectory_label: str | None = None

    def __post_init__(self):
        if self.frame_start < 0 or self.frame_start > self.frame_end:
            raise ValidationError(
                f"video event {self.id}: bad frame range {self.frame_start}-{self.frame_end}"
            )
        if (self.posture_id is not None) != (self.kind is VideoKind.NO_MOTION):
            raise ValidationError(f"video event {self.id}: posture_id present iff NoMotion")
        if self.trajectory_label is not None and self.kind is not VideoKind.TRAJECTORY:
            raise ValidationError(f"video event {self.id}: trajectory label on {self.kind.value}")

    @property
    def start_s(self) -> float:
        return frame_to_time(self.frame_start)

    @property
    def end_s(self) -> float:
        return frame_to_time(self.frame_end)

    @property
    def midpoint_s(self) -> float:
        return (self.frame_start + self.frame_end) / (2 * FPS)


@dataclass(frozen=True)
class SyncEvent:
    kind: SyncKind
    audio_id: int
    lag_s: float = 0.0
    video_id: int | None = None
    posture_id: str | None = None
    bol: str | None = None

    def __post_init__(self):
        posture_kind = self.kind in (SyncKind.POSTURE_AT_FULL_BEAT, SyncKind.POSTURE_AT_HALF_BEAT)
        if posture_kind and self.video_id is None:
            raise ValidationError(f"{self.kind.value} needs a video_id")
        if not posture_kind and not self.bol:
            raise ValidationError(f"{self.kind.value} needs a bol")


@dataclass(frozen=True)
class MeterEstimate:
    period_s: float
    bpm: float
    bar_length: int | None = None
    bar_count: int | None = None
    full_beat_ids: tuple[int, ...] = ()
    half_beat_ids: tuple[int, ...] = ()
    diagnostics: tuple[Diagnostic, ...] = field(default=(), compare=False)
    bar_length_overridden: bool = False

    def __post_init__(self):
        if not self.period_s > 0:
            raise DomainError(f"period must be positive, got {self.period_s}")
        if abs(self.bpm - 60.0 / self.period_s) > 1e-9:
            raise ValidationError("bpm must equal 60 / period_s")
        if self.bar_length is not None:
            if self.bar_length < 2:
                raise DomainError(f"bar length must be >= 2, got {self.bar_length}")
            if not self.bar_length_overridden and self.bar_length not in STANDARD_BAR_LENGTHS:
                raise ValidationError(
                    f"bar length {self.bar_length} is not a taalam length {sorted(STANDARD_BAR_LENGTHS)}"
                )

    def to_dict(self) -> dict:
        return {
            "period_s": round(self.period_s, 6),
            "bpm": round(self.bpm, 6),
            "bar_length": self.bar_length,
            "bar_count": self.bar_count,
            "full_beat_ids": list(self.full_beat_ids),
            "half_beat_ids": list(self.half_beat_ids),
        }


@dataclass(frozen=True)
class AnnotationRecord:
    """One row of a K-frame annotation sheet."""

    posture_name: str
    start_frame: int
    end_frame: int
    beat_number: int | None = None
    bols: tuple[str, ...] = ()

    def __post_init__(self):
        if self.start_frame < 0 or self.start_frame > self.end_frame:
            raise ValidationError(
                f"annotation {self.posture_name!r}: bad frame range {self.start_frame}-{self.end_frame}"
            )


# -- frame/time mapping -------------------------------------------------------

def frame_to_time(frame: int) -> float:
    if frame < 0:
        raise DomainError(f"frame must be >= 0, got {frame}")
    return frame / FPS


def time_to_frame(t: float) -> int:
    """Nearest frame; exact half-frames round away from zero."""
    if not t >= 0:
        raise DomainError(f"time must be >= 0, got {t}")
    return int(math.floor(t * FPS + 0.5))


# -- tempo and beats ----------------------------------------------------------

def _times(events: Iterable) -> list[float]:
    return [e.time_s if isinstance(e, AudioEvent) else float(e) for e in events]


def estimate_tempo(full_beats: Sequence[AudioEvent] | Sequence[float]) -> MeterEstimate:
    """Tempo period as the median inter-beat interval.

    Intervals more than 20% away from the median are reported in
    ``MeterEstimate.diagnostics`` (missed or doubled beats, bar gaps).
    """
    times = _times(full_beats)
    if len(times) < 3:
        raise InsufficientDataError(f"need >= 3 full beats to estimate tempo, got {len(times)}")
    intervals = [b - a for a, b in zip(times, times[1:])]
    if any(d <= 0 for d in intervals):
        raise DomainError("full-beat times must be strictly increasing")
    period = statistics.median(intervals)
    diags: list[Diagnostic] = []
    for i, d in enumerate(intervals):
        if abs(d - period) > OUTLIER_FRACTION * period:
            emit(diags, "interval-outlier",
                 f"interval {times[i]:.3f}->{times[i + 1]:.3f} s = {d:.3f} s deviates "
                 f"{100 * (d - period) / period:+.0f}% from median {period:.3f} s", ref=i + 1)
    ids = tuple(e.id for e in full_beats if isinstance(e, AudioEvent))
    return MeterEstimate(period_s=period, bpm=60.0 / period, full_beat_ids=ids,
                         diagnostics=tuple(diags))


def classify_onsets(
    onsets: Sequence[tuple[float, str | None]],
    period_s: float,
    *,
    tolerance: float = GRID_TOLERANCE,
    diagnostics: list[Diagnostic] | None = None,
) -> list[AudioEvent]:
    """Place time-sorted ``(time_s, bol)`` onsets on a beat grid anchored at the first onset.

    An onset strictly within ``tolerance * period_s`` of a grid point ``k*T`` is a
    full beat, within the same distance of ``k*T + T/2`` a half beat. Anything
    else becomes a quarter beat when it carries a bol and is rejected otherwise.
    With the default tolerance of 0.25 the two bands meet, so only onsets sitting
    exactly on a quarter position fall through.
    """
    if not period_s > 0:
        raise DomainError(f"period must be positive, got {period_s}")
    if not onsets:
        return []
    anchor = onsets[0][0]
    band = tolerance * period_s
    events: list[AudioEvent] = []
    last = -math.inf
    for t, bol in onsets:
        if t < last:
            raise DomainError("onsets must be time-sorted")
        last = t
        bol = bol or None
        offset = t - anchor
        d_full = abs(offset - round(offset / period_s) * period_s)
        d_half = abs(offset - (math.floor(offset / period_s) + 0.5) * period_s)
        if d_full < band:
            kind = AudioKind.FULL_BEAT_BOL if bol else AudioKind.FULL_BEAT_NO_BOL
        elif d_half < band:
            kind = AudioKind.HALF_BEAT_BOL if bol else AudioKind.HALF_BEAT_NO_BOL
        elif bol:
            kind = AudioKind.QUARTER_BEAT_BOL
        else:
            emit(diagnostics, "onset-off-grid",
                 f"onset at {t:.3f} s without bol matches no full/half grid slot", ref=t)
            continue
        events.append(AudioEvent(id=len(events) + 1, kind=kind, time_s=t, bol=bol))
    return events


def _grid_complete(events: Sequence[AudioEvent], period_s: float) -> bool:
    full = [e.time_s for e in events if e.kind.is_full]
    if not full:
        return False
    slots = {round((t - full[0]) / period_s) for t in full}
    return slots == set(range(max(slots) + 1))


def _fit_grid_period(events: Sequence[AudioEvent], period_s: float) -> float:
    """Least-squares slope of full-beat times against their grid slots."""
    full = [e.time_s for e in events if e.kind.is_full]
    slots = [round((t - full[0]) / period_s) for t in full]
    if len(set(slots)) < 2:
        return period_s
    return statistics.linear_regression(slots, full).slope


def infer_period(
    onsets: Sequence[tuple[float, str | None]],
    *,
    max_multiple: int = 4,
    diagnostics: list[Diagnostic] | None = None,
) -> float:
    """Beat-grid period of a raw onset stream, resolving half-period ambiguity.

    The median inter-onset interval is either the beat period or a fraction of
    it (when half beats are struck). Every beat carries a stroke, so the
    smallest multiple of that interval whose full-beat grid has no empty slot
    is taken. The grid is anchored at the first onset, so the period returned
    is the least-squares slope of full-beat times over their slots: a median
    interval a few milliseconds short would drift off the grid within a bar or
    two.
    """
    times = [t for t, _ in onsets]
    if len(times) < 3:
        raise InsufficientDataError(f"need >= 3 onsets to infer a period, got {len(times)}")
    base = statistics.median(b - a for a, b in zip(times, times[1:]))
    if not base > 0:
        raise DomainError("onset times must be strictly increasing")
    for m in range(1, max_multiple + 1):
        period = m * base
        for _ in range(5):
            events = classify_onsets(onsets, period)
            fitted = _fit_grid_period(events, period)
            if not fitted > 0 or abs(fitted - period) <= 1e-9 * period:
                break
            period = fitted
        events = classify_onsets(onsets, period)
        if period > 0 and _grid_complete(events, period):
            return period
    emit(diagnostics, "period-ambiguous",
         f"no multiple of the median onset interval {base:.3f} s yields a complete beat grid")
    return base


def label_bar_structure(
    events: Sequence[AudioEvent],
    bar_length: int,
    *,
    diagnostics: list[Diagnostic] | None = None,
) -> list[AudioEvent]:
    """Number full beats 1..Λ within bars and mark downbeats/upbeats.

    Only complete bars get Downbeat/Upbeat labels; a trailing partial bar keeps
    its positions and bar index but is reported as a diagnostic. Half and
    quarter beats inherit the bar of the preceding full beat.
    """
    if bar_length <= 1:
        raise DomainError(f"bar length must be >= 2, got {bar_length}")
    n_full = sum(1 for e in events if e.kind.is_full)
    complete_bars = n_full // bar_length
    if n_full % bar_length:
        emit(diagnostics, "incomplete-bar",
             f"bar {complete_bars + 1} has {n_full % bar_length} of {bar_length} beats",
             ref=complete_bars + 1)
    out: list[AudioEvent] = []
    k = -1
    for e in events:
        if e.kind.is_full:
            k += 1
            bar, pos = divmod(k, bar_length)
            label = None
            if bar < complete_bars:
                if pos == 0:
                    label = BarLabel.DOWNBEAT
                elif pos == bar_length - 1:
                    label = BarLabel.UPBEAT
            out.append(replace(e, bar_index=bar + 1, beat_in_bar=pos + 1, bar_label=label))
        else:
            bar_index = k // bar_length + 1 if k >= 0 else None
            out.append(replace(e, bar_index=bar_index, beat_in_bar=None, bar_label=None))
    return out


def build_meter(
    events: Sequence[AudioEvent],
    bar_length: int,
    *,
    overridden: bool = False,
) -> MeterEstimate:
    full = [e for e in events if e.kind.is_full]
    tempo = estimate_tempo(full)
    return MeterEstimate(
        period_s=tempo.period_s,
        bpm=tempo.bpm,
        bar_length=bar_length,
        bar_count=-(-len(full) // bar_length),
        full_beat_ids=tuple(e.id for e in full),
        half_beat_ids=tuple(e.id for e in events if e.kind.is_half),
        diagnostics=tempo.diagnostics,
        bar_length_overridden=overridden,
    )


def validate_audio_stream(events: Sequence[AudioEvent]) -> None:
    """Check the stream-level invariants that single events cannot see."""
    for a, b in zip(events, events[1:]):
        if not b.time_s > a.time_s:
            raise ValidationError(f"audio events {a.id} and {b.id} are not strictly increasing in time")
    for e in events:
        if e.bar_label is BarLabel.DOWNBEAT and e.beat_in_bar not in (None, 1):
            raise ValidationError(f"audio event {e.id}: downbeat at beat {e.beat_in_bar}")


# -- video --------------------------------------------------------------------

def build_video_events(
    annotation: Sequence[AnnotationRecord],
    *,
    stream_end: int | None = None,
) -> list[VideoEvent]:
    """One NoMotion event per K-frame record, Transition events for the gaps.

    ``stream_end`` (last frame of the recording) adds a trailing Transition after
    the final key posture.
    """
    out: list[VideoEvent] = []
    prev: AnnotationRecord | None = None
    for rec in annotation:
        if prev is not None:
            if rec.start_frame < prev.start_frame:
                raise ValidationError(
                    f"annotation not sorted: {rec.posture_name!r}@{rec.start_frame} "
                    f"after {prev.posture_name!r}@{prev.start_frame}"
                )
            if rec.start_frame <= prev.end_frame:
                raise OverlapError(
                    f"annotation records overlap: {prev.posture_name!r} "
                    f"({prev.start_frame}-{prev.end_frame}) and {rec.posture_name!r} "
                    f"({rec.start_frame}-{rec.end_frame})"
                )
            if rec.start_frame > prev.end_frame + 1:
                out.append(VideoEvent(len(out) + 1, VideoKind.TRANSITION,
                                      prev.end_frame + 1, rec.start_frame - 1))
        out.append(VideoEvent(len(out) + 1, VideoKind.NO_MOTION,
                              rec.start_frame, rec.end_frame, posture_id=rec.posture_name))
        prev = rec
    if stream_end is not None and prev is not None and stream_end > prev.end_frame:
        out.append(VideoEvent(len(out) + 1, VideoKind.TRANSITION, prev.end_frame + 1, stream_end))
    return out


# -- sync ---------------------------------------------------------------------

def _contains(beat_s: float, ev: VideoEvent, tolerance_s: float) -> bool:
    # A beat belongs to the frame it rounds to, so the K-frame range [s, e]
    # spans [s - 1/2, e + 1/2) in frame units before widening by the tolerance.
    x = beat_s * FPS
    slack = tolerance_s * FPS
    return ev.frame_start - 0.5 - slack <= x < ev.frame_end + 0.5 + slack


def detect_sync(
    audio: Sequence[AudioEvent],
    video: Sequence[VideoEvent],
    tolerance_s: float = 0.0,
    *,
    diagnostics: list[Diagnostic] | None = None,
) -> list[SyncEvent]:
    """Pair full/half beats with the key posture (NoMotion event) held at that instant.

    A beat syncs with a NoMotion event when the frame it falls on lies in the
    event's frame range, widened by ``tolerance_s`` on both sides. When widened
    ranges overlap, the event whose midpoint is closest wins. ``lag_s`` is the
    beat instant minus the range midpoint (positive: posture held before beat).
    Beats carrying a bol also produce a BolAt* event.
    """
    if tolerance_s < 0:
        raise DomainError(f"tolerance must be >= 0, got {tolerance_s}")
    holds = [v for v in video if v.kind is VideoKind.NO_MOTION]
    starts = [v.frame_start for v in holds]
    out: list[SyncEvent] = []
    for beat in audio:
        if not (beat.kind.is_full or beat.kind.is_half):
            continue
        full = beat.kind.is_full
        hi = bisect.bisect_right(starts, beat.time_s * FPS + 0.5 + tolerance_s * FPS)
        best: VideoEvent | None = None
        for j in range(hi - 1, -1, -1):
            ev = holds[j]
            if _contains(beat.time_s, ev, tolerance_s):
                if best is None or abs(beat.time_s - ev.midpoint_s) < abs(beat.time_s - best.midpoint_s):
                    best = ev
            elif ev.frame_end + 0.5 + tolerance_s * FPS <= beat.time_s * FPS:
                break
        if best is not None:
            out.append(SyncEvent(
                SyncKind.POSTURE_AT_FULL_BEAT if full else SyncKind.POSTURE_AT_HALF_BEAT,
                audio_id=beat.id,
                lag_s=beat.time_s - best.midpoint_s,
                video_id=best.id,
                posture_id=best.posture_id,
            ))
        else:
            emit(diagnostics, "beat-unsynced",
                 f"{'full' if full else 'half'} beat {beat.id} at {beat.time_s:.3f} s "
                 f"(frame {time_to_frame(beat.time_s)}) falls in no key-posture range",
                 ref=beat.id)
        if beat.bol:
            out.append(SyncEvent(
                SyncKind.BOL_AT_FULL_BEAT if full else SyncKind.BOL_AT_HALF_BEAT,
                audio_id=beat.id,
                bol=beat.bol,
            ))
    return out


def half_beat_offsets(events: Sequence[AudioEvent]) -> list[float]:
    """τ(half beat) − τ(preceding full beat) for every half beat."""
    offsets = []
    last_full = None
    for e in events:
        if e.kind.is_full:
            last_full = e.time_s
        elif e.kind.is_half and last_full is not None:
            offsets.append(e.time_s - last_full)
    return offsets


def lag_statistics(sync: Sequence[SyncEvent]) -> dict | None:
    lags = [s.lag_s for s in sync if s.video_id is not None]
    if not lags:
        return None
    return {"min": min(lags), "median": statistics.median(lags), "max": max(lags)}


# -- files --------------------------------------------------------------------

AUDIO_HEADER = ("id", "time_s", "bol")
ANNOTATION_HEADER = ("posture_name", "start_frame", "end_frame", "beat_number", "bols")


def _open_csv(path: Path, required: Sequence[str], what: str):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {what}: {exc.strerror or exc}", str(path)) from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        return [], []
    header = [h.strip() for h in rows[0]]
    missing = [h for h in required if h not in header]
    if missing:
        raise FormatError(f"{what} header lacks {', '.join(missing)}", f"{path}:1")
    body = []
    for lineno, row in enumerate(rows[1:], 2):
        if not "".join(row).strip():
            continue
        if len(row) > len(header):
            raise FormatError(f"{len(row)} fields, header has {len(header)}", f"{path}:{lineno}")
        body.append((lineno, dict(zip(header, (c.strip() for c in row)))))
    return header, body


def read_audio_events(
    path: str | Path,
    *,
    period_s: float | None = None,
    diagnostics: list[Diagnostic] | None = None,
) -> list[AudioEvent]:
    """Audio events from ``id,time_s,bol[,kind]`` rows.

    With a ``kind`` column (an :class:`AudioKind` value) the rows are taken
    as labelled. Without one they are raw onsets: the period is inferred
    (unless given) and each onset is placed on the beat grid. Empty ``bol``
    cells and ``[B]`` mean a stick beat without a bol.
    """
    path = Path(path)
    header, body = _open_csv(path, AUDIO_HEADER, "audio event file")
    parsed = []
    for lineno, row in body:
        try:
            ident, t = int(row["id"]), float(row["time_s"])
        except (ValueError, TypeError) as exc:
            raise FormatError(f"bad id/time_s: {exc}", f"{path}:{lineno}") from exc
        bols = split_bols(row.get("bol"))
        parsed.append((lineno, ident, t, " ".join(bols) or None, row.get("kind") or None))
    if "kind" in header:
        out = []
        for lineno, ident, t, bol, kind in parsed:
            try:
                out.append(AudioEvent(ident, AudioKind(kind), t, bol))
            except ValueError as exc:
                raise FormatError(f"unknown kind {kind!r}", f"{path}:{lineno}") from exc
        validate_audio_stream(out)
        return out
    onsets = [(t, bol) for _, _, t, bol, _ in sorted(parsed, key=lambda r: r[2])]
    if not onsets:
        return []
    if period_s is None:
        period_s = infer_period(onsets, diagnostics=diagnostics)
    return classify_onsets(onsets, period_s, diagnostics=diagnostics)


def read_annotation(path: str | Path) -> list[AnnotationRecord]:
    """K-frame annotation rows ``posture_name,start_frame,end_frame,beat_number,bols``."""
    path = Path(path)
    _, body = _open_csv(path, ANNOTATION_HEADER, "annotation file")
    out = []
    for lineno, row in body:
        try:
            beat = row.get("beat_number")
            rec = AnnotationRecord(
                posture_name=row["posture_name"],
                start_frame=int(row["start_frame"]),
                end_frame=int(row["end_frame"]),
                beat_number=int(beat) if beat else None,
                bols=split_bols(row.get("bols")),
            )
        except (ValueError, TypeError) as exc:
            raise FormatError(f"bad annotation row: {exc}", f"{path}:{lineno}") from exc
        if not rec.posture_name:
            raise FormatError("empty posture_name", f"{path}:{lineno}")
        out.append(rec)
    return out
