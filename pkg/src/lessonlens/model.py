"""Domain types for one lesson: timeline, rubric, and Bloom levels.

Everything here is an immutable value object; operations are pure, so the
types are safe to share between concurrent tasks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import OverlapError, RangeError
from .timebase import MediaTime, TimeInterval


class SpeakerRole(enum.Enum):
    """Speech is attributed to roles only; students are never individually identified."""

    TEACHER = "TEACHER"
    STUDENT = "STUDENT"
    UNKNOWN = "UNKNOWN"


class DocumentKind(enum.Enum):
    LESSON_PLAN = "LESSON_PLAN"
    SLIDES = "SLIDES"
    NOTES = "NOTES"
    OTHER = "OTHER"


@dataclass(frozen=True, slots=True)
class TranscriptTurn:
    """One diarized, timestamped utterance; word timestamps are optional."""

    interval: TimeInterval
    speaker: SpeakerRole
    text: str
    words: tuple[tuple[str, MediaTime], ...] | None = None

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise RangeError("turn text must be non-empty")
        if self.words is not None:
            prev = self.interval.start.ms
            for token, ts in self.words:
                if not (self.interval.start.ms <= ts.ms < self.interval.end.ms):
                    raise RangeError(
                        f"word timestamp {ts} outside turn interval {self.interval.render()}"
                    )
                if ts.ms < prev:
                    raise RangeError("word timestamps must be non-decreasing")
                prev = ts.ms


@dataclass(frozen=True, slots=True)
class CaptionSegment:
    """Visual description of one fixed window of the recording."""

    interval: TimeInterval
    caption: str
    segment_index: int

    def __post_init__(self) -> None:
        if not self.caption.strip():
            raise RangeError("caption must be non-empty")
        if self.segment_index < 0:
            raise RangeError("segment_index must be >= 0")


@dataclass(frozen=True, slots=True)
class ContextDocument:
    """Optional supporting material a teacher uploads alongside the recording."""

    kind: DocumentKind
    title: str
    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise RangeError("context document text must be non-empty")


@dataclass(frozen=True, slots=True)
class LessonTimeline:
    """Fused, temporally ordered view of one lesson's turns and captions.

    Invariants (enforced on construction): every interval lies in
    ``[0, duration]``, turns are sorted by start, and captions tile
    ``[0, duration)`` exactly with consecutive indices.
    """

    lesson_id: str
    duration: MediaTime
    turns: tuple[TranscriptTurn, ...]
    captions: tuple[CaptionSegment, ...]
    context_docs: tuple[ContextDocument, ...] = ()

    def __post_init__(self) -> None:
        if self.duration.ms <= 0:
            raise RangeError("lesson duration must be positive")
        for turn in self.turns:
            if turn.interval.start.ms < 0 or turn.interval.end.ms > self.duration.ms:
                raise RangeError(
                    f"turn {turn.interval.render()} outside lesson [0, {self.duration}]"
                )
        starts = [t.interval.start.ms for t in self.turns]
        if starts != sorted(starts):
            raise RangeError("turns must be sorted by start time")
        _check_caption_tiling(self.captions, self.duration)

    def window_index_at(self, t: MediaTime) -> int:
        """Index of the caption window containing instant ``t`` (last window for t == duration)."""
        for cap in self.captions:
            if cap.interval.contains(t):
                return cap.segment_index
        if t.ms == self.duration.ms and self.captions:
            return self.captions[-1].segment_index
        raise RangeError(f"instant {t} outside lesson [0, {self.duration}]")

    def turns_overlapping(self, interval: TimeInterval) -> tuple[TranscriptTurn, ...]:
        return tuple(t for t in self.turns if t.interval.overlaps(interval))

    def captions_overlapping(self, interval: TimeInterval) -> tuple[CaptionSegment, ...]:
        return tuple(c for c in self.captions if c.interval.overlaps(interval))

    def merged_events(self) -> tuple[tuple[TimeInterval, str, object], ...]:
        """Captions and turns in temporal order.

        Sorted by start time; a caption precedes turns starting at the same
        instant so window context always comes first. Stable for equal keys.
        """
        events: list[tuple[TimeInterval, str, object]] = [
            (c.interval, "caption", c) for c in self.captions
        ] + [(t.interval, "turn", t) for t in self.turns]
        events.sort(key=lambda e: (e[0].start.ms, 0 if e[1] == "caption" else 1))
        return tuple(events)


def _check_caption_tiling(captions: tuple[CaptionSegment, ...], duration: MediaTime) -> None:
    if not captions:
        raise OverlapError("captions must tile the lesson; got none")
    for pos, cap in enumerate(captions):
        if cap.segment_index != pos:
            raise OverlapError(
                f"caption indices must be consecutive from 0; position {pos} has index {cap.segment_index}"
            )
    if captions[0].interval.start.ms != 0:
        raise OverlapError(
            f"captions must start at 0.000, got {captions[0].interval.start}"
        )
    for prev, nxt in zip(captions, captions[1:]):
        if prev.interval.end.ms < nxt.interval.start.ms:
            raise OverlapError(
                f"caption gap [{prev.interval.end}, {nxt.interval.start})"
            )
        if prev.interval.end.ms > nxt.interval.start.ms:
            raise OverlapError(
                f"caption overlap at {nxt.interval.start} (previous ends {prev.interval.end})"
            )
    if captions[-1].interval.end.ms != duration.ms:
        raise OverlapError(
            f"captions must end at duration {duration}, got {captions[-1].interval.end}"
        )


def fuse_timeline(
    turns: list[TranscriptTurn],
    captions: list[CaptionSegment],
    duration: MediaTime,
    lesson_id: str = "lesson",
    context_docs: list[ContextDocument] | None = None,
) -> LessonTimeline:
    """Merge turns and captions into a validated, temporally ordered timeline.

    Sorting is stable and the operation is idempotent: fusing the parts of a
    fused timeline reproduces it exactly.
    """
    sorted_turns = sorted(turns, key=lambda t: t.interval.start.ms)
    sorted_caps = sorted(captions, key=lambda c: c.interval.start.ms)
    for turn in sorted_turns:
        if turn.interval.end.ms > duration.ms:
            raise RangeError(
                f"turn {turn.interval.render()} extends past duration {duration}"
            )
    return LessonTimeline(
        lesson_id=lesson_id,
        duration=duration,
        turns=tuple(sorted_turns),
        captions=tuple(sorted_caps),
        context_docs=tuple(context_docs or ()),
    )


class BloomLevel(enum.IntEnum):
    """Six-level hierarchy of cognitive demand; ordinals are fixed 1..6."""

    REMEMBER = 1
    UNDERSTAND = 2
    APPLY = 3
    ANALYZE = 4
    EVALUATE = 5
    CREATE = 6


@dataclass(frozen=True, slots=True)
class PerformanceLevel:
    """One rung of a rubric dimension, worst to best."""

    label: str
    criteria: str
    examples: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.criteria.strip():
            raise RangeError(f"performance level {self.label!r} needs criteria text")


@dataclass(frozen=True, slots=True)
class RubricDimension:
    dimension_id: str
    title: str
    elements: tuple[str, ...]
    indicators: tuple[str, ...]
    levels: tuple[PerformanceLevel, ...]

    def __post_init__(self) -> None:
        if len(self.levels) < 2:
            raise RangeError(f"dimension {self.dimension_id} needs at least 2 levels")
        labels = [lv.label for lv in self.levels]
        if len(set(labels)) != len(labels):
            raise RangeError(f"dimension {self.dimension_id} has duplicate level labels")


@dataclass(frozen=True, slots=True)
class Rubric:
    rubric_id: str
    name: str
    dimensions: tuple[RubricDimension, ...]
    _by_id: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.dimensions:
            raise RangeError("rubric needs at least one dimension")
        ids = [d.dimension_id for d in self.dimensions]
        if len(set(ids)) != len(ids):
            raise RangeError("rubric dimension ids must be unique")
        self._by_id.update({d.dimension_id: d for d in self.dimensions})

    def dimension(self, dimension_id: str) -> RubricDimension:
        try:
            return self._by_id[dimension_id]
        except KeyError:
            raise RangeError(f"rubric {self.rubric_id} has no dimension {dimension_id!r}") from None

    def has_dimension(self, dimension_id: str) -> bool:
        return dimension_id in self._by_id


def rubric_from_dict(doc: dict) -> Rubric:
    """Build a Rubric from its file schema (see README for the format)."""
    try:
        dims = tuple(
            RubricDimension(
                dimension_id=d["dimension_id"],
                title=d["title"],
                elements=tuple(d.get("elements", ())),
                indicators=tuple(d.get("indicators", ())),
                levels=tuple(
                    PerformanceLevel(
                        label=lv["label"],
                        criteria=lv["criteria"],
                        examples=tuple(lv.get("examples", ())),
                    )
                    for lv in d["levels"]
                ),
            )
            for d in doc["dimensions"]
        )
        return Rubric(rubric_id=doc["rubric_id"], name=doc["name"], dimensions=dims)
    except (KeyError, TypeError) as exc:
        raise RangeError(f"malformed rubric document: {exc}") from exc
