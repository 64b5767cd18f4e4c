"""Objective annotations: activity coding, teacher questions with Bloom
levels, and a lesson outline.

Activity spans are derived at sentence granularity and normalized per
actor: overlapping same-actor intervals collapse into spans whose label set
carries the co-occurring codes, so spans for one actor never overlap while
teacher and student spans may. Question extraction is teacher-only and
backend-free; classification and outline generation go through the gateway.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .artifacts import interval_from_doc
from .errors import RangeError, UnknownCode
from .gateway import ModelGateway, StructuredRequest
from .model import BloomLevel, LessonTimeline, SpeakerRole
from .prompts import render_timeline
from .text_utils import is_question, split_sentences
from .timebase import MediaTime, TimeInterval

_ACTIVITY_INSTRUCTIONS = (
    "Label observable classroom activity at sentence granularity using only "
    "codes from the taxonomy; multiple co-occurring codes are allowed."
)
_OUTLINE_INSTRUCTIONS = (
    "Summarize the lesson as a small number of ordered sections that tile "
    "the whole recording."
)
_BLOOM_INSTRUCTIONS = (
    "Classify the cognitive demand of this teacher question on the 1..6 "
    "scale and justify the choice."
)


@dataclass(frozen=True)
class ActivityTaxonomy:
    """Configured code set; each code belongs to the TEACHER or STUDENT actor."""

    taxonomy_id: str
    actors: dict[str, str]
    descriptions: dict[str, str]

    @classmethod
    def from_dict(cls, doc: dict) -> "ActivityTaxonomy":
        actors = {}
        descriptions = {}
        for entry in doc["codes"]:
            code, actor = entry["code"], entry["actor"]
            if actor not in ("TEACHER", "STUDENT"):
                raise RangeError(f"code {code!r} has invalid actor {actor!r}")
            if not code.startswith(f"{actor}_"):
                raise RangeError(f"code {code!r} must be prefixed with its actor {actor!r}")
            actors[code] = actor
            descriptions[code] = entry.get("description", "")
        if not actors:
            raise RangeError("taxonomy must define at least one code")
        return cls(taxonomy_id=doc.get("taxonomy_id", "taxonomy"), actors=actors, descriptions=descriptions)

    def actor_of(self, code: str) -> str:
        try:
            return self.actors[code]
        except KeyError:
            raise UnknownCode(f"code {code!r} is not in taxonomy {self.taxonomy_id!r}") from None


@dataclass(frozen=True)
class ActivityLabel:
    code: str
    actor: str


@dataclass(frozen=True)
class ActivitySpan:
    interval: TimeInterval
    labels: frozenset[ActivityLabel]

    def __post_init__(self) -> None:
        if not self.labels:
            raise RangeError("activity span needs at least one label")


@dataclass(frozen=True)
class QuestionRecord:
    text: str
    interval: TimeInterval
    bloom: BloomLevel
    justification: str

    def __post_init__(self) -> None:
        if not self.justification.strip():
            raise RangeError("question record needs a justification")


@dataclass(frozen=True)
class OutlineSection:
    interval: TimeInterval
    heading: str
    summary: str


def annotate_activities(
    timeline: LessonTimeline,
    taxonomy: ActivityTaxonomy,
    gateway: ModelGateway,
    seed: int = 0,
) -> list[ActivitySpan]:
    request = StructuredRequest(
        task_tag="activities",
        prompt_sections=(
            ("instructions", _ACTIVITY_INSTRUCTIONS),
            ("taxonomy", "\n".join(sorted(taxonomy.actors))),
            ("timeline", render_timeline(timeline)),
        ),
        response_schema_id="activities/v1",
        determinism_seed=seed,
    )
    payload = gateway.generate(request).payload

    per_actor: dict[str, list[tuple[int, int, str]]] = {"TEACHER": [], "STUDENT": []}
    for entry in payload["activities"]:
        interval = interval_from_doc(entry)
        for code in entry["codes"]:
            actor = taxonomy.actor_of(code)
            per_actor[actor].append((interval.start.ms, interval.end.ms, code))

    spans: list[ActivitySpan] = []
    for actor, labeled in per_actor.items():
        spans.extend(_sweep_actor(actor, labeled))
    spans.sort(key=lambda s: (s.interval.start.ms, sorted(l.code for l in s.labels)))
    return spans


def _sweep_actor(actor: str, labeled: list[tuple[int, int, str]]) -> list[ActivitySpan]:
    """Collapse one actor's labeled intervals into non-overlapping spans.

    Elementary intervals between label boundaries get the set of codes
    covering them; adjacent intervals with identical sets merge.
    """
    if not labeled:
        return []
    edges = sorted({s for s, _, _ in labeled} | {e for _, e, _ in labeled})
    pieces: list[tuple[int, int, frozenset[str]]] = []
    for lo, hi in zip(edges, edges[1:]):
        active = frozenset(code for s, e, code in labeled if s < hi and e > lo)
        if active:
            pieces.append((lo, hi, active))
    merged: list[tuple[int, int, frozenset[str]]] = []
    for lo, hi, codes in pieces:
        if merged and merged[-1][1] == lo and merged[-1][2] == codes:
            merged[-1] = (merged[-1][0], hi, codes)
        else:
            merged.append((lo, hi, codes))
    return [
        ActivitySpan(
            interval=TimeInterval.from_ms(lo, hi),
            labels=frozenset(ActivityLabel(code=c, actor=actor) for c in codes),
        )
        for lo, hi, codes in merged
    ]


def extract_questions(timeline: LessonTimeline) -> list[tuple[str, TimeInterval]]:
    """Interrogative sentences from TEACHER turns with their sub-intervals.

    UNKNOWN speakers are excluded. Word timestamps, when present and
    alignable, give per-sentence intervals; otherwise the turn interval is
    used.
    """
    out: list[tuple[str, TimeInterval]] = []
    for turn in timeline.turns:
        if turn.speaker is not SpeakerRole.TEACHER:
            continue
        sentences = split_sentences(turn.text)
        intervals = _sentence_intervals(turn, sentences)
        for (sentence, _, _), interval in zip(sentences, intervals):
            if is_question(sentence):
                out.append((sentence, interval))
    return out


def _sentence_intervals(turn, sentences) -> list[TimeInterval]:
    tokens_per_sentence = [len(s.split()) for s, _, _ in sentences]
    if turn.words is None or sum(tokens_per_sentence) != len(turn.words):
        return [turn.interval] * len(sentences)
    intervals = []
    cursor = 0
    for i, count in enumerate(tokens_per_sentence):
        start = turn.words[cursor][1]
        next_cursor = cursor + count
        if next_cursor < len(turn.words):
            end = turn.words[next_cursor][1]
        else:
            end = turn.interval.end
        if end.ms <= start.ms:
            intervals.append(turn.interval)
        else:
            intervals.append(TimeInterval(start, end))
        cursor = next_cursor
    return intervals


def classify_bloom(
    question: str, gateway: ModelGateway, seed: int = 0
) -> tuple[BloomLevel, str]:
    if not question.strip():
        raise RangeError("question must be non-empty")
    request = StructuredRequest(
        task_tag="bloom",
        prompt_sections=(
            ("instructions", _BLOOM_INSTRUCTIONS),
            ("question", question),
        ),
        response_schema_id="bloom/v1",
        determinism_seed=seed,
    )
    payload = gateway.generate(request).payload
    return BloomLevel(payload["level"]), payload["justification"]


def classify_questions(
    timeline: LessonTimeline,
    gateway: ModelGateway,
    max_workers: int = 4,
    seed: int = 0,
) -> list[QuestionRecord]:
    extracted = extract_questions(timeline)

    def classify(pair: tuple[str, TimeInterval]) -> QuestionRecord:
        text, interval = pair
        level, justification = classify_bloom(text, gateway, seed=seed)
        return QuestionRecord(text=text, interval=interval, bloom=level, justification=justification)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(classify, extracted))


def question_distribution(records: list[QuestionRecord]) -> dict[BloomLevel, int]:
    histogram = {level: 0 for level in BloomLevel}
    for record in records:
        histogram[record.bloom] += 1
    return histogram


def generate_outline(
    timeline: LessonTimeline, gateway: ModelGateway, seed: int = 0
) -> list[OutlineSection]:
    """Ordered sections tiling ``[0, duration)`` exactly; payload boundaries
    are snapped onto the lesson so remote noise cannot break the tiling."""
    request = StructuredRequest(
        task_tag="outline",
        prompt_sections=(
            ("instructions", _OUTLINE_INSTRUCTIONS),
            ("timeline", render_timeline(timeline)),
        ),
        response_schema_id="outline/v1",
        determinism_seed=seed,
    )
    payload = gateway.generate(request).payload
    ordered = sorted(payload["sections"], key=lambda s: s["start_ms"])
    starts = []
    for section in ordered:
        start = min(max(section["start_ms"], 0), timeline.duration.ms - 1)
        if not starts or start > starts[-1]:
            starts.append(start)
    starts[0] = 0
    sections = []
    for i, section in enumerate(ordered[: len(starts)]):
        start = starts[i]
        end = starts[i + 1] if i + 1 < len(starts) else timeline.duration.ms
        sections.append(
            OutlineSection(
                interval=TimeInterval.from_ms(start, end),
                heading=section["heading"],
                summary=section["summary"],
            )
        )
    return sections


def build_annotations(
    timeline: LessonTimeline,
    taxonomy: ActivityTaxonomy,
    gateway: ModelGateway,
    max_workers: int = 4,
    seed: int = 0,
) -> tuple[list[ActivitySpan], list[QuestionRecord], dict[BloomLevel, int], list[OutlineSection]]:
    activities = annotate_activities(timeline, taxonomy, gateway, seed=seed)
    questions = classify_questions(timeline, gateway, max_workers=max_workers, seed=seed)
    histogram = question_distribution(questions)
    outline = generate_outline(timeline, gateway, seed=seed)
    return activities, questions, histogram, outline
