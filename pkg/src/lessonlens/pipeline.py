"""The feedback pipeline: hotspot generation over the fused timeline, then
per-hotspot guideline generation, drafting, refinement, and evidence
validation, assembled into a strengths-first report.

Hotspot generation is one sequential pass over the whole merged timeline;
the per-hotspot stages fan out concurrently and are reduced back in a
deterministic order, so under a deterministic backend the report is a pure
function of its inputs. Each stage checkpoints its artifact when a store is
supplied; a rerun resumes from any stage whose input fingerprint still
matches. Items that fail validation are kept on a separate audit list and
never appear in the main report.
"""

from __future__ import annotations

import enum
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

from .artifacts import (
    SCHEMA_VERSION,
    dump_canonical,
    interval_doc,
    interval_from_doc,
    timeline_to_doc,
    utc_now_iso,
)
from .errors import RangeError
from .gateway import ModelGateway, StructuredRequest, ValidationVerdict
from .model import CaptionSegment, LessonTimeline, Rubric, RubricDimension, TranscriptTurn
from .prompts import (
    render_context_docs,
    render_dimension,
    render_evidence,
    render_rubric,
    render_timeline,
)
from .store import LessonStore
from .text_utils import quoted_spans, split_sentences
from .timebase import TimeInterval

HOTSPOTS_ARTIFACT = "hotspots.json"
DRAFTS_ARTIFACT = "feedback_draft.json"
REPORT_ARTIFACT = "feedback.json"

_HOTSPOT_INSTRUCTIONS = (
    "Scan the merged timeline and list segments where strengths or weaknesses "
    "may emerge for any rubric dimension."
)
_GUIDELINE_INSTRUCTIONS = (
    "Write short imperative guidelines directing attention to observable "
    "behavior for this one segment and one rubric dimension."
)
_DRAFT_INSTRUCTIONS = (
    "Write feedback for this one segment and one rubric dimension: content "
    "with rationale, observed behaviors quoting evidence verbatim inside "
    "guillemets, and actionable advice."
)


class Polarity(enum.Enum):
    STRENGTH = "STRENGTH"
    WEAKNESS = "WEAKNESS"


class FeedbackStatus(enum.Enum):
    VALIDATED = "VALIDATED"
    REJECTED = "REJECTED"


@dataclass(frozen=True)
class Hotspot:
    """A candidate moment: one caption window tied to one rubric dimension."""

    interval: TimeInterval
    dimension_id: str
    polarity: Polarity
    context_summary: str
    trigger_excerpt: str

    def __post_init__(self) -> None:
        if not self.context_summary.strip():
            raise RangeError("hotspot context_summary must be non-empty")


@dataclass(frozen=True)
class Guideline:
    text: str
    hotspot_ref: int

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise RangeError("guideline text must be non-empty")


@dataclass(frozen=True)
class FeedbackItem:
    feedback_id: str
    dimension_id: str
    interval: TimeInterval
    polarity: Polarity
    content: str
    observed_behaviors: str
    actionable_advice: str
    guidelines: tuple[str, ...] = ()
    validation: ValidationVerdict | None = None
    status: FeedbackStatus | None = None

    def __post_init__(self) -> None:
        for label, text in (
            ("content", self.content),
            ("observed_behaviors", self.observed_behaviors),
            ("actionable_advice", self.actionable_advice),
        ):
            if not text.strip():
                raise RangeError(f"feedback {label} must be non-empty")
        if self.status is not None:
            if self.validation is None:
                raise RangeError("status requires a validation verdict")
            expected = (
                FeedbackStatus.VALIDATED
                if self.validation.consistent
                else FeedbackStatus.REJECTED
            )
            if self.status is not expected:
                raise RangeError("status must agree with the validation verdict")

    def to_doc(self) -> dict:
        return {
            "feedback_id": self.feedback_id,
            "dimension_id": self.dimension_id,
            **interval_doc(self.interval),
            "polarity": self.polarity.value,
            "content": self.content,
            "observed_behaviors": self.observed_behaviors,
            "actionable_advice": self.actionable_advice,
            "guidelines": list(self.guidelines),
            "validation": None
            if self.validation is None
            else {
                "consistent": self.validation.consistent,
                "rationale": self.validation.rationale,
            },
            "status": None if self.status is None else self.status.value,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "FeedbackItem":
        return cls(
            feedback_id=doc["feedback_id"],
            dimension_id=doc["dimension_id"],
            interval=interval_from_doc(doc),
            polarity=Polarity(doc["polarity"]),
            content=doc["content"],
            observed_behaviors=doc["observed_behaviors"],
            actionable_advice=doc["actionable_advice"],
            guidelines=tuple(doc.get("guidelines", ())),
            validation=None
            if doc.get("validation") is None
            else ValidationVerdict(
                consistent=doc["validation"]["consistent"],
                rationale=doc["validation"]["rationale"],
            ),
            status=None if doc.get("status") is None else FeedbackStatus(doc["status"]),
        )


@dataclass(frozen=True)
class FeedbackReport:
    """Validated items, strengths first then weaknesses, each group by time."""

    lesson_id: str
    rubric_id: str
    items: tuple[FeedbackItem, ...]
    rejected: tuple[FeedbackItem, ...]
    generated_at: str

    def to_doc(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "lesson_id": self.lesson_id,
            "rubric_id": self.rubric_id,
            "generated_at": self.generated_at,
            "items": [item.to_doc() for item in self.items],
            "rejected": [item.to_doc() for item in self.rejected],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "FeedbackReport":
        return cls(
            lesson_id=doc["lesson_id"],
            rubric_id=doc["rubric_id"],
            items=tuple(FeedbackItem.from_doc(d) for d in doc["items"]),
            rejected=tuple(FeedbackItem.from_doc(d) for d in doc["rejected"]),
            generated_at=doc["generated_at"],
        )


@dataclass(frozen=True)
class PipelinePolicy:
    max_per_dimension: int = 3
    max_total: int = 20
    max_workers: int = 4
    determinism_seed: int = 0
    generated_at: str | None = None  # None: SOURCE_DATE_EPOCH-aware wall clock


def _first_sentence(text: str) -> str:
    sentences = split_sentences(text)
    return sentences[0][0] if sentences else text.strip()


def _context_summary(timeline: LessonTimeline, window_index: int) -> str:
    parts = []
    for offset, label in ((-1, "before"), (0, "during"), (1, "after")):
        idx = window_index + offset
        if 0 <= idx < len(timeline.captions):
            parts.append(f"{label}: {_first_sentence(timeline.captions[idx].caption)}")
    return " / ".join(parts)


def pipeline_fingerprint(
    timeline: LessonTimeline, rubric: Rubric, policy: PipelinePolicy, backend_name: str
) -> str:
    basis = dump_canonical(
        {
            "timeline": timeline_to_doc(timeline),
            "rubric_id": rubric.rubric_id,
            "dimensions": [d.dimension_id for d in rubric.dimensions],
            "caps": [policy.max_per_dimension, policy.max_total],
            "seed": policy.determinism_seed,
            "backend": backend_name,
        }
    )
    return hashlib.sha256(basis).hexdigest()


def generate_hotspots(
    timeline: LessonTimeline,
    rubric: Rubric,
    gateway: ModelGateway,
    policy: PipelinePolicy | None = None,
) -> list[Hotspot]:
    """One sequential pass over the merged timeline.

    Hotspots landing in the same (window, dimension) merge keeping the
    longer excerpt; per-dimension and global caps bound the total so the
    report stays digestible. Hotspots naming unknown dimensions are dropped.
    """
    policy = policy or PipelinePolicy()
    sections = [
        ("instructions", _HOTSPOT_INSTRUCTIONS),
        ("rubric", render_rubric(rubric)),
    ]
    if timeline.context_docs:
        sections.append(("context_docs", render_context_docs(timeline)))
    sections.append(("timeline", render_timeline(timeline)))
    request = StructuredRequest(
        task_tag="hotspots",
        prompt_sections=tuple(sections),
        response_schema_id="hotspots/v1",
        determinism_seed=policy.determinism_seed,
    )
    payload = gateway.generate(request).payload

    merged: dict[tuple[int, str], dict] = {}
    for raw in payload["hotspots"]:
        if not rubric.has_dimension(raw["dimension_id"]):
            continue
        interval = interval_from_doc(raw)
        if interval.end.ms > timeline.duration.ms:
            continue
        window = timeline.window_index_at(interval.start)
        key = (window, raw["dimension_id"])
        existing = merged.get(key)
        if existing is None or len(raw["trigger_excerpt"]) > len(existing["trigger_excerpt"]):
            merged[key] = {**raw, "window": window}

    per_dimension: dict[str, int] = {}
    hotspots: list[Hotspot] = []
    for key in sorted(merged, key=lambda k: (merged[k]["start_ms"], k[1])):
        raw = merged[key]
        dim = raw["dimension_id"]
        if per_dimension.get(dim, 0) >= policy.max_per_dimension:
            continue
        if len(hotspots) >= policy.max_total:
            break
        per_dimension[dim] = per_dimension.get(dim, 0) + 1
        hotspots.append(
            Hotspot(
                interval=interval_from_doc(raw),
                dimension_id=dim,
                polarity=Polarity(raw["polarity"]),
                context_summary=_context_summary(timeline, raw["window"]),
                trigger_excerpt=raw["trigger_excerpt"],
            )
        )
    return hotspots


def generate_guidelines(
    hotspot: Hotspot,
    dim: RubricDimension,
    gateway: ModelGateway,
    hotspot_ref: int = 0,
    seed: int = 0,
) -> list[Guideline]:
    if dim.dimension_id != hotspot.dimension_id:
        raise RangeError(
            f"dimension mismatch: hotspot is {hotspot.dimension_id}, got {dim.dimension_id}"
        )
    request = StructuredRequest(
        task_tag="guidelines",
        prompt_sections=(
            ("instructions", _GUIDELINE_INSTRUCTIONS),
            ("dimension", render_dimension(dim)),
            ("hotspot", f"{hotspot.trigger_excerpt}\ncontext: {hotspot.context_summary}"),
        ),
        response_schema_id="guidelines/v1",
        determinism_seed=seed,
    )
    payload = gateway.generate(request).payload
    return [Guideline(text=text, hotspot_ref=hotspot_ref) for text in payload["guidelines"]]


def evidence_window(
    timeline: LessonTimeline, interval: TimeInterval
) -> tuple[tuple[CaptionSegment, ...], tuple[TranscriptTurn, ...]]:
    return timeline.captions_overlapping(interval), timeline.turns_overlapping(interval)


def refine_feedback(item: FeedbackItem, dim: RubricDimension) -> FeedbackItem:
    """Deterministic cleanup pass; a fixed point on well-formed items.

    Normalizes whitespace, makes sure the content names the dimension title,
    and terminates the advice, improving granularity without another model
    call.
    """

    def tidy(text: str) -> str:
        return " ".join(text.split())

    content = tidy(item.content)
    if dim.title.lower() not in content.lower():
        content = f"{dim.title}: {content}"
    advice = tidy(item.actionable_advice)
    if advice and advice[-1] not in ".!?":
        advice += "."
    return replace(
        item,
        content=content,
        observed_behaviors=tidy(item.observed_behaviors),
        actionable_advice=advice,
    )


def draft_feedback(
    hotspot: Hotspot,
    guidelines: Sequence[Guideline],
    evidence: tuple[Sequence[CaptionSegment], Sequence[TranscriptTurn]],
    dim: RubricDimension,
    gateway: ModelGateway,
    seed: int = 0,
) -> FeedbackItem:
    captions, turns = evidence
    if not captions and not turns:
        raise RangeError("draft_feedback needs a non-empty evidence window")
    request = StructuredRequest(
        task_tag="feedback_draft",
        prompt_sections=(
            ("instructions", _DRAFT_INSTRUCTIONS),
            ("dimension", render_dimension(dim)),
            ("polarity", hotspot.polarity.value),
            ("interval", hotspot.interval.render()),
            ("excerpt", hotspot.trigger_excerpt),
            ("guidelines", "\n".join(g.text for g in guidelines)),
            ("evidence", render_evidence([c.caption for c in captions], list(turns))),
        ),
        response_schema_id="feedback_draft/v1",
        determinism_seed=seed,
    )
    payload = gateway.generate(request).payload
    item = FeedbackItem(
        feedback_id=f"fb-{hotspot.dimension_id}-{hotspot.interval.start.ms:08d}",
        dimension_id=hotspot.dimension_id,
        interval=hotspot.interval,
        polarity=hotspot.polarity,
        content=payload["content"],
        observed_behaviors=payload["observed_behaviors"],
        actionable_advice=payload["actionable_advice"],
        guidelines=tuple(g.text for g in guidelines),
    )
    return refine_feedback(item, dim)


def validate_feedback(
    item: FeedbackItem,
    evidence: tuple[Sequence[CaptionSegment], Sequence[TranscriptTurn]],
    gateway: ModelGateway,
) -> FeedbackItem:
    captions, turns = evidence
    feedback_text = "\n".join(
        (item.content, item.observed_behaviors, item.actionable_advice)
    )
    verdict = gateway.validate(
        feedback_text, captions=[c.caption for c in captions], turns=list(turns)
    )
    status = FeedbackStatus.VALIDATED if verdict.consistent else FeedbackStatus.REJECTED
    return replace(item, validation=verdict, status=status)


def is_grounded(item: FeedbackItem, timeline: LessonTimeline) -> bool:
    """Backend-free evidence check: every quoted span in observed_behaviors
    occurs verbatim in a caption or turn overlapping the item's interval."""
    captions, turns = evidence_window(timeline, item.interval)
    haystacks = [c.caption for c in captions] + [t.text for t in turns]
    return all(
        any(span in haystack for haystack in haystacks)
        for span in quoted_spans(item.observed_behaviors)
    )


def _order_report_items(items: list[FeedbackItem]) -> list[FeedbackItem]:
    return sorted(
        items,
        key=lambda it: (
            0 if it.polarity is Polarity.STRENGTH else 1,
            it.interval.start.ms,
            it.feedback_id,
        ),
    )


def run_pipeline(
    timeline: LessonTimeline,
    rubric: Rubric,
    gateway: ModelGateway,
    policy: PipelinePolicy | None = None,
    store: LessonStore | None = None,
) -> FeedbackReport:
    """Full pipeline with per-stage checkpointing.

    When a store is given, each stage writes its artifact and a rerun skips
    any stage whose recorded input fingerprint still matches, so interrupted
    jobs resume instead of starting over.
    """
    policy = policy or PipelinePolicy()
    fingerprint = pipeline_fingerprint(timeline, rubric, policy, gateway.backend.name)
    lesson_id = timeline.lesson_id

    def checkpoint(name: str, doc: dict) -> None:
        if store is not None:
            store.put_json(lesson_id, name, doc)

    def resume(name: str) -> dict | None:
        if store is not None and store.has_artifact(lesson_id, name):
            doc = store.get_json(lesson_id, name)
            if doc.get("input_fingerprint") == fingerprint:
                return doc
        return None

    # A finished report for the same inputs is returned untouched, keeping
    # rerun artifact bytes identical.
    finished_report = resume(REPORT_ARTIFACT)
    if finished_report is not None:
        return FeedbackReport.from_doc(finished_report)

    # Stage 1: hotspots (whole-timeline sequential pass).
    resumed = resume(HOTSPOTS_ARTIFACT)
    if resumed is not None:
        hotspots = [
            Hotspot(
                interval=interval_from_doc(doc),
                dimension_id=doc["dimension_id"],
                polarity=Polarity(doc["polarity"]),
                context_summary=doc["context_summary"],
                trigger_excerpt=doc["trigger_excerpt"],
            )
            for doc in resumed["hotspots"]
        ]
    else:
        hotspots = generate_hotspots(timeline, rubric, gateway, policy)
        checkpoint(
            HOTSPOTS_ARTIFACT,
            {
                "schema_version": SCHEMA_VERSION,
                "lesson_id": lesson_id,
                "rubric_id": rubric.rubric_id,
                "input_fingerprint": fingerprint,
                "hotspots": [
                    {
                        **interval_doc(h.interval),
                        "dimension_id": h.dimension_id,
                        "polarity": h.polarity.value,
                        "context_summary": h.context_summary,
                        "trigger_excerpt": h.trigger_excerpt,
                    }
                    for h in hotspots
                ],
            },
        )

    # Stage 2: guidelines + drafts, fanned out per hotspot.
    resumed = resume(DRAFTS_ARTIFACT)
    if resumed is not None:
        drafts = [FeedbackItem.from_doc(doc) for doc in resumed["drafts"]]
    else:

        def draft_one(hotspot_ref: int) -> FeedbackItem:
            hotspot = hotspots[hotspot_ref]
            dim = rubric.dimension(hotspot.dimension_id)
            guidelines = generate_guidelines(
                hotspot, dim, gateway, hotspot_ref=hotspot_ref, seed=policy.determinism_seed
            )
            evidence = evidence_window(timeline, hotspot.interval)
            return draft_feedback(
                hotspot, guidelines, evidence, dim, gateway, seed=policy.determinism_seed
            )

        with ThreadPoolExecutor(max_workers=policy.max_workers) as pool:
            drafts = list(pool.map(draft_one, range(len(hotspots))))
        checkpoint(
            DRAFTS_ARTIFACT,
            {
                "schema_version": SCHEMA_VERSION,
                "lesson_id": lesson_id,
                "rubric_id": rubric.rubric_id,
                "input_fingerprint": fingerprint,
                "drafts": [item.to_doc() for item in drafts],
            },
        )

    # Stage 3: validation, then deterministic reduce into the report.
    def validate_one(item: FeedbackItem) -> FeedbackItem:
        return validate_feedback(item, evidence_window(timeline, item.interval), gateway)

    with ThreadPoolExecutor(max_workers=policy.max_workers) as pool:
        finished = list(pool.map(validate_one, drafts))

    accepted = [it for it in finished if it.status is FeedbackStatus.VALIDATED]
    rejected = [it for it in finished if it.status is FeedbackStatus.REJECTED]
    report = FeedbackReport(
        lesson_id=lesson_id,
        rubric_id=rubric.rubric_id,
        items=tuple(_order_report_items(accepted)),
        rejected=tuple(_order_report_items(rejected)),
        generated_at=policy.generated_at or utc_now_iso(),
    )
    doc = report.to_doc()
    doc["input_fingerprint"] = fingerprint
    checkpoint(REPORT_ARTIFACT, doc)
    return report
