"""Artifact document schemas and canonical JSON serialization.

Every artifact is a JSON document carrying ``schema_version: 1`` and is
serialized canonically (sorted keys, two-space indent, trailing newline) so
reruns produce byte-identical files. Times are stored as integer
milliseconds — exact and diffable; human-facing surfaces render seconds
with three decimals.
"""

from __future__ import annotations

import datetime as _dt
import json
import os
from typing import Any

from .model import (
    BloomLevel,
    CaptionSegment,
    ContextDocument,
    DocumentKind,
    LessonTimeline,
    SpeakerRole,
    TranscriptTurn,
)
from .timebase import MediaTime, TimeInterval

SCHEMA_VERSION = 1


def dump_canonical(doc: Any) -> bytes:
    return (json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n").encode("utf-8")


def utc_now_iso() -> str:
    """Wall-clock timestamp, overridable via SOURCE_DATE_EPOCH for
    reproducible artifact bytes."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        moment = _dt.datetime.now(tz=_dt.timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def interval_doc(interval: TimeInterval) -> dict:
    return {"start_ms": interval.start.ms, "end_ms": interval.end.ms}


def interval_from_doc(doc: dict) -> TimeInterval:
    return TimeInterval.from_ms(doc["start_ms"], doc["end_ms"])


# -- timeline ---------------------------------------------------------------


def timeline_to_doc(timeline: LessonTimeline) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "lesson_id": timeline.lesson_id,
        "duration_ms": timeline.duration.ms,
        "turns": [
            {
                **interval_doc(t.interval),
                "speaker": t.speaker.value,
                "text": t.text,
                **(
                    {"words": [[token, ts.ms] for token, ts in t.words]}
                    if t.words is not None
                    else {}
                ),
            }
            for t in timeline.turns
        ],
        "captions": [
            {
                **interval_doc(c.interval),
                "segment_index": c.segment_index,
                "caption": c.caption,
            }
            for c in timeline.captions
        ],
        "context_docs": [
            {"kind": d.kind.value, "title": d.title, "text": d.text}
            for d in timeline.context_docs
        ],
    }


def timeline_from_doc(doc: dict) -> LessonTimeline:
    turns = tuple(
        TranscriptTurn(
            interval=interval_from_doc(t),
            speaker=SpeakerRole(t["speaker"]),
            text=t["text"],
            words=tuple((token, MediaTime(ms)) for token, ms in t["words"])
            if "words" in t
            else None,
        )
        for t in doc["turns"]
    )
    captions = tuple(
        CaptionSegment(
            interval=interval_from_doc(c),
            caption=c["caption"],
            segment_index=c["segment_index"],
        )
        for c in doc["captions"]
    )
    context = tuple(
        ContextDocument(kind=DocumentKind(d["kind"]), title=d["title"], text=d["text"])
        for d in doc.get("context_docs", [])
    )
    return LessonTimeline(
        lesson_id=doc["lesson_id"],
        duration=MediaTime(doc["duration_ms"]),
        turns=turns,
        captions=captions,
        context_docs=context,
    )


# -- annotations --------------------------------------------------------------


def annotations_to_doc(
    lesson_id: str,
    activities: list,
    questions: list,
    histogram: dict[BloomLevel, int],
    outline: list,
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "lesson_id": lesson_id,
        "activities": [
            {
                **interval_doc(span.interval),
                "labels": sorted(label.code for label in span.labels),
            }
            for span in activities
        ],
        "questions": [
            {
                **interval_doc(q.interval),
                "text": q.text,
                "bloom": int(q.bloom),
                "justification": q.justification,
            }
            for q in questions
        ],
        "bloom_histogram": {str(int(level)): count for level, count in histogram.items()},
        "outline": [
            {
                **interval_doc(section.interval),
                "heading": section.heading,
                "summary": section.summary,
            }
            for section in outline
        ],
    }
