"""Prompt section rendering: the stable text format every reasoning stage
feeds to its backend.

The merged-timeline format is a contract: one ``[segment i start-end]``
line per caption window followed by ``[SPEAKER start-end]`` lines for the
turns starting inside it. Deterministic backends key their rules off these
markers, and remote models receive the same second-level, timestamped view.
"""

from __future__ import annotations

import re

from .model import LessonTimeline, Rubric, RubricDimension, TranscriptTurn
from .timebase import TimeInterval

SEGMENT_LINE = re.compile(r"^\[segment (\d+) (\d+\.\d{3})-(\d+\.\d{3})\] (.*)$")
TURN_LINE = re.compile(r"^\[(TEACHER|STUDENT|UNKNOWN) (\d+\.\d{3})-(\d+\.\d{3})\] (.*)$")


def seconds_str_to_ms(text: str) -> int:
    whole, frac = text.split(".")
    return int(whole) * 1000 + int(frac)


def render_timeline(timeline: LessonTimeline) -> str:
    """Merged temporal view: each caption window, then the turns starting in it."""
    lines: list[str] = []
    for cap in timeline.captions:
        lines.append(
            f"[segment {cap.segment_index} {cap.interval.render()}] {cap.caption}"
        )
        for turn in timeline.turns:
            if cap.interval.contains(turn.interval.start):
                lines.append(
                    f"[{turn.speaker.value} {turn.interval.render()}] {turn.text}"
                )
    return "\n".join(lines)


def render_rubric(rubric: Rubric) -> str:
    lines = [f"rubric {rubric.rubric_id}: {rubric.name}"]
    for dim in rubric.dimensions:
        lines.append(f"- {dim.dimension_id}: {dim.title}")
    return "\n".join(lines)


def render_context_docs(timeline: LessonTimeline) -> str:
    blocks = [
        f"[{doc.kind.value}] {doc.title}\n{doc.text}" for doc in timeline.context_docs
    ]
    return "\n\n".join(blocks)


def render_dimension(dim: RubricDimension) -> str:
    lines = [f"{dim.dimension_id}: {dim.title}"]
    if dim.elements:
        lines.append("elements: " + "; ".join(dim.elements))
    if dim.indicators:
        lines.append("indicators: " + "; ".join(dim.indicators))
    for level in dim.levels:
        lines.append(f"level {level.label}: {level.criteria}")
    return "\n".join(lines)


def render_evidence(captions: list[str], turns: list[TranscriptTurn]) -> str:
    lines = [f"caption: {c}" for c in captions]
    lines += [
        f"[{t.speaker.value} {t.interval.render()}] {t.text}" for t in turns
    ]
    return "\n".join(lines)


def render_candidates(candidates: list[tuple[str, str]]) -> str:
    """One ``clip_id<TAB>description`` line per retrieval candidate."""
    return "\n".join(f"{clip_id}\t{description}" for clip_id, description in candidates)


def parse_timeline_render(text: str) -> list[tuple[int, TimeInterval, str, str]]:
    """Inverse view of :func:`render_timeline` for rule-driven backends.

    Yields ``(segment_index, line_interval, source, text)`` where source is
    ``caption`` or the speaker role name; ``segment_index`` is the window a
    turn line belongs to.
    """
    out: list[tuple[int, TimeInterval, str, str]] = []
    current_segment = -1
    for line in text.splitlines():
        seg = SEGMENT_LINE.match(line)
        if seg:
            current_segment = int(seg.group(1))
            interval = TimeInterval.from_ms(
                seconds_str_to_ms(seg.group(2)), seconds_str_to_ms(seg.group(3))
            )
            out.append((current_segment, interval, "caption", seg.group(4)))
            continue
        turn = TURN_LINE.match(line)
        if turn:
            interval = TimeInterval.from_ms(
                seconds_str_to_ms(turn.group(2)), seconds_str_to_ms(turn.group(3))
            )
            out.append((current_segment, interval, turn.group(1), turn.group(4)))
    return out
