"""Turn raw inputs into a fused timeline: windowing, captioning, transcripts.

Recordings are divided into fixed windows (2 minutes by default) that each
get captioned; a short tail is merged into the previous window so every
caption covers a meaningful stretch. Transcripts arrive as JSON Lines with
one turn per line: ``{start_ms, end_ms, speaker, text, words?}``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, RangeError
from .gateway import ModelGateway
from .model import (
    CaptionSegment,
    ContextDocument,
    LessonTimeline,
    SpeakerRole,
    TranscriptTurn,
    fuse_timeline,
)
from .timebase import MediaTime, TimeInterval

DEFAULT_ROLE_MAP = {
    "teacher": SpeakerRole.TEACHER,
    "instructor": SpeakerRole.TEACHER,
    "student": SpeakerRole.STUDENT,
    "pupil": SpeakerRole.STUDENT,
    "learner": SpeakerRole.STUDENT,
}


@dataclass(frozen=True)
class WindowingPolicy:
    """Fixed captioning grid; tails shorter than ``min_tail_ms`` merge backward."""

    window_ms: int = 120_000
    min_tail_ms: int = 30_000

    def __post_init__(self) -> None:
        if self.window_ms <= 0 or self.min_tail_ms <= 0:
            raise RangeError("window and tail thresholds must be positive")
        if self.min_tail_ms >= self.window_ms:
            raise RangeError("min_tail_ms must be smaller than window_ms")


def plan_windows(duration: MediaTime, policy: WindowingPolicy | None = None) -> list[TimeInterval]:
    """Tile ``[0, duration)`` with full windows plus a possibly-merged tail."""
    policy = policy or WindowingPolicy()
    if duration.ms <= 0:
        raise RangeError("duration must be positive")
    w = policy.window_ms
    full, tail = divmod(duration.ms, w)
    edges = [i * w for i in range(full + 1)]
    if tail > 0:
        if tail < policy.min_tail_ms and full >= 1:
            edges[-1] = duration.ms  # short tail merges into the last full window
        else:
            edges.append(duration.ms)
    return [
        TimeInterval(MediaTime(a), MediaTime(b)) for a, b in zip(edges, edges[1:])
    ]


def caption_all(
    lesson_id: str,
    windows: list[TimeInterval],
    gateway: ModelGateway,
    context_carry: bool = True,
    max_workers: int = 4,
) -> list[CaptionSegment]:
    """Caption every window; fails as a whole if any window fails.

    With ``context_carry`` each request receives the previous window's
    caption as a hint, which forces sequential execution; without it the
    windows fan out concurrently and are reassembled by index.
    """
    if not windows:
        return []
    captions: list[str]
    if context_carry:
        captions = []
        hint: str | None = None
        for window in windows:
            text = gateway.caption(lesson_id, window, hint=hint)
            captions.append(text)
            hint = text
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = [
                pool.submit(gateway.caption, lesson_id, window) for window in windows
            ]
            captions = [f.result() for f in futures]
    return [
        CaptionSegment(interval=window, caption=text, segment_index=i)
        for i, (window, text) in enumerate(zip(windows, captions))
    ]


def _parse_words(raw: object, line_no: int, path: str) -> tuple[tuple[str, MediaTime], ...]:
    if not isinstance(raw, list):
        raise ParseError("field 'words' must be a list of [token, ms] pairs", path=path, line=line_no)
    words = []
    for entry in raw:
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not isinstance(entry[0], str)
            or not isinstance(entry[1], int)
        ):
            raise ParseError(f"bad word entry {entry!r}; expected [token, ms]", path=path, line=line_no)
        words.append((entry[0], MediaTime(entry[1])))
    return tuple(words)


def load_transcript(
    path: str | Path,
    role_map: dict[str, SpeakerRole] | None = None,
) -> list[TranscriptTurn]:
    """Parse a JSONL transcript into turns sorted by start time.

    Speaker labels are normalized through ``role_map`` (case-insensitive);
    unmapped labels become UNKNOWN. Turns may overlap — only captions must
    tile the lesson.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError("transcript file not found", path=str(path))
    mapping = {k.lower(): v for k, v in (role_map or DEFAULT_ROLE_MAP).items()}
    turns: list[TranscriptTurn] = []
    for line_no, line in enumerate(path.read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path=str(path), line=line_no) from exc
        for field in ("start_ms", "end_ms", "speaker", "text"):
            if field not in doc:
                raise ParseError(f"missing field {field!r}", path=str(path), line=line_no)
        if not isinstance(doc["start_ms"], int) or not isinstance(doc["end_ms"], int):
            raise ParseError("start_ms/end_ms must be integers", path=str(path), line=line_no)
        speaker = mapping.get(str(doc["speaker"]).lower(), SpeakerRole.UNKNOWN)
        words = _parse_words(doc["words"], line_no, str(path)) if "words" in doc else None
        try:
            turns.append(
                TranscriptTurn(
                    interval=TimeInterval.from_ms(doc["start_ms"], doc["end_ms"]),
                    speaker=speaker,
                    text=doc["text"],
                    words=words,
                )
            )
        except RangeError as exc:
            raise ParseError(str(exc), path=str(path), line=line_no) from exc
    turns.sort(key=lambda t: t.interval.start.ms)
    return turns


def ingest_lesson(
    lesson_id: str,
    duration: MediaTime,
    transcript_path: str | Path,
    gateway: ModelGateway,
    policy: WindowingPolicy | None = None,
    context_docs: list[ContextDocument] | None = None,
    role_map: dict[str, SpeakerRole] | None = None,
    context_carry: bool = True,
) -> LessonTimeline:
    """Window, caption, parse, and fuse; nothing is persisted here, so a
    failed window leaves no partial timeline behind."""
    turns = load_transcript(transcript_path, role_map=role_map)
    windows = plan_windows(duration, policy)
    captions = caption_all(lesson_id, windows, gateway, context_carry=context_carry)
    return fuse_timeline(
        turns=turns,
        captions=captions,
        duration=duration,
        lesson_id=lesson_id,
        context_docs=context_docs or [],
    )
