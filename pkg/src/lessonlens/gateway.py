"""Uniform contract for external model capabilities.

Five backend kinds (captioning, transcription/diarization, structured
reasoning, evidence validation, embedding) sit behind one gateway that
adds content-addressed response caching, bounded retries with exponential
backoff, and a per-backend in-flight limit. Identical requests are served
from cache without touching the backend, which a call counter makes
observable.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

from . import schemas
from .errors import BackendUnavailable, RangeError, SchemaViolation, WindowTooLong
from .model import TranscriptTurn
from .timebase import TimeInterval

RETRY_BACKOFF_S = (0.5, 1.0, 2.0)
DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_MAX_IN_FLIGHT = 4
EMBEDDING_DIM = 16


class BackendKind(enum.Enum):
    CAPTIONER = "CAPTIONER"
    TRANSCRIBER_DIARIZER = "TRANSCRIBER_DIARIZER"
    REASONER = "REASONER"
    VALIDATOR = "VALIDATOR"
    EMBEDDER = "EMBEDDER"


@dataclass(frozen=True)
class StructuredRequest:
    """A reasoning task: labeled prompt sections plus a declared response schema."""

    task_tag: str
    prompt_sections: tuple[tuple[str, str], ...]
    response_schema_id: str
    determinism_seed: int = 0

    def __post_init__(self) -> None:
        if not self.prompt_sections:
            raise RangeError("prompt_sections must be non-empty")


@dataclass(frozen=True)
class StructuredResponse:
    schema_id: str
    payload: dict
    backend_fingerprint: str


@dataclass(frozen=True)
class ValidationVerdict:
    consistent: bool
    rationale: str

    def __post_init__(self) -> None:
        if not self.consistent and not self.rationale.strip():
            raise RangeError("inconsistent verdicts must carry a rationale")


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    dim: int

    def __post_init__(self) -> None:
        if len(self.values) != self.dim:
            raise RangeError(f"expected {self.dim} values, got {len(self.values)}")
        if any(v != v or v in (float("inf"), float("-inf")) for v in self.values):
            raise RangeError("embedding values must be finite")


class Backend(Protocol):
    """Raw model capability: one canonical-JSON request in, one payload out."""

    name: str

    def run(self, kind: BackendKind, request: dict) -> dict: ...


def canonical_request_bytes(kind: BackendKind, request: dict) -> bytes:
    doc = {"kind": kind.value, "request": request}
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def request_hash(kind: BackendKind, request: dict) -> str:
    return hashlib.sha256(canonical_request_bytes(kind, request)).hexdigest()


class ResponseCache:
    """Content-addressed payload cache: memory first, optional disk behind it.

    Writes are atomic (temp + rename); identical keys always carry identical
    values by backend determinism, so last-writer-wins is safe.
    """

    def __init__(self, directory: str | Path | None = None):
        self._mem: dict[str, dict] = {}
        self._lock = threading.Lock()
        self.directory = Path(directory) if directory else None
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)

    def get(self, key: str) -> dict | None:
        with self._lock:
            if key in self._mem:
                return self._mem[key]
        if self.directory:
            path = self.directory / f"{key}.json"
            if path.exists():
                payload = json.loads(path.read_text("utf-8"))["payload"]
                with self._lock:
                    self._mem[key] = payload
                return payload
        return None

    def put(self, key: str, request_bytes: bytes, payload: dict) -> None:
        with self._lock:
            self._mem[key] = payload
        if self.directory:
            doc = {"request": json.loads(request_bytes), "payload": payload}
            tmp = self.directory / f".{key}.tmp-{os.getpid()}-{threading.get_ident()}"
            tmp.write_text(json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2), "utf-8")
            os.replace(tmp, self.directory / f"{key}.json")


@dataclass
class GatewayStats:
    backend_calls: int = 0
    cache_hits: int = 0
    retries: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def bump(self, attr: str) -> None:
        with self._lock:
            setattr(self, attr, getattr(self, attr) + 1)


class ModelGateway:
    """Shared entry point for caption / generate / validate / embed calls."""

    def __init__(
        self,
        backend: Backend,
        cache: ResponseCache | None = None,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
        max_caption_window_ms: int = 120_000,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.backend = backend
        self.cache = cache or ResponseCache()
        self.stats = GatewayStats()
        self.max_caption_window_ms = max_caption_window_ms
        self.max_attempts = max_attempts
        self._sleeper = sleeper
        self._slots = threading.BoundedSemaphore(max_in_flight)

    # -- core call path ------------------------------------------------

    def _call(
        self,
        kind: BackendKind,
        request: dict,
        validate: Callable[[dict], list[str]],
    ) -> dict:
        key = request_hash(kind, request)
        cached = self.cache.get(key)
        if cached is not None:
            self.stats.bump("cache_hits")
            return cached

        last_errors: list[str] = []
        attempts = 0
        for attempt in range(1, self.max_attempts + 1):
            attempts = attempt
            try:
                with self._slots:
                    self.stats.bump("backend_calls")
                    payload = self.backend.run(kind, request)
            except BackendUnavailable as exc:
                last_errors = [str(exc)]
                if attempt == self.max_attempts:
                    raise BackendUnavailable(
                        f"{kind.value} backend failed after {attempts} attempts: {exc}"
                    ) from exc
                self._backoff(attempt)
                continue
            violations = validate(payload)
            if not violations:
                self.cache.put(key, canonical_request_bytes(kind, request), payload)
                return payload
            last_errors = violations
            self.stats.bump("retries")
            if attempt < self.max_attempts:
                self._backoff(attempt)
        raise SchemaViolation(
            f"{kind.value} payload invalid after {attempts} attempts: {'; '.join(last_errors)}",
            attempts=attempts,
        )

    def _backoff(self, attempt: int) -> None:
        idx = min(attempt - 1, len(RETRY_BACKOFF_S) - 1)
        self._sleeper(RETRY_BACKOFF_S[idx])

    # -- operations ------------------------------------------------------

    def caption(self, lesson_id: str, interval: TimeInterval, hint: str | None = None) -> str:
        if interval.duration.ms > self.max_caption_window_ms:
            raise WindowTooLong(
                f"window {interval.render()} exceeds max "
                f"{self.max_caption_window_ms / 1000:.3f}s"
            )
        request = {
            "lesson_id": lesson_id,
            "start_ms": interval.start.ms,
            "end_ms": interval.end.ms,
            "hint": hint,
        }
        payload = self._call(
            BackendKind.CAPTIONER,
            request,
            validate=lambda p: schemas.check(schemas.obj(caption=schemas.string()), p),
        )
        return payload["caption"]

    def generate(self, req: StructuredRequest) -> StructuredResponse:
        if not schemas.is_registered(req.response_schema_id):
            raise SchemaViolation(f"unregistered schema {req.response_schema_id!r}")
        request = {
            "task_tag": req.task_tag,
            "sections": [[label, text] for label, text in req.prompt_sections],
            "schema_id": req.response_schema_id,
            "seed": req.determinism_seed,
        }
        payload = self._call(
            BackendKind.REASONER,
            request,
            validate=lambda p: schemas.validate_payload(req.response_schema_id, p),
        )
        return StructuredResponse(
            schema_id=req.response_schema_id,
            payload=payload,
            backend_fingerprint=self.backend.name,
        )

    def validate(
        self,
        feedback_text: str,
        captions: Sequence[str],
        turns: Sequence[TranscriptTurn],
    ) -> ValidationVerdict:
        if not captions and not turns:
            raise RangeError("validation evidence must be non-empty")
        request = {
            "feedback_text": feedback_text,
            "captions": list(captions),
            "turns": [
                {
                    "speaker": t.speaker.value,
                    "start_ms": t.interval.start.ms,
                    "end_ms": t.interval.end.ms,
                    "text": t.text,
                }
                for t in turns
            ],
        }
        verdict_schema = schemas.obj(
            consistent=schemas.boolean(), rationale=schemas.string(non_empty=False)
        )
        payload = self._call(
            BackendKind.VALIDATOR,
            request,
            validate=lambda p: schemas.check(verdict_schema, p),
        )
        return ValidationVerdict(consistent=payload["consistent"], rationale=payload["rationale"])

    def embed(self, text: str) -> EmbeddingVector:
        if not text.strip():
            raise RangeError("embed needs non-empty text")
        request = {"text": text}
        payload = self._call(
            BackendKind.EMBEDDER,
            request,
            validate=_check_embedding,
        )
        return EmbeddingVector(values=tuple(payload["values"]), dim=len(payload["values"]))


def _check_embedding(payload: dict) -> list[str]:
    values = payload.get("values")
    if not isinstance(values, list) or not values:
        return ["values: expected non-empty array"]
    if any(not isinstance(v, (int, float)) or isinstance(v, bool) for v in values):
        return ["values: expected numbers"]
    if any(math.isnan(v) or math.isinf(v) for v in values):
        return ["values: must be finite"]
    return []
