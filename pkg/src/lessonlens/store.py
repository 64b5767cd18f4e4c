"""Directory-per-lesson artifact store with a hash-verified manifest.

Artifacts are small JSON files; writes go through a temp file and an atomic
rename, then the lesson manifest is updated under a per-lesson lock. Reads
verify the content hash so on-disk corruption surfaces as ``HashMismatch``
instead of silently flowing downstream.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .artifacts import dump_canonical, utc_now_iso
from .errors import ArtifactNotFound, HashMismatch, LessonNotFound, RangeError

_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


@dataclass
class LessonRecord:
    lesson_id: str
    title: str
    duration_ms: int
    created_at: str
    media_url: str | None = None
    manifest: dict[str, dict] = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "schema_version": 1,
            "lesson_id": self.lesson_id,
            "title": self.title,
            "duration_ms": self.duration_ms,
            "created_at": self.created_at,
            "media_url": self.media_url,
            "manifest": self.manifest,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "LessonRecord":
        return cls(
            lesson_id=doc["lesson_id"],
            title=doc["title"],
            duration_ms=doc["duration_ms"],
            created_at=doc["created_at"],
            media_url=doc.get("media_url"),
            manifest=dict(doc.get("manifest", {})),
        )


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(f".{path.name}.tmp-{os.getpid()}-{threading.get_ident()}")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class LessonStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, lesson_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(lesson_id, threading.Lock())

    def _lesson_dir(self, lesson_id: str) -> Path:
        if not _NAME_RE.match(lesson_id):
            raise RangeError(f"invalid lesson id {lesson_id!r}")
        return self.root / lesson_id

    def _record_path(self, lesson_id: str) -> Path:
        return self._lesson_dir(lesson_id) / "lesson.json"

    # -- lessons ---------------------------------------------------------

    def create_lesson(
        self,
        title: str,
        duration_ms: int,
        lesson_id: str | None = None,
        media_url: str | None = None,
    ) -> LessonRecord:
        if duration_ms <= 0:
            raise RangeError("lesson duration must be positive")
        lesson_id = lesson_id or uuid.uuid4().hex[:12]
        record = LessonRecord(
            lesson_id=lesson_id,
            title=title,
            duration_ms=duration_ms,
            created_at=utc_now_iso(),
            media_url=media_url,
        )
        directory = self._lesson_dir(lesson_id)
        directory.mkdir(parents=True, exist_ok=True)
        with self._lock(lesson_id):
            _atomic_write(self._record_path(lesson_id), dump_canonical(record.to_doc()))
        return record

    def get_lesson(self, lesson_id: str) -> LessonRecord:
        path = self._record_path(lesson_id)
        if not path.exists():
            raise LessonNotFound(f"lesson {lesson_id!r} does not exist")
        return LessonRecord.from_doc(json.loads(path.read_text("utf-8")))

    def has_lesson(self, lesson_id: str) -> bool:
        return self._record_path(lesson_id).exists()

    def list_lessons(self) -> list[LessonRecord]:
        records = []
        for entry in sorted(self.root.iterdir()):
            if (entry / "lesson.json").exists():
                records.append(self.get_lesson(entry.name))
        return records

    # -- artifacts --------------------------------------------------------

    def put_artifact(self, lesson_id: str, name: str, data: bytes) -> None:
        if not _NAME_RE.match(name):
            raise RangeError(f"invalid artifact name {name!r}")
        path = self._lesson_dir(lesson_id) / name
        with self._lock(lesson_id):
            record = self.get_lesson(lesson_id)
            _atomic_write(path, data)
            record.manifest[name] = {
                "path": name,
                "sha256": hashlib.sha256(data).hexdigest(),
            }
            _atomic_write(self._record_path(lesson_id), dump_canonical(record.to_doc()))

    def get_artifact(self, lesson_id: str, name: str) -> bytes:
        record = self.get_lesson(lesson_id)
        if name not in record.manifest:
            raise ArtifactNotFound(f"lesson {lesson_id!r} has no artifact {name!r}")
        path = self._lesson_dir(lesson_id) / record.manifest[name]["path"]
        if not path.exists():
            raise ArtifactNotFound(f"artifact file missing on disk: {path}")
        data = path.read_bytes()
        digest = hashlib.sha256(data).hexdigest()
        if digest != record.manifest[name]["sha256"]:
            raise HashMismatch(
                f"artifact {name!r} of lesson {lesson_id!r} is corrupted on disk"
            )
        return data

    def has_artifact(self, lesson_id: str, name: str) -> bool:
        try:
            record = self.get_lesson(lesson_id)
        except LessonNotFound:
            return False
        if name not in record.manifest:
            return False
        return (self._lesson_dir(lesson_id) / record.manifest[name]["path"]).exists()

    def put_json(self, lesson_id: str, name: str, doc: Any) -> None:
        self.put_artifact(lesson_id, name, dump_canonical(doc))

    def get_json(self, lesson_id: str, name: str) -> Any:
        return json.loads(self.get_artifact(lesson_id, name).decode("utf-8"))
