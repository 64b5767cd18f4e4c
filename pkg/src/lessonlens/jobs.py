"""In-process job queue: FIFO per lesson, single writer per lesson.

Jobs move QUEUED → RUNNING → DONE/FAILED and every transition is persisted
atomically, so a process that dies mid-job leaves a RUNNING record that the
startup sweep marks FAILED; its artifacts are either complete or absent
thanks to atomic artifact writes, and the job can simply be resubmitted.
"""

from __future__ import annotations

import enum
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .artifacts import dump_canonical, utc_now_iso
from .errors import ArtifactNotFound, EngineError, LessonNotFound, RangeError
from .runner import check_dependencies
from .store import LessonStore


class Stage(enum.Enum):
    INGEST = "INGEST"
    ANALYZE = "ANALYZE"
    ANNOTATE = "ANNOTATE"
    RECOMMEND = "RECOMMEND"
    EVALUATE = "EVALUATE"


class JobState(enum.Enum):
    QUEUED = "QUEUED"
    RUNNING = "RUNNING"
    DONE = "DONE"
    FAILED = "FAILED"

_LEGAL_TRANSITIONS = {
    JobState.QUEUED: {JobState.RUNNING},
    JobState.RUNNING: {JobState.DONE, JobState.FAILED},
    JobState.DONE: set(),
    JobState.FAILED: set(),
}


@dataclass
class Job:
    job_id: str
    lesson_id: str
    stage: Stage
    state: JobState
    params: dict = field(default_factory=dict)
    error: str | None = None
    result: dict | None = None
    created_at: str = ""
    started_at: str | None = None
    finished_at: str | None = None

    def to_doc(self) -> dict:
        return {
            "schema_version": 1,
            "job_id": self.job_id,
            "lesson_id": self.lesson_id,
            "stage": self.stage.value,
            "state": self.state.value,
            "params": self.params,
            "error": self.error,
            "result": self.result,
            "created_at": self.created_at,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Job":
        return cls(
            job_id=doc["job_id"],
            lesson_id=doc["lesson_id"],
            stage=Stage(doc["stage"]),
            state=JobState(doc["state"]),
            params=doc.get("params", {}),
            error=doc.get("error"),
            result=doc.get("result"),
            created_at=doc.get("created_at", ""),
            started_at=doc.get("started_at"),
            finished_at=doc.get("finished_at"),
        )


class JobQueue:
    """Worker pool with per-lesson FIFO ordering and persistence on disk."""

    def __init__(
        self,
        store: LessonStore,
        executor: Callable[[Job], dict],
        workers: int = 2,
    ):
        self.store = store
        self.executor = executor
        self._jobs: dict[str, Job] = {}
        self._order: list[str] = []
        self._running_lessons: set[str] = set()
        self._cv = threading.Condition()
        self._stopping = False
        self._jobs_dir = Path(store.root) / "_jobs"
        self._jobs_dir.mkdir(parents=True, exist_ok=True)
        self._sweep_interrupted()
        self._threads = [
            threading.Thread(target=self._worker, daemon=True, name=f"job-worker-{i}")
            for i in range(workers)
        ]
        for thread in self._threads:
            thread.start()

    # -- persistence -----------------------------------------------------

    def _persist(self, job: Job) -> None:
        path = self._jobs_dir / f"{job.job_id}.json"
        tmp = path.with_name(f".{path.name}.tmp-{os.getpid()}")
        tmp.write_bytes(dump_canonical(job.to_doc()))
        os.replace(tmp, path)

    def _sweep_interrupted(self) -> None:
        for path in sorted(self._jobs_dir.glob("*.json")):
            job = Job.from_doc(json.loads(path.read_text("utf-8")))
            if job.state in (JobState.QUEUED, JobState.RUNNING):
                job.state = JobState.FAILED
                job.error = "interrupted: process exited before the job finished"
                job.finished_at = utc_now_iso()
                self._persist(job)
            self._jobs[job.job_id] = job

    def _transition(self, job: Job, new_state: JobState) -> None:
        if new_state not in _LEGAL_TRANSITIONS[job.state]:
            raise RangeError(f"illegal job transition {job.state.value} -> {new_state.value}")
        job.state = new_state
        self._persist(job)

    # -- API ---------------------------------------------------------------

    def submit(self, lesson_id: str, stage: Stage | str, params: dict | None = None) -> str:
        stage = Stage(stage) if isinstance(stage, str) else stage
        if not self.store.has_lesson(lesson_id):
            raise LessonNotFound(f"lesson {lesson_id!r} does not exist")
        check_dependencies(self.store, lesson_id, stage.value)
        job = Job(
            job_id=uuid.uuid4().hex[:12],
            lesson_id=lesson_id,
            stage=stage,
            state=JobState.QUEUED,
            params=params or {},
            created_at=utc_now_iso(),
        )
        with self._cv:
            self._jobs[job.job_id] = job
            self._order.append(job.job_id)
            self._persist(job)
            self._cv.notify_all()
        return job.job_id

    def get(self, job_id: str) -> Job:
        job = self._jobs.get(job_id)
        if job is None:
            raise ArtifactNotFound(f"no job {job_id!r}")
        return job

    def wait(self, job_id: str, timeout_s: float = 60.0) -> Job:
        with self._cv:
            ok = self._cv.wait_for(
                lambda: self._jobs[job_id].state in (JobState.DONE, JobState.FAILED),
                timeout=timeout_s,
            )
        if not ok:
            raise TimeoutError(f"job {job_id} still running after {timeout_s}s")
        return self._jobs[job_id]

    def stop(self) -> None:
        with self._cv:
            self._stopping = True
            self._cv.notify_all()
        for thread in self._threads:
            thread.join(timeout=5)

    # -- worker loop -------------------------------------------------------

    def _claim_next(self) -> Job | None:
        for job_id in self._order:
            job = self._jobs[job_id]
            if job.state is JobState.QUEUED and job.lesson_id not in self._running_lessons:
                self._order.remove(job_id)
                self._running_lessons.add(job.lesson_id)
                job.started_at = utc_now_iso()
                self._transition(job, JobState.RUNNING)
                return job
        return None

    def _worker(self) -> None:
        while True:
            with self._cv:
                job = self._claim_next()
                if job is None:
                    if self._stopping:
                        return
                    self._cv.wait(timeout=0.5)
                    continue
            try:
                result = self.executor(job)
                job.result = result
                job.error = None
                new_state = JobState.DONE
            except EngineError as exc:
                job.error = f"{type(exc).__name__}: {exc}"
                new_state = JobState.FAILED
            except Exception as exc:  # job isolation: a crash fails the job, not the pool
                job.error = f"{type(exc).__name__}: {exc}"
                new_state = JobState.FAILED
            with self._cv:
                job.finished_at = utc_now_iso()
                self._transition(job, new_state)
                self._running_lessons.discard(job.lesson_id)
                self._cv.notify_all()
