"""Artifact store integrity and job queue semantics."""

from __future__ import annotations

import json
import threading
import time

import pytest

from lessonlens.errors import (
    ArtifactNotFound,
    DependencyMissing,
    HashMismatch,
    LessonNotFound,
    RangeError,
)
from lessonlens.jobs import JobQueue, JobState, Stage
from lessonlens.store import LessonStore


@pytest.fixture()
def store(tmp_path):
    return LessonStore(tmp_path / "store")


class TestLessonStore:
    def test_write_then_read_identical(self, store):
        store.create_lesson(title="demo", duration_ms=1000, lesson_id="L1")
        store.put_artifact("L1", "timeline.json", b'{"x": 1}\n')
        assert store.get_artifact("L1", "timeline.json") == b'{"x": 1}\n'

    def test_unknown_artifact(self, store):
        store.create_lesson(title="demo", duration_ms=1000, lesson_id="L1")
        with pytest.raises(ArtifactNotFound):
            store.get_artifact("L1", "nothing.json")

    def test_missing_lesson(self, store):
        with pytest.raises(LessonNotFound):
            store.get_lesson("ghost")

    def test_corruption_detected(self, store, tmp_path):
        store.create_lesson(title="demo", duration_ms=1000, lesson_id="L1")
        store.put_artifact("L1", "feedback.json", b"{}")
        (store.root / "L1" / "feedback.json").write_bytes(b"tampered")
        with pytest.raises(HashMismatch):
            store.get_artifact("L1", "feedback.json")

    def test_manifest_hash_recorded(self, store):
        store.create_lesson(title="demo", duration_ms=1000, lesson_id="L1")
        store.put_json("L1", "evaluation.json", {"v": 1})
        record = store.get_lesson("L1")
        assert "evaluation.json" in record.manifest
        assert len(record.manifest["evaluation.json"]["sha256"]) == 64

    def test_no_partial_files_left_behind(self, store):
        store.create_lesson(title="demo", duration_ms=1000, lesson_id="L1")
        store.put_artifact("L1", "a.json", b"data")
        leftovers = [p.name for p in (store.root / "L1").iterdir() if p.name.startswith(".")]
        assert leftovers == []

    def test_invalid_names_rejected(self, store):
        store.create_lesson(title="demo", duration_ms=1000, lesson_id="L1")
        with pytest.raises(RangeError):
            store.put_artifact("L1", "../escape", b"x")
        with pytest.raises(RangeError):
            store.create_lesson(title="demo", duration_ms=1, lesson_id="bad/id")

    def test_list_lessons_sorted(self, store):
        store.create_lesson(title="b", duration_ms=1, lesson_id="b-lesson")
        store.create_lesson(title="a", duration_ms=1, lesson_id="a-lesson")
        assert [r.lesson_id for r in store.list_lessons()] == ["a-lesson", "b-lesson"]

    def test_concurrent_writers_keep_manifest_consistent(self, store):
        store.create_lesson(title="demo", duration_ms=1000, lesson_id="L1")

        def write(n):
            store.put_artifact("L1", f"artifact-{n}.json", f"data-{n}".encode())

        threads = [threading.Thread(target=write, args=(i,)) for i in range(12)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        record = store.get_lesson("L1")
        assert len(record.manifest) == 12
        for i in range(12):
            assert store.get_artifact("L1", f"artifact-{i}.json") == f"data-{i}".encode()


class TestJobQueue:
    def make_queue(self, store, executor=None, workers=2):
        return JobQueue(store, executor or (lambda job: {"ok": True}), workers=workers)

    def seed_lesson(self, store, lesson_id="L1"):
        store.create_lesson(title="demo", duration_ms=1000, lesson_id=lesson_id)
        store.put_artifact(lesson_id, "transcript.jsonl", b"")

    def test_analyze_before_ingest_is_dependency_missing(self, store):
        self.seed_lesson(store)
        queue = self.make_queue(store)
        try:
            with pytest.raises(DependencyMissing):
                queue.submit("L1", Stage.ANALYZE)
        finally:
            queue.stop()

    def test_unknown_lesson_rejected(self, store):
        queue = self.make_queue(store)
        try:
            with pytest.raises(LessonNotFound):
                queue.submit("ghost", Stage.INGEST)
        finally:
            queue.stop()

    def test_job_runs_to_done(self, store):
        self.seed_lesson(store)
        queue = self.make_queue(store)
        try:
            job_id = queue.submit("L1", Stage.INGEST)
            job = queue.wait(job_id, timeout_s=10)
            assert job.state is JobState.DONE
            assert job.result == {"ok": True}
            assert job.started_at and job.finished_at
        finally:
            queue.stop()

    def test_failure_recorded(self, store):
        self.seed_lesson(store)

        def explode(job):
            raise ValueError("boom")

        queue = self.make_queue(store, executor=explode)
        try:
            job_id = queue.submit("L1", Stage.INGEST)
            job = queue.wait(job_id, timeout_s=10)
            assert job.state is JobState.FAILED
            assert "boom" in job.error
        finally:
            queue.stop()

    def test_single_writer_per_lesson(self, store):
        self.seed_lesson(store)
        active: list[str] = []
        overlap = []
        lock = threading.Lock()

        def slow(job):
            with lock:
                if job.lesson_id in active:
                    overlap.append(job.job_id)
                active.append(job.lesson_id)
            time.sleep(0.05)
            with lock:
                active.remove(job.lesson_id)
            return {}

        queue = self.make_queue(store, executor=slow, workers=4)
        try:
            ids = [queue.submit("L1", Stage.INGEST) for _ in range(4)]
            for job_id in ids:
                queue.wait(job_id, timeout_s=10)
            assert overlap == []
        finally:
            queue.stop()

    def test_jobs_persisted_and_interrupted_marked_failed(self, store, tmp_path):
        self.seed_lesson(store)
        queue = self.make_queue(store)
        try:
            job_id = queue.submit("L1", Stage.INGEST)
            queue.wait(job_id, timeout_s=10)
        finally:
            queue.stop()

        # simulate a crash: rewrite the job record as RUNNING, then restart
        path = store.root / "_jobs" / f"{job_id}.json"
        doc = json.loads(path.read_text("utf-8"))
        doc["state"] = "RUNNING"
        path.write_text(json.dumps(doc), "utf-8")

        fresh = self.make_queue(store)
        try:
            job = fresh.get(job_id)
            assert job.state is JobState.FAILED
            assert "interrupted" in job.error
        finally:
            fresh.stop()
