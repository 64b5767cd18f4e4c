"""HTTP API over the lesson store and job queue.

Plain-stdlib threading server: artifacts are small JSON documents and the
deployment target is a single desk-scale process, so no web framework is
needed. All responses are JSON, CORS headers are emitted for the dashboard
origin, and an optional static bearer token gates every request.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .config import EngineConfig
from .errors import (
    ArtifactNotFound,
    DependencyMissing,
    EngineError,
    HashMismatch,
    LessonNotFound,
    OverlapError,
    ParseError,
    RangeError,
)
from .ingestion import load_transcript
from .jobs import JobQueue, Stage
from .runner import run_stage
from .store import LessonStore

ARTIFACT_ROUTES = {
    "timeline": "timeline.json",
    "hotspots": "hotspots.json",
    "feedback": "feedback.json",
    "annotations": "annotations.json",
    "recommendations": "recommendations.json",
    "evaluation": "evaluation.json",
}

_STATUS_BY_ERROR = (
    (LessonNotFound, 404),
    (ArtifactNotFound, 404),
    (DependencyMissing, 409),
    (ParseError, 400),
    (OverlapError, 400),
    (RangeError, 400),
    (HashMismatch, 500),
)


def _error_status(exc: EngineError) -> int:
    for klass, status in _STATUS_BY_ERROR:
        if isinstance(exc, klass):
            return status
    return 500


class ApiServer:
    """Owns the store, job queue, and HTTP server lifecycle."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self.store = config.build_store()
        self.queue = JobQueue(
            self.store,
            executor=lambda job: run_stage(
                config, self.store, job.lesson_id, job.stage.value, job.params
            ),
            workers=max(1, config.parallelism // 2),
        )
        handler = _make_handler(self)
        self.httpd = ThreadingHTTPServer((config.host, config.port), handler)
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self.httpd.server_port

    def start_background(self) -> None:
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self.httpd.serve_forever()

    def shutdown(self) -> None:
        self.httpd.shutdown()
        self.queue.stop()
        if self._thread is not None:
            self._thread.join(timeout=5)


def _make_handler(server: ApiServer) -> type[BaseHTTPRequestHandler]:
    routes: list[tuple[str, re.Pattern, object]] = []

    def route(method: str, pattern: str):
        def wrap(fn):
            routes.append((method, re.compile(pattern), fn))
            return fn

        return wrap

    @route("POST", r"^/api/lessons$")
    def create_lesson(handler, match, body):
        doc = _json_body(body)
        for field in ("title", "duration_ms"):
            if field not in doc:
                raise RangeError(f"missing field {field!r}")
        record = server.store.create_lesson(
            title=doc["title"],
            duration_ms=doc["duration_ms"],
            lesson_id=doc.get("lesson_id"),
            media_url=doc.get("media_url"),
        )
        return 201, {"lesson_id": record.lesson_id}

    @route("GET", r"^/api/lessons$")
    def list_lessons(handler, match, body):
        return 200, {"lessons": [r.to_doc() for r in server.store.list_lessons()]}

    @route("GET", r"^/api/lessons/([^/]+)$")
    def get_lesson(handler, match, body):
        return 200, server.store.get_lesson(match.group(1)).to_doc()

    @route("PUT", r"^/api/lessons/([^/]+)/transcript$")
    def put_transcript(handler, match, body):
        lesson_id = match.group(1)
        server.store.get_lesson(lesson_id)
        # validate before persisting so a bad upload leaves no artifact
        with tempfile.NamedTemporaryFile("wb", suffix=".jsonl", delete=False) as tmp:
            tmp.write(body)
            tmp_path = tmp.name
        try:
            turns = load_transcript(tmp_path)
        finally:
            os.unlink(tmp_path)
        server.store.put_artifact(lesson_id, "transcript.jsonl", body)
        return 200, {"turns": len(turns)}

    @route("POST", r"^/api/lessons/([^/]+)/jobs$")
    def submit_job(handler, match, body):
        doc = _json_body(body)
        if "stage" not in doc:
            raise RangeError("missing field 'stage'")
        try:
            stage = Stage(doc["stage"])
        except ValueError:
            raise RangeError(f"unknown stage {doc['stage']!r}") from None
        job_id = server.queue.submit(match.group(1), stage, doc.get("params") or {})
        return 202, {"job_id": job_id}

    @route("GET", r"^/api/jobs/([^/]+)$")
    def get_job(handler, match, body):
        return 200, server.queue.get(match.group(1)).to_doc()

    @route("GET", r"^/api/lessons/([^/]+)/([a-z]+)$")
    def get_artifact(handler, match, body):
        lesson_id, name = match.group(1), match.group(2)
        if name not in ARTIFACT_ROUTES:
            raise ArtifactNotFound(f"unknown artifact route {name!r}")
        doc = server.store.get_json(lesson_id, ARTIFACT_ROUTES[name])
        if name == "feedback":
            dimension = handler.query.get("dimension")
            if dimension:
                doc = dict(doc)
                doc["items"] = [i for i in doc["items"] if i["dimension_id"] == dimension]
                doc["rejected"] = [i for i in doc["rejected"] if i["dimension_id"] == dimension]
        return 200, doc

    class Handler(BaseHTTPRequestHandler):
        server_version = "lessonlens"
        query: dict

        def log_message(self, *args):
            pass

        def _send(self, status: int, doc: dict) -> None:
            data = json.dumps(doc, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(data)))
            self._cors()
            self.end_headers()
            self.wfile.write(data)

        def _cors(self) -> None:
            self.send_header("Access-Control-Allow-Origin", server.config.cors_origin)
            self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type, Authorization")

        def do_OPTIONS(self) -> None:
            self.send_response(204)
            self._cors()
            self.end_headers()

        def _authorized(self) -> bool:
            token = server.config.api_token
            if not token:
                return True
            return self.headers.get("Authorization") == f"Bearer {token}"

        def _dispatch(self, method: str) -> None:
            if not self._authorized():
                self._send(401, {"error": {"type": "Unauthorized", "message": "bad token"}})
                return
            path, _, query_string = self.path.partition("?")
            self.query = {}
            for part in query_string.split("&"):
                if "=" in part:
                    key, _, value = part.partition("=")
                    self.query[key] = value
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length) if length else b""
            for route_method, pattern, fn in routes:
                if route_method != method:
                    continue
                match = pattern.match(path)
                if match:
                    try:
                        status, doc = fn(self, match, body)
                    except EngineError as exc:
                        self._send(
                            _error_status(exc),
                            {"error": {"type": type(exc).__name__, "message": str(exc)}},
                        )
                        return
                    self._send(status, doc)
                    return
            self._send(404, {"error": {"type": "NoRoute", "message": f"no route for {path}"}})

        def do_GET(self) -> None:
            self._dispatch("GET")

        def do_POST(self) -> None:
            self._dispatch("POST")

        def do_PUT(self) -> None:
            self._dispatch("PUT")

    return Handler


def _json_body(body: bytes) -> dict:
    try:
        doc = json.loads(body or b"{}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"request body is not valid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("request body must be a JSON object")
    return doc
