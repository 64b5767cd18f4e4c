"""Command-line entry point exposing every pipeline stage and the service.

Exit codes: 0 success, 1 validation or input error, 2 backend failure.
``--json`` switches stdout to machine-readable one-document output.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import EngineConfig
from .errors import BackendUnavailable, EngineError, SchemaViolation
from .recommendation import build_index, load_clips_csv, save_index
from .report import render_markdown_report
from .runner import (
    ANNOTATIONS_ARTIFACT,
    CONTEXT_ARTIFACT,
    EVALUATION_ARTIFACT,
    FEEDBACK_ARTIFACT,
    RECOMMENDATIONS_ARTIFACT,
    TRANSCRIPT_ARTIFACT,
    run_stage,
)
from .service import ApiServer
from .store import LessonStore

log = logging.getLogger("lessonlens")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lessonlens",
        description="Rubric-aligned feedback and objective annotations from lesson recordings.",
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--store", help="lesson store directory")
    parser.add_argument("--backend", choices=["mock", "remote"], help="model backend")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--log-level", default=None, help="logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="caption windows and fuse the timeline")
    p.add_argument("--lesson-id", required=True)
    p.add_argument("--duration-ms", type=int, required=True)
    p.add_argument("--transcript", required=True)
    p.add_argument("--title", default=None)
    p.add_argument("--media-url", default=None)
    p.add_argument("--context", action="append", default=[], help="context file (repeatable)")
    p.add_argument("--window-s", type=float, default=None)
    p.add_argument("--no-context-carry", action="store_true")

    p = sub.add_parser("analyze", help="run the feedback pipeline")
    p.add_argument("--lesson-id", required=True)
    p.add_argument("--rubric", default=None)
    p.add_argument("--max-per-dim", type=int, default=3)
    p.add_argument("--max-total", type=int, default=20)
    p.add_argument("--generated-at", default=None, help="pin the report timestamp")

    p = sub.add_parser("annotate", help="activity codes, questions, outline")
    p.add_argument("--lesson-id", required=True)
    p.add_argument("--taxonomy", default=None)

    p = sub.add_parser("index-build", help="build a clip index from metadata CSV")
    p.add_argument("--clips", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("recommend", help="retrieve exemplar clips per feedback item")
    p.add_argument("--lesson-id", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--rubric", default=None)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--max-results", type=int, default=3)

    p = sub.add_parser("evaluate", help="score the lesson's artifacts")
    p.add_argument("--lesson-id", required=True)
    p.add_argument("--gold-questions", default=None)
    p.add_argument("--gold-activities", default=None)
    p.add_argument("--gold-diarization", default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--duration-weighted", action="store_true")

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)

    p = sub.add_parser("export-report", help="render the written lesson report")
    p.add_argument("--lesson-id", required=True)
    p.add_argument("--out", default=None, help="output file (stdout when omitted)")

    return parser


def _emit(args, human: str, doc: dict) -> None:
    if args.json:
        print(json.dumps(doc, ensure_ascii=False, sort_keys=True))
    elif human:
        print(human)


def _fail(args, exc: Exception) -> None:
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    if args.json:
        print(
            json.dumps(
                {"ok": False, "error": {"type": type(exc).__name__, "message": str(exc)}},
                ensure_ascii=False,
                sort_keys=True,
            )
        )


def _cmd_ingest(args, config: EngineConfig, store: LessonStore) -> dict:
    lesson_id = args.lesson_id
    if store.has_lesson(lesson_id):
        existing = store.get_lesson(lesson_id).duration_ms
        if existing != args.duration_ms:
            raise EngineError(
                f"lesson {lesson_id!r} already exists with duration {existing} ms; "
                f"got {args.duration_ms} ms"
            )
    else:
        store.create_lesson(
            title=args.title or lesson_id,
            duration_ms=args.duration_ms,
            lesson_id=lesson_id,
            media_url=args.media_url,
        )
    store.put_artifact(lesson_id, TRANSCRIPT_ARTIFACT, Path(args.transcript).read_bytes())
    if args.context:
        documents = []
        for raw in args.context:
            kind, _, path = raw.partition(":")
            if not path:
                kind, path = "OTHER", kind
            documents.append(
                {
                    "kind": kind.upper(),
                    "title": Path(path).stem,
                    "text": Path(path).read_text("utf-8"),
                }
            )
        store.put_json(lesson_id, CONTEXT_ARTIFACT, {"schema_version": 1, "documents": documents})
    params: dict = {"context_carry": not args.no_context_carry}
    if args.window_s is not None:
        params["window_s"] = args.window_s
    result = run_stage(config, store, lesson_id, "INGEST", params)
    return {"lesson_id": lesson_id, **result}


def _cmd_analyze(args, config: EngineConfig, store: LessonStore) -> dict:
    params = {
        "rubric": args.rubric,
        "max_per_dimension": args.max_per_dim,
        "max_total": args.max_total,
        "generated_at": args.generated_at,
    }
    result = run_stage(config, store, args.lesson_id, "ANALYZE", params)
    return {"lesson_id": args.lesson_id, **result}


def _cmd_annotate(args, config: EngineConfig, store: LessonStore) -> dict:
    result = run_stage(config, store, args.lesson_id, "ANNOTATE", {"taxonomy": args.taxonomy})
    return {"lesson_id": args.lesson_id, **result}


def _cmd_index_build(args, config: EngineConfig, store: LessonStore) -> dict:
    gateway = config.build_gateway()
    clips = load_clips_csv(args.clips)
    index = build_index(clips, gateway)
    save_index(index, args.out)
    return {"clips": len(clips), "dim": index.dim, "out": args.out}


def _cmd_recommend(args, config: EngineConfig, store: LessonStore) -> dict:
    params = {
        "index": args.index,
        "rubric": args.rubric,
        "k": args.k,
        "max_results": args.max_results,
    }
    result = run_stage(config, store, args.lesson_id, "RECOMMEND", params)
    return {"lesson_id": args.lesson_id, **result}


def _cmd_evaluate(args, config: EngineConfig, store: LessonStore) -> dict:
    params = {
        "gold_questions": args.gold_questions,
        "gold_activities": args.gold_activities,
        "gold_diarization": args.gold_diarization,
        "bins": args.bins,
        "duration_weighted": args.duration_weighted,
    }
    run_stage(config, store, args.lesson_id, "EVALUATE", params)
    doc = store.get_json(args.lesson_id, EVALUATION_ARTIFACT)
    return {"lesson_id": args.lesson_id, "evaluation": doc}


def _cmd_serve(args, config: EngineConfig, store: LessonStore) -> dict:
    server = ApiServer(config)
    print(f"serving on http://{config.host}:{server.port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return {"stopped": True}


def _cmd_export_report(args, config: EngineConfig, store: LessonStore) -> dict:
    record = store.get_lesson(args.lesson_id)
    feedback = store.get_json(args.lesson_id, FEEDBACK_ARTIFACT)
    annotations = (
        store.get_json(args.lesson_id, ANNOTATIONS_ARTIFACT)
        if store.has_artifact(args.lesson_id, ANNOTATIONS_ARTIFACT)
        else None
    )
    recommendations = (
        store.get_json(args.lesson_id, RECOMMENDATIONS_ARTIFACT)
        if store.has_artifact(args.lesson_id, RECOMMENDATIONS_ARTIFACT)
        else None
    )
    text = render_markdown_report(record, feedback, annotations, recommendations)
    if args.out:
        Path(args.out).write_text(text, "utf-8")
        return {"lesson_id": args.lesson_id, "out": args.out, "bytes": len(text)}
    print(text)
    return {"lesson_id": args.lesson_id, "bytes": len(text)}


_COMMANDS = {
    "ingest": _cmd_ingest,
    "analyze": _cmd_analyze,
    "annotate": _cmd_annotate,
    "index-build": _cmd_index_build,
    "recommend": _cmd_recommend,
    "evaluate": _cmd_evaluate,
    "serve": _cmd_serve,
    "export-report": _cmd_export_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        overrides: dict = {}
        if args.store:
            overrides["store_dir"] = args.store
        if args.backend:
            overrides["backend"] = args.backend
        if args.log_level:
            overrides["log_level"] = args.log_level
        if args.command == "serve":
            if args.host:
                overrides["host"] = args.host
            if args.port is not None:
                overrides["port"] = args.port
        config = EngineConfig.load(args.config, overrides)
        logging.basicConfig(level=getattr(logging, config.log_level.upper(), logging.INFO))
        store = config.build_store()
        result = _COMMANDS[args.command](args, config, store)
    except (BackendUnavailable, SchemaViolation) as exc:
        _fail(args, exc)
        return 2
    except EngineError as exc:
        _fail(args, exc)
        return 1
    except FileNotFoundError as exc:
        _fail(args, exc)
        return 1

    if args.command == "evaluate" and not args.json:
        table_doc = result["evaluation"]
        _print_eval_table(table_doc)
    _emit(args, _summary_line(args.command, result), result)
    return 0


def _print_eval_table(doc: dict) -> None:
    lines = [f"evaluation: lesson {doc['lesson_id']}"]
    lines.append("-" * len(lines[0]))
    if doc.get("grounding_rate") is not None:
        lines.append(f"Grounding rate (factuality proxy, %)     {doc['grounding_rate'] * 100:.1f}")
    if doc.get("temporal_coverage") is not None:
        lines.append(
            f"Temporal coverage (normalized entropy)   {doc['temporal_coverage']['normalized']:.3f}"
        )
    if doc.get("question_scores") is not None:
        qs = doc["question_scores"]
        lines.append(f"Question detection P/R/F1                {qs['precision']:.3f} / {qs['recall']:.3f} / {qs['f1']:.3f}")
    if doc.get("activity_scores") is not None:
        acts = doc["activity_scores"]
        lines.append(f"Activity micro-F1 (all codes)            {acts['overall']['micro_f1']:.3f}")
        if acts.get("teacher"):
            lines.append(f"Activity micro-F1 (teacher)              {acts['teacher']['micro_f1']:.3f}")
        if acts.get("student"):
            lines.append(f"Activity micro-F1 (student)              {acts['student']['micro_f1']:.3f}")
    if doc.get("diarization_jer") is not None:
        lines.append(f"Diarization JER                          {doc['diarization_jer']:.3f}")
    print("\n".join(lines))


def _summary_line(command: str, result: dict) -> str:
    parts = [f"{key}={value}" for key, value in result.items() if not isinstance(value, dict)]
    return f"{command}: " + " ".join(parts)


if __name__ == "__main__":
    sys.exit(main())
