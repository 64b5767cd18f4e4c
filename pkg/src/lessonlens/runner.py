"""Stage execution shared by the CLI and the job queue.

Each stage reads its inputs from the lesson store, runs the corresponding
module, and writes its artifact back. Stages are re-runnable: with a warm
cache or matching checkpoints they change no artifact bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .annotations import ActivityTaxonomy, build_annotations
from .artifacts import annotations_to_doc, timeline_from_doc, timeline_to_doc
from .config import EngineConfig
from .errors import DependencyMissing
from .evaluation import diarization_set_from_doc, evaluate_lesson
from .ingestion import WindowingPolicy, caption_all, load_transcript, plan_windows
from .metrics import default_bin_count
from .model import ContextDocument, DocumentKind, Rubric, fuse_timeline
from .pipeline import FeedbackReport, PipelinePolicy, run_pipeline
from .recommendation import load_index, recommend_for_report
from .resources import default_rubric, default_taxonomy, load_json_file, load_rubric_file
from .store import LessonStore
from .timebase import MediaTime

TRANSCRIPT_ARTIFACT = "transcript.jsonl"
CONTEXT_ARTIFACT = "context.json"
TIMELINE_ARTIFACT = "timeline.json"
ANNOTATIONS_ARTIFACT = "annotations.json"
FEEDBACK_ARTIFACT = "feedback.json"
RECOMMENDATIONS_ARTIFACT = "recommendations.json"
EVALUATION_ARTIFACT = "evaluation.json"

STAGE_DEPENDENCIES = {
    "INGEST": (TRANSCRIPT_ARTIFACT,),
    "ANALYZE": (TIMELINE_ARTIFACT,),
    "ANNOTATE": (TIMELINE_ARTIFACT,),
    "RECOMMEND": (FEEDBACK_ARTIFACT,),
    "EVALUATE": (TIMELINE_ARTIFACT, FEEDBACK_ARTIFACT),
}


def check_dependencies(store: LessonStore, lesson_id: str, stage: str) -> None:
    for artifact in STAGE_DEPENDENCIES[stage]:
        if not store.has_artifact(lesson_id, artifact):
            raise DependencyMissing(
                f"stage {stage} needs artifact {artifact!r} for lesson {lesson_id!r}"
            )


def _load_rubric(params: dict) -> Rubric:
    path = params.get("rubric")
    return load_rubric_file(path) if path else default_rubric()


def _load_timeline(store: LessonStore, lesson_id: str):
    return timeline_from_doc(store.get_json(lesson_id, TIMELINE_ARTIFACT))


def run_ingest(config: EngineConfig, store: LessonStore, lesson_id: str, params: dict) -> dict:
    """Window the recording, caption every window, fuse with the transcript."""
    check_dependencies(store, lesson_id, "INGEST")
    record = store.get_lesson(lesson_id)
    gateway = config.build_gateway()

    transcript_path = Path(store.root) / lesson_id / TRANSCRIPT_ARTIFACT
    turns = load_transcript(transcript_path)

    context_docs = []
    if store.has_artifact(lesson_id, CONTEXT_ARTIFACT):
        context_docs = [
            ContextDocument(kind=DocumentKind(d["kind"]), title=d["title"], text=d["text"])
            for d in store.get_json(lesson_id, CONTEXT_ARTIFACT)["documents"]
        ]

    policy = WindowingPolicy(
        window_ms=round(params.get("window_s", config.window_s) * 1000),
        min_tail_ms=round(params.get("min_tail_s", config.min_tail_s) * 1000),
    )
    duration = MediaTime(record.duration_ms)
    windows = plan_windows(duration, policy)
    captions = caption_all(
        lesson_id,
        windows,
        gateway,
        context_carry=params.get("context_carry", True),
        max_workers=config.parallelism,
    )
    timeline = fuse_timeline(
        turns=turns,
        captions=captions,
        duration=duration,
        lesson_id=lesson_id,
        context_docs=context_docs,
    )
    store.put_json(lesson_id, TIMELINE_ARTIFACT, timeline_to_doc(timeline))
    return {"windows": len(windows), "turns": len(turns)}


def run_analyze(config: EngineConfig, store: LessonStore, lesson_id: str, params: dict) -> dict:
    check_dependencies(store, lesson_id, "ANALYZE")
    timeline = _load_timeline(store, lesson_id)
    rubric = _load_rubric(params)
    policy = PipelinePolicy(
        max_per_dimension=params.get("max_per_dimension", 3),
        max_total=params.get("max_total", 20),
        max_workers=config.parallelism,
        generated_at=params.get("generated_at"),
    )
    report = run_pipeline(timeline, rubric, config.build_gateway(), policy, store=store)
    return {"items": len(report.items), "rejected": len(report.rejected)}


def run_annotate(config: EngineConfig, store: LessonStore, lesson_id: str, params: dict) -> dict:
    check_dependencies(store, lesson_id, "ANNOTATE")
    timeline = _load_timeline(store, lesson_id)
    taxonomy_doc = (
        load_json_file(params["taxonomy"]) if params.get("taxonomy") else default_taxonomy()
    )
    taxonomy = ActivityTaxonomy.from_dict(taxonomy_doc)
    activities, questions, histogram, outline = build_annotations(
        timeline, taxonomy, config.build_gateway(), max_workers=config.parallelism
    )
    doc = annotations_to_doc(lesson_id, activities, questions, histogram, outline)
    store.put_json(lesson_id, ANNOTATIONS_ARTIFACT, doc)
    return {
        "activities": len(activities),
        "questions": len(questions),
        "outline_sections": len(outline),
    }


def run_recommend(config: EngineConfig, store: LessonStore, lesson_id: str, params: dict) -> dict:
    check_dependencies(store, lesson_id, "RECOMMEND")
    index_dir = params.get("index")
    if not index_dir:
        raise DependencyMissing("stage RECOMMEND needs an 'index' directory parameter")
    report = FeedbackReport.from_doc(store.get_json(lesson_id, FEEDBACK_ARTIFACT))
    doc = recommend_for_report(
        report,
        load_index(index_dir),
        _load_rubric(params),
        config.build_gateway(),
        k=params.get("k", 10),
        max_results=params.get("max_results", 3),
    )
    store.put_json(lesson_id, RECOMMENDATIONS_ARTIFACT, doc)
    return {"entries": len(doc["entries"])}


def run_evaluate(config: EngineConfig, store: LessonStore, lesson_id: str, params: dict) -> dict:
    check_dependencies(store, lesson_id, "EVALUATE")
    timeline = _load_timeline(store, lesson_id)
    report = FeedbackReport.from_doc(store.get_json(lesson_id, FEEDBACK_ARTIFACT))

    predicted_questions = None
    predicted_activities = None
    if params.get("gold_questions") or params.get("gold_activities"):
        if not store.has_artifact(lesson_id, ANNOTATIONS_ARTIFACT):
            raise DependencyMissing(
                "gold comparison needs annotations.json; run the ANNOTATE stage first"
            )
        annotations = store.get_json(lesson_id, ANNOTATIONS_ARTIFACT)
        predicted_questions = [q["text"] for q in annotations["questions"]]
        predicted_activities = annotations["activities"]

    gold_questions = None
    if params.get("gold_questions"):
        gold_questions = load_json_file(params["gold_questions"])["questions"]
    gold_activities = None
    if params.get("gold_activities"):
        gold_activities = load_json_file(params["gold_activities"])["activities"]
    gold_diarization = None
    if params.get("gold_diarization"):
        gold_diarization = diarization_set_from_doc(load_json_file(params["gold_diarization"]))

    result = evaluate_lesson(
        timeline,
        report,
        predicted_questions=predicted_questions,
        gold_questions=gold_questions,
        predicted_activities=predicted_activities,
        gold_activities=gold_activities,
        gold_diarization=gold_diarization,
        k=params.get("bins") or default_bin_count(timeline.duration),
        duration_weighted=params.get("duration_weighted", False),
    )
    store.put_json(lesson_id, EVALUATION_ARTIFACT, result.to_doc())
    return {"evaluated": True}


STAGE_RUNNERS = {
    "INGEST": run_ingest,
    "ANALYZE": run_analyze,
    "ANNOTATE": run_annotate,
    "RECOMMEND": run_recommend,
    "EVALUATE": run_evaluate,
}


def run_stage(config: EngineConfig, store: LessonStore, lesson_id: str, stage: str, params: dict) -> dict:
    return STAGE_RUNNERS[stage](config, store, lesson_id, params)
