"""Evaluation assembly: entropy + grounding always, gold scores when given."""

from __future__ import annotations

import pytest

from lessonlens.evaluation import (
    diarization_set_from_doc,
    evaluate_lesson,
    render_score_table,
    score_activities,
    score_questions,
)
from lessonlens.gateway import ModelGateway
from lessonlens.metrics import LabeledTimeSet
from lessonlens.mock_backend import MockBackend
from lessonlens.model import CaptionSegment, SpeakerRole, TranscriptTurn, fuse_timeline
from lessonlens.pipeline import run_pipeline
from lessonlens.resources import default_rubric
from lessonlens.timebase import MediaTime, TimeInterval


def iv(start_s: float, end_s: float) -> TimeInterval:
    return TimeInterval(MediaTime(round(start_s * 1000)), MediaTime(round(end_s * 1000)))


def gateway() -> ModelGateway:
    return ModelGateway(MockBackend(), sleeper=lambda s: None)


def spread_timeline():
    texts = [
        "The teacher greets each student at the door. «rapport» Desks hold labeled trays.",
        "Hands go up across the room after the opening question. «handsup» Pairs confer.",
        "Several students drift toward their phones. «offtask» The teacher pushes on.",
        "Supplies sit within reach of every table. «accessible» Students fetch beakers unprompted.",
    ]
    captions = [CaptionSegment(iv(i * 120, (i + 1) * 120), t, i) for i, t in enumerate(texts)]
    turns = [
        TranscriptTurn(iv(4, 9), SpeakerRole.TEACHER, "Who can identify today's key term?"),
        TranscriptTurn(iv(10, 14), SpeakerRole.STUDENT, "Is it osmosis?"),
        TranscriptTurn(iv(200, 208), SpeakerRole.TEACHER, "Compare the two beakers please?"),
    ]
    return fuse_timeline(turns, captions, MediaTime(480_000), lesson_id="L1")


class TestEvaluateLesson:
    def test_entropy_and_grounding_always_present(self):
        tl = spread_timeline()
        report = run_pipeline(tl, default_rubric(), gateway())
        result = evaluate_lesson(tl, report)
        assert result.coverage is not None
        assert 0.0 <= result.coverage.normalized <= 1.0
        assert result.grounding_rate == 1.0
        assert result.question_scores is None
        assert result.activity_scores is None
        assert result.diarization_jer is None

    def test_report_against_itself_scores_perfectly(self):
        tl = spread_timeline()
        predicted = ["Who can identify today's key term?", "Compare the two beakers please?"]
        scores = score_questions(predicted, predicted)
        assert (scores.precision, scores.recall, scores.f1) == (1.0, 1.0, 1.0)

        acts = [{"start_ms": 0, "end_ms": 60_000, "labels": ["TEACHER_LECTURING"]}]
        activity = score_activities(acts, acts)
        assert activity.overall.micro_f1 == 1.0

        gold = diarization_set_from_doc(
            {
                "segments": [
                    {"speaker": t.speaker.value, "start_ms": t.interval.start.ms, "end_ms": t.interval.end.ms}
                    for t in tl.turns
                ]
            }
        )
        report = run_pipeline(tl, default_rubric(), gateway())
        result = evaluate_lesson(tl, report, gold_diarization=gold)
        assert result.diarization_jer == 0.0

    def test_question_normalization_tolerates_case_and_punctuation(self):
        scores = score_questions(["What is osmosis?"], ["what is osmosis"])
        assert scores.f1 == 1.0

    def test_partial_question_overlap(self):
        scores = score_questions(
            ["What is osmosis?", "Bogus question?"],
            ["What is osmosis?", "Missed question?"],
        )
        assert scores.tp == 1 and scores.fp == 1 and scores.fn == 1

    def test_activity_scores_by_actor_group(self):
        pred = [
            {"start_ms": 0, "end_ms": 10_000, "labels": ["TEACHER_LECTURING", "STUDENT_LISTENING"]},
        ]
        gold = [
            {"start_ms": 0, "end_ms": 8_000, "labels": ["TEACHER_LECTURING"]},
            {"start_ms": 0, "end_ms": 10_000, "labels": ["STUDENT_LISTENING"]},
        ]
        scores = score_activities(pred, gold)
        assert scores.teacher is not None and scores.student is not None
        assert scores.student.micro_f1 == 1.0
        assert scores.teacher.micro_f1 < 1.0
        assert scores.overall.micro_f1 < 1.0

    def test_empty_report_yields_null_coverage(self):
        texts = ["Nothing remarkable happens in this window."] * 2
        captions = [CaptionSegment(iv(i * 120, (i + 1) * 120), t, i) for i, t in enumerate(texts)]
        tl = fuse_timeline([], captions, MediaTime(240_000), lesson_id="L2")
        report = run_pipeline(tl, default_rubric(), gateway())
        result = evaluate_lesson(tl, report)
        assert result.coverage is None and result.grounding_rate is None

    def test_duration_weighted_flag(self):
        tl = spread_timeline()
        report = run_pipeline(tl, default_rubric(), gateway())
        by_count = evaluate_lesson(tl, report)
        weighted = evaluate_lesson(tl, report, duration_weighted=True)
        # all windows share one duration here, so the two modes agree
        assert weighted.coverage.normalized == pytest.approx(by_count.coverage.normalized)

    def test_table_rendering_mentions_all_computed_scores(self):
        tl = spread_timeline()
        report = run_pipeline(tl, default_rubric(), gateway())
        result = evaluate_lesson(
            tl,
            report,
            predicted_questions=["What?"],
            gold_questions=["What?"],
            predicted_activities=[{"start_ms": 0, "end_ms": 1000, "labels": ["TEACHER_QA"]}],
            gold_activities=[{"start_ms": 0, "end_ms": 1000, "labels": ["TEACHER_QA"]}],
            gold_diarization=diarization_set_from_timeline_for_test(tl),
        )
        table = render_score_table(result)
        assert "Grounding rate" in table
        assert "Temporal coverage" in table
        assert "Question detection F1" in table
        assert "Activity micro-F1 (teacher)" in table
        assert "Diarization JER" in table


def diarization_set_from_timeline_for_test(tl) -> LabeledTimeSet:
    return LabeledTimeSet.from_entries([(t.speaker, t.interval) for t in tl.turns])
