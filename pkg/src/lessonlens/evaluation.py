"""Lesson-level evaluation: coverage entropy and grounding always; question
F1, activity micro-F1, and diarization JER when gold files are supplied.

Grounding rate is the automated stand-in for human factuality review: the
fraction of validated items whose quoted spans all occur verbatim in their
overlapping evidence. Activity agreement is measured over time (milliseconds
of overlap per code) so differently-segmented spans still compare fairly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .metrics import (
    ClassificationScores,
    CoverageReport,
    LabeledTimeSet,
    MultiLabelScores,
    default_bin_count,
    jaccard_error_rate,
    micro_f1,
    prf1,
    temporal_entropy,
)
from .model import LessonTimeline, SpeakerRole
from .pipeline import FeedbackReport, is_grounded
from .timebase import TimeInterval, interval_overlap, merge_intervals, total_measure_ms

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ActivityScores:
    overall: MultiLabelScores
    teacher: MultiLabelScores | None
    student: MultiLabelScores | None


@dataclass(frozen=True)
class EvaluationReport:
    lesson_id: str
    coverage: CoverageReport | None
    grounding_rate: float | None
    question_scores: ClassificationScores | None
    activity_scores: ActivityScores | None
    diarization_jer: float | None

    def to_doc(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "lesson_id": self.lesson_id,
            "temporal_coverage": None if self.coverage is None else self.coverage.to_dict(),
            "grounding_rate": self.grounding_rate,
            "question_scores": None
            if self.question_scores is None
            else self.question_scores.to_dict(),
            "activity_scores": None
            if self.activity_scores is None
            else {
                "overall": self.activity_scores.overall.to_dict(),
                "teacher": None
                if self.activity_scores.teacher is None
                else self.activity_scores.teacher.to_dict(),
                "student": None
                if self.activity_scores.student is None
                else self.activity_scores.student.to_dict(),
            },
            "diarization_jer": self.diarization_jer,
        }


def _normalize_question(text: str) -> str:
    return " ".join(text.lower().split()).rstrip("?.! ")


def score_questions(predicted: list[str], gold: list[str]) -> ClassificationScores:
    pred_set = {_normalize_question(q) for q in predicted}
    gold_set = {_normalize_question(q) for q in gold}
    tp = len(pred_set & gold_set)
    return prf1(tp=tp, fp=len(pred_set - gold_set), fn=len(gold_set - pred_set))


def _intervals_by_code(activities: list[dict]) -> dict[str, list[TimeInterval]]:
    by_code: dict[str, list[TimeInterval]] = {}
    for entry in activities:
        interval = TimeInterval.from_ms(entry["start_ms"], entry["end_ms"])
        for code in entry["labels"]:
            by_code.setdefault(code, []).append(interval)
    return {code: merge_intervals(ivs) for code, ivs in by_code.items()}


def score_activities(predicted: list[dict], gold: list[dict]) -> ActivityScores:
    """Micro-F1 over per-code time measure (ms of overlap as counts)."""
    pred = _intervals_by_code(predicted)
    gold_by = _intervals_by_code(gold)
    counts: dict[str, tuple[int, int, int]] = {}
    for code in sorted(set(pred) | set(gold_by)):
        p = pred.get(code, [])
        g = gold_by.get(code, [])
        tp = sum(interval_overlap(a, b).ms for a in p for b in g)
        counts[code] = (tp, total_measure_ms(p) - tp, total_measure_ms(g) - tp)

    def group(prefix: str) -> MultiLabelScores | None:
        subset = {c: v for c, v in counts.items() if c.startswith(prefix)}
        return micro_f1(subset) if subset else None

    return ActivityScores(
        overall=micro_f1(counts),
        teacher=group("TEACHER_"),
        student=group("STUDENT_"),
    )


def diarization_set_from_timeline(timeline: LessonTimeline) -> LabeledTimeSet:
    return LabeledTimeSet.from_entries(
        [(turn.speaker, turn.interval) for turn in timeline.turns]
    )


def diarization_set_from_doc(doc: dict) -> LabeledTimeSet:
    try:
        return LabeledTimeSet.from_entries(
            [
                (SpeakerRole(seg["speaker"]), TimeInterval.from_ms(seg["start_ms"], seg["end_ms"]))
                for seg in doc["segments"]
            ]
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"malformed diarization gold: {exc}") from exc


def evaluate_lesson(
    timeline: LessonTimeline,
    report: FeedbackReport,
    predicted_questions: list[str] | None = None,
    gold_questions: list[str] | None = None,
    predicted_activities: list[dict] | None = None,
    gold_activities: list[dict] | None = None,
    gold_diarization: LabeledTimeSet | None = None,
    k: int | None = None,
    duration_weighted: bool = False,
) -> EvaluationReport:
    """Entropy and grounding always; comparison scores when gold is present."""
    coverage = None
    grounding = None
    if report.items:
        stamps = [item.interval.start for item in report.items]
        weights = (
            [float(item.interval.duration.ms) for item in report.items]
            if duration_weighted
            else None
        )
        coverage = temporal_entropy(
            stamps,
            timeline.duration,
            k=k or default_bin_count(timeline.duration),
            weights=weights,
        )
        grounded = sum(1 for item in report.items if is_grounded(item, timeline))
        grounding = grounded / len(report.items)

    question_scores = None
    if gold_questions is not None:
        question_scores = score_questions(predicted_questions or [], gold_questions)

    activity_scores = None
    if gold_activities is not None:
        activity_scores = score_activities(predicted_activities or [], gold_activities)

    jer = None
    if gold_diarization is not None:
        jer = jaccard_error_rate(diarization_set_from_timeline(timeline), gold_diarization)

    return EvaluationReport(
        lesson_id=timeline.lesson_id,
        coverage=coverage,
        grounding_rate=grounding,
        question_scores=question_scores,
        activity_scores=activity_scores,
        diarization_jer=jer,
    )


def render_score_table(report: EvaluationReport) -> str:
    """Plain-text table mirroring the headline metric columns."""

    def fmt(value: float | None, pct: bool = False) -> str:
        if value is None:
            return "—"
        return f"{value * 100:.1f}" if pct else f"{value:.3f}"

    rows = [
        ("Grounding rate (factuality proxy, %)", fmt(report.grounding_rate, pct=True)),
        (
            "Temporal coverage (normalized entropy)",
            fmt(None if report.coverage is None else report.coverage.normalized),
        ),
    ]
    if report.question_scores is not None:
        qs = report.question_scores
        rows += [
            ("Question detection precision", fmt(qs.precision)),
            ("Question detection recall", fmt(qs.recall)),
            ("Question detection F1", fmt(qs.f1)),
        ]
    if report.activity_scores is not None:
        acts = report.activity_scores
        rows.append(("Activity micro-F1 (all codes)", fmt(acts.overall.micro_f1)))
        if acts.teacher is not None:
            rows.append(("Activity micro-F1 (teacher)", fmt(acts.teacher.micro_f1)))
        if acts.student is not None:
            rows.append(("Activity micro-F1 (student)", fmt(acts.student.micro_f1)))
    if report.diarization_jer is not None:
        rows.append(("Diarization JER", fmt(report.diarization_jer)))

    width = max(len(label) for label, _ in rows)
    lines = [f"{label.ljust(width)}  {value}" for label, value in rows]
    header = f"evaluation: lesson {report.lesson_id}"
    return "\n".join([header, "-" * len(header)] + lines)
