"""Time primitives, timeline fusion, rubric types, and text helpers."""

from __future__ import annotations

import random

import pytest

from lessonlens.errors import OverlapError, RangeError
from lessonlens.model import (
    BloomLevel,
    CaptionSegment,
    LessonTimeline,
    PerformanceLevel,
    Rubric,
    RubricDimension,
    SpeakerRole,
    TranscriptTurn,
    fuse_timeline,
    rubric_from_dict,
)
from lessonlens.text_utils import (
    content_words,
    is_question,
    quoted_spans,
    sentence_before_marker,
    split_sentences,
    strip_markers,
)
from lessonlens.timebase import (
    MediaTime,
    TimeInterval,
    interval_overlap,
    merge_intervals,
    total_measure_ms,
)


def iv(start_s: float, end_s: float) -> TimeInterval:
    return TimeInterval(MediaTime(round(start_s * 1000)), MediaTime(round(end_s * 1000)))


def turn(start_s, end_s, text="hello there", speaker=SpeakerRole.TEACHER):
    return TranscriptTurn(iv(start_s, end_s), speaker, text)


def cap(start_s, end_s, index, text="students at desks"):
    return CaptionSegment(iv(start_s, end_s), text, index)


class TestMediaTime:
    def test_renders_three_decimals(self):
        assert MediaTime(312_000).render() == "312.000"
        assert MediaTime(12_340).render() == "12.340"
        assert MediaTime(5).render() == "0.005"

    def test_rejects_negative_and_non_integer(self):
        with pytest.raises(RangeError):
            MediaTime(-1)
        with pytest.raises(RangeError):
            MediaTime(1.5)  # type: ignore[arg-type]

    def test_from_seconds_rounds_to_ms(self):
        assert MediaTime.from_seconds(1.2345).ms == 1234
        with pytest.raises(RangeError):
            MediaTime.from_seconds(float("nan"))

    def test_ordering(self):
        assert MediaTime(1) < MediaTime(2)


class TestIntervalOverlap:
    def test_partial(self):
        assert interval_overlap(iv(0, 10), iv(5, 15)).render() == "5.000"

    def test_touching_is_disjoint(self):
        assert interval_overlap(iv(0, 10), iv(10, 20)).ms == 0

    def test_identity_is_duration(self):
        a = iv(3, 11)
        assert interval_overlap(a, a) == a.duration

    def test_symmetry_property(self):
        rng = random.Random(99)
        for _ in range(200):
            a = TimeInterval(MediaTime(rng.randint(0, 500)), MediaTime(rng.randint(501, 1000)))
            b = TimeInterval(MediaTime(rng.randint(0, 500)), MediaTime(rng.randint(501, 1000)))
            assert interval_overlap(a, b) == interval_overlap(b, a)

    def test_inclusion_exclusion_measure(self):
        rng = random.Random(123)
        for _ in range(200):
            a = TimeInterval(MediaTime(rng.randint(0, 400)), MediaTime(rng.randint(401, 800)))
            b = TimeInterval(MediaTime(rng.randint(0, 400)), MediaTime(rng.randint(401, 800)))
            union = total_measure_ms([a, b])
            assert interval_overlap(a, b).ms + union == a.duration.ms + b.duration.ms

    def test_degenerate_interval_rejected(self):
        with pytest.raises(RangeError):
            iv(5, 5)


class TestMergeIntervals:
    def test_merges_overlap_and_adjacency(self):
        merged = merge_intervals([iv(0, 10), iv(10, 20), iv(25, 30), iv(27, 35)])
        assert [m.render() for m in merged] == ["0.000-20.000", "25.000-35.000"]


class TestFuseTimeline:
    def test_merge_view_ordering(self):
        tl = fuse_timeline(
            turns=[turn(10, 20), turn(0.5, 4)],
            captions=[cap(0, 120, 0)],
            duration=MediaTime(120_000),
        )
        kinds = [k for _, k, _ in tl.merged_events()]
        assert kinds == ["caption", "turn", "turn"]
        starts = [interval.start.ms for interval, _, _ in tl.merged_events()]
        assert starts == sorted(starts)

    def test_caption_gap_rejected(self):
        with pytest.raises(OverlapError, match="gap"):
            fuse_timeline(
                turns=[],
                captions=[cap(0, 120, 0), cap(130, 240, 1)],
                duration=MediaTime(240_000),
            )

    def test_caption_overlap_rejected(self):
        with pytest.raises(OverlapError, match="overlap"):
            fuse_timeline(
                turns=[],
                captions=[cap(0, 120, 0), cap(110, 240, 1)],
                duration=MediaTime(240_000),
            )

    def test_empty_turns_ok(self):
        tl = fuse_timeline(turns=[], captions=[cap(0, 60, 0)], duration=MediaTime(60_000))
        assert tl.turns == ()

    def test_turn_past_duration_rejected(self):
        with pytest.raises(RangeError):
            fuse_timeline(
                turns=[turn(50, 70)],
                captions=[cap(0, 60, 0)],
                duration=MediaTime(60_000),
            )

    def test_idempotence(self):
        tl = fuse_timeline(
            turns=[turn(10, 20), turn(2, 9)],
            captions=[cap(0, 60, 0), cap(60, 120, 1)],
            duration=MediaTime(120_000),
        )
        again = fuse_timeline(
            turns=list(tl.turns),
            captions=list(tl.captions),
            duration=tl.duration,
            lesson_id=tl.lesson_id,
        )
        assert again == tl

    def test_adjacent_caption_invariant(self):
        tl = fuse_timeline(
            turns=[],
            captions=[cap(0, 60, 0), cap(60, 120, 1), cap(120, 150, 2)],
            duration=MediaTime(150_000),
        )
        for a, b in zip(tl.captions, tl.captions[1:]):
            assert a.interval.end == b.interval.start

    def test_window_index_lookup(self):
        tl = fuse_timeline(
            turns=[],
            captions=[cap(0, 60, 0), cap(60, 120, 1)],
            duration=MediaTime(120_000),
        )
        assert tl.window_index_at(MediaTime(0)) == 0
        assert tl.window_index_at(MediaTime(60_000)) == 1
        assert tl.window_index_at(MediaTime(120_000)) == 1


class TestTranscriptTurn:
    def test_word_timestamps_validated(self):
        words = ((("hi", MediaTime(1_000))), ("there", MediaTime(2_000)))
        t = TranscriptTurn(iv(1, 3), SpeakerRole.TEACHER, "hi there", words)
        assert t.words is not None
        with pytest.raises(RangeError):
            TranscriptTurn(
                iv(1, 3), SpeakerRole.TEACHER, "hi there",
                (("hi", MediaTime(2_500)), ("there", MediaTime(2_000))),
            )
        with pytest.raises(RangeError):
            TranscriptTurn(
                iv(1, 3), SpeakerRole.TEACHER, "hi there",
                (("hi", MediaTime(500)),),
            )

    def test_empty_text_rejected(self):
        with pytest.raises(RangeError):
            TranscriptTurn(iv(0, 1), SpeakerRole.STUDENT, "   ")


class TestRubric:
    def make_dim(self, dim_id="2e"):
        return RubricDimension(
            dimension_id=dim_id,
            title="Organizing Physical Space",
            elements=("safety and accessibility",),
            indicators=("resources within reach",),
            levels=(
                PerformanceLevel("Unsatisfactory", "unsafe or inaccessible"),
                PerformanceLevel("Distinguished", "students adapt the space"),
            ),
        )

    def test_duplicate_dimension_ids_rejected(self):
        with pytest.raises(RangeError):
            Rubric("r", "demo", (self.make_dim(), self.make_dim()))

    def test_lookup(self):
        rubric = Rubric("r", "demo", (self.make_dim("2e"), self.make_dim("3c")))
        assert rubric.dimension("3c").dimension_id == "3c"
        assert not rubric.has_dimension("9z")
        with pytest.raises(RangeError):
            rubric.dimension("9z")

    def test_round_trip_from_dict(self):
        doc = {
            "rubric_id": "demo",
            "name": "Demo",
            "dimensions": [
                {
                    "dimension_id": "1a",
                    "title": "Planning",
                    "elements": [],
                    "indicators": [],
                    "levels": [
                        {"label": "Low", "criteria": "none"},
                        {"label": "High", "criteria": "rich", "examples": ["x"]},
                    ],
                }
            ],
        }
        rubric = rubric_from_dict(doc)
        assert rubric.dimension("1a").levels[1].examples == ("x",)

    def test_too_few_levels_rejected(self):
        with pytest.raises(RangeError):
            RubricDimension("x", "t", (), (), (PerformanceLevel("Only", "c"),))


class TestBloomLevel:
    def test_fixed_ordinals(self):
        assert BloomLevel.REMEMBER == 1
        assert BloomLevel.CREATE == 6
        assert [lv.value for lv in BloomLevel] == [1, 2, 3, 4, 5, 6]


class TestTextUtils:
    def test_split_sentences_offsets(self):
        text = "Great work. What is 2+2? Think hard"
        got = split_sentences(text)
        assert [s for s, _, _ in got] == ["Great work.", "What is 2+2?", "Think hard"]
        for s, start, end in got:
            assert text[start:end] == s

    def test_question_detection(self):
        assert is_question("What is 2+2?")
        assert is_question("How does the water know which way to move.")
        assert not is_question("Open your books.")
        assert not is_question("Think about it")

    def test_quoted_spans_innermost(self):
        assert quoted_spans("see «alpha» and «beta».") == ["alpha", "beta"]
        assert quoted_spans("nested «outer «inner» tail» case") == ["inner"]
        assert quoted_spans("no quotes") == []

    def test_strip_markers(self):
        assert strip_markers("One. «offtask» Two.") == "One. Two."

    def test_sentence_before_marker(self):
        text = "Students compare notes. Several drift to phones. «offtask» The teacher resumes."
        assert sentence_before_marker(text, "«offtask»") == "Several drift to phones."
        lead = "«offtask» The class settles down."
        assert sentence_before_marker(lead, "«offtask»") == "The class settles down."

    def test_content_words(self):
        assert content_words("Check whether the students respond!") == {
            "check", "whether", "students", "respond",
        }
