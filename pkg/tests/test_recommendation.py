"""Clip index construction, cosine retrieval, and the reranking filter."""

from __future__ import annotations

import pytest

from lessonlens.errors import RangeError
from lessonlens.gateway import ModelGateway
from lessonlens.mock_backend import MockBackend
from lessonlens.pipeline import FeedbackItem, FeedbackStatus, Polarity
from lessonlens.gateway import ValidationVerdict
from lessonlens.recommendation import (
    ClipIndex,
    ExemplarClip,
    build_index,
    build_query,
    load_clips_csv,
    load_index,
    rerank_filter,
    retrieve_top_k,
    save_index,
)
from lessonlens.resources import default_rubric
from lessonlens.timebase import TimeInterval, MediaTime


def gateway() -> ModelGateway:
    return ModelGateway(MockBackend(), sleeper=lambda s: None)


def clip(clip_id, description, title="Clip"):
    return ExemplarClip(
        clip_id=clip_id, title=title, description=description, tags=("demo",), uri=f"media/{clip_id}.mp4"
    )


def unit(*values):
    norm = sum(v * v for v in values) ** 0.5
    return [v / norm for v in values]


def axis_vector(axis: int) -> list[float]:
    vec = [0.0] * 16
    vec[axis] = 1.0
    return vec


def validated_item(dimension_id="3b", advice="Plan follow-up prompts and wait time for discussion."):
    return FeedbackItem(
        feedback_id="fb-1",
        dimension_id=dimension_id,
        interval=TimeInterval(MediaTime(0), MediaTime(120_000)),
        polarity=Polarity.WEAKNESS,
        content="Growth area",
        observed_behaviors="The record shows: «students waited»",
        actionable_advice=advice,
        validation=ValidationVerdict(consistent=True, rationale="ok"),
        status=FeedbackStatus.VALIDATED,
    )


class TestClipIndex:
    def test_duplicate_ids_rejected(self):
        clips = [clip("a", "x"), clip("a", "y")]
        with pytest.raises(RangeError, match="unique"):
            ClipIndex(clips, {"a": axis_vector(0)})

    def test_missing_vector_rejected(self):
        with pytest.raises(RangeError, match="missing"):
            ClipIndex([clip("a", "x")], {})

    def test_round_trip_through_disk(self, tmp_path):
        index = build_index([clip("a", "questioning wait time"), clip("b", "group roles")], gateway())
        save_index(index, tmp_path / "index")
        loaded = load_index(tmp_path / "index")
        assert [c.clip_id for c in loaded.clips] == ["a", "b"]
        assert loaded.vectors == index.vectors
        assert loaded.dim == 16

    def test_csv_loading(self, tmp_path):
        path = tmp_path / "clips.csv"
        path.write_text(
            "clip_id,title,description,tags,uri\n"
            "c1,Wait time,Teacher demonstrates wait time,questioning;discussion,media/c1.mp4\n",
            "utf-8",
        )
        clips = load_clips_csv(path)
        assert clips[0].tags == ("questioning", "discussion")


class TestRetrieveTopK:
    def orthogonal_index(self):
        clips = [clip("A", "first axis"), clip("B", "second axis")]
        return ClipIndex(clips, {"A": axis_vector(0), "B": axis_vector(1)})

    def test_identity_and_orthogonal_geometry(self):
        class AxisEmbedder(MockBackend):
            def _embed(self, request):
                return {"values": axis_vector(0)}

        gw = ModelGateway(AxisEmbedder(), sleeper=lambda s: None)
        got = retrieve_top_k("anything", self.orthogonal_index(), gw, k=2)
        assert got[0] == ("A", pytest.approx(1.0))
        assert got[1] == ("B", pytest.approx(0.0))

    def test_k_clamped_to_index_size(self):
        index = build_index([clip(f"c{i}", f"topic {i}") for i in range(3)], gateway())
        got = retrieve_top_k("topic", index, gateway(), k=10)
        assert len(got) == 3

    def test_equal_vectors_tie_break_on_id(self):
        clips = [clip("zeta", "same"), clip("alpha", "same")]
        index = ClipIndex(clips, {"zeta": axis_vector(3), "alpha": axis_vector(3)})
        got = retrieve_top_k("query", index, gateway(), k=2)
        assert [cid for cid, _ in got] == ["alpha", "zeta"]

    def test_scores_non_increasing_and_ids_exist(self):
        index = build_index([clip(f"c{i}", f"unique topic {i}") for i in range(8)], gateway())
        got = retrieve_top_k("teaching question discussion", index, gateway(), k=8)
        scores = [s for _, s in got]
        assert scores == sorted(scores, reverse=True)
        ids = {c.clip_id for c in index.clips}
        assert all(cid in ids for cid, _ in got)

    def test_empty_index_rejected(self):
        with pytest.raises(RangeError):
            retrieve_top_k("q", ClipIndex([], {}), gateway())


class TestRerankFilter:
    def word_index(self):
        clips = [
            clip("c1", "students practice discussion prompts with wait time"),
            clip("c2", "laboratory safety goggles demonstration"),
            clip("c3", "teacher models questioning techniques for discussion"),
        ]
        return build_index(clips, gateway())

    def test_word_overlap_filter_preserves_cosine_order(self):
        index = self.word_index()
        candidates = retrieve_top_k("questioning discussion practice", index, gateway(), k=3)
        results = rerank_filter("questioning discussion practice", candidates, index, gateway())
        kept_ids = [r.clip_id for r in results]
        assert set(kept_ids) == {"c1", "c3"}
        candidate_order = [cid for cid, _ in candidates if cid in set(kept_ids)]
        assert kept_ids == candidate_order
        assert all(r.explanation for r in results)

    def test_no_survivors_is_valid(self):
        index = self.word_index()
        candidates = retrieve_top_k("zzz qqq xyzzy", index, gateway(), k=3)
        assert rerank_filter("zzz qqq xyzzy", candidates, index, gateway()) == []

    def test_max_results_truncates(self):
        index = self.word_index()
        candidates = retrieve_top_k("discussion", index, gateway(), k=3)
        results = rerank_filter("discussion", candidates, index, gateway(), max_results=1)
        assert len(results) == 1

    def test_min_results_backfills_from_candidates(self):
        index = self.word_index()
        candidates = retrieve_top_k("zzz qqq xyzzy", index, gateway(), k=2)
        results = rerank_filter(
            "zzz qqq xyzzy", candidates, index, gateway(), min_results=1, max_results=3
        )
        assert len(results) == 1
        assert results[0].clip_id in {cid for cid, _ in candidates}

    def test_output_subset_of_candidates(self):
        index = self.word_index()
        candidates = retrieve_top_k("discussion practice", index, gateway(), k=2)
        results = rerank_filter("discussion practice", candidates, index, gateway())
        assert {r.clip_id for r in results} <= {cid for cid, _ in candidates}


class TestBuildQuery:
    def test_query_contains_dimension_title(self):
        query = build_query(validated_item(), default_rubric(), gateway())
        assert "Using Questioning and Discussion Techniques" in query

    def test_rejected_item_refused(self):
        item = validated_item()
        from dataclasses import replace

        rejected = replace(
            item,
            validation=ValidationVerdict(consistent=False, rationale="bad"),
            status=FeedbackStatus.REJECTED,
        )
        with pytest.raises(RangeError):
            build_query(rejected, default_rubric(), gateway())

    def test_deterministic(self):
        a = build_query(validated_item(), default_rubric(), gateway())
        b = build_query(validated_item(), default_rubric(), gateway())
        assert a == b
