"""Metric formula tests, checked against independent oracles where derived."""

from __future__ import annotations

import math
import random

import pytest

from lessonlens.errors import EmptyTimestamps, EmptyUnion, RangeError
from lessonlens.metrics import (
    LabeledTimeSet,
    default_bin_count,
    jaccard_error_rate,
    micro_f1,
    prf1,
    temporal_entropy,
)
from lessonlens.model import SpeakerRole
from lessonlens.timebase import MediaTime, TimeInterval

from oracles import entropy_by_histogram, jer_by_counting

T = SpeakerRole.TEACHER
S = SpeakerRole.STUDENT


def mt(seconds: float) -> MediaTime:
    return MediaTime(round(seconds * 1000))


def iv(start_s: float, end_s: float) -> TimeInterval:
    return TimeInterval(mt(start_s), mt(end_s))


class TestTemporalEntropy:
    def test_single_bin_concentration_is_zero(self):
        report = temporal_entropy([mt(5), mt(6), mt(7)], mt(600), k=5)
        assert report.entropy_nats == 0.0
        assert report.normalized == 0.0

    def test_uniform_two_bins_is_one(self):
        report = temporal_entropy([mt(10), mt(110)], mt(120), k=2)
        assert report.normalized == pytest.approx(1.0, abs=1e-9)

    def test_two_bins_three_one_split(self):
        # frozen from the histogram+Shannon oracle: p=(0.75, 0.25)
        report = temporal_entropy([mt(1), mt(2), mt(3), mt(70)], mt(120), k=2)
        assert report.entropy_nats == pytest.approx(0.5623351446188083, abs=1e-9)
        assert report.normalized == pytest.approx(0.8112781244591328, abs=1e-9)

    def test_probabilities_sum_to_one(self):
        report = temporal_entropy([mt(3), mt(50), mt(99)], mt(100), k=7)
        assert sum(report.p) == pytest.approx(1.0, abs=1e-9)
        assert 0.0 <= report.normalized <= 1.0

    def test_timestamp_at_duration_lands_in_last_bin(self):
        report = temporal_entropy([mt(120)], mt(120), k=4)
        assert report.p[-1] == 1.0

    def test_default_bin_count_follows_window_grid(self):
        assert default_bin_count(mt(1800)) == 15
        assert default_bin_count(mt(120)) == 2   # floor of 2
        assert default_bin_count(mt(250)) == 3

    def test_permutation_invariance(self):
        stamps = [mt(5), mt(300), mt(800), mt(801)]
        a = temporal_entropy(stamps, mt(900), k=9)
        b = temporal_entropy(list(reversed(stamps)), mt(900), k=9)
        assert a == b

    def test_scale_invariance(self):
        a = temporal_entropy([mt(10), mt(25), mt(90)], mt(100), k=4)
        b = temporal_entropy([mt(100), mt(250), mt(900)], mt(1000), k=4)
        assert a.normalized == pytest.approx(b.normalized, abs=1e-12)

    def test_randomized_against_oracle(self):
        rng = random.Random(20240817)
        for _ in range(100):
            duration = rng.randint(1_000, 3_600_000)
            k = rng.randint(2, 40)
            n = rng.randint(1, 60)
            stamps = [rng.randint(0, duration) for _ in range(n)]
            want_h, want_norm = entropy_by_histogram(stamps, duration, k)
            got = temporal_entropy([MediaTime(s) for s in stamps], MediaTime(duration), k=k)
            assert got.entropy_nats == pytest.approx(want_h, abs=1e-9)
            assert got.normalized == pytest.approx(want_norm, abs=1e-9)

    def test_duration_weighted_mode(self):
        # weights (3, 1) in separate bins reproduce the 3:1 split entropy
        report = temporal_entropy([mt(1), mt(70)], mt(120), k=2, weights=[3.0, 1.0])
        assert report.normalized == pytest.approx(0.8112781244591328, abs=1e-9)

    def test_empty_timestamps_rejected(self):
        with pytest.raises(EmptyTimestamps):
            temporal_entropy([], mt(100))

    def test_out_of_range_timestamp_rejected(self):
        with pytest.raises(RangeError):
            temporal_entropy([mt(101)], mt(100), k=2)


class TestJaccardErrorRate:
    def test_identity_is_zero(self):
        a = LabeledTimeSet.from_entries([(T, iv(0, 10)), (S, iv(10, 20))])
        assert jaccard_error_rate(a, a) == 0.0

    def test_disjoint_is_one(self):
        pred = LabeledTimeSet.from_entries([(T, iv(0, 10))])
        gold = LabeledTimeSet.from_entries([(S, iv(0, 10))])
        assert jaccard_error_rate(pred, gold) == 1.0

    def test_partial_overlap_same_role(self):
        # oracle (1 ms counting): inter 5 s, union 15 s -> 1 - 1/3
        pred = LabeledTimeSet.from_entries([(T, iv(0, 10))])
        gold = LabeledTimeSet.from_entries([(T, iv(5, 15))])
        got = jaccard_error_rate(pred, gold)
        assert got == pytest.approx(2 / 3, abs=1e-9)
        assert got == pytest.approx(jer_by_counting([("T", 0, 10_000)], [("T", 5_000, 15_000)]), abs=1e-9)

    def test_symmetry(self):
        pred = LabeledTimeSet.from_entries([(T, iv(0, 8)), (S, iv(8, 12))])
        gold = LabeledTimeSet.from_entries([(T, iv(4, 10)), (S, iv(9, 15))])
        assert jaccard_error_rate(pred, gold) == pytest.approx(
            jaccard_error_rate(gold, pred), abs=1e-12
        )

    def test_growing_overlap_never_increases_error(self):
        gold = LabeledTimeSet.from_entries([(T, iv(10, 20))])
        last = 1.0
        for shift in (0, 2, 4, 6, 8, 10):
            pred = LabeledTimeSet.from_entries([(T, iv(shift, shift + 10))])
            err = jaccard_error_rate(pred, gold)
            assert err <= last + 1e-12
            last = err
        assert last == 0.0

    def test_randomized_against_counting_oracle(self):
        rng = random.Random(7151)
        roles = [T, S]
        for _ in range(100):
            def random_set():
                entries = []
                raw = []
                for _ in range(rng.randint(1, 5)):
                    role = rng.choice(roles)
                    start = rng.randint(0, 4_000)
                    end = start + rng.randint(1, 2_000)
                    entries.append((role, TimeInterval(MediaTime(start), MediaTime(end))))
                    raw.append((role.value, start, end))
                return LabeledTimeSet.from_entries(entries), raw

            pred, pred_raw = random_set()
            gold, gold_raw = random_set()
            got = jaccard_error_rate(pred, gold)
            want = jer_by_counting(pred_raw, gold_raw)
            assert got == pytest.approx(want, abs=1e-6)

    def test_empty_union_rejected(self):
        empty = LabeledTimeSet.from_entries([])
        with pytest.raises(EmptyUnion):
            jaccard_error_rate(empty, empty)


class TestPrf1:
    def test_paper_style_precision_one_recall_093(self):
        scores = prf1(tp=93, fp=0, fn=7)
        assert scores.precision == 1.0
        assert scores.recall == pytest.approx(0.93, abs=1e-12)
        assert scores.f1 == pytest.approx(0.9637, abs=1e-3)
        assert round(scores.f1, 3) == 0.964

    def test_all_zero_is_degenerate(self):
        scores = prf1(0, 0, 0)
        assert (scores.precision, scores.recall, scores.f1) == (0.0, 0.0, 0.0)
        assert scores.degenerate

    def test_perfect_single_hit(self):
        scores = prf1(1, 0, 0)
        assert (scores.precision, scores.recall, scores.f1) == (1.0, 1.0, 1.0)
        assert not scores.degenerate

    def test_negative_counts_rejected(self):
        with pytest.raises(RangeError):
            prf1(-1, 0, 0)


class TestMicroF1:
    def test_toy_confusion(self):
        # hand-computed: P=3/4, R=3/5, F1 = 2*.75*.6/1.35 = 0.666...
        scores = micro_f1({"a": (2, 1, 1), "b": (1, 0, 1)})
        assert scores.micro_precision == pytest.approx(0.75, abs=1e-12)
        assert scores.micro_recall == pytest.approx(0.6, abs=1e-12)
        assert scores.micro_f1 == pytest.approx(0.6666666666666666, abs=1e-4)

    def test_all_zero_flagged(self):
        scores = micro_f1({"a": (0, 0, 0)})
        assert scores.micro_f1 == 0.0
        assert scores.degenerate

    def test_single_class_reduces_to_prf1(self):
        single = micro_f1({"only": (5, 2, 3)})
        plain = prf1(5, 2, 3)
        assert single.micro_precision == plain.precision
        assert single.micro_recall == plain.recall
        assert single.micro_f1 == plain.f1

    def test_no_classes_rejected(self):
        with pytest.raises(RangeError):
            micro_f1({})
