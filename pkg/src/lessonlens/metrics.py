"""Evaluation metrics: temporal coverage entropy, Jaccard error rate over
labeled time sets, precision/recall/F1, and micro-averaged F1.

Temporal coverage divides the lesson into ``k`` equal bins, turns the event
mass per bin into a probability vector, and reports Shannon entropy
``H = -sum(p * ln p)`` normalized by ``ln k`` so the score ranges from 0
(everything in one bin) to 1 (perfectly balanced).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyTimestamps, EmptyUnion, RangeError
from .model import SpeakerRole
from .timebase import MediaTime, TimeInterval, interval_overlap, merge_intervals, total_measure_ms


@dataclass(frozen=True)
class CoverageReport:
    """Binned distribution of feedback timestamps and its normalized entropy."""

    k: int
    p: tuple[float, ...]
    entropy_nats: float
    normalized: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "p": list(self.p),
            "entropy_nats": self.entropy_nats,
            "normalized": self.normalized,
        }


def default_bin_count(duration: MediaTime, window_ms: int = 120_000) -> int:
    """One bin per captioning window, never fewer than two."""
    return max(2, -(-duration.ms // window_ms))


def temporal_entropy(
    timestamps: list[MediaTime],
    duration: MediaTime,
    k: int | None = None,
    weights: list[float] | None = None,
) -> CoverageReport:
    """Normalized temporal entropy of event timestamps over ``k`` equal bins.

    Bins are ``[i*d/k, (i+1)*d/k)`` with the last bin closed at ``d``. By
    default every event counts 1; pass ``weights`` (e.g. event durations)
    for mass-weighted coverage.
    """
    if not timestamps:
        raise EmptyTimestamps("temporal entropy needs at least one timestamp")
    if duration.ms <= 0:
        raise RangeError("duration must be positive")
    if k is None:
        k = default_bin_count(duration)
    if k < 2:
        raise RangeError(f"bin count must be >= 2, got {k}")
    if weights is not None and len(weights) != len(timestamps):
        raise RangeError("weights must match timestamps one-to-one")

    counts = np.zeros(k, dtype=float)
    for i, ts in enumerate(timestamps):
        if ts.ms < 0 or ts.ms > duration.ms:
            raise RangeError(f"timestamp {ts} outside [0, {duration}]")
        # Exact integer binning; ts == duration lands in the last (closed) bin.
        idx = min(ts.ms * k // duration.ms, k - 1)
        counts[idx] += 1.0 if weights is None else weights[i]

    total = counts.sum()
    if total <= 0:
        raise RangeError("total event mass must be positive")
    p = counts / total
    nonzero = p[p > 0]
    entropy = float(-(nonzero * np.log(nonzero)).sum()) + 0.0  # avoid -0.0
    return CoverageReport(
        k=k,
        p=tuple(float(x) for x in p),
        entropy_nats=entropy,
        normalized=entropy / math.log(k) + 0.0,
    )


@dataclass(frozen=True)
class LabeledTimeSet:
    """Per-role speech intervals, normalized to merged, non-overlapping form."""

    by_role: dict[SpeakerRole, tuple[TimeInterval, ...]]

    @classmethod
    def from_entries(cls, entries: list[tuple[SpeakerRole, TimeInterval]]) -> "LabeledTimeSet":
        grouped: dict[SpeakerRole, list[TimeInterval]] = {}
        for role, interval in entries:
            grouped.setdefault(role, []).append(interval)
        return cls({role: tuple(merge_intervals(ivs)) for role, ivs in grouped.items()})

    def total_ms(self) -> int:
        return sum(total_measure_ms(list(ivs)) for ivs in self.by_role.values())


def jaccard_error_rate(pred: LabeledTimeSet, gold: LabeledTimeSet) -> float:
    """``1 - |A ∩ B| / |A ∪ B|`` where set size is total overlapped duration,
    matched role by role. 0 means identical, 1 means fully disjoint."""
    roles = set(pred.by_role) | set(gold.by_role)
    inter_ms = 0
    union_ms = 0
    for role in roles:
        a = list(pred.by_role.get(role, ()))
        b = list(gold.by_role.get(role, ()))
        inter_ms += sum(
            interval_overlap(x, y).ms for x in a for y in b
        )
        union_ms += total_measure_ms(a + b)
    if union_ms == 0:
        raise EmptyUnion("both labeled time sets are empty")
    return 1.0 - inter_ms / union_ms


@dataclass(frozen=True)
class ClassificationScores:
    """Precision/recall/F1 from raw counts; 0/0 ratios are defined as 0 and flagged."""

    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    degenerate: bool

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "degenerate": self.degenerate,
        }


def prf1(tp: int, fp: int, fn: int) -> ClassificationScores:
    if min(tp, fp, fn) < 0:
        raise RangeError("counts must be non-negative")
    degenerate = False
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision, degenerate = 0.0, True
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall, degenerate = 0.0, True
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return ClassificationScores(tp, fp, fn, precision, recall, f1, degenerate)


@dataclass(frozen=True)
class MultiLabelScores:
    """Micro-averaged scores: counts are summed across classes first."""

    per_class: dict[str, ClassificationScores]
    micro_precision: float
    micro_recall: float
    micro_f1: float
    degenerate: bool = field(default=False)

    def to_dict(self) -> dict:
        return {
            "per_class": {name: s.to_dict() for name, s in sorted(self.per_class.items())},
            "micro_precision": self.micro_precision,
            "micro_recall": self.micro_recall,
            "micro_f1": self.micro_f1,
            "degenerate": self.degenerate,
        }


def micro_f1(per_class_counts: dict[str, tuple[int, int, int]]) -> MultiLabelScores:
    """Aggregate per-class (tp, fp, fn) into micro precision/recall/F1."""
    if not per_class_counts:
        raise RangeError("micro_f1 needs at least one class")
    per_class = {
        name: prf1(tp, fp, fn) for name, (tp, fp, fn) in per_class_counts.items()
    }
    tp = sum(c[0] for c in per_class_counts.values())
    fp = sum(c[1] for c in per_class_counts.values())
    fn = sum(c[2] for c in per_class_counts.values())
    totals = prf1(tp, fp, fn)
    return MultiLabelScores(
        per_class=per_class,
        micro_precision=totals.precision,
        micro_recall=totals.recall,
        micro_f1=totals.f1,
        degenerate=totals.degenerate,
    )
