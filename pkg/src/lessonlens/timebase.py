"""Millisecond-exact time primitives.

All timestamps are stored as integer milliseconds so tiling and overlap
checks are exact; rendering converts to seconds with three decimals.
Intervals are half-open ``[start, end)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RangeError

MS_PER_SECOND = 1000


@dataclass(frozen=True, slots=True, order=True)
class MediaTime:
    """A non-negative instant within a recording, in whole milliseconds."""

    ms: int

    def __post_init__(self) -> None:
        if not isinstance(self.ms, int) or isinstance(self.ms, bool):
            raise RangeError(f"MediaTime needs integer milliseconds, got {self.ms!r}")
        if self.ms < 0:
            raise RangeError(f"MediaTime must be >= 0, got {self.ms}")

    @classmethod
    def from_seconds(cls, seconds: float) -> "MediaTime":
        if seconds != seconds or seconds in (float("inf"), float("-inf")):
            raise RangeError(f"non-finite seconds value: {seconds!r}")
        return cls(round(seconds * MS_PER_SECOND))

    @property
    def seconds(self) -> float:
        return self.ms / MS_PER_SECOND

    def render(self) -> str:
        """Seconds with exactly three decimal places, e.g. ``312.000``."""
        return f"{self.ms / MS_PER_SECOND:.3f}"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True, slots=True)
class TimeInterval:
    """Half-open interval ``[start, end)`` with strictly positive duration."""

    start: MediaTime
    end: MediaTime

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise RangeError(
                f"interval start must precede end, got [{self.start}, {self.end})"
            )

    @classmethod
    def from_ms(cls, start_ms: int, end_ms: int) -> "TimeInterval":
        return cls(MediaTime(start_ms), MediaTime(end_ms))

    @property
    def duration(self) -> MediaTime:
        return MediaTime(self.end.ms - self.start.ms)

    def contains(self, t: MediaTime) -> bool:
        return self.start.ms <= t.ms < self.end.ms

    def overlaps(self, other: "TimeInterval") -> bool:
        return interval_overlap(self, other).ms > 0

    def render(self) -> str:
        return f"{self.start.render()}-{self.end.render()}"


def interval_overlap(a: TimeInterval, b: TimeInterval) -> MediaTime:
    """Length of ``a ∩ b``; symmetric; zero when disjoint or merely touching."""
    lo = max(a.start.ms, b.start.ms)
    hi = min(a.end.ms, b.end.ms)
    return MediaTime(max(0, hi - lo))


def merge_intervals(intervals: list[TimeInterval]) -> list[TimeInterval]:
    """Normalize a set of intervals: sorted, overlapping or adjacent ones merged."""
    if not intervals:
        return []
    ordered = sorted(intervals, key=lambda iv: (iv.start.ms, iv.end.ms))
    merged = [ordered[0]]
    for iv in ordered[1:]:
        last = merged[-1]
        if iv.start.ms <= last.end.ms:
            if iv.end.ms > last.end.ms:
                merged[-1] = TimeInterval(last.start, iv.end)
        else:
            merged.append(iv)
    return merged


def total_measure_ms(intervals: list[TimeInterval]) -> int:
    """Total covered duration in ms after normalization."""
    return sum(iv.end.ms - iv.start.ms for iv in merge_intervals(intervals))
