"""Self-contained written report rendered from the lesson's artifacts.

Strengths come first, then growth areas, then the objective annotations —
the order teachers asked written feedback to follow. Markdown keeps the
file diffable and readable anywhere.
"""

from __future__ import annotations

from .store import LessonRecord
from .timebase import MediaTime


def _ts(ms: int) -> str:
    return MediaTime(ms).render()


def _item_block(item: dict) -> list[str]:
    lines = [
        f"### {_ts(item['start_ms'])}–{_ts(item['end_ms'])} · dimension {item['dimension_id']}",
        "",
        item["content"],
        "",
        f"*Observed:* {item['observed_behaviors']}",
        "",
        f"*Try next:* {item['actionable_advice']}",
        "",
    ]
    return lines


def render_markdown_report(
    record: LessonRecord,
    feedback: dict,
    annotations: dict | None = None,
    recommendations: dict | None = None,
) -> str:
    lines: list[str] = [
        f"# Lesson report: {record.title or record.lesson_id}",
        "",
        f"- lesson id: `{record.lesson_id}`",
        f"- duration: {_ts(record.duration_ms)} s",
        f"- generated: {feedback['generated_at']}",
        "",
    ]

    strengths = [i for i in feedback["items"] if i["polarity"] == "STRENGTH"]
    weaknesses = [i for i in feedback["items"] if i["polarity"] == "WEAKNESS"]

    lines += ["## Strengths", ""]
    if strengths:
        for item in strengths:
            lines += _item_block(item)
    else:
        lines += ["No validated strengths were identified.", ""]

    lines += ["## Growth areas", ""]
    if weaknesses:
        for item in weaknesses:
            lines += _item_block(item)
    else:
        lines += ["No validated growth areas were identified.", ""]

    if feedback.get("rejected"):
        lines += [
            "## Audit: items removed by evidence validation",
            "",
        ]
        for item in feedback["rejected"]:
            reason = (item.get("validation") or {}).get("rationale", "")
            lines += [f"- `{item['feedback_id']}` at {_ts(item['start_ms'])}: {reason}", ""]

    if recommendations is not None and recommendations.get("entries"):
        lines += ["## Exemplar clips", ""]
        for entry in recommendations["entries"]:
            lines.append(f"- for `{entry['feedback_id']}` (query: *{entry['query']}*):")
            for result in entry["results"]:
                lines.append(
                    f"  - `{result['clip_id']}` — {result['explanation']}"
                )
        lines.append("")

    if annotations is not None:
        lines += ["## Lesson outline", ""]
        for section in annotations["outline"]:
            lines.append(
                f"- {_ts(section['start_ms'])}–{_ts(section['end_ms'])} **{section['heading']}** — {section['summary']}"
            )
        lines.append("")

        lines += ["## Question profile (cognitive demand 1–6)", ""]
        histogram = annotations["bloom_histogram"]
        total = sum(histogram.values())
        for level in map(str, range(1, 7)):
            count = histogram.get(level, 0)
            bar = "█" * count
            lines.append(f"- level {level}: {count} {bar}")
        lines += ["", f"{total} teacher questions in total.", ""]

        lines += ["## Activity summary", ""]
        totals: dict[str, int] = {}
        for span in annotations["activities"]:
            span_ms = span["end_ms"] - span["start_ms"]
            for code in span["labels"]:
                totals[code] = totals.get(code, 0) + span_ms
        for code in sorted(totals):
            minutes = totals[code] / 60_000
            lines.append(f"- {code}: {minutes:.1f} min")
        lines.append("")

    return "\n".join(lines)
