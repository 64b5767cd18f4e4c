"""Feedback pipeline walkthrough on an in-memory four-window lesson.

A deterministic backend reads planted «markers» in the captions, so the
whole flow — hotspots, guidelines, drafts, validation — runs hermetically.
One caption fabricates evidence on purpose to show the audit path.

Run:  python3 demos/demo_pipeline.py
"""

from lessonlens import (
    CaptionSegment,
    MediaTime,
    MockBackend,
    ModelGateway,
    SpeakerRole,
    TimeInterval,
    TranscriptTurn,
    fuse_timeline,
    run_pipeline,
)
from lessonlens.pipeline import PipelinePolicy
from lessonlens.resources import default_rubric


def seconds(s: float) -> MediaTime:
    return MediaTime(round(s * 1000))


def window(i: int, text: str) -> CaptionSegment:
    return CaptionSegment(
        TimeInterval(seconds(i * 120), seconds((i + 1) * 120)), text, i
    )


captions = [
    window(0, "The teacher greets returning students by name at the door. «rapport» Bags are stowed quickly."),
    window(1, "Hands go up across the room after the challenge prompt. «handsup» Pairs debate their predictions."),
    window(2, "Two students drift to their phones during the worked example. «offtask» The teacher pushes on."),
    window(3, "Teams log results in shared notebooks before cleanup. «fabricated» The teacher circulates."),
]
turns = [
    TranscriptTurn(TimeInterval(seconds(5), seconds(12)), SpeakerRole.TEACHER,
                   "Welcome back, let's pick up our investigation."),
    TranscriptTurn(TimeInterval(seconds(130), seconds(138)), SpeakerRole.TEACHER,
                   "Who can explain what the graph is telling us?"),
    TranscriptTurn(TimeInterval(seconds(140), seconds(146)), SpeakerRole.STUDENT,
                   "The slope means the water moved faster at the start."),
]

timeline = fuse_timeline(turns, captions, seconds(480), lesson_id="demo-lesson")
gateway = ModelGateway(MockBackend(), sleeper=lambda s: None)
report = run_pipeline(
    timeline,
    default_rubric(),
    gateway,
    PipelinePolicy(generated_at="2025-01-01T00:00:00Z"),
)

print(f"validated items: {len(report.items)}   audit (rejected): {len(report.rejected)}")
print()
for item in report.items:
    print(f"[{item.polarity.value:8s}] {item.interval.render()}  dim {item.dimension_id}")
    print(f"  {item.content}")
    print(f"  observed: {item.observed_behaviors}")
    print(f"  advice:   {item.actionable_advice}")
    print()

for item in report.rejected:
    print(f"[REJECTED ] {item.feedback_id}: {item.validation.rationale}")

print()
print(f"backend calls: {gateway.stats.backend_calls}, cache hits: {gateway.stats.cache_hits}")
print("re-running with the warm cache ...")
report_again = run_pipeline(
    timeline, default_rubric(), gateway, PipelinePolicy(generated_at="2025-01-01T00:00:00Z")
)
print(
    f"identical report: {report_again == report}; "
    f"backend calls unchanged: {gateway.stats.backend_calls}"
)
