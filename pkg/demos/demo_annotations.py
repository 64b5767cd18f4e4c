"""Objective annotations: activity coding, question profile, outline.

Run:  python3 demos/demo_annotations.py
"""

from lessonlens import (
    CaptionSegment,
    MediaTime,
    MockBackend,
    ModelGateway,
    SpeakerRole,
    TimeInterval,
    TranscriptTurn,
    build_annotations,
    fuse_timeline,
)
from lessonlens.annotations import ActivityTaxonomy
from lessonlens.resources import default_taxonomy


def seconds(s: float) -> MediaTime:
    return MediaTime(round(s * 1000))


captions = [
    CaptionSegment(TimeInterval(seconds(0), seconds(120)),
                   "The teacher opens with a demonstration at the front bench.", 0),
    CaptionSegment(TimeInterval(seconds(120), seconds(240)),
                   "«shift:Independent Practice» Tables pull materials and start the trial. «groupwork» The teacher circulates.", 1),
]
turns = [
    TranscriptTurn(TimeInterval(seconds(4), seconds(16)), SpeakerRole.TEACHER,
                   "Watch the dye closely. Who can identify where it spreads first?"),
    TranscriptTurn(TimeInterval(seconds(18), seconds(24)), SpeakerRole.STUDENT,
                   "It spreads near the warm side!"),
    TranscriptTurn(TimeInterval(seconds(130), seconds(140)), SpeakerRole.TEACHER,
                   "Compare your second trial with the first one before you log it?"),
]

timeline = fuse_timeline(turns, captions, seconds(240), lesson_id="demo-annotations")
gateway = ModelGateway(MockBackend(), sleeper=lambda s: None)
taxonomy = ActivityTaxonomy.from_dict(default_taxonomy())

activities, questions, histogram, outline = build_annotations(timeline, taxonomy, gateway)

print("== activity spans (per actor, co-occurring codes share a span) ==")
for span in activities:
    codes = ", ".join(sorted(label.code for label in span.labels))
    print(f"  {span.interval.render()}  {codes}")

print()
print("== teacher questions with cognitive-demand levels ==")
for q in questions:
    print(f"  L{int(q.bloom)}  {q.interval.render()}  {q.text}")
    print(f"       {q.justification}")

print()
print("== question distribution ==")
for level, count in histogram.items():
    print(f"  level {int(level)} ({level.name.title()}): {count}")

print()
print("== outline ==")
for section in outline:
    print(f"  {section.interval.render()}  {section.heading}: {section.summary}")
