"""Tour of the evaluation metrics on small, hand-checkable inputs.

Run:  python3 demos/demo_metrics.py
"""

from lessonlens import (
    LabeledTimeSet,
    MediaTime,
    SpeakerRole,
    TimeInterval,
    jaccard_error_rate,
    micro_f1,
    prf1,
    temporal_entropy,
)


def seconds(s: float) -> MediaTime:
    return MediaTime(round(s * 1000))


print("== temporal coverage entropy ==")
duration = seconds(600)

concentrated = temporal_entropy([seconds(30), seconds(40), seconds(50)], duration, k=5)
print(f"all feedback in one bin      -> H_norm = {concentrated.normalized:.3f}")

balanced = temporal_entropy(
    [seconds(60), seconds(180), seconds(300), seconds(420), seconds(540)], duration, k=5
)
print(f"one item per bin             -> H_norm = {balanced.normalized:.3f}")

lopsided = temporal_entropy(
    [seconds(10), seconds(20), seconds(30), seconds(400)], duration, k=2
)
print(f"3:1 split over two bins      -> H_norm = {lopsided.normalized:.6f} (≈0.811278)")

print()
print("== Jaccard error rate over labeled speech ==")
teacher = SpeakerRole.TEACHER
pred = LabeledTimeSet.from_entries([(teacher, TimeInterval(seconds(0), seconds(10)))])
gold = LabeledTimeSet.from_entries([(teacher, TimeInterval(seconds(5), seconds(15)))])
print(f"10s segments, 5s overlap     -> JER = {jaccard_error_rate(pred, gold):.4f} (= 1 - 5/15)")
print(f"identical sets               -> JER = {jaccard_error_rate(pred, pred):.4f}")

print()
print("== precision / recall / F1 ==")
scores = prf1(tp=93, fp=0, fn=7)
print(f"P=1.00  R=0.93               -> F1 = {scores.f1:.4f} (rounds to 0.964)")

print()
print("== micro-averaged F1 across activity codes ==")
multi = micro_f1({"TEACHER_QA": (2, 1, 1), "STUDENT_GROUP_WORK": (1, 0, 1)})
print(
    "summed TP=3 FP=1 FN=2        -> "
    f"microP={multi.micro_precision:.2f} microR={multi.micro_recall:.2f} "
    f"microF1={multi.micro_f1:.4f}"
)
