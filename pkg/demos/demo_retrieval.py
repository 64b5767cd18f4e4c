"""Exemplar clip retrieval: embed, rank by cosine, rerank with explanations.

Run:  python3 demos/demo_retrieval.py
"""

from lessonlens import (
    ExemplarClip,
    MockBackend,
    ModelGateway,
    build_index,
    rerank_filter,
    retrieve_top_k,
)

clips = [
    ExemplarClip("wait-time", "Wait Time that Works",
                 "The teacher builds wait time into questioning before prompts are rephrased",
                 ("questioning",), "media/wait-time.mp4"),
    ExemplarClip("stations", "Stations that Run Themselves",
                 "Students rotate jobs to restock materials stations without direction",
                 ("space",), "media/stations.mp4"),
    ExemplarClip("norms", "Rebuilding Discussion Norms",
                 "The class resets its norm for respectful responses using sentence stems",
                 ("respect",), "media/norms.mp4"),
    ExemplarClip("goggles", "Lab Safety in Two Minutes",
                 "A quick goggle and apron routine before wet labs",
                 ("safety",), "media/goggles.mp4"),
]

gateway = ModelGateway(MockBackend(), sleeper=lambda s: None)
index = build_index(clips, gateway)
print(f"indexed {len(index)} clips at dim {index.dim}")

query = "questioning techniques wait prompts discussion"
candidates = retrieve_top_k(query, index, gateway, k=4)
print(f"\nquery: {query!r}")
print("cosine ranking:")
for clip_id, score in candidates:
    print(f"  {score:+.3f}  {clip_id}")

results = rerank_filter(query, candidates, index, gateway, max_results=3)
print("\nafter rerank/filter (word-overlap rule):")
for r in results:
    print(f"  {r.clip_id}: {r.explanation}")
