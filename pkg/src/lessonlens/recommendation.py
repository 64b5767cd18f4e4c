"""Coarse-to-fine exemplar clip retrieval.

A local clip index (metadata JSON plus an embedding sidecar) stands in for
an external video library. Retrieval is brute-force cosine over unit
vectors — exact, and trivial at a few thousand clips — followed by a
reranking filter with per-clip explanations.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .artifacts import SCHEMA_VERSION, dump_canonical
from .errors import ParseError, RangeError
from .gateway import ModelGateway, StructuredRequest
from .model import Rubric
from .pipeline import FeedbackItem, FeedbackReport, FeedbackStatus
from .prompts import render_candidates

_QUERY_INSTRUCTIONS = "Build a short search query for exemplar teaching clips."
_RERANK_INSTRUCTIONS = (
    "Keep only candidates that genuinely illustrate the queried practice and "
    "explain each kept clip's relevance."
)


@dataclass(frozen=True)
class ExemplarClip:
    clip_id: str
    title: str
    description: str
    tags: tuple[str, ...]
    uri: str

    def __post_init__(self) -> None:
        if not self.description.strip():
            raise RangeError(f"clip {self.clip_id!r} needs a description")


@dataclass(frozen=True)
class RecommendationResult:
    clip_id: str
    score: float
    explanation: str

    def __post_init__(self) -> None:
        if not self.explanation.strip():
            raise RangeError("recommendation needs an explanation")


class ClipIndex:
    """Immutable after construction; every clip has a vector of the index dim."""

    def __init__(self, clips: list[ExemplarClip], vectors: dict[str, list[float]]):
        ids = [c.clip_id for c in clips]
        if len(set(ids)) != len(ids):
            raise RangeError("clip ids must be unique")
        missing = [c.clip_id for c in clips if c.clip_id not in vectors]
        if missing:
            raise RangeError(f"clips missing vectors: {missing}")
        dims = {len(v) for v in vectors.values()}
        if len(dims) > 1:
            raise RangeError(f"mixed vector dims in index: {sorted(dims)}")
        self.clips = tuple(sorted(clips, key=lambda c: c.clip_id))
        self.vectors = {cid: list(map(float, vec)) for cid, vec in vectors.items()}
        self.dim = dims.pop() if dims else 0
        self._matrix = np.array([self.vectors[c.clip_id] for c in self.clips], dtype=float)

    def __len__(self) -> int:
        return len(self.clips)

    def clip(self, clip_id: str) -> ExemplarClip:
        for c in self.clips:
            if c.clip_id == clip_id:
                return c
        raise RangeError(f"no clip {clip_id!r} in index")


def load_clips_csv(path: str | Path) -> list[ExemplarClip]:
    """Clip metadata CSV: clip_id,title,description,tags,uri with ';'-joined tags."""
    path = Path(path)
    if not path.exists():
        raise ParseError("clip metadata file not found", path=str(path))
    clips = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"clip_id", "title", "description", "tags", "uri"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ParseError(
                f"clip CSV must have columns {sorted(required)}", path=str(path)
            )
        for line_no, row in enumerate(reader, start=2):
            tags = tuple(t.strip() for t in row["tags"].split(";") if t.strip())
            try:
                clips.append(
                    ExemplarClip(
                        clip_id=row["clip_id"].strip(),
                        title=row["title"].strip(),
                        description=row["description"].strip(),
                        tags=tags,
                        uri=row["uri"].strip(),
                    )
                )
            except RangeError as exc:
                raise ParseError(str(exc), path=str(path), line=line_no) from exc
    return clips


def build_index(clips: list[ExemplarClip], gateway: ModelGateway) -> ClipIndex:
    vectors = {
        clip.clip_id: list(gateway.embed(f"{clip.title}. {clip.description}").values)
        for clip in clips
    }
    return ClipIndex(clips, vectors)


def save_index(index: ClipIndex, directory: str | Path) -> None:
    """Write clips.json and the vectors sidecar; replace atomically."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    clips_doc = {
        "schema_version": SCHEMA_VERSION,
        "clips": [
            {
                "clip_id": c.clip_id,
                "title": c.title,
                "description": c.description,
                "tags": list(c.tags),
                "uri": c.uri,
            }
            for c in index.clips
        ],
    }
    vectors_doc = {"schema_version": SCHEMA_VERSION, "dim": index.dim, "vectors": index.vectors}
    for name, doc in (("clips.json", clips_doc), ("vectors.json", vectors_doc)):
        tmp = directory / f".{name}.tmp-{os.getpid()}"
        tmp.write_bytes(dump_canonical(doc))
        os.replace(tmp, directory / name)


def load_index(directory: str | Path) -> ClipIndex:
    directory = Path(directory)
    clips_doc = json.loads((directory / "clips.json").read_text("utf-8"))
    vectors_doc = json.loads((directory / "vectors.json").read_text("utf-8"))
    clips = [
        ExemplarClip(
            clip_id=c["clip_id"],
            title=c["title"],
            description=c["description"],
            tags=tuple(c["tags"]),
            uri=c["uri"],
        )
        for c in clips_doc["clips"]
    ]
    return ClipIndex(clips, vectors_doc["vectors"])


def build_query(item: FeedbackItem, rubric: Rubric, gateway: ModelGateway, seed: int = 0) -> str:
    if item.status is not FeedbackStatus.VALIDATED:
        raise RangeError("queries are built only for validated feedback items")
    dim = rubric.dimension(item.dimension_id)
    request = StructuredRequest(
        task_tag="search_query",
        prompt_sections=(
            ("instructions", _QUERY_INSTRUCTIONS),
            ("dimension_title", dim.title),
            ("advice", item.actionable_advice),
        ),
        response_schema_id="search_query/v1",
        determinism_seed=seed,
    )
    return gateway.generate(request).payload["query"]


def retrieve_top_k(
    query: str, index: ClipIndex, gateway: ModelGateway, k: int = 10
) -> list[tuple[str, float]]:
    """Top-k clips by cosine similarity; ties break on ascending clip id."""
    if len(index) == 0:
        raise RangeError("index is empty")
    if k < 1:
        raise RangeError("k must be >= 1")
    query_vec = np.array(gateway.embed(query).values, dtype=float)
    matrix_norms = np.linalg.norm(index._matrix, axis=1)
    query_norm = np.linalg.norm(query_vec)
    cosines = (index._matrix @ query_vec) / (matrix_norms * query_norm)
    ranked = sorted(
        zip((c.clip_id for c in index.clips), cosines.tolist()),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return ranked[:k]


def rerank_filter(
    query: str,
    candidates: list[tuple[str, float]],
    index: ClipIndex,
    gateway: ModelGateway,
    min_results: int = 0,
    max_results: int = 3,
    seed: int = 0,
) -> list[RecommendationResult]:
    """Filter candidates down to the ones worth showing, preserving cosine
    order; never invents clips that were not retrieved."""
    if not candidates:
        return []
    candidate_docs = [(cid, index.clip(cid).description) for cid, _ in candidates]
    request = StructuredRequest(
        task_tag="rerank",
        prompt_sections=(
            ("instructions", _RERANK_INSTRUCTIONS),
            ("query", query),
            ("candidates", render_candidates(candidate_docs)),
        ),
        response_schema_id="rerank/v1",
        determinism_seed=seed,
    )
    payload = gateway.generate(request).payload
    explanations = {entry["clip_id"]: entry["explanation"] for entry in payload["keep"]}
    scores = dict(candidates)
    results = [
        RecommendationResult(clip_id=cid, score=scores[cid], explanation=explanations[cid])
        for cid, _ in candidates
        if cid in explanations
    ]
    if len(results) < min_results:
        kept = {r.clip_id for r in results}
        for cid, score in candidates:
            if len(results) >= min_results:
                break
            if cid not in kept:
                results.append(
                    RecommendationResult(
                        clip_id=cid,
                        score=score,
                        explanation="closest retrieval match for the query",
                    )
                )
        results.sort(key=lambda r: (-r.score, r.clip_id))
    return results[:max_results]


def recommend_for_report(
    report: FeedbackReport,
    index: ClipIndex,
    rubric: Rubric,
    gateway: ModelGateway,
    k: int = 10,
    max_results: int = 3,
) -> dict:
    """recommendations.json document: one entry per validated feedback item."""
    entries = []
    for item in report.items:
        query = build_query(item, rubric, gateway)
        candidates = retrieve_top_k(query, index, gateway, k=k)
        results = rerank_filter(query, candidates, index, gateway, max_results=max_results)
        entries.append(
            {
                "feedback_id": item.feedback_id,
                "query": query,
                "results": [
                    {"clip_id": r.clip_id, "score": r.score, "explanation": r.explanation}
                    for r in results
                ],
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "lesson_id": report.lesson_id,
        "entries": entries,
    }
