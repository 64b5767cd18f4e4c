"""Deterministic rule-driven backend for hermetic runs.

Every capability is a pure function of its request plus the committed rules
document, so identical inputs produce byte-identical outputs across
processes. Captions come from a per-lesson fixture table when one is
registered, otherwise from a stable hash of the request; reasoning tasks
apply documented keyword rules over the prompt sections; validation checks
that each quoted span occurs verbatim in the evidence; embeddings hash text
onto the unit sphere.
"""

from __future__ import annotations

import hashlib
import re
import time
from typing import Callable

from .errors import RangeError
from .gateway import EMBEDDING_DIM, BackendKind
from .prompts import parse_timeline_render
from .resources import default_mock_rules
from .text_utils import (
    STOPWORDS,
    content_words,
    is_question,
    quoted_spans,
    sentence_before_position,
    split_sentences,
    strip_markers,
)
from .timebase import MediaTime

_SHIFT_MARKER = re.compile(r"«shift:([^»]+)»")
_WORD_SEQ = re.compile(r"[a-z][a-z'-]*")


def merge_rules(base: dict, extra: dict | None) -> dict:
    """Overlay fixture rules on the defaults; caption tables merge per lesson."""
    if not extra:
        return base
    merged = dict(base)
    for key, value in extra.items():
        if key == "caption_tables":
            tables = dict(merged.get("caption_tables", {}))
            for lesson, table in value.items():
                combined = dict(tables.get(lesson, {}))
                combined.update(table)
                tables[lesson] = combined
            merged["caption_tables"] = tables
        elif isinstance(value, dict) and isinstance(merged.get(key), dict):
            inner = dict(merged[key])
            inner.update(value)
            merged[key] = inner
        else:
            merged[key] = value
    return merged


class MockBackend:
    """Fixture-driven implementation of every backend kind."""

    name = "mock"

    def __init__(
        self,
        rules: dict | None = None,
        latency_s: float = 0.0,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.rules = rules if rules is not None else default_mock_rules()
        self.latency_s = latency_s
        self._sleeper = sleeper

    def run(self, kind: BackendKind, request: dict) -> dict:
        if self.latency_s > 0:
            self._sleeper(self.latency_s)
        if kind is BackendKind.CAPTIONER:
            return self._caption(request)
        if kind is BackendKind.REASONER:
            return self._reason(request)
        if kind is BackendKind.VALIDATOR:
            return self._validate(request)
        if kind is BackendKind.EMBEDDER:
            return self._embed(request)
        raise RangeError(f"mock backend does not serve kind {kind.value}")

    # -- captioner -------------------------------------------------------

    def _caption(self, request: dict) -> dict:
        lesson_id = request["lesson_id"]
        key = f"{request['start_ms']}-{request['end_ms']}"
        table = self.rules.get("caption_tables", {}).get(lesson_id, {})
        if key in table:
            return {"caption": table[key]}
        basis = f"{lesson_id}:{key}:{request.get('hint') or ''}"
        token = hashlib.sha256(basis.encode("utf-8")).hexdigest()[:8]
        start = MediaTime(request["start_ms"]).render()
        end = MediaTime(request["end_ms"]).render()
        caption = f"Classroom view {token}: teacher and students work between {start} and {end}."
        if request.get("hint"):
            caption += " The activity continues from the previous segment."
        return {"caption": caption}

    # -- reasoner ----------------------------------------------------------

    def _reason(self, request: dict) -> dict:
        sections = {label: text for label, text in request["sections"]}
        task = request["task_tag"]
        handlers = {
            "hotspots": self._hotspots,
            "guidelines": self._guidelines,
            "feedback_draft": self._feedback_draft,
            "bloom": self._bloom,
            "activities": self._activities,
            "outline": self._outline,
            "search_query": self._search_query,
            "rerank": self._rerank,
        }
        if task not in handlers:
            raise RangeError(f"mock reasoner has no rules for task {task!r}")
        return handlers[task](sections)

    def _hotspots(self, sections: dict[str, str]) -> dict:
        entries = parse_timeline_render(sections.get("timeline", ""))
        windows = {
            seg: interval for seg, interval, source, _ in entries if source == "caption"
        }
        found = []
        for seg, _, _, text in entries:
            if seg not in windows:
                continue
            window = windows[seg]
            for rule in self.rules["hotspot_rules"]:
                marker = rule["marker"]
                cursor = 0
                while (pos := text.find(marker, cursor)) >= 0:
                    excerpt = (
                        sentence_before_position(text, pos, skip=len(marker))
                        or strip_markers(text)
                    )
                    found.append(
                        {
                            "start_ms": window.start.ms,
                            "end_ms": window.end.ms,
                            "dimension_id": rule["dimension_id"],
                            "polarity": rule["polarity"],
                            "trigger_excerpt": excerpt,
                        }
                    )
                    cursor = pos + len(marker)
        return {"hotspots": found}

    def _dimension_id_and_title(self, sections: dict[str, str]) -> tuple[str, str]:
        first = sections.get("dimension", "").splitlines()[0] if sections.get("dimension") else ""
        if ":" in first:
            dim_id, title = first.split(":", 1)
            return dim_id.strip(), title.strip()
        return "", first.strip()

    def _guidelines(self, sections: dict[str, str]) -> dict:
        dim_id, _ = self._dimension_id_and_title(sections)
        templates = self.rules["guideline_templates"]
        return {"guidelines": list(templates.get(dim_id, templates["default"]))}

    def _feedback_draft(self, sections: dict[str, str]) -> dict:
        dim_id, title = self._dimension_id_and_title(sections)
        polarity = sections.get("polarity", "WEAKNESS")
        evidence = sections.get("evidence", "")
        fabricate = any(
            rule.get("fabricate") and rule["marker"] in evidence
            for rule in self.rules["hotspot_rules"]
        )
        if fabricate:
            excerpt = self.rules["fabricated_quote"]
        else:
            excerpt = sections.get("excerpt", "").strip()
        observed = self.rules["observed_template"].format(
            interval=sections.get("interval", ""), excerpt=excerpt
        )
        content = self.rules["feedback_content_templates"][polarity].format(title=title)
        advice_map = self.rules["advice_templates"]
        advice = advice_map.get(f"{dim_id}|{polarity}", advice_map[f"default|{polarity}"])
        return {
            "content": content,
            "observed_behaviors": observed,
            "actionable_advice": advice,
        }

    def _bloom(self, sections: dict[str, str]) -> dict:
        question = sections.get("question", "")
        words = set(_WORD_SEQ.findall(question.lower()))
        matches: list[tuple[int, str]] = []
        for level_str, verbs in self.rules["bloom_verbs"].items():
            for verb in verbs:
                if verb in words:
                    matches.append((int(level_str), verb))
        if not matches:
            return {
                "level": 1,
                "justification": "no taxonomy verb matched; treated as a recall prompt",
            }
        matches.sort()
        level = matches[-1][0]
        names = self.rules["bloom_level_names"]
        listed = ", ".join(f"'{verb}' ({names[str(lv)]})" for lv, verb in matches)
        return {"level": level, "justification": f"matched verb(s): {listed}"}

    def _activities(self, sections: dict[str, str]) -> dict:
        entries = parse_timeline_render(sections.get("timeline", ""))
        rules = self.rules["activity_rules"]
        out = []
        for _, interval, source, text in entries:
            if source == "caption":
                for marker, codes in rules["caption_markers"].items():
                    if marker in text:
                        out.append(
                            {
                                "start_ms": interval.start.ms,
                                "end_ms": interval.end.ms,
                                "codes": list(codes),
                            }
                        )
                continue
            if source == "UNKNOWN":
                continue
            span_ms = interval.end.ms - interval.start.ms
            sentences = split_sentences(text)
            total_chars = max(len(text), 1)
            for sentence, start_char, end_char in sentences:
                # sentence intervals: turn duration split pro rata by char offsets
                s_ms = interval.start.ms + span_ms * start_char // total_chars
                e_ms = interval.start.ms + span_ms * end_char // total_chars
                e_ms = min(interval.end.ms, max(e_ms, s_ms + 1))
                if source == "TEACHER":
                    codes = rules["teacher_question"] if is_question(sentence) else rules["teacher_statement"]
                else:
                    codes = rules["student_turn"]
                out.append({"start_ms": s_ms, "end_ms": e_ms, "codes": list(codes)})
        return {"activities": out}

    def _outline(self, sections: dict[str, str]) -> dict:
        entries = parse_timeline_render(sections.get("timeline", ""))
        captions = [(seg, interval, text) for seg, interval, source, text in entries if source == "caption"]
        if not captions:
            return {"sections": []}
        boundaries: list[tuple[int, str]] = []
        for seg, _, text in captions:
            match = _SHIFT_MARKER.search(text)
            if match and seg > 0:
                boundaries.append((seg, match.group(1).strip()))
        if not boundaries:
            step = int(self.rules["outline"]["fallback_windows_per_section"])
            boundaries = [(seg, f"Part {i + 2}") for i, (seg, _, _) in enumerate(captions[step::step])]
        headings = [self.rules["outline"]["default_heading"]] + [h for _, h in boundaries]
        cut_indices = [captions[0][0]] + [seg for seg, _ in boundaries]
        sections_out = []
        for i, start_seg in enumerate(cut_indices):
            end_seg = cut_indices[i + 1] if i + 1 < len(cut_indices) else captions[-1][0] + 1
            start_ms = next(iv.start.ms for seg, iv, _ in captions if seg == start_seg)
            end_ms = next(iv.end.ms for seg, iv, _ in captions if seg == end_seg - 1)
            first_text = next(text for seg, _, text in captions if seg == start_seg)
            cleaned = strip_markers(first_text)
            first_sentence = split_sentences(cleaned)[0][0] if split_sentences(cleaned) else cleaned
            sections_out.append(
                {
                    "start_ms": start_ms,
                    "end_ms": end_ms,
                    "heading": headings[i],
                    "summary": first_sentence,
                }
            )
        return {"sections": sections_out}

    def _search_query(self, sections: dict[str, str]) -> dict:
        title = sections.get("dimension_title", "").strip()
        advice = sections.get("advice", "")
        keywords: list[str] = []
        for word in _WORD_SEQ.findall(advice.lower()):
            if word not in STOPWORDS and word not in keywords:
                keywords.append(word)
            if len(keywords) == 4:
                break
        query = " ".join([title] + keywords).strip()
        return {"query": query or "classroom practice"}

    def _rerank(self, sections: dict[str, str]) -> dict:
        query_words = content_words(sections.get("query", ""))
        keep = []
        for line in sections.get("candidates", "").splitlines():
            if "\t" not in line:
                continue
            clip_id, description = line.split("\t", 1)
            shared = sorted(query_words & content_words(description))
            if shared:
                keep.append(
                    {
                        "clip_id": clip_id,
                        "explanation": "shares focus on " + ", ".join(shared[:3]),
                    }
                )
        return {"keep": keep}

    # -- validator -------------------------------------------------------

    def _validate(self, request: dict) -> dict:
        spans = quoted_spans(request["feedback_text"])
        if not spans:
            return {"consistent": True, "rationale": "no quoted spans; vacuously consistent"}
        haystacks = list(request["captions"]) + [t["text"] for t in request["turns"]]
        missing = [s for s in spans if not any(s in h for h in haystacks)]
        if missing:
            return {
                "consistent": False,
                "rationale": "spans not found in evidence: "
                + "; ".join(f"«{s}»" for s in missing),
            }
        return {"consistent": True, "rationale": f"all {len(spans)} quoted spans found in evidence"}

    # -- embedder ----------------------------------------------------------

    def _embed(self, request: dict) -> dict:
        digest = hashlib.sha256(request["text"].encode("utf-8")).digest()
        raw = [
            int.from_bytes(digest[2 * i : 2 * i + 2], "big", signed=True)
            for i in range(EMBEDDING_DIM)
        ]
        norm = sum(v * v for v in raw) ** 0.5
        if norm == 0:
            raw[0], norm = 1, 1.0
        return {"values": [v / norm for v in raw]}
