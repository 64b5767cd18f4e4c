"""Small text helpers: sentence splitting, quoted spans, content words."""

from __future__ import annotations

import re

# Sentence boundary: terminal punctuation followed by whitespace or end of text.
_SENTENCE_END = re.compile(r"[.!?](?=\s|$)")

# Evidence quotes and planted fixture markers both use guillemets; the regex
# matches innermost spans only, so markers inside quotes stay inert.
_QUOTED_SPAN = re.compile(r"«([^«»]+)»")

_MARKER = re.compile(r"«[^«»]*»\s*")

_WORD = re.compile(r"[a-z][a-z'-]*")

STOPWORDS = frozenset(
    """a an and are as at be by for from has have how in is it its of on or that the
    their this to was were what when where which who why will with your you""".split()
)

INTERROGATIVE_LEADS = frozenset(
    "what why how who when where which can could would do does did".split()
)


def split_sentences(text: str) -> list[tuple[str, int, int]]:
    """Split into sentences, returning ``(sentence, start_char, end_char)``.

    Boundaries are ``.``, ``!`` or ``?`` followed by whitespace or end of
    text; surrounding whitespace is trimmed from each sentence.
    """
    out: list[tuple[str, int, int]] = []
    cursor = 0
    for match in _SENTENCE_END.finditer(text):
        end = match.end()
        chunk = text[cursor:end]
        stripped = chunk.strip()
        if stripped:
            lead = len(chunk) - len(chunk.lstrip())
            out.append((stripped, cursor + lead, cursor + lead + len(stripped)))
        cursor = end
    tail = text[cursor:].strip()
    if tail:
        lead = len(text[cursor:]) - len(text[cursor:].lstrip())
        out.append((tail, cursor + lead, cursor + lead + len(tail)))
    return out


def quoted_spans(text: str) -> list[str]:
    """All innermost ``«…»`` spans in order of appearance."""
    return _QUOTED_SPAN.findall(text)


def strip_markers(text: str) -> str:
    """Remove ``«…»`` markers and collapse the whitespace they leave behind."""
    return re.sub(r"\s{2,}", " ", _MARKER.sub("", text)).strip()


def content_words(text: str) -> set[str]:
    """Lowercased alphabetic words minus stopwords."""
    return {w for w in _WORD.findall(text.lower()) if w not in STOPWORDS}


def is_question(sentence: str) -> bool:
    """A sentence is a question if it ends with ``?`` or opens with an
    interrogative lead word (covers transcripts whose ASR dropped the mark)."""
    s = sentence.strip()
    if not s:
        return False
    if s.endswith("?"):
        return True
    first = _WORD.match(s.lower())
    return bool(first and first.group(0) in INTERROGATIVE_LEADS and s.endswith("."))


def sentence_before_position(text: str, pos: int, skip: int = 0) -> str | None:
    """Last complete sentence before ``pos``, cleaned of markers; falls back
    to the first sentence after ``pos + skip`` when nothing precedes it."""
    before = strip_markers(text[:pos])
    sentences = split_sentences(before)
    if sentences:
        return sentences[-1][0]
    after = strip_markers(text[pos + skip:])
    following = split_sentences(after)
    return following[0][0] if following else None


def sentence_before_marker(text: str, marker: str) -> str | None:
    """Last complete sentence preceding the first ``marker`` occurrence.

    Fixture captions place planted markers after the sentence they tag, so
    the returned excerpt occurs verbatim in the caption text.
    """
    pos = text.find(marker)
    if pos < 0:
        return None
    return sentence_before_position(text, pos, skip=len(marker))
