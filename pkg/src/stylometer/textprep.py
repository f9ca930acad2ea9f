"""Deterministic tokenization and sentence segmentation.

Every metric downstream counts something over this module's output, so the
rules are fixed and intentionally simple: a token is a maximal run of
ASCII alphanumerics glued by internal hyphens or apostrophes, and sentence
boundaries are terminator punctuation followed by whitespace and an
uppercase letter or digit (or end of text), with a fixed abbreviation
list. Reproducibility is preferred over segmentation accuracy throughout;
the same input bytes always produce the same structure.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:['-][A-Za-z0-9]+)*")
_TERMINATOR_RE = re.compile(r"[.!?]")
_DIGITS = "0123456789"

# Words that may precede a period without ending the sentence. Compared
# case-insensitively against the whitespace-delimited word before the
# terminator (leading punctuation stripped), so "U.S." matches "U.S".
DEFAULT_ABBREVIATIONS = (
    "Mr", "Mrs", "Ms", "Dr", "Inc", "Corp", "Co", "St", "Jr", "Sr",
    "U.S", "vs", "etc",
)


@dataclass(frozen=True)
class TokenizedText:
    """Token stream, sentence ranges, and character tallies for one text.

    ``sentences`` holds half-open ``(start, end)`` token-index ranges that
    are ordered, non-overlapping, and cover the token list exactly.
    ``char_count`` counts non-whitespace characters of the raw text (not
    just token characters) so that tables and other untokenizable numeric
    material still contribute to character-based ratios; ``digit_count``
    counts ASCII digits.
    """

    tokens: tuple[str, ...]
    sentences: tuple[tuple[int, int], ...]
    char_count: int
    digit_count: int


def tokenize(text: str) -> list[str]:
    """Split text into tokens: alphanumeric runs with internal ' or -.

    Standalone punctuation and symbols are not tokens; numbers are.
    """
    return _TOKEN_RE.findall(text)


def token_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of :func:`tokenize`'s tokens, in order."""
    return [m.span() for m in _TOKEN_RE.finditer(text)]


def normalize_type(token: str) -> str:
    """Type identity for type-token ratios: case folding, no stemming."""
    return token.lower()


def _normalize_abbreviation(entry: str) -> str:
    return entry.strip().rstrip(".").lower()


def load_abbreviations(path: str | Path) -> tuple[str, ...]:
    """Load a one-abbreviation-per-line file replacing the default list."""
    entries = []
    for line in Path(path).read_text(encoding="latin-1").splitlines():
        line = line.strip()
        if line:
            entries.append(line)
    return tuple(entries)


def _preceding_word(text: str, pos: int) -> str:
    start = pos
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start:pos]
    # strip opening quotes/parens so '"Mr.' still matches the list
    i = 0
    while i < len(word) and not word[i].isalnum():
        i += 1
    return word[i:]


def _boundary_positions(text: str, abbreviations: frozenset[str]) -> list[int]:
    boundaries = []
    n = len(text)
    for match in _TERMINATOR_RE.finditer(text):
        pos = match.start()
        j = pos + 1
        while j < n and text[j].isspace():
            j += 1
        if j < n and (j == pos + 1 or not ("A" <= text[j] <= "Z" or text[j] in _DIGITS)):
            continue
        if _preceding_word(text, pos).lower() in abbreviations:
            continue
        boundaries.append(pos)
    return boundaries


def split_sentences(
    text: str, abbreviations: Sequence[str] = DEFAULT_ABBREVIATIONS
) -> list[tuple[int, int]]:
    """Sentence ranges over the token indices of :func:`tokenize`.

    A boundary falls after ``.!?`` when followed by whitespace plus an
    ASCII uppercase letter or digit, or by end of text, unless the word
    before the terminator is a listed abbreviation. Text with tokens but
    no terminator is a single sentence; text with no tokens has none.
    """
    spans = token_spans(text)
    if not spans:
        return []
    abbrev = frozenset(_normalize_abbreviation(a) for a in abbreviations)
    starts = [s for s, _ in spans]
    n = len(spans)
    cuts = []
    for pos in _boundary_positions(text, abbrev):
        cut = bisect_right(starts, pos)
        if 0 < cut < n and (not cuts or cut > cuts[-1]):
            cuts.append(cut)
    ranges = []
    prev = 0
    for cut in cuts:
        ranges.append((prev, cut))
        prev = cut
    ranges.append((prev, n))
    return ranges


def analyze(
    text: str, abbreviations: Sequence[str] = DEFAULT_ABBREVIATIONS
) -> TokenizedText:
    """Tokenize, segment, and tally one document."""
    return TokenizedText(
        tokens=tuple(tokenize(text)),
        sentences=tuple(split_sentences(text, abbreviations)),
        char_count=sum(len(chunk) for chunk in text.split()),
        digit_count=sum(text.count(d) for d in _DIGITS),
    )


def analyze_all(
    texts: Iterable[tuple[str, str]],
    abbreviations: Sequence[str] = DEFAULT_ABBREVIATIONS,
    threads: int = 1,
) -> dict[str, TokenizedText]:
    """Analyze ``(doc_id, text)`` pairs, optionally on a thread pool.

    Results are keyed by document id; every code path yields identical
    values, so the thread count never changes any output.
    """
    items = list(texts)
    if threads > 1 and len(items) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            analyzed = list(pool.map(lambda it: analyze(it[1], abbreviations), items))
        return {doc_id: t for (doc_id, _), t in zip(items, analyzed)}
    return {doc_id: analyze(text, abbreviations) for doc_id, text in items}
