"""Document collection ingestion and relevance category assignment.

Reads SGML-style document collections (``<DOC>`` records carrying a
``<DOCNO>`` identifier and ``<TEXT>`` regions) and judgment files in the
four-column ``qid 0 docno rel`` convention, then partitions the corpus into
the three categories every downstream table is keyed by: relevant for at
least one query, judged but never relevant, or never judged.

All byte offsets reported in errors refer to the raw input stream. Files
are decoded as Latin-1, which is lossless on bytes and keeps character
positions equal to byte offsets.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Mapping, Sequence

from .errors import MalformedLine, MalformedRecord

_DOC_OPEN = "<DOC>"
_DOC_CLOSE = "</DOC>"
_DOCNO_RE = re.compile(r"<DOCNO>(.*?)</DOCNO>", re.DOTALL)
_TEXT_RE = re.compile(r"<TEXT>(.*?)</TEXT>", re.DOTALL)
_TAG_RE = re.compile(r"<[^>]*>")

# XML-core entities only; anything else is kept literal so character
# counts stay reproducible across corpora with unknown entity sets.
_ENTITIES = (
    ("&lt;", "<"),
    ("&gt;", ">"),
    ("&quot;", '"'),
    ("&apos;", "'"),
    ("&amp;", "&"),
)


class CategoryLabel(enum.Enum):
    """Three-way partition of a judged corpus."""

    RELEVANT = "Relevant"
    NON_RELEVANT = "NonRelevant"
    NOT_JUDGED = "NotJudged"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Document:
    """One corpus item: identifier, extracted text, and source location.

    ``text`` is the concatenation of all ``<TEXT>`` regions (markup
    stripped, core entities decoded, each region trimmed) joined by single
    newlines. It may be empty: degenerate items do occur in newswire
    collections. ``source_offset``/``source_length`` locate the full
    ``<DOC>...</DOC>`` record in the input bytes.
    """

    doc_id: str
    text: str
    source_offset: int
    source_length: int


@dataclass(frozen=True)
class JudgmentRecord:
    """One deduplicated (query, document) relevance verdict."""

    query_id: int
    doc_id: str
    relevant: bool


@dataclass(frozen=True)
class CategoryAssignment:
    """Labels for every corpus document plus judged-but-absent orphans."""

    labels: dict[str, CategoryLabel]
    orphans: tuple[str, ...]

    def count(self, label: CategoryLabel) -> int:
        return sum(1 for v in self.labels.values() if v is label)


def _as_text(stream: bytes | BinaryIO) -> str:
    data = stream if isinstance(stream, bytes) else stream.read()
    return data.decode("latin-1")


def _decode_entities(text: str) -> str:
    for entity, char in _ENTITIES:
        text = text.replace(entity, char)
    return text


def _extract_region(raw: str) -> str:
    return _decode_entities(_TAG_RE.sub("", raw)).strip()


def parse_trec_sgml(stream: bytes | BinaryIO, lenient: bool = False) -> list[Document]:
    """Parse a concatenation of ``<DOC>`` records into documents.

    Only ``<TEXT>`` regions contribute to a document's text; headlines,
    datelines and other tagged regions are ignored. In strict mode (the
    default) any malformed record raises :class:`MalformedRecord` with its
    byte offset; with ``lenient=True`` malformed records are skipped and
    parsing continues at the next record.
    """
    text = _as_text(stream)
    docs: list[Document] = []
    seen: set[str] = set()
    pos = 0
    while True:
        start = text.find(_DOC_OPEN, pos)
        if start < 0:
            break
        next_open = text.find(_DOC_OPEN, start + len(_DOC_OPEN))
        close = text.find(_DOC_CLOSE, start)
        if close < 0 or (0 <= next_open < close):
            if not lenient:
                raise MalformedRecord("unclosed <DOC> record", start)
            pos = next_open if next_open >= 0 else len(text)
            continue
        end = close + len(_DOC_CLOSE)
        pos = end
        try:
            docs.append(_parse_record(text, start, end, seen))
        except MalformedRecord:
            if not lenient:
                raise
    return docs


def _parse_record(text: str, start: int, end: int, seen: set[str]) -> Document:
    body = text[start:end]
    docnos = _DOCNO_RE.findall(body)
    if not docnos:
        raise MalformedRecord("missing <DOCNO>", start)
    if len(docnos) > 1:
        raise MalformedRecord("multiple <DOCNO> regions", start)
    doc_id = docnos[0].strip()
    if not doc_id:
        raise MalformedRecord("empty <DOCNO>", start)
    if doc_id in seen:
        raise MalformedRecord(f"duplicate <DOCNO> {doc_id!r}", start)
    regions = _TEXT_RE.findall(body)
    if body.count("<TEXT>") != len(regions):
        raise MalformedRecord("unclosed <TEXT> region", start)
    seen.add(doc_id)
    return Document(
        doc_id=doc_id,
        text="\n".join(_extract_region(r) for r in regions),
        source_offset=start,
        source_length=end - start,
    )


def parse_qrels(stream: bytes | BinaryIO, lenient: bool = False) -> list[JudgmentRecord]:
    """Parse whitespace-separated ``query_id 0 doc_id rel`` judgment lines.

    Blank lines are ignored. Duplicate (query, document) pairs collapse to
    a single record, with a relevant verdict winning over non-relevant:
    categories downstream ask only whether a document was ever judged
    relevant. Records keep first-occurrence order.
    """
    merged: dict[tuple[int, str], bool] = {}
    for lineno, line in enumerate(_as_text(stream).splitlines(), start=1):
        fields = line.split()
        if not fields:
            continue
        try:
            record = _parse_qrels_line(fields, lineno)
        except MalformedLine:
            if not lenient:
                raise
            continue
        key = (record.query_id, record.doc_id)
        merged[key] = merged.get(key, False) or record.relevant
    return [
        JudgmentRecord(qid, doc_id, rel) for (qid, doc_id), rel in merged.items()
    ]


def _parse_qrels_line(fields: list[str], lineno: int) -> JudgmentRecord:
    if len(fields) != 4:
        raise MalformedLine(f"expected 4 fields, got {len(fields)}", lineno)
    try:
        query_id = int(fields[0])
    except ValueError:
        raise MalformedLine(f"non-integer query id {fields[0]!r}", lineno) from None
    if fields[3] not in ("0", "1"):
        raise MalformedLine(f"relevance must be 0 or 1, got {fields[3]!r}", lineno)
    return JudgmentRecord(query_id, fields[2], fields[3] == "1")


def assign_categories(
    doc_ids: Iterable[str], judgments: Sequence[JudgmentRecord]
) -> CategoryAssignment:
    """Label every document: relevant for any query at all counts as relevant.

    Judged documents that are absent from ``doc_ids`` are returned as
    orphans (sorted) rather than labeled; they usually indicate a corpus
    subset narrower than the judgment file.
    """
    docs = set(doc_ids)
    judged: set[str] = set()
    relevant: set[str] = set()
    for record in judgments:
        judged.add(record.doc_id)
        if record.relevant:
            relevant.add(record.doc_id)
    labels: dict[str, CategoryLabel] = {}
    for doc_id in docs:
        if doc_id in relevant:
            labels[doc_id] = CategoryLabel.RELEVANT
        elif doc_id in judged:
            labels[doc_id] = CategoryLabel.NON_RELEVANT
        else:
            labels[doc_id] = CategoryLabel.NOT_JUDGED
    return CategoryAssignment(labels=labels, orphans=tuple(sorted(judged - docs)))


def category_counts(labels: Mapping[str, CategoryLabel]) -> dict[CategoryLabel, int]:
    counts = {label: 0 for label in CategoryLabel}
    for value in labels.values():
        counts[value] += 1
    return counts
