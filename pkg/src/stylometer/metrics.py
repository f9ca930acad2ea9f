"""Per-document style markers and their per-category aggregation.

A document's style vector holds the surface statistics the whole toolkit
revolves around: token count, type-token ratio, mean word length, words
per sentence, digits per thousand non-whitespace characters, and the
long-word fraction, plus slots filled in later by the tiling and
parse-tree stages. Fields that are undefined for a degenerate document
(no tokens, no sentences, no characters) are ``None`` rather than zero so
they cannot silently drag category means down.

Aggregation is per document first, then an unweighted mean within each
category, summed in sorted document-id order so floating-point results
are bit-for-bit reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dataclass_fields
from typing import Mapping

from .errors import MissingLabel
from .ingest import CategoryLabel
from .textprep import TokenizedText, normalize_type

# classic readability convention: a long word has more than 6 characters
LONG_WORD_THRESHOLD = 6

STYLE_FIELDS = (
    "word_count",
    "type_token_ratio",
    "avg_word_length",
    "words_per_sentence",
    "digits_per_kchar",
    "long_word_ratio",
    "tile_count",
    "tree_depth",
    "skip_rate",
)


@dataclass(frozen=True)
class StyleVector:
    """Style-marker values for one document; ``None`` marks undefined."""

    word_count: int
    type_token_ratio: float | None
    avg_word_length: float | None
    words_per_sentence: float | None
    digits_per_kchar: float | None
    long_word_ratio: float | None
    tile_count: int | None = None
    tree_depth: float | None = None
    skip_rate: float | None = None


assert tuple(f.name for f in dataclass_fields(StyleVector)) == STYLE_FIELDS


def compute_style_vector(t: TokenizedText) -> StyleVector:
    """Compute the directly measurable fields from a tokenized document.

    ``tile_count``, ``tree_depth`` and ``skip_rate`` stay unset here; the
    tiling and tree-statistics stages fill them via ``dataclasses.replace``.
    """
    n = len(t.tokens)
    n_sent = len(t.sentences)
    if n:
        types = len({normalize_type(tok) for tok in t.tokens})
        ttr = types / n
        awl = sum(len(tok) for tok in t.tokens) / n
        lwr = sum(1 for tok in t.tokens if len(tok) > LONG_WORD_THRESHOLD) / n
    else:
        ttr = awl = lwr = None
    return StyleVector(
        word_count=n,
        type_token_ratio=ttr,
        avg_word_length=awl,
        words_per_sentence=n / n_sent if n_sent else None,
        digits_per_kchar=1000 * t.digit_count / t.char_count if t.char_count else None,
        long_word_ratio=lwr,
    )


@dataclass(frozen=True)
class FieldMean:
    """Unweighted mean of one field over one document group."""

    mean: float | None
    used: int
    excluded: int


@dataclass(frozen=True)
class CategorySummary:
    """Document count and per-field means for one category."""

    count: int
    fields: dict[str, FieldMean]


def _mean(values: list[float]) -> float | None:
    if not values:
        return None
    return sum(values) / len(values)


def category_means(
    vectors: Mapping[str, StyleVector],
    labels: Mapping[str, CategoryLabel],
) -> dict[CategoryLabel, CategorySummary]:
    """Aggregate style vectors into per-category unweighted means.

    Documents with an undefined field are excluded from that field's mean
    only; the exclusion count is reported alongside. Raises
    :class:`MissingLabel` if any vector's document has no label.
    """
    groups: dict[CategoryLabel, list[str]] = {label: [] for label in CategoryLabel}
    for doc_id in sorted(vectors):
        if doc_id not in labels:
            raise MissingLabel(f"document {doc_id!r} has no category label")
        groups[labels[doc_id]].append(doc_id)
    out = {}
    for label, ids in groups.items():
        per_field = {}
        for name in STYLE_FIELDS:
            values = []
            excluded = 0
            for doc_id in ids:
                value = getattr(vectors[doc_id], name)
                if value is None:
                    excluded += 1
                else:
                    values.append(float(value))
            per_field[name] = FieldMean(_mean(values), len(values), excluded)
        out[label] = CategorySummary(count=len(ids), fields=per_field)
    return out


def mean_by_category(
    values: Mapping[str, float | None],
    labels: Mapping[str, CategoryLabel],
) -> dict[CategoryLabel, FieldMean]:
    """Per-category unweighted mean of a single per-document value.

    Shares the aggregation conventions of :func:`category_means`: sorted
    document order, ``None`` excluded with a count, :class:`MissingLabel`
    on an unlabeled document.
    """
    groups: dict[CategoryLabel, list[float]] = {label: [] for label in CategoryLabel}
    excluded = {label: 0 for label in CategoryLabel}
    for doc_id in sorted(values):
        if doc_id not in labels:
            raise MissingLabel(f"document {doc_id!r} has no category label")
        label = labels[doc_id]
        value = values[doc_id]
        if value is None:
            excluded[label] += 1
        else:
            groups[label].append(float(value))
    return {
        label: FieldMean(_mean(vals), len(vals), excluded[label])
        for label, vals in groups.items()
    }
