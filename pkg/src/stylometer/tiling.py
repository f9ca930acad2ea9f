"""Subtopic segmentation by lexical block comparison.

Splits a token stream into fixed-size pseudo-sentences, scores every
internal gap with the cosine similarity of the term-frequency vectors of
the blocks on each side, smooths the score sequence, and places subtopic
boundaries at deep valleys. Only the tile count is consumed downstream,
so boundary placement favors reproducibility: all block arithmetic is
integer until the final division, making results exactly invariant under
any injective renaming of types.

Boundary selection: a gap qualifies if it is a local minimum of the
smoothed scores and its depth exceeds ``max(0, mean - stddev/2)``. The
zero floor matters: on low-noise documents the mean-minus-half-sigma
cutoff alone can go negative, which would promote perfectly flat gaps to
boundaries. Candidates are thinned so no two boundaries sit on adjacent
gaps (the deeper one wins).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .ingest import CategoryLabel
from .metrics import FieldMean, mean_by_category
from .textprep import TokenizedText, normalize_type


@dataclass(frozen=True)
class TilingParams:
    """Segmentation knobs; defaults follow the common block-comparison setup."""

    pseudo_sentence_size: int = 20
    block_size: int = 6
    smoothing_rounds: int = 1
    smoothing_width: int = 2
    cutoff_policy: str = "mean_minus_half_sigma"

    def __post_init__(self):
        if self.pseudo_sentence_size < 1:
            raise ValueError("pseudo_sentence_size must be >= 1")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if self.smoothing_rounds < 0 or self.smoothing_width < 0:
            raise ValueError("smoothing parameters must be non-negative")
        if self.cutoff_policy != "mean_minus_half_sigma":
            raise ValueError(f"unknown cutoff policy {self.cutoff_policy!r}")


@dataclass(frozen=True)
class Tiling:
    """Boundary gap indices and diagnostics for one document.

    ``boundaries`` are strictly increasing pseudo-sentence gap indices
    (gap ``i`` lies between pseudo-sentences ``i`` and ``i+1``);
    ``tile_count`` is always ``len(boundaries) + 1``.
    """

    boundaries: tuple[int, ...]
    tile_count: int
    depth_scores: tuple[float, ...]


def _pseudo_sentences(t: TokenizedText, size: int) -> list[Counter]:
    types = [normalize_type(tok) for tok in t.tokens]
    return [Counter(types[i : i + size]) for i in range(0, len(types), size)]


def _cosine(left: Counter, right: Counter) -> float:
    num = sum(count * right[term] for term, count in left.items())
    if num == 0:
        return 0.0
    den1 = sum(c * c for c in left.values())
    den2 = sum(c * c for c in right.values())
    return min(1.0, num / math.sqrt(den1 * den2))


def _gap_scores(chunks: list[Counter], k: int) -> list[float]:
    m = len(chunks)
    scores = []
    for gap in range(m - 1):
        window = min(k, gap + 1, m - 1 - gap)
        left: Counter = Counter()
        right: Counter = Counter()
        for chunk in chunks[gap - window + 1 : gap + 1]:
            left.update(chunk)
        for chunk in chunks[gap + 1 : gap + window + 1]:
            right.update(chunk)
        scores.append(_cosine(left, right))
    return scores


def _smooth(scores: list[float], width: int, rounds: int) -> list[float]:
    # centered moving average over width+1 points, clamped at the edges
    if width == 0 or rounds == 0 or len(scores) < 2:
        return list(scores)
    half_left = width // 2
    half_right = (width + 1) // 2
    out = list(scores)
    for _ in range(rounds):
        out = [
            math.fsum(out[max(0, i - half_left) : i + half_right + 1])
            / len(out[max(0, i - half_left) : i + half_right + 1])
            for i in range(len(out))
        ]
    return out


def _depth_scores(scores: list[float]) -> list[float]:
    # peak on each side: climb while scores keep rising (ties continue the climb)
    n = len(scores)
    depths = []
    for i in range(n):
        lpeak = scores[i]
        for j in range(i - 1, -1, -1):
            if scores[j] >= lpeak:
                lpeak = scores[j]
            else:
                break
        rpeak = scores[i]
        for j in range(i + 1, n):
            if scores[j] >= rpeak:
                rpeak = scores[j]
            else:
                break
        depths.append((lpeak - scores[i]) + (rpeak - scores[i]))
    return depths


def _is_local_minimum(scores: list[float], i: int) -> bool:
    if i > 0 and scores[i] > scores[i - 1]:
        return False
    if i + 1 < len(scores) and scores[i] > scores[i + 1]:
        return False
    return True


def _select_boundaries(scores: list[float], depths: list[float]) -> list[int]:
    n = len(depths)
    if n == 0:
        return []
    mean = math.fsum(depths) / n
    sigma = math.sqrt(math.fsum((d - mean) ** 2 for d in depths) / n)
    cutoff = max(0.0, mean - sigma / 2)
    candidates = [
        i
        for i in range(n)
        if depths[i] > cutoff and depths[i] > 0 and _is_local_minimum(scores, i)
    ]
    chosen: list[int] = []
    for i in sorted(candidates, key=lambda i: (-depths[i], i)):
        if all(abs(i - j) > 1 for j in chosen):
            chosen.append(i)
    return sorted(chosen)


def segment(t: TokenizedText, params: TilingParams = TilingParams()) -> Tiling:
    """Segment one document; short documents are always a single tile.

    Documents with fewer than ``2 * block_size`` pseudo-sentences get no
    boundaries. Output is bit-for-bit deterministic for fixed parameters.
    """
    chunks = _pseudo_sentences(t, params.pseudo_sentence_size)
    if len(chunks) < 2 * params.block_size:
        return Tiling(boundaries=(), tile_count=1, depth_scores=())
    raw = _gap_scores(chunks, params.block_size)
    smoothed = _smooth(raw, params.smoothing_width, params.smoothing_rounds)
    depths = _depth_scores(smoothed)
    boundaries = _select_boundaries(smoothed, depths)
    return Tiling(
        boundaries=tuple(boundaries),
        tile_count=len(boundaries) + 1,
        depth_scores=tuple(depths),
    )


@dataclass(frozen=True)
class TileCountRow:
    """Mean tile count for one (subset, category) cell."""

    subset: str
    category: CategoryLabel
    stats: FieldMean


def tile_count_table(
    tile_counts: Mapping[str, int],
    word_counts: Mapping[str, int],
    labels: Mapping[str, CategoryLabel],
    length_split: int = 1000,
) -> list[TileCountRow]:
    """Mean tile counts per category, overall and for long documents only.

    ``length_split`` is the word-count threshold (strictly greater than)
    defining the long-document subset.
    """
    rows = []
    all_docs: Mapping[str, float | None] = {d: float(n) for d, n in tile_counts.items()}
    long_docs = {
        d: float(n)
        for d, n in tile_counts.items()
        if word_counts.get(d, 0) > length_split
    }
    for subset, values in (("all", all_docs), (f"over_{length_split}", long_docs)):
        for category, stats in mean_by_category(values, labels).items():
            rows.append(TileCountRow(subset=subset, category=category, stats=stats))
    return rows
