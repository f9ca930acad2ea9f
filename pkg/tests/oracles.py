"""Independent reference implementations used to check the library.

Everything here is deliberately written along a different route than the
code under test: the rank-sum oracle enumerates combinations instead of
running the subset-sum recurrence, the text oracle scans characters
instead of using regexes, the tree oracle recurses instead of iterating,
and the discriminant oracle whitens with an eigendecomposition instead
of inverting the covariance. Keep it that way; the point of these
functions is to disagree loudly if the library drifts.
"""

from __future__ import annotations

import math
import string
from fractions import Fraction
from itertools import combinations

import numpy as np

_ASCII_ALNUM = set(string.ascii_letters + string.digits)
_TERMINATORS = ".!?"
_UPPER_OR_DIGIT = set(string.ascii_uppercase + string.digits)


# ---------------------------------------------------------------------------
# rank-sum test


def pair_count_u1(sample1, sample2) -> float:
    """U1 by its pair-counting definition (wins plus half-ties)."""
    u = 0.0
    for x in sample1:
        for y in sample2:
            if x > y:
                u += 1.0
            elif x == y:
                u += 0.5
    return u


def enumerate_exact_p(sample1, sample2) -> tuple[float, float, float]:
    """(two-sided, greater, less) p-values by full enumeration.

    Walks every assignment of ranks to sample 1 with
    ``itertools.combinations`` and counts tails directly on both sides;
    only valid without ties. Probabilities go through ``Fraction`` and
    convert to float once, so they are correctly rounded.
    """
    pooled = list(sample1) + list(sample2)
    assert len(set(pooled)) == len(pooled), "enumeration oracle needs distinct values"
    n1 = len(sample1)
    u_observed = pair_count_u1(sample1, sample2)
    ranks = range(1, len(pooled) + 1)
    least = n1 * (n1 + 1) // 2
    count_le = 0
    count_ge = 0
    total = 0
    for chosen in combinations(ranks, n1):
        u = sum(chosen) - least
        total += 1
        if u <= u_observed:
            count_le += 1
        if u >= u_observed:
            count_ge += 1
    p_less = Fraction(count_le, total)
    p_greater = Fraction(count_ge, total)
    p_two = min(Fraction(1), 2 * min(p_less, p_greater))
    return float(p_two), float(p_greater), float(p_less)


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2
        i = j + 1
    return ranks


def permutation_p_two_sided(
    sample1, sample2, resamples: int = 100_000, seed: int = 0, chunk: int = 2_000
) -> float:
    """Monte-Carlo permutation p for the rank-sum statistic.

    Ranks the pooled data once, then permutes only the group assignment:
    shuffling the fixed rank vector and summing the first n1 entries is
    exactly a relabeling, so no per-resample sorting is needed. Uses the
    add-one estimate (1 + hits) / (1 + resamples).
    """
    pooled = np.asarray(list(sample1) + list(sample2), dtype=float)
    n1 = len(sample1)
    ranks = _midranks(pooled)
    center = n1 * (len(pooled) + 1) / 2
    observed = abs(float(ranks[:n1].sum()) - center)
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < resamples:
        rows = min(chunk, resamples - done)
        perms = rng.permuted(np.tile(ranks, (rows, 1)), axis=1)
        sums = perms[:, :n1].sum(axis=1)
        hits += int(np.count_nonzero(np.abs(sums - center) >= observed))
        done += rows
    return (1 + hits) / (1 + resamples)


# ---------------------------------------------------------------------------
# text preparation and style metrics


def scan_tokens(text: str) -> list[tuple[int, str]]:
    """(start, token) pairs by character scanning, no regex.

    A token starts at an ASCII alphanumeric and extends over further
    alphanumerics; an internal apostrophe or hyphen is swallowed only
    when another alphanumeric follows immediately.
    """
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] not in _ASCII_ALNUM:
            i += 1
            continue
        start = i
        while i < n:
            if text[i] in _ASCII_ALNUM:
                i += 1
            elif (
                text[i] in "'-"
                and i + 1 < n
                and text[i + 1] in _ASCII_ALNUM
                and text[i - 1] in _ASCII_ALNUM
            ):
                i += 1
            else:
                break
        out.append((start, text[start:i]))
    return out


def count_sentences(text: str, abbreviations) -> int:
    """Sentence count under the boundary rules, derived independently."""
    spans = scan_tokens(text)
    if not spans:
        return 0
    abbrev = {a.strip().rstrip(".").lower() for a in abbreviations}
    cuts = set()
    for pos, char in enumerate(text):
        if char not in _TERMINATORS:
            continue
        j = pos + 1
        while j < len(text) and text[j].isspace():
            j += 1
        at_end = j == len(text)
        starts_fresh = j > pos + 1 and j < len(text) and text[j] in _UPPER_OR_DIGIT
        if not (at_end or starts_fresh):
            continue
        back = pos
        while back > 0 and not text[back - 1].isspace():
            back -= 1
        word = text[back:pos]
        while word and not word[0].isalnum():
            word = word[1:]
        if word.lower() in abbrev:
            continue
        cut = sum(1 for start, _ in spans if start <= pos)
        if 0 < cut < len(spans):
            cuts.add(cut)
    return len(cuts) + 1


def reference_style_fields(text: str, abbreviations) -> dict:
    """All base style-marker fields for one raw text, from first principles."""
    tokens = [tok for _, tok in scan_tokens(text)]
    n = len(tokens)
    sentences = count_sentences(text, abbreviations)
    chars = sum(1 for c in text if not c.isspace())
    digits = sum(1 for c in text if c in string.digits)
    fields = {
        "word_count": n,
        "type_token_ratio": len({t.lower() for t in tokens}) / n if n else None,
        "avg_word_length": sum(len(t) for t in tokens) / n if n else None,
        "words_per_sentence": n / sentences if sentences else None,
        "digits_per_kchar": 1000 * digits / chars if chars else None,
        "long_word_ratio": sum(1 for t in tokens if len(t) > 6) / n if n else None,
    }
    return fields


def mean_or_none(values) -> float | None:
    kept = [v for v in values if v is not None]
    if not kept:
        return None
    return sum(kept) / len(kept)


def aggregate_by_label(values_by_doc: dict, labels: dict) -> dict:
    """Per-label unweighted means, grouped in plain insertion order."""
    groups: dict = {}
    for doc_id, value in values_by_doc.items():
        groups.setdefault(labels[doc_id], []).append(value)
    return {label: mean_or_none(vals) for label, vals in groups.items()}


# ---------------------------------------------------------------------------
# parse trees


def recursive_depth(tree) -> int:
    if not tree.children:
        return 1
    return 1 + max(recursive_depth(child) for child in tree.children)


def recursive_skip_count(tree, marker: str) -> int:
    if not tree.children:
        return 1 if tree.label == marker else 0
    return sum(recursive_skip_count(child, marker) for child in tree.children)


# ---------------------------------------------------------------------------
# subtopic segmentation


def reference_depth_scores(
    chunk_vectors: list[dict], k: int, width: int, rounds: int
) -> list[float]:
    """Gap depth scores recomputed from a pseudo-sentence count stream."""
    vocab = sorted({term for chunk in chunk_vectors for term in chunk})
    mat = np.array(
        [[chunk.get(term, 0) for term in vocab] for chunk in chunk_vectors],
        dtype=float,
    )
    m = len(chunk_vectors)
    sims = []
    for gap in range(m - 1):
        window = min(k, gap + 1, m - 1 - gap)
        left = mat[gap - window + 1 : gap + 1].sum(axis=0)
        right = mat[gap + 1 : gap + window + 1].sum(axis=0)
        denom = math.sqrt(float(left @ left)) * math.sqrt(float(right @ right))
        sims.append(min(1.0, float(left @ right) / denom) if denom else 0.0)
    scores = sims
    if width > 0:
        for _ in range(rounds):
            scores = [
                float(np.mean(scores[max(0, i - width // 2) : i + (width + 1) // 2 + 1]))
                for i in range(len(scores))
            ]
    depths = []
    for i, s in enumerate(scores):
        left_peak = s
        j = i - 1
        while j >= 0 and scores[j] >= left_peak:
            left_peak = scores[j]
            j -= 1
        right_peak = s
        j = i + 1
        while j < len(scores) and scores[j] >= right_peak:
            right_peak = scores[j]
            j += 1
        depths.append((left_peak - s) + (right_peak - s))
    return depths


# ---------------------------------------------------------------------------
# linear discriminant


def whitened_argmax(
    class_means: np.ndarray,
    covariance: np.ndarray,
    priors: np.ndarray,
    z: np.ndarray,
) -> tuple[int, np.ndarray]:
    """Class index by whitened nearest-centroid with a prior bonus.

    Whitens with the inverse symmetric square root from an
    eigendecomposition, then scores -0.5 * squared distance + log prior.
    Equivalent to the linear discriminant rule in exact arithmetic.
    """
    eigvals, eigvecs = np.linalg.eigh(covariance)
    whiten = eigvecs @ np.diag(1.0 / np.sqrt(eigvals)) @ eigvecs.T
    scores = np.empty(len(class_means))
    for c, mean in enumerate(class_means):
        delta = whiten @ (z - mean)
        scores[c] = -0.5 * float(delta @ delta) + math.log(priors[c])
    return int(np.argmax(scores)), scores
