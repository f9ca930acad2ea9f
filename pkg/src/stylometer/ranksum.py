"""Two-sample rank-sum testing (Mann-Whitney U).

Both samples are pooled and ranked, tied values receiving the mid-rank
of their block. U1 is the rank sum of sample 1 minus its minimum
possible value, so u1 + u2 == n1 * n2 always holds.

Two modes. The exact mode enumerates the null distribution of U with a
subset-sum count over ranks 1..N (permitted only for combined sizes up
to 25 with no ties) and reports the doubled tail probability through
rational arithmetic, so the result is correctly rounded. The normal
approximation standardizes U1 with the tie-corrected variance and a
continuity correction of one half toward the mean; the variance factor
is assembled from integers before a single division, keeping results
identical across runs and platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    EmptyCategory,
    EmptyInput,
    EmptySample,
    ExactModeUnavailable,
    MissingLabel,
)
from .ingest import CategoryLabel
from .metrics import StyleVector

EXACT_SIZE_LIMIT = 25

_SQRT2 = math.sqrt(2.0)


def rank_with_ties(values: Sequence[float]) -> tuple[list[float], list[int]]:
    """Rank values 1..N with mid-ranks for ties.

    Returns the rank of each value in input order plus the sizes of all
    tie groups of two or more (what the variance correction needs).
    Mid-ranks are halves of integers, so they are exact floats.
    """
    if len(values) == 0:
        raise EmptyInput("cannot rank an empty sequence")
    for v in values:
        if v != v:
            raise ValueError("NaN values cannot be ranked")
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    tie_sizes = []
    start = 0
    while start < len(order):
        stop = start
        while stop + 1 < len(order) and values[order[stop + 1]] == values[order[start]]:
            stop += 1
        # positions start..stop (0-based) share ranks start+1..stop+1
        mid = (start + stop + 2) / 2
        for pos in order[start : stop + 1]:
            ranks[pos] = mid
        if stop > start:
            tie_sizes.append(stop - start + 1)
        start = stop + 1
    return ranks, tie_sizes


@dataclass(frozen=True)
class RankSumResult:
    """Outcome of one two-sample test.

    ``z`` is ``None`` in exact mode. ``significant_95`` always tracks
    the two-sided probability; ``p_one_sided`` is filled only when a
    directional alternative was requested.
    """

    n1: int
    n2: int
    u1: float
    u2: float
    rank_sum1: float
    z: float | None
    p_two_sided: float
    significant_95: bool
    mode: str
    alternative: str = "two_sided"
    p_one_sided: float | None = None


def _rank_sum_counts(n1: int, total: int) -> list[int]:
    # dp[k][s] = number of k-subsets of {1..total} with rank sum s
    max_sum = n1 * (2 * total - n1 + 1) // 2
    dp = [[0] * (max_sum + 1) for _ in range(n1 + 1)]
    dp[0][0] = 1
    for item in range(1, total + 1):
        for k in range(min(n1, item), 0, -1):
            row, prev = dp[k], dp[k - 1]
            for s in range(max_sum, item - 1, -1):
                if prev[s - item]:
                    row[s] += prev[s - item]
    return dp[n1]


def _exact_probabilities(
    n1: int, n2: int, u1: int
) -> tuple[Fraction, Fraction, Fraction]:
    # returns (P(U1 <= u1), P(U1 >= u1), two-sided p)
    counts = _rank_sum_counts(n1, n1 + n2)
    offset = n1 * (n1 + 1) // 2
    total = math.comb(n1 + n2, n1)
    cum_low = sum(counts[offset : offset + u1 + 1])
    # the null distribution of U1 is symmetric about n1*n2/2
    u2 = n1 * n2 - u1
    cum_high = sum(counts[offset : offset + u2 + 1])
    p_less = Fraction(cum_low, total)
    p_greater = Fraction(cum_high, total)
    p_two = min(Fraction(1), 2 * min(p_less, p_greater))
    return p_less, p_greater, p_two


def mann_whitney(
    sample1: Sequence[float],
    sample2: Sequence[float],
    mode: str = "auto",
    alternative: str = "two_sided",
) -> RankSumResult:
    """Mann-Whitney U test between two samples.

    ``mode`` is ``auto`` (exact when permitted, else the normal
    approximation), ``exact``, or ``normal_approx``. Exact mode needs
    n1 + n2 <= 25 and no ties; requesting it otherwise raises
    :class:`ExactModeUnavailable`. ``alternative`` may be ``two_sided``,
    ``greater`` (sample 1 shifted high) or ``less``.
    """
    if alternative not in ("two_sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    if mode not in ("auto", "exact", "normal_approx"):
        raise ValueError(f"unknown mode {mode!r}")
    if len(sample1) == 0:
        raise EmptySample("sample 1 is empty")
    if len(sample2) == 0:
        raise EmptySample("sample 2 is empty")
    n1, n2 = len(sample1), len(sample2)
    total = n1 + n2
    ranks, tie_sizes = rank_with_ties(list(sample1) + list(sample2))
    rank_sum1 = math.fsum(ranks[:n1])
    u1 = rank_sum1 - n1 * (n1 + 1) / 2
    u2 = n1 * n2 - u1

    exact_ok = total <= EXACT_SIZE_LIMIT and not tie_sizes
    if mode == "exact" and not exact_ok:
        if tie_sizes:
            raise ExactModeUnavailable(
                "tied values present; use mode='normal_approx'"
            )
        raise ExactModeUnavailable(
            f"combined size {total} exceeds {EXACT_SIZE_LIMIT}; "
            "use mode='normal_approx'"
        )
    use_exact = exact_ok if mode == "auto" else mode == "exact"

    if use_exact:
        p_less, p_greater, p_two = _exact_probabilities(n1, n2, int(u1))
        p_two_sided = float(p_two)
        z = None
        p_one = None
        if alternative == "greater":
            p_one = float(p_greater)
        elif alternative == "less":
            p_one = float(p_less)
        chosen_mode = "exact"
    else:
        # tie-corrected variance, kept in integers until one division:
        # n1*n2/12 * ((N+1) - T/(N*(N-1)))  with T = sum(t^3 - t)
        tie_term = sum(t * t * t - t for t in tie_sizes)
        var_num = n1 * n2 * ((total + 1) * total * (total - 1) - tie_term)
        var_den = 12 * total * (total - 1)
        variance = var_num / var_den
        diff = u1 - n1 * n2 / 2
        if variance <= 0.0:
            z = 0.0
        else:
            corrected = max(0.0, abs(diff) - 0.5)
            z = math.copysign(corrected, diff) / math.sqrt(variance)
        p_two_sided = math.erfc(abs(z) / _SQRT2)
        p_one = None
        if alternative == "greater":
            p_one = 0.5 * math.erfc(z / _SQRT2)
        elif alternative == "less":
            p_one = 0.5 * math.erfc(-z / _SQRT2)
        chosen_mode = "normal_approx"

    return RankSumResult(
        n1=n1,
        n2=n2,
        u1=u1,
        u2=u2,
        rank_sum1=rank_sum1,
        z=z,
        p_two_sided=p_two_sided,
        significant_95=p_two_sided < 0.05,
        mode=chosen_mode,
        alternative=alternative,
        p_one_sided=p_one,
    )


@dataclass(frozen=True)
class CategoryTest:
    """One field's test between two categories, with skip accounting."""

    field: str
    pair: tuple[CategoryLabel, CategoryLabel]
    skipped: tuple[int, int]
    result: RankSumResult


def category_tests(
    vectors: Mapping[str, StyleVector],
    labels: Mapping[str, CategoryLabel],
    field: str,
    pair: tuple[CategoryLabel, CategoryLabel],
    mode: str = "auto",
    alternative: str = "two_sided",
) -> CategoryTest:
    """Test one style field between two document categories.

    Documents without a value for the field are skipped and counted.
    Raises :class:`EmptyCategory` when a side has no usable values and
    :class:`MissingLabel` for documents without a category.
    """
    samples: tuple[list[float], list[float]] = ([], [])
    skipped = [0, 0]
    for doc_id in sorted(vectors):
        if doc_id not in labels:
            raise MissingLabel(f"document {doc_id!r} has no category label")
        label = labels[doc_id]
        for side in (0, 1):
            if label == pair[side]:
                value = getattr(vectors[doc_id], field)
                if value is None:
                    skipped[side] += 1
                else:
                    samples[side].append(float(value))
    for side in (0, 1):
        if not samples[side]:
            raise EmptyCategory(
                f"category {pair[side]} has no usable values for {field!r}"
            )
    result = mann_whitney(samples[0], samples[1], mode=mode, alternative=alternative)
    return CategoryTest(
        field=field,
        pair=pair,
        skipped=(skipped[0], skipped[1]),
        result=result,
    )
