"""TSV report rendering for the four summary tables and the test table.

All reports are plain tab-separated values with a header row, floats
printed to four significant digits and absent values as ``NA``. Row
order is fixed by the builders, number formatting is locale-independent,
and nothing here reads clocks or randomness, so identical inputs render
byte-identical files.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Mapping, Sequence

from .genre import FEATURE_NAMES, ClusterCategoryRow
from .ingest import CategoryLabel
from .metrics import CategorySummary
from .ranksum import CategoryTest
from .tiling import TileCountRow
from .trees import TreeStatsRow

TABLE1_SCHEMA = (
    "Category",
    "Number",
    "WordCount",
    "TypeTokenRatio",
    "WordLength",
    "WordsPerSentence",
)
TABLE2_SCHEMA = ("Subset", "Category", "Number", "Tiles")
TABLE3_SCHEMA = ("Category", "Number", "TreeDepth", "Skips")
_FEATURE_COLUMNS = (
    "TreeDepth",
    "Skips",
    "WordCount",
    "TypeTokenRatio",
    "WordLength",
    "DigitsPerKChar",
    "WordsPerSentence",
)
TABLE4_SCHEMA = (
    "Cluster",
    "ClusterSize",
    "PctRelevant",
    "Category",
    "Number",
) + _FEATURE_COLUMNS
TESTS_SCHEMA = ("Field", "Pair", "N1", "N2", "U1", "Z", "P", "Significant")
MANIFEST_SCHEMA = ("Key", "Value")

assert len(_FEATURE_COLUMNS) == len(FEATURE_NAMES)


def format_cell(value: object) -> str:
    """Render one cell: NA for absent, 4 significant digits for floats.

    Floats with no fractional part print as plain integers so rank-sum
    statistics in the tens of thousands do not collapse into exponent
    notation.
    """
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if value.is_integer() and abs(value) < 1e15:
            return str(int(value))
        return format(value, ".4g")
    return str(value)


def emit_table(rows: Iterable[Sequence[object]], schema: Sequence[str]) -> bytes:
    """Render a header plus rows as TSV bytes with a trailing newline."""
    lines = ["\t".join(schema)]
    for row in rows:
        if len(row) != len(schema):
            raise ValueError(
                f"row has {len(row)} cells, schema has {len(schema)} columns"
            )
        lines.append("\t".join(format_cell(cell) for cell in row))
    return ("\n".join(lines) + "\n").encode("utf-8")


def table1_rows(
    summary: Mapping[CategoryLabel, CategorySummary],
) -> list[tuple[object, ...]]:
    """Category size and the four headline style markers, one row each."""
    rows = []
    for category in CategoryLabel:
        cell = summary[category]
        rows.append(
            (
                str(category),
                cell.count,
                cell.fields["word_count"].mean,
                cell.fields["type_token_ratio"].mean,
                cell.fields["avg_word_length"].mean,
                cell.fields["words_per_sentence"].mean,
            )
        )
    return rows


def table2_rows(tile_rows: Sequence[TileCountRow]) -> list[tuple[object, ...]]:
    """Mean tile counts per (subset, category)."""
    return [
        (row.subset, str(row.category), row.stats.used, row.stats.mean)
        for row in tile_rows
    ]


def table3_rows(tree_rows: Sequence[TreeStatsRow]) -> list[tuple[object, ...]]:
    """Mean parse depth and skip rate per category."""
    return [
        (str(row.category), row.depth.used, row.depth.mean, row.skips.mean)
        for row in tree_rows
    ]


def table4_rows(
    cluster_rows: Sequence[ClusterCategoryRow],
) -> list[tuple[object, ...]]:
    """Cluster composition: one row per (cluster, category)."""
    rows = []
    for row in cluster_rows:
        cells: list[object] = [
            row.cluster,
            row.cluster_size,
            row.pct_relevant,
            str(row.category),
            row.count,
        ]
        cells.extend(row.features[name].mean for name in FEATURE_NAMES)
        rows.append(tuple(cells))
    return rows


def tests_rows(
    tests: Sequence[CategoryTest], one_sided: bool = False
) -> list[tuple[object, ...]]:
    """One row per field test; P and Significant follow the sidedness."""
    rows = []
    for test in tests:
        r = test.result
        if one_sided:
            if r.p_one_sided is None:
                raise ValueError("one-sided report needs one-sided results")
            p = r.p_one_sided
            significant = p < 0.05
        else:
            p = r.p_two_sided
            significant = r.significant_95
        pair = f"{test.pair[0]}-vs-{test.pair[1]}"
        rows.append((test.field, pair, r.n1, r.n2, r.u1, r.z, p, significant))
    return rows


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def manifest_rows(entries: Sequence[tuple[str, object]]) -> list[tuple[object, ...]]:
    """Key-value manifest rows; values go through normal cell formatting."""
    return [(key, value) for key, value in entries]
