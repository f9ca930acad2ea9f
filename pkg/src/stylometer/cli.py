"""Command-line interface and pipeline orchestration.

Subcommands cover the individual stages (``ingest-check``, ``metrics``,
``tile``, ``trees``, ``test``, ``genre``) plus ``report``, which runs the
whole pipeline and writes the requested TSV tables and a manifest of
input digests and parameter values into an output directory.

Every report is computed fully in memory before anything is written, so
a failing run never leaves partial output files behind. Exit status is 0
on success and 2 on any input or configuration problem.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import IO, Mapping, Sequence

from . import __version__
from .errors import StylometerError
from .genre import (
    classify_corpus,
    cluster_report,
    fit_lda,
    parse_seed_labels,
    save_model,
)
from .ingest import (
    CategoryLabel,
    assign_categories,
    category_counts,
    parse_qrels,
    parse_trec_sgml,
)
from .metrics import STYLE_FIELDS, StyleVector, category_means, compute_style_vector
from .ranksum import CategoryTest, category_tests
from .report import (
    MANIFEST_SCHEMA,
    TABLE1_SCHEMA,
    TABLE2_SCHEMA,
    TABLE3_SCHEMA,
    TABLE4_SCHEMA,
    TESTS_SCHEMA,
    emit_table,
    manifest_rows,
    sha256_hex,
    table1_rows,
    table2_rows,
    table3_rows,
    table4_rows,
    tests_rows,
)
from .textprep import DEFAULT_ABBREVIATIONS, TokenizedText, analyze_all, load_abbreviations
from .tiling import TilingParams, segment, tile_count_table
from .trees import (
    DEFAULT_SKIP_MARKER,
    TreeStats,
    compute_tree_stats,
    parse_bracketed,
    tree_stats_table,
)

REPORT_NAMES = ("table1", "table2", "table3", "table4", "tests")
DEFAULT_REPORTS = ("table1", "tests")
DEFAULT_TEST_FIELDS = (
    "word_count",
    "type_token_ratio",
    "avg_word_length",
    "words_per_sentence",
    "digits_per_kchar",
)
_PAIRS = {
    "relevant-nonrelevant": (CategoryLabel.RELEVANT, CategoryLabel.NON_RELEVANT),
    "relevant-notjudged": (CategoryLabel.RELEVANT, CategoryLabel.NOT_JUDGED),
    "nonrelevant-notjudged": (CategoryLabel.NON_RELEVANT, CategoryLabel.NOT_JUDGED),
}


@dataclasses.dataclass(frozen=True)
class PipelineConfig:
    """Everything the full pipeline needs; built from CLI flags."""

    docs: Path
    qrels: Path
    out_dir: Path
    trees: Path | None = None
    seeds: Path | None = None
    abbrev: Path | None = None
    reports: tuple[str, ...] = DEFAULT_REPORTS
    tiling: TilingParams = TilingParams()
    skip_marker: str = DEFAULT_SKIP_MARKER
    test_fields: tuple[str, ...] = DEFAULT_TEST_FIELDS
    test_pair: str = "relevant-nonrelevant"
    test_mode: str = "auto"
    one_sided: bool = False
    lenient: bool = False
    threads: int = 1
    length_split: int = 1000


def _default_threads() -> int:
    raw = os.environ.get("STYLOMETER_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _alternative(one_sided: bool) -> str:
    # one-sided means: does the first category of the pair rank higher?
    return "greater" if one_sided else "two_sided"


def _analyze_corpus(
    path: Path, lenient: bool, abbrev: Path | None, threads: int
) -> tuple[dict[str, TokenizedText], dict[str, StyleVector], list[str]]:
    docs = parse_trec_sgml(path.read_bytes(), lenient=lenient)
    abbreviations = load_abbreviations(abbrev) if abbrev else DEFAULT_ABBREVIATIONS
    tokenized = analyze_all(
        ((d.doc_id, d.text) for d in docs), abbreviations, threads=threads
    )
    vectors = {
        doc_id: compute_style_vector(tokenized[doc_id]) for doc_id in sorted(tokenized)
    }
    return tokenized, vectors, [d.doc_id for d in docs]


def _segment_all(
    tokenized: Mapping[str, TokenizedText], params: TilingParams, threads: int
) -> dict[str, int]:
    ids = sorted(tokenized)
    if threads > 1 and len(ids) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(
                pool.map(lambda i: segment(tokenized[i], params).tile_count, ids)
            )
        return dict(zip(ids, counts))
    return {doc_id: segment(tokenized[doc_id], params).tile_count for doc_id in ids}


def _load_tree_stats(
    path: Path, skip_marker: str, known_ids: set[str]
) -> dict[str, TreeStats]:
    with open(path, "rb") as handle:
        by_doc = parse_bracketed(handle)
    unknown = sorted(set(by_doc) - known_ids)
    if unknown:
        raise ValueError(
            f"tree file references {len(unknown)} unknown document(s), "
            f"first: {unknown[0]!r}"
        )
    return {
        doc_id: compute_tree_stats(trees, skip_marker)
        for doc_id, trees in by_doc.items()
    }


def _merge_tree_fields(
    vectors: dict[str, StyleVector], stats: Mapping[str, TreeStats]
) -> None:
    for doc_id, s in stats.items():
        vectors[doc_id] = dataclasses.replace(
            vectors[doc_id], tree_depth=s.avg_depth, skip_rate=s.skip_rate
        )


def _merge_tile_counts(
    vectors: dict[str, StyleVector], tile_counts: Mapping[str, int]
) -> None:
    for doc_id, count in tile_counts.items():
        vectors[doc_id] = dataclasses.replace(vectors[doc_id], tile_count=count)


def _run_category_tests(
    vectors: Mapping[str, StyleVector],
    labels: Mapping[str, CategoryLabel],
    config: PipelineConfig,
) -> list[CategoryTest]:
    pair = _PAIRS[config.test_pair]
    return [
        category_tests(
            vectors,
            labels,
            field,
            pair,
            mode=config.test_mode,
            alternative=_alternative(config.one_sided),
        )
        for field in config.test_fields
    ]


def validate_config(config: PipelineConfig) -> list[str]:
    """Dependency problems that make the requested reports impossible."""
    problems = []
    unknown = [r for r in config.reports if r not in REPORT_NAMES]
    if unknown:
        problems.append(f"unknown report name(s): {', '.join(unknown)}")
    if ("table3" in config.reports or "table4" in config.reports) and not config.trees:
        needing = "table3" if "table3" in config.reports else "table4"
        problems.append(f"report {needing} requires --trees")
    if "table4" in config.reports and not config.seeds:
        problems.append("report table4 requires --seeds")
    return problems


def run(config: PipelineConfig, err: IO[str] | None = None) -> int:
    """Run the full pipeline and write the requested reports.

    Returns 0 on success, 2 on any input problem. All files (reports
    plus ``manifest.tsv``) are written only after every report has been
    computed.
    """
    if err is None:
        err = sys.stderr
    problems = validate_config(config)
    if problems:
        for problem in problems:
            print(f"error: {problem}", file=err)
        return 2
    try:
        outputs = _compute_reports(config)
    except (StylometerError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    written: list[Path] = []
    try:
        config.out_dir.mkdir(parents=True, exist_ok=True)
        for name in sorted(outputs):
            target = config.out_dir / name
            target.write_bytes(outputs[name])
            written.append(target)
    except OSError as exc:
        for target in written:
            try:
                target.unlink()
            except OSError:
                pass
        print(f"error: {exc}", file=err)
        return 2
    return 0


def _compute_reports(config: PipelineConfig) -> dict[str, bytes]:
    reports = tuple(r for r in REPORT_NAMES if r in config.reports)
    tokenized, vectors, _order = _analyze_corpus(
        config.docs, config.lenient, config.abbrev, config.threads
    )
    judgments = parse_qrels(config.qrels.read_bytes(), lenient=config.lenient)
    assignment = assign_categories(vectors.keys(), judgments)
    labels = assignment.labels

    tree_stats: dict[str, TreeStats] = {}
    if config.trees is not None:
        tree_stats = _load_tree_stats(
            config.trees, config.skip_marker, set(vectors)
        )
        _merge_tree_fields(vectors, tree_stats)

    tile_counts: dict[str, int] = {}
    if "table2" in reports:
        tile_counts = _segment_all(tokenized, config.tiling, config.threads)
        _merge_tile_counts(vectors, tile_counts)

    outputs: dict[str, bytes] = {}
    if "table1" in reports:
        summary = category_means(vectors, labels)
        outputs["table1.tsv"] = emit_table(table1_rows(summary), TABLE1_SCHEMA)
    if "table2" in reports:
        word_counts = {doc_id: v.word_count for doc_id, v in vectors.items()}
        rows = tile_count_table(
            tile_counts, word_counts, labels, length_split=config.length_split
        )
        outputs["table2.tsv"] = emit_table(table2_rows(rows), TABLE2_SCHEMA)
    if "table3" in reports:
        rows = tree_stats_table(tree_stats, labels)
        outputs["table3.tsv"] = emit_table(table3_rows(rows), TABLE3_SCHEMA)
    if "table4" in reports:
        with open(config.seeds, "rb") as handle:
            seeds = parse_seed_labels(handle)
        model = fit_lda(vectors, seeds)
        assignments = classify_corpus(model, vectors)
        rows = cluster_report(assignments, vectors, labels)
        outputs["table4.tsv"] = emit_table(table4_rows(rows), TABLE4_SCHEMA)
    if "tests" in reports:
        tests = _run_category_tests(vectors, labels, config)
        outputs["tests.tsv"] = emit_table(
            tests_rows(tests, one_sided=config.one_sided), TESTS_SCHEMA
        )

    outputs["manifest.tsv"] = emit_table(
        manifest_rows(_manifest_entries(config, reports)), MANIFEST_SCHEMA
    )
    return outputs


def _manifest_entries(
    config: PipelineConfig, reports: tuple[str, ...]
) -> list[tuple[str, object]]:
    entries: list[tuple[str, object]] = [("version", __version__)]

    def input_file(key: str, path: Path | None) -> None:
        if path is not None:
            entries.append((key, str(path)))
            entries.append((f"{key}_sha256", sha256_hex(path.read_bytes())))

    input_file("docs", config.docs)
    input_file("qrels", config.qrels)
    input_file("trees", config.trees)
    input_file("seeds", config.seeds)
    input_file("abbreviations", config.abbrev)
    entries.append(("lenient", config.lenient))
    if "table2" in reports:
        entries.append(("tiling_pseudo_sentence_size", config.tiling.pseudo_sentence_size))
        entries.append(("tiling_block_size", config.tiling.block_size))
        entries.append(("tiling_smoothing_width", config.tiling.smoothing_width))
        entries.append(("tiling_smoothing_rounds", config.tiling.smoothing_rounds))
        entries.append(("length_split", config.length_split))
    if config.trees is not None:
        entries.append(("skip_marker", config.skip_marker))
    if "tests" in reports:
        entries.append(("test_fields", ",".join(config.test_fields)))
        entries.append(("test_pair", config.test_pair))
        entries.append(("test_mode", config.test_mode))
        entries.append(("alternative", _alternative(config.one_sided)))
    entries.append(("reports", ",".join(reports)))
    return entries


def _write_output(data: bytes, target: str) -> None:
    if target == "-":
        sys.stdout.write(data.decode("utf-8"))
    else:
        Path(target).write_bytes(data)


def _add_corpus_options(p: argparse.ArgumentParser, qrels_required: bool) -> None:
    p.add_argument("--docs", required=True, type=Path, help="document collection file")
    p.add_argument(
        "--qrels",
        required=qrels_required,
        type=Path,
        help="relevance judgment file (qid 0 docno rel lines)",
    )
    p.add_argument(
        "--lenient",
        action="store_true",
        help="skip malformed records and judgment lines instead of failing",
    )
    p.add_argument(
        "--abbrev",
        type=Path,
        help="abbreviation list (one entry per line) replacing the built-in one",
    )
    p.add_argument(
        "--threads",
        type=int,
        default=_default_threads(),
        help="worker threads for per-document stages "
        "(default: STYLOMETER_THREADS or 1; never changes results)",
    )


def _add_tiling_options(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--tiling-w",
        type=int,
        default=TilingParams.pseudo_sentence_size,
        help="tokens per pseudo-sentence",
    )
    p.add_argument(
        "--tiling-k",
        type=int,
        default=TilingParams.block_size,
        help="pseudo-sentences per comparison block",
    )
    p.add_argument(
        "--tiling-smooth",
        type=int,
        default=TilingParams.smoothing_width,
        help="moving-average smoothing width for gap scores",
    )


def _add_output_option(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--output", default="-", help="output file ('-' for standard output)"
    )


def _tiling_params(args: argparse.Namespace) -> TilingParams:
    return TilingParams(
        pseudo_sentence_size=args.tiling_w,
        block_size=args.tiling_k,
        smoothing_width=args.tiling_smooth,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stylometer",
        description="Stylistic corpus analysis over judged document collections.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "ingest-check", help="parse the corpus (and judgments) and print counts"
    )
    _add_corpus_options(p, qrels_required=False)

    p = sub.add_parser("metrics", help="per-document style marker TSV")
    _add_corpus_options(p, qrels_required=False)
    p.add_argument("--trees", type=Path, help="parse-tree file to merge depth/skips")
    p.add_argument(
        "--skip-marker", default=DEFAULT_SKIP_MARKER, help="parser giving-up label"
    )
    p.add_argument(
        "--tiles", action="store_true", help="also compute per-document tile counts"
    )
    _add_tiling_options(p)
    _add_output_option(p)

    p = sub.add_parser("tile", help="per-document subtopic tile counts")
    _add_corpus_options(p, qrels_required=False)
    _add_tiling_options(p)
    _add_output_option(p)

    p = sub.add_parser("trees", help="per-document parse-tree statistics")
    p.add_argument("--trees", required=True, type=Path, help="parse-tree file")
    p.add_argument(
        "--skip-marker", default=DEFAULT_SKIP_MARKER, help="parser giving-up label"
    )
    _add_output_option(p)

    p = sub.add_parser("test", help="rank-sum tests between two categories")
    _add_corpus_options(p, qrels_required=True)
    p.add_argument("--trees", type=Path, help="parse-tree file (for tree fields)")
    p.add_argument(
        "--skip-marker", default=DEFAULT_SKIP_MARKER, help="parser giving-up label"
    )
    p.add_argument(
        "--field",
        action="append",
        choices=STYLE_FIELDS,
        help="style field to test (repeatable; default: the five base markers)",
    )
    p.add_argument(
        "--pair",
        choices=sorted(_PAIRS),
        default="relevant-nonrelevant",
        help="category pair to compare",
    )
    p.add_argument(
        "--mode",
        choices=("auto", "exact", "normal_approx"),
        default="auto",
        help="test mode (exact needs small tie-free samples)",
    )
    p.add_argument(
        "--one-sided",
        action="store_true",
        help="report the one-sided p (first category ranks higher)",
    )
    _add_output_option(p)

    p = sub.add_parser("genre", help="cluster the corpus by style discriminants")
    _add_corpus_options(p, qrels_required=True)
    p.add_argument("--seeds", required=True, type=Path, help="docid<TAB>genre file")
    p.add_argument("--trees", required=True, type=Path, help="parse-tree file")
    p.add_argument(
        "--skip-marker", default=DEFAULT_SKIP_MARKER, help="parser giving-up label"
    )
    p.add_argument("--save-model", type=Path, help="write the fitted model here")
    _add_output_option(p)

    p = sub.add_parser("report", help="full pipeline into an output directory")
    _add_corpus_options(p, qrels_required=True)
    p.add_argument("--trees", type=Path, help="parse-tree file")
    p.add_argument("--seeds", type=Path, help="docid<TAB>genre seed file")
    p.add_argument(
        "--skip-marker", default=DEFAULT_SKIP_MARKER, help="parser giving-up label"
    )
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.add_argument(
        "--reports",
        default=",".join(DEFAULT_REPORTS),
        help=f"comma-separated subset of {','.join(REPORT_NAMES)}",
    )
    p.add_argument(
        "--field",
        action="append",
        choices=STYLE_FIELDS,
        help="style field for the tests report (repeatable)",
    )
    p.add_argument(
        "--pair",
        choices=sorted(_PAIRS),
        default="relevant-nonrelevant",
        help="category pair for the tests report",
    )
    p.add_argument(
        "--one-sided",
        action="store_true",
        help="one-sided tests (first category ranks higher)",
    )
    p.add_argument(
        "--length-split",
        type=int,
        default=1000,
        help="word-count threshold for the long-document tile subset",
    )
    _add_tiling_options(p)

    return parser


def _cmd_ingest_check(args: argparse.Namespace) -> int:
    docs = parse_trec_sgml(args.docs.read_bytes(), lenient=args.lenient)
    print(f"documents: {len(docs)}")
    if args.qrels:
        judgments = parse_qrels(args.qrels.read_bytes(), lenient=args.lenient)
        assignment = assign_categories((d.doc_id for d in docs), judgments)
        for label, count in category_counts(assignment.labels).items():
            print(f"{label}: {count}")
        print(f"judged-but-absent: {len(assignment.orphans)}")
    return 0


def _metrics_schema() -> tuple[str, ...]:
    return ("DocId",) + STYLE_FIELDS


def _cmd_metrics(args: argparse.Namespace) -> int:
    tokenized, vectors, _ = _analyze_corpus(
        args.docs, args.lenient, args.abbrev, args.threads
    )
    if args.trees:
        stats = _load_tree_stats(args.trees, args.skip_marker, set(vectors))
        _merge_tree_fields(vectors, stats)
    if args.tiles:
        _merge_tile_counts(
            vectors, _segment_all(tokenized, _tiling_params(args), args.threads)
        )
    rows = [
        (doc_id,) + tuple(getattr(vectors[doc_id], f) for f in STYLE_FIELDS)
        for doc_id in sorted(vectors)
    ]
    _write_output(emit_table(rows, _metrics_schema()), args.output)
    return 0


def _cmd_tile(args: argparse.Namespace) -> int:
    tokenized, _, _ = _analyze_corpus(
        args.docs, args.lenient, args.abbrev, args.threads
    )
    counts = _segment_all(tokenized, _tiling_params(args), args.threads)
    rows = [(doc_id, counts[doc_id]) for doc_id in sorted(counts)]
    _write_output(emit_table(rows, ("DocId", "Tiles")), args.output)
    return 0


def _cmd_trees(args: argparse.Namespace) -> int:
    with open(args.trees, "rb") as handle:
        by_doc = parse_bracketed(handle)
    rows = []
    for doc_id in sorted(by_doc):
        stats = compute_tree_stats(by_doc[doc_id], args.skip_marker)
        rows.append(
            (
                doc_id,
                len(by_doc[doc_id]),
                stats.avg_depth,
                stats.skip_count,
                stats.skip_rate,
            )
        )
    schema = ("DocId", "Trees", "AvgDepth", "SkipCount", "SkipRate")
    _write_output(emit_table(rows, schema), args.output)
    return 0


def _cmd_test(args: argparse.Namespace) -> int:
    _, vectors, _ = _analyze_corpus(args.docs, args.lenient, args.abbrev, args.threads)
    if args.trees:
        stats = _load_tree_stats(args.trees, args.skip_marker, set(vectors))
        _merge_tree_fields(vectors, stats)
    judgments = parse_qrels(args.qrels.read_bytes(), lenient=args.lenient)
    labels = assign_categories(vectors.keys(), judgments).labels
    fields = tuple(args.field) if args.field else DEFAULT_TEST_FIELDS
    tests = [
        category_tests(
            vectors,
            labels,
            field,
            _PAIRS[args.pair],
            mode=args.mode,
            alternative=_alternative(args.one_sided),
        )
        for field in fields
    ]
    _write_output(
        emit_table(tests_rows(tests, one_sided=args.one_sided), TESTS_SCHEMA),
        args.output,
    )
    return 0


def _cmd_genre(args: argparse.Namespace) -> int:
    _, vectors, _ = _analyze_corpus(args.docs, args.lenient, args.abbrev, args.threads)
    stats = _load_tree_stats(args.trees, args.skip_marker, set(vectors))
    _merge_tree_fields(vectors, stats)
    judgments = parse_qrels(args.qrels.read_bytes(), lenient=args.lenient)
    labels = assign_categories(vectors.keys(), judgments).labels
    with open(args.seeds, "rb") as handle:
        seeds = parse_seed_labels(handle)
    model = fit_lda(vectors, seeds)
    if args.save_model:
        with open(args.save_model, "wb") as handle:
            save_model(model, handle)
    assignments = classify_corpus(model, vectors)
    rows = cluster_report(assignments, vectors, labels)
    _write_output(emit_table(table4_rows(rows), TABLE4_SCHEMA), args.output)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    reports = tuple(
        dict.fromkeys(r.strip() for r in args.reports.split(",") if r.strip())
    )
    config = PipelineConfig(
        docs=args.docs,
        qrels=args.qrels,
        out_dir=args.out,
        trees=args.trees,
        seeds=args.seeds,
        abbrev=args.abbrev,
        reports=reports,
        tiling=_tiling_params(args),
        skip_marker=args.skip_marker,
        test_fields=tuple(args.field) if args.field else DEFAULT_TEST_FIELDS,
        test_pair=args.pair,
        one_sided=args.one_sided,
        lenient=args.lenient,
        threads=args.threads,
        length_split=args.length_split,
    )
    return run(config)


_COMMANDS = {
    "ingest-check": _cmd_ingest_check,
    "metrics": _cmd_metrics,
    "tile": _cmd_tile,
    "trees": _cmd_trees,
    "test": _cmd_test,
    "genre": _cmd_genre,
    "report": _cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = _COMMANDS[args.command]
    try:
        return handler(args)
    except (StylometerError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
