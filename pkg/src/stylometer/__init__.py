"""Stylometric analysis of judged document collections.

The toolkit partitions an SGML document collection by relevance
judgments, computes per-document style markers, compares categories with
rank-sum tests, segments documents into subtopic tiles, summarizes
external parse trees, and clusters the corpus with a linear discriminant
trained on hand-labeled seeds. Every stage is deterministic: the same
inputs always produce byte-identical reports.

Most callers want either the :mod:`stylometer.cli` entry point or the
stage functions re-exported here.
"""

__version__ = "0.1.0"

from .errors import StylometerError
from .ingest import (
    CategoryLabel,
    Document,
    JudgmentRecord,
    assign_categories,
    parse_qrels,
    parse_trec_sgml,
)
from .metrics import StyleVector, category_means, compute_style_vector
from .ranksum import RankSumResult, mann_whitney, rank_with_ties
from .textprep import TokenizedText, analyze, split_sentences, tokenize
from .tiling import Tiling, TilingParams, segment
from .trees import ParseTree, compute_tree_stats, parse_bracketed
from .genre import DiscriminantModel, classify, classify_corpus, fit_lda

__all__ = [
    "__version__",
    "StylometerError",
    "CategoryLabel",
    "Document",
    "JudgmentRecord",
    "assign_categories",
    "parse_qrels",
    "parse_trec_sgml",
    "StyleVector",
    "category_means",
    "compute_style_vector",
    "RankSumResult",
    "mann_whitney",
    "rank_with_ties",
    "TokenizedText",
    "analyze",
    "split_sentences",
    "tokenize",
    "Tiling",
    "TilingParams",
    "segment",
    "ParseTree",
    "compute_tree_stats",
    "parse_bracketed",
    "DiscriminantModel",
    "classify",
    "classify_corpus",
    "fit_lda",
]
