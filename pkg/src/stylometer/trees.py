"""Bracketed parse-tree ingestion and depth/skip statistics.

Reads the line-oriented output of an external robust parser: ``#DOC
<docid>`` headers, each followed by one bracketed tree per line, e.g.
``(S (NP (N dog)) (VP barks))``. Atoms are leaves. A parser that gives
up on part of a sentence leaves a childless marker node (``(SKIP)`` by
default); those marker leaves are what the skip statistics count.

Depth counts levels inclusively: a bare leaf has depth 1, ``(S a)`` has
depth 2. Both the tree walk and the sexpr reader are iterative, so
pathologically deep input cannot hit the interpreter recursion limit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import IO, Iterable, Mapping

from .errors import MalformedRecord, TreeBeforeDocHeader, UnbalancedParens
from .ingest import CategoryLabel
from .metrics import FieldMean, mean_by_category

_TOKEN_RE = re.compile(r"[()]|[^\s()]+")
_ATOM_OK_RE = re.compile(r"[^\s()]+\Z")

DEFAULT_SKIP_MARKER = "SKIP"


@dataclass(frozen=True)
class ParseTree:
    """One node of a bracketed tree; a node without children is a leaf."""

    label: str
    children: tuple["ParseTree", ...] = ()

    def is_leaf(self) -> bool:
        return not self.children

    def is_skip(self, marker: str = DEFAULT_SKIP_MARKER) -> bool:
        return not self.children and self.label == marker


def tree_depth(tree: ParseTree) -> int:
    """Number of levels from the root down to the deepest leaf."""
    best = 0
    stack = [(tree, 1)]
    while stack:
        node, level = stack.pop()
        if level > best:
            best = level
        for child in node.children:
            stack.append((child, level + 1))
    return best


def iter_leaves(tree: ParseTree) -> Iterable[ParseTree]:
    """All leaves of a tree; traversal order is unspecified."""
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.children:
            stack.extend(node.children)
        else:
            yield node


def serialize_tree(tree: ParseTree) -> str:
    """Render a tree in the bracketed input format.

    Childless nodes come out as bare atoms, so re-parsing the output
    reconstructs the identical structure. Labels must be non-empty and
    free of whitespace and parentheses.
    """
    parts: list[str] = []
    stack: list[ParseTree | str] = [tree]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        if not _ATOM_OK_RE.match(item.label):
            raise ValueError(f"label {item.label!r} cannot be serialized")
        if item.is_leaf():
            parts.append(item.label)
        else:
            parts.append(f"({item.label}")
            stack.append(")")
            stack.extend(reversed(item.children))
    out: list[str] = []
    for part in parts:
        if out and part != ")":
            out.append(" ")
        out.append(part)
    return "".join(out)


def parse_bracketed(stream: IO[bytes]) -> dict[str, tuple[ParseTree, ...]]:
    """Read a tree file, grouping trees under their ``#DOC`` headers.

    Returns document ids in first-seen order; repeated headers for the
    same id extend that document's tree list. Raises
    :class:`TreeBeforeDocHeader` when tree material precedes any header
    and :class:`UnbalancedParens` when a line's parentheses do not close;
    both carry the byte offset of the offending token.
    """
    data = stream.read().decode("latin-1")
    docs: dict[str, list[ParseTree]] = {}
    current: list[ParseTree] | None = None
    offset = 0
    for line in data.splitlines(keepends=True):
        stripped = line.strip()
        if stripped.startswith("#"):
            if stripped == "#DOC" or not stripped.startswith("#DOC"):
                raise MalformedRecord("unrecognized directive", offset)
            head, _, doc_id = stripped.partition(" ")
            doc_id = doc_id.strip()
            if head != "#DOC" or not doc_id:
                raise MalformedRecord("unrecognized directive", offset)
            current = docs.setdefault(doc_id, [])
        elif stripped:
            if current is None:
                first = _TOKEN_RE.search(line)
                assert first is not None
                raise TreeBeforeDocHeader(offset + first.start())
            current.extend(_parse_tree_line(line, offset))
        offset += len(line)
    return {doc_id: tuple(trees) for doc_id, trees in docs.items()}


def _parse_tree_line(line: str, line_offset: int) -> list[ParseTree]:
    trees: list[ParseTree] = []
    # each frame: [label or None, children, byte offset of the open paren]
    stack: list[list] = []
    for match in _TOKEN_RE.finditer(line):
        token = match.group()
        at = line_offset + match.start()
        if token == "(":
            stack.append([None, [], at])
        elif token == ")":
            if not stack:
                raise UnbalancedParens("unmatched close paren", at)
            label, children, _ = stack.pop()
            if label is None:
                raise MalformedRecord("node with no label", at)
            node = ParseTree(label, tuple(children))
            if stack:
                stack[-1][1].append(node)
            else:
                trees.append(node)
        else:
            if not stack:
                trees.append(ParseTree(token))
            elif stack[-1][0] is None:
                stack[-1][0] = token
            else:
                stack[-1][1].append(ParseTree(token))
    if stack:
        raise UnbalancedParens("unclosed open paren", stack[0][2])
    return trees


@dataclass(frozen=True)
class TreeStats:
    """Depth and skip-mark summary over one document's trees."""

    avg_depth: float | None
    skip_count: int
    skip_rate: float | None


def compute_tree_stats(
    trees: Iterable[ParseTree], skip_marker: str = DEFAULT_SKIP_MARKER
) -> TreeStats:
    """Mean tree depth, total skip leaves, and skips per tree.

    With no trees both averages are ``None``. A skip mark is any leaf
    (including a childless labeled node) whose label equals the marker.
    """
    depths = []
    skips = 0
    for tree in trees:
        depths.append(tree_depth(tree))
        skips += sum(1 for leaf in iter_leaves(tree) if leaf.label == skip_marker)
    if not depths:
        return TreeStats(avg_depth=None, skip_count=skips, skip_rate=None)
    return TreeStats(
        avg_depth=sum(depths) / len(depths),
        skip_count=skips,
        skip_rate=skips / len(depths),
    )


@dataclass(frozen=True)
class TreeStatsRow:
    """Per-category mean depth and skip rate."""

    category: CategoryLabel
    depth: FieldMean
    skips: FieldMean


def tree_stats_table(
    stats: Mapping[str, TreeStats],
    labels: Mapping[str, CategoryLabel],
) -> list[TreeStatsRow]:
    """Aggregate per-document tree stats into per-category mean rows."""
    depth_means = mean_by_category(
        {doc_id: s.avg_depth for doc_id, s in stats.items()}, labels
    )
    skip_means = mean_by_category(
        {doc_id: s.skip_rate for doc_id, s in stats.items()}, labels
    )
    return [
        TreeStatsRow(category=label, depth=depth_means[label], skips=skip_means[label])
        for label in CategoryLabel
    ]
