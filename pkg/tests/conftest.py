"""Shared fixtures: synthetic corpora on disk and a hand-written one.

The hand-written corpus below is small enough to verify by eye; its
expected texts and categories are spelled out literally so ingestion
tests compare against values a reader can re-derive from the raw SGML.
"""

from __future__ import annotations

import random
from collections import namedtuple

import pytest

import corpusgen
from stylometer.ingest import CategoryLabel

CorpusFiles = namedtuple("CorpusFiles", "docs qrels expected")
SmallCorpus = namedtuple(
    "SmallCorpus", "docs qrels texts labels orphans docs_bytes qrels_bytes"
)

SMALL_SGML = b"""<DOC>
<DOCNO> D01 </DOCNO>
<DATELINE> NEW YORK </DATELINE>
<TEXT>
Hello world.
</TEXT>
</DOC>
<DOC>
<DOCNO>D02</DOCNO>
<TEXT>
First part here.
</TEXT>
<TEXT>
Second part follows.
</TEXT>
</DOC>
<DOC>
<DOCNO> D03 </DOCNO>
<TEXT>
AT&amp;T filed &lt;forms&gt; with &quot;care&quot;.
</TEXT>
</DOC>
<DOC>
<DOCNO> D04 </DOCNO>
<TEXT>
<P>
Prices rose 5 points.
</P>
</TEXT>
</DOC>
<DOC>
<DOCNO> D05 </DOCNO>
<TEXT>
</TEXT>
</DOC>
<DOC>
<DOCNO> D06 </DOCNO>
<HL> no body at all </HL>
</DOC>
<DOC>
<DOCNO> D07 </DOCNO>
<TEXT>
Mr. Jones met Dr. Lee. They agreed.
</TEXT>
</DOC>
<DOC>
<DOCNO> D08 </DOCNO>
<TEXT>
Shares fell 3.5 points to 1260.75 on Friday.
</TEXT>
</DOC>
<DOC>
<DOCNO> D09 </DOCNO>
<TEXT>
The company's well-known co-founder wasn't there.
</TEXT>
</DOC>
<DOC>
<DOCNO> D10 </DOCNO>
<TEXT>
A rare &foo; token survived. Nothing decoded it. Three sentences here.
</TEXT>
</DOC>
"""

SMALL_QRELS = b"""301 0 D01 1
301 0 D02 0
302 0 D02 1
301 0 D03 0
302 0 D03 0
301 0 D04 1
301 0 D04 1
303 0 D05 0
303 0 D07 1
304 0 D08 0
301 0 DGONE 1
"""

# what parse_trec_sgml must extract, record by record
SMALL_TEXTS = {
    "D01": "Hello world.",
    "D02": "First part here.\nSecond part follows.",
    "D03": 'AT&T filed <forms> with "care".',
    "D04": "Prices rose 5 points.",
    "D05": "",
    "D06": "",
    "D07": "Mr. Jones met Dr. Lee. They agreed.",
    "D08": "Shares fell 3.5 points to 1260.75 on Friday.",
    "D09": "The company's well-known co-founder wasn't there.",
    "D10": "A rare &foo; token survived. Nothing decoded it. Three sentences here.",
}

SMALL_LABELS = {
    "D01": CategoryLabel.RELEVANT,
    "D02": CategoryLabel.RELEVANT,
    "D03": CategoryLabel.NON_RELEVANT,
    "D04": CategoryLabel.RELEVANT,
    "D05": CategoryLabel.NON_RELEVANT,
    "D06": CategoryLabel.NOT_JUDGED,
    "D07": CategoryLabel.RELEVANT,
    "D08": CategoryLabel.NON_RELEVANT,
    "D09": CategoryLabel.NOT_JUDGED,
    "D10": CategoryLabel.NOT_JUDGED,
}

SMALL_ORPHANS = ("DGONE",)


@pytest.fixture()
def small_corpus(tmp_path):
    docs = tmp_path / "small.sgml"
    qrels = tmp_path / "small.qrels"
    docs.write_bytes(SMALL_SGML)
    qrels.write_bytes(SMALL_QRELS)
    return SmallCorpus(
        docs=docs,
        qrels=qrels,
        texts=dict(SMALL_TEXTS),
        labels=dict(SMALL_LABELS),
        orphans=SMALL_ORPHANS,
        docs_bytes=SMALL_SGML,
        qrels_bytes=SMALL_QRELS,
    )


@pytest.fixture(scope="session")
def corpus_files(tmp_path_factory):
    """The big planted-contrast corpus, built once per test run."""
    directory = tmp_path_factory.mktemp("bigcorpus")
    docs, qrels, expected = corpusgen.build_corpus_files(directory)
    return CorpusFiles(docs, qrels, expected)


@pytest.fixture(scope="session")
def style_texts():
    """Fifty varied raw texts, a few of them degenerate on purpose."""
    rng = random.Random(4242)
    texts = [(f"S{i:03d}", corpusgen.diverse_doc(rng)) for i in range(46)]
    texts += [
        ("S046", ""),
        ("S047", "   \t\n  "),
        ("S048", "?! ... ---"),
        ("S049", "12 34 alpha beta gamma"),
    ]
    return tuple(texts)
