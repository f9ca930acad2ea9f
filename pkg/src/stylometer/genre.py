"""Genre clustering by linear discriminant analysis on style markers.

A small hand-labeled seed set (clusters named A through J) trains a
pooled-covariance linear discriminant over seven style features. The
fitted model then labels every document in the corpus; documents missing
any required feature get the reserved cluster "U" instead of a guess.

Features are z-scored with statistics taken from the seed set before the
covariance is pooled, so features on wildly different scales (token
counts in the thousands against ratios below one) cannot dominate the
conditioning. The standardization is stored in the model and applied to
every query vector, which keeps decisions equivalent to fitting on raw
features in exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    IncompleteVector,
    MalformedLine,
    SingularCovariance,
    TooFewSeeds,
)
from .ingest import CategoryLabel
from .metrics import FieldMean, StyleVector

FEATURE_NAMES = (
    "tree_depth",
    "skip_rate",
    "word_count",
    "type_token_ratio",
    "avg_word_length",
    "digits_per_kchar",
    "words_per_sentence",
)

GENRE_IDS = tuple("ABCDEFGHIJ")
UNCLASSIFIABLE = "U"

DEFAULT_RIDGE_FACTOR = 1e-6


@dataclass(frozen=True)
class SeedLabel:
    """Hand-assigned genre for one training document."""

    doc_id: str
    genre: str

    def __post_init__(self):
        if self.genre not in GENRE_IDS:
            raise ValueError(f"genre must be one of {''.join(GENRE_IDS)}")


def parse_seed_labels(stream: IO[bytes]) -> list[SeedLabel]:
    """Read "docid<TAB>genre" lines; blank lines are allowed.

    Conflicting genres for the same document raise
    :class:`MalformedLine`; exact duplicates collapse to one entry.
    """
    seen: dict[str, str] = {}
    out = []
    for lineno, raw in enumerate(stream.read().decode("latin-1").splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise MalformedLine("expected docid<TAB>genre", lineno)
        doc_id, genre = parts
        if genre not in GENRE_IDS:
            raise MalformedLine(
                f"genre must be one of {''.join(GENRE_IDS)}, got {genre!r}", lineno
            )
        if doc_id in seen:
            if seen[doc_id] != genre:
                raise MalformedLine(
                    f"document {doc_id!r} already labeled {seen[doc_id]!r}", lineno
                )
            continue
        seen[doc_id] = genre
        out.append(SeedLabel(doc_id=doc_id, genre=genre))
    return out


def feature_vector(v: StyleVector) -> tuple[np.ndarray | None, list[str]]:
    """Extract the model's feature vector; lists any missing fields."""
    values = []
    missing = []
    for name in FEATURE_NAMES:
        value = getattr(v, name)
        if value is None:
            missing.append(name)
        else:
            values.append(float(value))
    if missing:
        return None, missing
    return np.array(values, dtype=float), []


@dataclass(frozen=True)
class DiscriminantModel:
    """Fitted linear discriminant; immutable, safe to share across threads.

    Scores are computed on standardized features:
    ``g_c(z) = mean_c @ inv @ z - 0.5 * mean_c @ inv @ mean_c + log(prior_c)``.
    """

    feature_names: tuple[str, ...]
    genres: tuple[str, ...]
    standardize_mean: np.ndarray
    standardize_scale: np.ndarray
    class_means: np.ndarray
    class_priors: np.ndarray
    pooled_covariance: np.ndarray
    covariance_inverse: np.ndarray
    ridge: float
    excluded_seed_ids: tuple[str, ...]

    def weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-genre linear weights and offsets over standardized features."""
        w = self.class_means @ self.covariance_inverse
        b = -0.5 * np.einsum("ij,ij->i", w, self.class_means) + np.log(
            self.class_priors
        )
        return w, b


def fit_lda(
    seed_vectors: Mapping[str, StyleVector],
    seed_labels: Sequence[SeedLabel],
    ridge: float | None = None,
) -> DiscriminantModel:
    """Fit the discriminant from labeled seed documents.

    Seeds missing any feature are set aside (their ids end up on the
    model). Needs at least two genres with at least two complete seeds
    each, else :class:`TooFewSeeds`. ``ridge`` defaults to
    1e-6 * trace(covariance) / dim; if the regularized covariance still
    fails a Cholesky factorization, :class:`SingularCovariance` is
    raised rather than escalating the ridge.
    """
    by_doc: dict[str, str] = {}
    for seed in seed_labels:
        if seed.doc_id in by_doc and by_doc[seed.doc_id] != seed.genre:
            raise ValueError(f"conflicting genres for seed {seed.doc_id!r}")
        by_doc[seed.doc_id] = seed.genre
    rows = []
    row_genres = []
    excluded = []
    for doc_id in sorted(by_doc):
        if doc_id not in seed_vectors:
            raise ValueError(f"seed document {doc_id!r} has no style vector")
        vec, _missing = feature_vector(seed_vectors[doc_id])
        if vec is None:
            excluded.append(doc_id)
        else:
            rows.append(vec)
            row_genres.append(by_doc[doc_id])

    genres = tuple(sorted(set(row_genres)))
    if len(genres) < 2:
        raise TooFewSeeds(
            f"need at least 2 genres with usable seeds, have {len(genres)}"
        )
    for genre in genres:
        count = row_genres.count(genre)
        if count < 2:
            raise TooFewSeeds(
                f"genre {genre} has {count} complete seed(s), needs at least 2 "
                f"({len(excluded)} seed(s) excluded for missing features)"
            )

    data = np.vstack(rows)
    center = data.mean(axis=0)
    scale = data.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    z = (data - center) / scale

    dim = len(FEATURE_NAMES)
    n = len(rows)
    means = np.zeros((len(genres), dim))
    priors = np.zeros(len(genres))
    scatter = np.zeros((dim, dim))
    for i, genre in enumerate(genres):
        members = z[[j for j, g in enumerate(row_genres) if g == genre]]
        means[i] = members.mean(axis=0)
        priors[i] = len(members) / n
        centered = members - means[i]
        scatter += centered.T @ centered
    pooled = scatter / (n - len(genres))

    if ridge is None:
        ridge = DEFAULT_RIDGE_FACTOR * float(np.trace(pooled)) / dim
    regularized = pooled + ridge * np.eye(dim)
    try:
        np.linalg.cholesky(regularized)
    except np.linalg.LinAlgError:
        raise SingularCovariance(
            f"pooled covariance is not positive definite (ridge {ridge:g})"
        ) from None
    inverse = np.linalg.inv(regularized)

    return DiscriminantModel(
        feature_names=FEATURE_NAMES,
        genres=genres,
        standardize_mean=center,
        standardize_scale=scale,
        class_means=means,
        class_priors=priors,
        pooled_covariance=regularized,
        covariance_inverse=inverse,
        ridge=float(ridge),
        excluded_seed_ids=tuple(excluded),
    )


def classify(model: DiscriminantModel, x: StyleVector) -> tuple[str, dict[str, float]]:
    """Assign a genre to one document; ties go to the earlier genre id.

    Raises :class:`IncompleteVector` when a required feature is absent;
    corpus-level callers catch that and assign the reserved cluster.
    """
    vec, missing = feature_vector(x)
    if vec is None:
        raise IncompleteVector(f"missing features: {', '.join(missing)}")
    w, b = model.weights()
    z = (vec - model.standardize_mean) / model.standardize_scale
    scores = w @ z + b
    best = int(np.argmax(scores))
    return model.genres[best], {g: float(s) for g, s in zip(model.genres, scores)}


def classify_corpus(
    model: DiscriminantModel, vectors: Mapping[str, StyleVector]
) -> dict[str, str]:
    """Label every document, using cluster "U" for incomplete vectors."""
    w, b = model.weights()
    out = {}
    for doc_id in sorted(vectors):
        vec, _missing = feature_vector(vectors[doc_id])
        if vec is None:
            out[doc_id] = UNCLASSIFIABLE
            continue
        z = (vec - model.standardize_mean) / model.standardize_scale
        scores = w @ z + b
        out[doc_id] = model.genres[int(np.argmax(scores))]
    return out


@dataclass(frozen=True)
class ClusterCategoryRow:
    """One (cluster, category) cell of the cluster report."""

    cluster: str
    cluster_size: int
    pct_relevant: float
    category: CategoryLabel
    count: int
    features: dict[str, FieldMean]


def cluster_report(
    assignments: Mapping[str, str],
    vectors: Mapping[str, StyleVector],
    labels: Mapping[str, CategoryLabel],
) -> list[ClusterCategoryRow]:
    """Per-cluster composition and per-category feature means.

    Clusters are ordered by descending share of relevant documents
    (ties by cluster id), with the unclassifiable cluster always last.
    Every cluster contributes one row per category, even empty ones.
    """
    members: dict[str, list[str]] = {}
    for doc_id in sorted(assignments):
        members.setdefault(assignments[doc_id], []).append(doc_id)

    def relevant_share(cluster: str) -> float:
        ids = members[cluster]
        hits = sum(1 for d in ids if labels[d] == CategoryLabel.RELEVANT)
        return 100.0 * hits / len(ids)

    ordered = sorted(
        members,
        key=lambda c: (c == UNCLASSIFIABLE, -relevant_share(c), c),
    )
    rows = []
    for cluster in ordered:
        ids = members[cluster]
        share = relevant_share(cluster)
        by_cat: dict[CategoryLabel, list[str]] = {c: [] for c in CategoryLabel}
        for doc_id in ids:
            by_cat[labels[doc_id]].append(doc_id)
        for category in CategoryLabel:
            cat_ids = by_cat[category]
            feats = {}
            for name in FEATURE_NAMES:
                values = []
                skipped = 0
                for doc_id in cat_ids:
                    value = getattr(vectors[doc_id], name)
                    if value is None:
                        skipped += 1
                    else:
                        values.append(float(value))
                mean = sum(values) / len(values) if values else None
                feats[name] = FieldMean(mean, len(values), skipped)
            rows.append(
                ClusterCategoryRow(
                    cluster=cluster,
                    cluster_size=len(ids),
                    pct_relevant=share,
                    category=category,
                    count=len(cat_ids),
                    features=feats,
                )
            )
    return rows


def save_model(model: DiscriminantModel, stream: IO[bytes]) -> None:
    """Write the model as tab-separated text with full float precision."""
    lines = []

    def row(*cells: object) -> None:
        lines.append("\t".join(str(c) for c in cells))

    def floats(values: Iterable[float]) -> list[str]:
        return [repr(float(v)) for v in values]

    row("features", *model.feature_names)
    row("genres", *model.genres)
    row("ridge", repr(model.ridge))
    row("standardize_mean", *floats(model.standardize_mean))
    row("standardize_scale", *floats(model.standardize_scale))
    for i, genre in enumerate(model.genres):
        row("prior", genre, repr(float(model.class_priors[i])))
    for i, genre in enumerate(model.genres):
        row("mean", genre, *floats(model.class_means[i]))
    for i in range(len(model.feature_names)):
        row("covariance", i, *floats(model.pooled_covariance[i]))
    if model.excluded_seed_ids:
        row("excluded", *model.excluded_seed_ids)
    stream.write(("\n".join(lines) + "\n").encode("ascii"))


def load_model(stream: IO[bytes]) -> DiscriminantModel:
    """Rebuild a saved model; floats round-trip exactly via repr."""
    fields: dict[str, list[list[str]]] = {}
    for raw in stream.read().decode("ascii").splitlines():
        if not raw.strip():
            continue
        cells = raw.split("\t")
        fields.setdefault(cells[0], []).append(cells[1:])
    try:
        feature_names = tuple(fields["features"][0])
        genres = tuple(fields["genres"][0])
        ridge = float(fields["ridge"][0][0])
        center = np.array([float(v) for v in fields["standardize_mean"][0]])
        scale = np.array([float(v) for v in fields["standardize_scale"][0]])
        priors = {cells[0]: float(cells[1]) for cells in fields["prior"]}
        means = {cells[0]: [float(v) for v in cells[1:]] for cells in fields["mean"]}
        cov_rows = sorted(fields["covariance"], key=lambda cells: int(cells[0]))
        cov = np.array([[float(v) for v in cells[1:]] for cells in cov_rows])
        excluded = tuple(fields["excluded"][0]) if "excluded" in fields else ()
    except (KeyError, IndexError, ValueError) as exc:
        raise MalformedLine(f"model file field error: {exc}", 0) from None
    return DiscriminantModel(
        feature_names=feature_names,
        genres=genres,
        standardize_mean=center,
        standardize_scale=scale,
        class_means=np.array([means[g] for g in genres]),
        class_priors=np.array([priors[g] for g in genres]),
        pooled_covariance=cov,
        covariance_inverse=np.linalg.inv(cov),
        ridge=ridge,
        excluded_seed_ids=excluded,
    )
