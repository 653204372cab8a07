"""Task metrics: NDCG@10, Pearson, macro-F1 probe, V-measure, Overall Score.

All reductions run in a fixed order over numpy's pairwise summation so
serial and parallel callers agree bitwise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ClassMissingFromSubset,
    DegenerateInput,
    EmptyRelevantSet,
    LengthMismatch,
    TooFewPoints,
    WrongTaskCount,
)
from .seeds import rng_for

NDCG_DEPTH = 10
PROBE_SUBSET_FRACTION = 0.20
KMEANS_BATCH_SIZE = 16384
KMEANS_SEED = 42
TASK_COUNT = 15


def rank_candidates(scores: np.ndarray, candidate_ids: Sequence[str]) -> list[str]:
    """Order candidates by descending score, ties broken by ascending id."""
    ids = np.asarray(candidate_ids)
    order = np.lexsort((ids, -np.asarray(scores, dtype=np.float64)))
    return [str(i) for i in ids[order]]


def ndcg_at_k(ranking: Sequence[str], relevant_set: Iterable[str], k: int = NDCG_DEPTH) -> float:
    """Binary-relevance NDCG at depth ``k`` against an ideal ranking."""
    relevant = set(relevant_set)
    if not relevant:
        raise EmptyRelevantSet("query has no relevant candidates")
    top = ranking[:k]
    positions = np.arange(1, len(top) + 1, dtype=np.float64)
    gains = np.array([1.0 if cand in relevant else 0.0 for cand in top])
    dcg = float(np.sum(gains / np.log2(positions + 1.0)))
    ideal_positions = np.arange(1, min(k, len(relevant)) + 1, dtype=np.float64)
    idcg = float(np.sum(1.0 / np.log2(ideal_positions + 1.0)))
    return dcg / idcg


@dataclass(frozen=True)
class QueryPool:
    """One retrieval query: its candidates are ranked against relevant ids."""

    query_id: str
    relevant: frozenset[str]


def retrieval_task_score(
    pools: Sequence[QueryPool],
    query_matrix: np.ndarray,
    doc_matrix: np.ndarray,
    doc_ids: Sequence[str],
    k: int = NDCG_DEPTH,
) -> tuple[float, int, int]:
    """Mean NDCG@k over queries with at least one relevant candidate.

    ``query_matrix`` row i embeds pools[i]; the candidate pool (``doc_ids``
    rows of ``doc_matrix``) is shared by all queries. Returns
    (mean, n_evaluated, n_skipped).
    """
    if len(pools) != query_matrix.shape[0]:
        raise LengthMismatch("one query row per pool required")
    ids = np.asarray(doc_ids)
    doc_unit = _unit_rows(doc_matrix)
    query_unit = _unit_rows(query_matrix)
    values: list[float] = []
    skipped = 0
    for i, pool in enumerate(pools):
        relevant = pool.relevant & set(doc_ids)
        if not relevant:
            skipped += 1
            continue
        sims = doc_unit @ query_unit[i]
        order = np.lexsort((ids, -sims))
        ranking = [str(x) for x in ids[order[:k]]]
        values.append(ndcg_at_k(ranking, relevant, k=k))
    if not values:
        return 0.0, 0, skipped
    return float(np.mean(np.asarray(values, dtype=np.float64))), len(values), skipped


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return m / norms


def pearson(scores: Sequence[float], labels: Sequence[float]) -> float:
    """Product-moment correlation; DegenerateInput on constant vectors."""
    x = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch("score and label vectors must have equal length")
    if x.size < 2:
        raise LengthMismatch("need at least two pairs")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateInput("constant input vector")
    return float(np.corrcoef(x, y)[0, 1])


def macro_f1(y_true: Sequence[str], y_pred: Sequence[str], labels: Sequence[str]) -> float:
    """Unweighted mean of per-class F1 over ``labels``; absent classes score 0."""
    from sklearn.metrics import f1_score

    return float(
        f1_score(list(y_true), list(y_pred), labels=list(labels), average="macro", zero_division=0)
    )


def stratified_probe_subset(
    labels: Sequence[str], fraction: float, seed: int
) -> np.ndarray:
    """Seeded per-class index sample preserving the class distribution.

    Each class contributes round(fraction * n) members, at least one.
    """
    labels_arr = np.asarray(labels)
    picked: list[int] = []
    for label in sorted(set(labels_arr.tolist())):
        idx = np.flatnonzero(labels_arr == label)
        n_keep = max(1, int(round(fraction * idx.size)))
        rng = rng_for(seed, "probe-subset", label)
        perm = rng.permutation(idx.size)
        picked.extend(int(idx[j]) for j in perm[:n_keep])
    return np.asarray(sorted(picked), dtype=np.int64)


def macro_f1_probe(
    train_embeddings: np.ndarray,
    train_labels: Sequence[str],
    test_embeddings: np.ndarray,
    test_labels: Sequence[str],
    subset_fraction: float = PROBE_SUBSET_FRACTION,
    seed: int = 0,
) -> float:
    """Fit a logistic-regression probe on a stratified training subset and
    score macro-F1 on the test labels.

    The probe uses L2 regularization (C=1.0), lbfgs with max_iter=10000 and
    tol=1e-4, falling back to saga if lbfgs fails to converge.
    """
    from sklearn.exceptions import ConvergenceWarning
    from sklearn.linear_model import LogisticRegression

    train_labels = [str(v) for v in train_labels]
    test_labels = [str(v) for v in test_labels]
    train_classes = set(train_labels)
    missing = sorted(set(test_labels) - train_classes)
    if missing:
        raise ClassMissingFromSubset(f"test classes absent from training data: {missing}")

    subset = stratified_probe_subset(train_labels, subset_fraction, seed)
    sub_x = np.asarray(train_embeddings, dtype=np.float64)[subset]
    sub_y = [train_labels[i] for i in subset]
    if set(sub_y) != train_classes:
        raise ClassMissingFromSubset("stratified subset lost a class")

    def fit(solver: str) -> LogisticRegression:
        clf = LogisticRegression(
            C=1.0, solver=solver, max_iter=10000, tol=1e-4, random_state=0
        )
        clf.fit(sub_x, sub_y)
        return clf

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", category=ConvergenceWarning)
        clf = fit("lbfgs")
        if any(issubclass(w.category, ConvergenceWarning) for w in caught):
            clf = fit("saga")

    preds = clf.predict(np.asarray(test_embeddings, dtype=np.float64))
    labels = sorted(train_classes | set(test_labels))
    return macro_f1(test_labels, [str(p) for p in preds], labels)


@dataclass(frozen=True)
class ClusteringScore:
    homogeneity: float
    completeness: float
    v: float


def v_measure(assignment: Sequence, truth: Sequence) -> ClusteringScore:
    """Homogeneity/completeness/V from contingency entropies (natural log)."""
    if len(assignment) != len(truth):
        raise LengthMismatch("assignment and truth must have equal length")
    if len(truth) == 0:
        raise LengthMismatch("empty inputs")
    classes, class_idx = np.unique(np.asarray(truth, dtype=object), return_inverse=True)
    clusters, cluster_idx = np.unique(np.asarray(assignment, dtype=object), return_inverse=True)
    n = len(truth)
    contingency = np.zeros((classes.size, clusters.size), dtype=np.float64)
    np.add.at(contingency, (class_idx, cluster_idx), 1.0)

    p_class = contingency.sum(axis=1) / n
    p_cluster = contingency.sum(axis=0) / n
    h_class = _entropy(p_class)
    h_cluster = _entropy(p_cluster)

    joint = contingency / n
    with np.errstate(divide="ignore", invalid="ignore"):
        log_cond_class = np.where(joint > 0, np.log(joint) - np.log(p_cluster[None, :]), 0.0)
        log_cond_cluster = np.where(joint > 0, np.log(joint) - np.log(p_class[:, None]), 0.0)
    h_class_given_cluster = -float(np.sum(joint * log_cond_class))
    h_cluster_given_class = -float(np.sum(joint * log_cond_cluster))

    homogeneity = 1.0 if h_class == 0.0 else 1.0 - h_class_given_cluster / h_class
    completeness = 1.0 if h_cluster == 0.0 else 1.0 - h_cluster_given_class / h_cluster
    if homogeneity + completeness > 0:
        v = 2.0 * homogeneity * completeness / (homogeneity + completeness)
    else:
        v = 0.0
    return ClusteringScore(homogeneity=homogeneity, completeness=completeness, v=v)


def _entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return -float(np.sum(nz * np.log(nz)))


def kmeans_cluster(
    embeddings: np.ndarray,
    n_clusters: int,
    batch_size: int = KMEANS_BATCH_SIZE,
    seed: int = KMEANS_SEED,
) -> np.ndarray:
    """Mini-batch k-means assignment with greedy seeding and 3 restarts."""
    from sklearn.cluster import MiniBatchKMeans

    x = np.asarray(embeddings, dtype=np.float64)
    if x.shape[0] < n_clusters:
        raise TooFewPoints(f"{x.shape[0]} points for {n_clusters} clusters")
    model = MiniBatchKMeans(
        n_clusters=n_clusters,
        batch_size=batch_size,
        random_state=seed,
        n_init=3,
        init="k-means++",
    )
    return model.fit_predict(x)


def overall_score(task_scores: Sequence[float]) -> float:
    """Unweighted mean over exactly the 15 task primary metrics."""
    if len(task_scores) != TASK_COUNT:
        raise WrongTaskCount(f"expected {TASK_COUNT} scores, got {len(task_scores)}")
    return float(np.mean(np.asarray(task_scores, dtype=np.float64)))
