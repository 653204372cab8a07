"""Independent reference implementations used to cross-check the toolkit.

Everything here is deliberately written on a different route than the
production code: plain loops, dict counting, textbook formulas, full-batch
decompositions. Tests and `patenteb verify` compare the two paths.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


def ndcg_bruteforce(ranking: Sequence[str], relevant: set[str], k: int) -> float:
    dcg = 0.0
    for pos, cand in enumerate(ranking[:k], start=1):
        if cand in relevant:
            dcg += 1.0 / math.log2(pos + 1)
    idcg = 0.0
    for pos in range(1, min(k, len(relevant)) + 1):
        idcg += 1.0 / math.log2(pos + 1)
    return dcg / idcg


def pearson_twopass(x: Sequence[float], y: Sequence[float]) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    dx = math.sqrt(sum((a - mx) ** 2 for a in x))
    dy = math.sqrt(sum((b - my) ** 2 for b in y))
    return num / (dx * dy)


def vmeasure_contingency(assignment: Sequence, truth: Sequence) -> tuple[float, float, float]:
    """(homogeneity, completeness, v) from dict-counted contingency entropies."""
    n = len(truth)
    class_counts: dict = {}
    cluster_counts: dict = {}
    joint_counts: dict = {}
    for cls, clu in zip(truth, assignment):
        class_counts[cls] = class_counts.get(cls, 0) + 1
        cluster_counts[clu] = cluster_counts.get(clu, 0) + 1
        joint_counts[(cls, clu)] = joint_counts.get((cls, clu), 0) + 1

    def entropy(counts: dict) -> float:
        total = 0.0
        for c in counts.values():
            p = c / n
            total -= p * math.log(p)
        return total

    h_class = entropy(class_counts)
    h_cluster = entropy(cluster_counts)
    h_class_given_cluster = 0.0
    h_cluster_given_class = 0.0
    for (cls, clu), c in joint_counts.items():
        p = c / n
        h_class_given_cluster -= p * math.log(c / cluster_counts[clu])
        h_cluster_given_class -= p * math.log(c / class_counts[cls])
    h = 1.0 if h_class == 0 else 1.0 - h_class_given_cluster / h_class
    c = 1.0 if h_cluster == 0 else 1.0 - h_cluster_given_class / h_cluster
    v = 2 * h * c / (h + c) if (h + c) > 0 else 0.0
    return h, c, v


def macro_f1_confusion(
    y_true: Sequence[str], y_pred: Sequence[str], labels: Sequence[str]
) -> float:
    f1_total = 0.0
    for label in labels:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == label and p == label)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != label and p == label)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == label and p != label)
        if tp == 0 and (fp > 0 or fn > 0):
            f1 = 0.0
        elif tp == 0:
            f1 = 0.0  # class absent from truth and predictions
        else:
            precision = tp / (tp + fp)
            recall = tp / (tp + fn)
            f1 = 2 * precision * recall / (precision + recall)
        f1_total += f1
    return f1_total / len(labels)


def pca_fullbatch(x: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(components d x dim, explained variances, mean) via np.cov + eigh."""
    x = np.asarray(x, dtype=np.float64)
    mean = x.mean(axis=0)
    cov = np.cov(x, rowvar=False, ddof=1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:d]
    comps = eigvecs[:, order].T.copy()
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return comps, eigvals[order], mean


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Angles between the row spaces of two orthonormal-row matrices."""
    qa = np.linalg.qr(a.T)[0]
    qb = np.linalg.qr(b.T)[0]
    sv = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))


def finite_difference_gradient(
    f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-4
) -> np.ndarray:
    """Central finite differences, one entry at a time, at 64-bit precision."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = grad.ravel()
    x_flat = x.ravel()
    for i in range(x_flat.size):
        orig = x_flat[i]
        x_flat[i] = orig + h
        up = f(x)
        x_flat[i] = orig - h
        down = f(x)
        x_flat[i] = orig
        flat[i] = (up - down) / (2 * h)
    return grad


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """max |a - n| / max(1, |a|, |n|) over all entries."""
    analytic = np.asarray(analytic, dtype=np.float64).ravel()
    numeric = np.asarray(numeric, dtype=np.float64).ravel()
    scale = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
    return float(np.max(np.abs(analytic - numeric) / scale))
