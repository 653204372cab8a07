"""Training-loss kernels with analytic gradients, at desk scale.

Each kernel returns (value, gradients) in float64. Gradients are exact with
respect to the raw embedding rows, including the cosine normalization terms,
so central finite differences validate them directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BatchTooSmall, NoValidAnchors
from .tasks import TRAINING_TASK_IDS


@dataclass(frozen=True)
class LossConfig:
    """Loss hyperparameters: softmax temperature and contrastive margin."""

    temperature: float = 0.05
    margin: float = 0.5

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if not 0 < self.margin < 1:
            raise ValueError("margin must lie in (0, 1)")


def _unit(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = np.asarray(m, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero-norm embedding row")
    return m / norms[:, None], norms


def _cosine_pair_grads(
    e1: np.ndarray, e2: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-row cosine and its gradients wrt each raw row."""
    u1, n1 = _unit(e1)
    u2, n2 = _unit(e2)
    cos = np.sum(u1 * u2, axis=1)
    d1 = (u2 - cos[:, None] * u1) / n1[:, None]
    d2 = (u1 - cos[:, None] * u2) / n2[:, None]
    return cos, d1, d2


def mnr_loss(
    anchors: np.ndarray, positives: np.ndarray, cfg: LossConfig = LossConfig()
) -> tuple[float, dict[str, np.ndarray]]:
    """In-batch softmax ranking loss over anchor/positive cosine logits."""
    a = np.asarray(anchors, dtype=np.float64)
    p = np.asarray(positives, dtype=np.float64)
    b = a.shape[0]
    if b < 2:
        raise BatchTooSmall("need at least 2 anchor/positive pairs")
    a_hat, a_norm = _unit(a)
    p_hat, p_norm = _unit(p)
    sims = a_hat @ p_hat.T
    logits = sims / cfg.temperature
    logits_shift = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(logits_shift)
    softmax = exp / exp.sum(axis=1, keepdims=True)
    log_probs = logits_shift - np.log(exp.sum(axis=1, keepdims=True))
    value = float(-np.mean(np.diag(log_probs)))

    grad_sims = (softmax - np.eye(b)) / (b * cfg.temperature)
    row_dot = np.sum(grad_sims * sims, axis=1)
    col_dot = np.sum(grad_sims * sims, axis=0)
    grad_a = (grad_sims @ p_hat - row_dot[:, None] * a_hat) / a_norm[:, None]
    grad_p = (grad_sims.T @ a_hat - col_dot[:, None] * p_hat) / p_norm[:, None]
    return value, {"anchors": grad_a, "positives": grad_p}


def online_contrastive_loss(
    e1: np.ndarray, e2: np.ndarray, y: np.ndarray, cfg: LossConfig = LossConfig()
) -> tuple[float, dict[str, np.ndarray]]:
    """Squared-distance pull on positives, squared margin-hinge push on negatives."""
    labels = np.asarray(y, dtype=np.float64)
    cos, d1, d2 = _cosine_pair_grads(e1, e2)
    hinge = np.maximum(0.0, cos - cfg.margin)
    per_pair = labels * (1.0 - cos) ** 2 + (1.0 - labels) * hinge**2
    value = float(np.mean(per_pair))
    dcos = -2.0 * labels * (1.0 - cos) + 2.0 * (1.0 - labels) * hinge
    scale = dcos / len(labels)
    return value, {"e1": scale[:, None] * d1, "e2": scale[:, None] * d2}


def batch_hard_triplet_loss(
    embeddings: np.ndarray, class_labels, cfg: LossConfig = LossConfig()
) -> tuple[float, dict[str, np.ndarray], int]:
    """Soft-margin triplet loss over the hardest in-batch positive/negative.

    Anchors lacking a same-class other or a different-class element are
    skipped; the skip count is returned. Subgradients flow only through the
    selected pair (lowest index on ties).
    """
    e = np.asarray(embeddings, dtype=np.float64)
    labels = np.asarray(class_labels)
    e_hat, norms = _unit(e)
    sims = e_hat @ e_hat.T
    b = e.shape[0]

    grad_sims = np.zeros_like(sims)
    losses: list[float] = []
    skipped = 0
    for i in range(b):
        same = np.flatnonzero((labels == labels[i]) & (np.arange(b) != i))
        diff = np.flatnonzero(labels != labels[i])
        if same.size == 0 or diff.size == 0:
            skipped += 1
            continue
        p_star = int(same[np.argmin(sims[i, same])])
        n_star = int(diff[np.argmax(sims[i, diff])])
        gap = sims[i, n_star] - sims[i, p_star]
        losses.append(float(np.logaddexp(0.0, gap)))
        sig = 1.0 / (1.0 + np.exp(-gap))
        grad_sims[i, n_star] += sig
        grad_sims[i, p_star] -= sig
    if not losses:
        raise NoValidAnchors("no anchor has both a positive and a negative in batch")
    n_valid = len(losses)
    grad_sims /= n_valid
    value = float(np.mean(np.asarray(losses)))

    # route dL/dS through the cosine of unit rows back to the raw rows
    sym = grad_sims + grad_sims.T
    row_dot = np.sum(grad_sims * sims, axis=1) + np.sum(grad_sims * sims, axis=0)
    grad_e = (sym @ e_hat - row_dot[:, None] * e_hat) / norms[:, None]
    return value, {"embeddings": grad_e}, skipped


def pair_softmax_loss(
    e1: np.ndarray, e2: np.ndarray, y: np.ndarray, weights: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """Two-class cross-entropy over a linear head on concatenated embeddings."""
    e1 = np.asarray(e1, dtype=np.float64)
    e2 = np.asarray(e2, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    labels = np.asarray(y, dtype=np.int64)
    b, d = e1.shape
    if w.shape != (2, 2 * d):
        raise ValueError(f"weights must be (2, {2 * d})")
    z = np.concatenate([e1, e2], axis=1)
    logits = z @ w.T
    logits_shift = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(logits_shift)
    softmax = exp / exp.sum(axis=1, keepdims=True)
    log_probs = logits_shift - np.log(exp.sum(axis=1, keepdims=True))
    value = float(-np.mean(log_probs[np.arange(b), labels]))

    one_hot = np.zeros_like(softmax)
    one_hot[np.arange(b), labels] = 1.0
    dlogits = (softmax - one_hot) / b
    grad_w = dlogits.T @ z
    dz = dlogits @ w
    return value, {"e1": dz[:, :d], "e2": dz[:, d:], "weights": grad_w}


def multitask_sum(task_losses: dict[str, float], weights: dict[str, float] | None = None) -> float:
    """Uniformly weighted sum over the 13 training-task losses."""
    missing = set(TRAINING_TASK_IDS) - set(task_losses)
    extra = set(task_losses) - set(TRAINING_TASK_IDS)
    if missing or extra:
        warnings.warn(
            f"task set mismatch (missing={sorted(missing)}, extra={sorted(extra)}); "
            "summing over present training tasks",
            category=UserWarning,
            stacklevel=2,
        )
    total = 0.0
    for task in TRAINING_TASK_IDS:
        if task in task_losses:
            lam = 1.0 if weights is None else weights.get(task, 1.0)
            total += lam * task_losses[task]
    return total
