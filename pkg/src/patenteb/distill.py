"""Distillation math: layer-subsampling plans, incremental PCA, MSE objective."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.linalg import eigh

from .errors import CorruptFile, DimMismatch, InsufficientData, ShapeMismatch, UnknownStudent
from .seeds import rng_for

PCA_SAMPLE_CAP = 200_000
PCA_BATCH = 8192

_LAYER_PLANS = {
    "base": (tuple(range(0, 24, 2)), 768),
    "base_small": (tuple(range(0, 24, 3)), 512),
    "small": (tuple(range(0, 24, 4)), 384),
    "mini": (tuple(range(0, 24, 6)), 256),
    "nano": (tuple(range(0, 24, 12)), 128),
}


@dataclass(frozen=True)
class LayerPlan:
    student: str
    teacher_layer_indices: tuple[int, ...]
    target_dim: int


def layer_plan(student: str) -> LayerPlan:
    """Published teacher-layer subsets and target dims for the five students."""
    key = student.removeprefix("patembed-")
    if key not in _LAYER_PLANS:
        raise UnknownStudent(student)
    indices, dim = _LAYER_PLANS[key]
    return LayerPlan(student=f"patembed-{key}", teacher_layer_indices=indices, target_dim=dim)


@dataclass(frozen=True)
class ProjectionMatrix:
    """Top-d principal axes of the teacher embedding stream.

    Rows of ``w`` are orthonormal; ``explained_variance`` is non-increasing.
    ``centered`` records whether the mean is subtracted before projecting.
    """

    w: np.ndarray  # d x dim
    mean: np.ndarray  # dim
    explained_variance: np.ndarray  # d
    centered: bool = True

    @property
    def d(self) -> int:
        return self.w.shape[0]

    @property
    def dim(self) -> int:
        return self.w.shape[1]


def fit_incremental_pca(
    embedding_stream: Iterable[np.ndarray],
    d: int,
    sample_cap: int = PCA_SAMPLE_CAP,
    batch: int = PCA_BATCH,
    seed: int = 42,
    centered: bool = True,
) -> ProjectionMatrix:
    """Reservoir-sample the stream, accumulate moments batch by batch, and
    eigendecompose the accumulated covariance.

    Eigenvector signs are fixed so each row's largest-magnitude entry is
    positive. ``centered=False`` fits the uncentered second-moment matrix for
    literal-formula projection.
    """
    rng = rng_for(seed, "pca-reservoir")
    reservoir: list[np.ndarray] = []
    seen = 0
    for row in embedding_stream:
        row = np.asarray(row, dtype=np.float64).ravel()
        if seen < sample_cap:
            reservoir.append(row)
        else:
            j = int(rng.integers(0, seen + 1))
            if j < sample_cap:
                reservoir[j] = row
        seen += 1
    n = len(reservoir)
    if n == 0:
        raise InsufficientData("empty embedding stream")
    dim = reservoir[0].shape[0]
    if n <= d:
        raise InsufficientData(f"{n} samples cannot support d={d}")
    if d >= dim:
        raise DimMismatch(f"target d={d} must be smaller than stream dim={dim}")

    total = np.zeros(dim, dtype=np.float64)
    outer = np.zeros((dim, dim), dtype=np.float64)
    count = 0
    for start in range(0, n, batch):
        block = np.stack(reservoir[start : start + batch])
        total += block.sum(axis=0)
        outer += block.T @ block
        count += block.shape[0]

    mean = total / count
    if centered:
        cov = (outer - count * np.outer(mean, mean)) / (count - 1)
    else:
        cov = outer / (count - 1)
    eigvals, eigvecs = eigh(cov)
    order = np.argsort(eigvals)[::-1][:d]
    variances = eigvals[order]
    w = eigvecs[:, order].T.copy()
    for row in w:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return ProjectionMatrix(
        w=w,
        mean=mean if centered else np.zeros(dim),
        explained_variance=variances,
        centered=centered,
    )


def project(proj: ProjectionMatrix, x: np.ndarray) -> np.ndarray:
    """Project one vector or a row matrix onto the fitted subspace."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != proj.dim:
        raise DimMismatch(f"expected dim {proj.dim}, got {x.shape[-1]}")
    return (x - proj.mean) @ proj.w.T


def mse_distill_objective(
    student_vecs: np.ndarray, teacher_vecs: np.ndarray, proj: ProjectionMatrix
) -> tuple[float, np.ndarray]:
    """Mean squared distance to the projected teacher, with its gradient."""
    s = np.asarray(student_vecs, dtype=np.float64)
    t = np.asarray(teacher_vecs, dtype=np.float64)
    if s.ndim != 2 or t.ndim != 2 or s.shape[0] != t.shape[0]:
        raise ShapeMismatch("student and teacher must be row-aligned matrices")
    if s.shape[1] != proj.d:
        raise ShapeMismatch(f"student dim {s.shape[1]} != projection d {proj.d}")
    target = project(proj, t)
    diff = s - target
    n = s.shape[0]
    value = float(np.sum(diff * diff) / n)
    grad = 2.0 * diff / n
    return value, grad


_PROJ_MAGIC = b"PTEB-PRJ"


def store_projection(proj: ProjectionMatrix, path: str | Path) -> None:
    header = {
        "d": proj.d,
        "dim": proj.dim,
        "centered": proj.centered,
        "explained_variance": [float(v) for v in proj.explained_variance],
    }
    with Path(path).open("wb") as fh:
        fh.write(_PROJ_MAGIC)
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode("utf-8"))
        fh.write(proj.mean.astype("<f4").tobytes())
        fh.write(proj.w.astype("<f4").tobytes())


def load_projection(path: str | Path) -> ProjectionMatrix:
    with Path(path).open("rb") as fh:
        magic = fh.read(len(_PROJ_MAGIC))
        if magic != _PROJ_MAGIC:
            raise CorruptFile(f"bad magic in {path}")
        header = json.loads(fh.readline().decode("utf-8"))
        d, dim = header["d"], header["dim"]
        mean_bytes = fh.read(4 * dim)
        w_bytes = fh.read(4 * d * dim)
        if len(mean_bytes) != 4 * dim or len(w_bytes) != 4 * d * dim:
            raise CorruptFile(f"truncated projection file {path}")
        mean = np.frombuffer(mean_bytes, dtype="<f4").astype(np.float64)
        w = np.frombuffer(w_bytes, dtype="<f4").astype(np.float64).reshape(d, dim)
    return ProjectionMatrix(
        w=w,
        mean=mean,
        explained_variance=np.asarray(header["explained_variance"], dtype=np.float64),
        centered=header["centered"],
    )
