"""Deployment-optimization harnesses: truncation, layer pruning, structural trims."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .embed_io import EmbeddingMatrix, l2_normalize
from .errors import BadDimension, ProviderLacksLayerCap

TRUNCATION_GRID = (32, 64, 128, 256, 512, 768, 1024)
LAYER_GRID = (8, 12, 16, 20, 23, 24)
FP16_BYTES = 2


def truncate_embeddings(matrix: EmbeddingMatrix, d: int) -> EmbeddingMatrix:
    """Keep the first ``d`` coordinates of each row, re-normalized to unit
    norm (cosine is scale-invariant, so rankings are unaffected)."""
    if not 1 <= d <= matrix.dim:
        raise BadDimension(f"D={d} outside [1, {matrix.dim}]")
    rows = l2_normalize(matrix.rows[:, :d].astype(np.float64)).astype(np.float32)
    return replace(
        matrix,
        rows=rows,
        normalized=True,
        provenance=replace(matrix.provenance, truncated_dim=d),
    )


def storage_estimate(d: int, count: int, bytes_per_value: int = FP16_BYTES) -> float:
    """Embedding storage in megabytes at the given precision."""
    return d * bytes_per_value * count / 1e6


@dataclass(frozen=True)
class PruneStats:
    layer_cap: int
    wall_seconds: float
    per_text_seconds: float
    speed_ratio_vs_full: float | None = None


def layer_prune_eval(run_config, layer_cap: int):
    """Re-embed all evaluation texts with the first ``layer_cap`` transformer
    layers and produce a full report plus timing stats.

    ``run_config`` is a report.EvalRunConfig whose provider must advertise
    layer capping via /info.
    """
    from .report import evaluate_run

    provider = run_config.provider
    max_layers = getattr(provider, "max_layers", None)
    if max_layers is None:
        raise ProviderLacksLayerCap(getattr(provider, "name", "provider"))
    if not 1 <= layer_cap <= max_layers:
        raise BadDimension(f"layer cap {layer_cap} outside [1, {max_layers}]")

    started = time.monotonic()
    capped_config = replace(run_config, layer_cap=layer_cap)
    report, n_texts = evaluate_run(capped_config, return_text_count=True)
    elapsed = time.monotonic() - started
    stats = PruneStats(
        layer_cap=layer_cap,
        wall_seconds=elapsed,
        per_text_seconds=elapsed / max(n_texts, 1),
    )
    return report, stats


def layer_prune_grid(run_config, layer_caps=LAYER_GRID):
    """One report per grid point, joined into a pruning-curve table."""
    provider = run_config.provider
    max_layers = getattr(provider, "max_layers", None)
    if max_layers is None:
        raise ProviderLacksLayerCap(getattr(provider, "name", "provider"))
    caps = [cap for cap in layer_caps if cap <= max_layers]
    results = []
    full_stats: PruneStats | None = None
    for cap in sorted(caps, reverse=True):
        report, stats = layer_prune_eval(run_config, cap)
        if cap == max_layers:
            full_stats = stats
        if full_stats is not None and full_stats.per_text_seconds > 0:
            stats = replace(
                stats, speed_ratio_vs_full=full_stats.per_text_seconds / stats.per_text_seconds
            )
        results.append((cap, report, stats))
    return results


def structural_trim_eval(run_config, variant: str):
    """Re-assemble all evaluation texts under ``variant``, re-embed, and
    produce a full report. Requires the corpus (records are re-rendered, not
    re-selected)."""
    from .report import evaluate_run

    trimmed = replace(run_config, variant=variant)
    return evaluate_run(trimmed)
