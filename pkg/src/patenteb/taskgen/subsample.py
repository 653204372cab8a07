"""Conservative stratified subsampling with per-stratum floors."""

from __future__ import annotations

from ..seeds import rng_for
from .records import TaskDataset


def _allocate(sizes: dict[str, int], cap: int, min_per_stratum: int) -> dict[str, int]:
    """Proportional quotas by largest remainder, then raise each stratum to
    min(min_per_stratum, size) and shave the largest quotas back toward the
    cap. The floor guarantee wins over the cap when both cannot hold."""
    total = sum(sizes.values())
    raw = {s: cap * n / total for s, n in sizes.items()}
    quota = {s: int(raw[s]) for s in sizes}
    shortfall = cap - sum(quota.values())
    by_remainder = sorted(sizes, key=lambda s: (-(raw[s] - quota[s]), s))
    for s in by_remainder[:shortfall]:
        quota[s] += 1
    for s, n in sizes.items():
        quota[s] = max(quota[s], min(min_per_stratum, n))
        quota[s] = min(quota[s], n)
    while sum(quota.values()) > cap:
        reducible = [s for s in quota if quota[s] > min(min_per_stratum, sizes[s])]
        if not reducible:
            break
        target = max(reducible, key=lambda s: (quota[s], s))
        quota[target] -= 1
    return quota


def stratified_subsample(
    dataset: TaskDataset, max_per_task: int, min_per_stratum: int, seed: int
) -> TaskDataset:
    """Seeded proportional sampling; every original stratum stays represented.

    Identity when the dataset already fits under the cap. Surviving records
    keep their original relative order.
    """
    if len(dataset) <= max_per_task:
        return dataset
    positions: dict[str, list[int]] = {}
    for i, record in enumerate(dataset.records):
        positions.setdefault(record.stratum, []).append(i)
    sizes = {s: len(p) for s, p in positions.items()}
    quota = _allocate(sizes, max_per_task, min_per_stratum)

    keep: list[int] = []
    for stratum in sorted(positions):
        pool = positions[stratum]
        rng = rng_for(seed, dataset.task_id, dataset.split, "subsample", stratum)
        perm = rng.permutation(len(pool))
        keep.extend(pool[i] for i in perm[: quota[stratum]])
    keep.sort()
    out = TaskDataset(
        task_id=dataset.task_id,
        split=dataset.split,
        kind=dataset.kind,
        records=[dataset.records[i] for i in keep],
        skipped=dict(dataset.skipped),
    )
    out.skip("subsampled_out", len(dataset) - len(keep))
    return out
