"""Dominant-IPC3 assignment, domain relationships, filtering, stratified splits."""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .corpus import Corpus, IngestStats, PatentFamily
from .errors import EmptyIpcSet, NoIpcCodes, StratumTooSmall
from .seeds import rng_for

SPLITS = ("train", "validation", "test")


class DomainRelation(Enum):
    """How two families' IPC3 sets relate; the four cases partition set space."""

    IN = "IN"
    OUT = "OUT"
    FULL_MIX = "FULL_MIX"
    PART_MIX = "PART_MIX"


def dominant_ipc3(family: PatentFamily) -> str:
    """Most frequent IPC3 code of a family, ties broken lexicographically."""
    if not family.ipc_codes:
        raise NoIpcCodes(family.family_id)
    counts = Counter(family.ipc_codes)
    return min(counts, key=lambda code: (-counts[code], code))


def classify_relation(q: Iterable[str], t: Iterable[str]) -> DomainRelation:
    """Classify the relationship between two non-empty IPC3 code sets."""
    qs, ts = frozenset(q), frozenset(t)
    if not qs or not ts:
        raise EmptyIpcSet("both IPC3 sets must be non-empty")
    if qs == ts:
        return DomainRelation.IN
    if not qs & ts:
        return DomainRelation.OUT
    if qs < ts or ts < qs:
        return DomainRelation.FULL_MIX
    return DomainRelation.PART_MIX


def filter_domains(corpus: Corpus, min_per_class: int = 100) -> tuple[Corpus, dict[str, int]]:
    """Keep families whose dominant-IPC3 stratum has at least ``min_per_class`` members.

    Returns the filtered corpus and the retained domain -> size map.
    """
    strata: dict[str, list[PatentFamily]] = {}
    for fam in corpus:
        strata.setdefault(dominant_ipc3(fam), []).append(fam)
    retained = {dom: fams for dom, fams in strata.items() if len(fams) >= min_per_class}
    kept = [fam for fams in retained.values() for fam in fams]
    stats = IngestStats(accepted=len(kept))
    stats.reject_reasons["below_min_per_class"] = len(corpus) - len(kept)
    sizes = {dom: len(fams) for dom, fams in sorted(retained.items())}
    return Corpus(kept, stats), sizes


@dataclass
class SplitAssignment:
    """family_id -> split, with the stratum used for stratification."""

    assignment: dict[str, str]
    stratum_of: dict[str, str]
    warnings: list[str] = field(default_factory=list)

    def split_of(self, family_id: str) -> str:
        return self.assignment[family_id]

    def members(self, split: str) -> list[str]:
        return sorted(fid for fid, s in self.assignment.items() if s == split)

    def to_records(self) -> list[dict]:
        return [
            {"family_id": fid, "split": self.assignment[fid], "stratum": self.stratum_of[fid]}
            for fid in sorted(self.assignment)
        ]


def stratified_split(
    corpus: Corpus,
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 42,
) -> SplitAssignment:
    """Per-stratum seeded shuffle and partition into train/validation/test.

    Validation and test receive floor(ratio * n) families each; rounding
    remainders go to train. Strata with fewer than 10 families cannot honor
    all three splits and go entirely to train with a warning.
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("ratios must sum to 1")
    strata: dict[str, list[str]] = {}
    for fam in corpus:
        strata.setdefault(dominant_ipc3(fam), []).append(fam.family_id)

    assignment: dict[str, str] = {}
    stratum_of: dict[str, str] = {}
    warns: list[str] = []
    for stratum in sorted(strata):
        ids = sorted(strata[stratum])
        for fid in ids:
            stratum_of[fid] = stratum
        if len(ids) < 10:
            msg = f"stratum {stratum} has {len(ids)} families (<10): assigned to train"
            warns.append(msg)
            warnings.warn(msg, category=UserWarning, stacklevel=2)
            for fid in ids:
                assignment[fid] = "train"
            continue
        rng = rng_for(seed, "split", stratum)
        order = [ids[i] for i in rng.permutation(len(ids))]
        n = len(order)
        n_val = int(n * ratios[1])
        n_test = int(n * ratios[2])
        n_train = n - n_val - n_test
        for fid in order[:n_train]:
            assignment[fid] = "train"
        for fid in order[n_train : n_train + n_val]:
            assignment[fid] = "validation"
        for fid in order[n_train + n_val :]:
            assignment[fid] = "test"
    return SplitAssignment(assignment=assignment, stratum_of=stratum_of, warnings=warns)


__all__ = [
    "DomainRelation",
    "SplitAssignment",
    "SPLITS",
    "classify_relation",
    "dominant_ipc3",
    "filter_domains",
    "stratified_split",
    "StratumTooSmall",
]
