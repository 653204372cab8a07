"""Typed task records and the TaskDataset container.

``stratum`` rides along for stratified subsampling (domain for retrieval,
label for classification and pairs) and is not exported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator


@dataclass(frozen=True)
class RetrievalTriplet:
    query_id: str
    positive_id: str
    negative_id: str
    query_text: str
    positive_text: str
    negative_text: str
    relation: str
    stratum: str = ""


@dataclass(frozen=True)
class PairRecord:
    text1: str
    text2: str
    label: int
    stratum: str = ""


@dataclass(frozen=True)
class LabeledText:
    text: str
    label: str
    stratum: str = ""


@dataclass(frozen=True)
class ClusterMember:
    text: str
    cluster_id: str
    stratum: str = ""


@dataclass
class TaskDataset:
    """All records of one task for one split."""

    task_id: str
    split: str
    kind: str  # triplet | pair | labeled | cluster
    records: list = field(default_factory=list)
    skipped: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator:
        return iter(self.records)

    def skip(self, reason: str, count: int = 1) -> None:
        self.skipped[reason] = self.skipped.get(reason, 0) + count
