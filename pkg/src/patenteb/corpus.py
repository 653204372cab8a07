"""Patent-family data model, corpus ingestion, citation graph, text assembly.

A corpus file (Parquet or JSONL) holds one record per simple patent family
with columns: family_id, title, abstract, first_claim, ipc_codes,
inventors, filing_date (YYYY-MM-DD), cites, cited_by_count_5y,
cited_by_count_total.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import DuplicateFamilyId, EmptyText, MissingFile, SchemaMismatch

SEPARATOR = "[SEP]"
TOKEN_CAP = 8192

CORPUS_COLUMNS = (
    "family_id",
    "title",
    "abstract",
    "first_claim",
    "ipc_codes",
    "inventors",
    "filing_date",
    "cites",
    "cited_by_count_5y",
    "cited_by_count_total",
)

STRUCTURAL_VARIANTS = (
    "full",
    "noSEP",
    "trim1",
    "trimLast",
    "trim1Last",
    "noSEP+trim1",
    "noSEP+trimLast",
    "noSEP+trim1Last",
)


@dataclass(frozen=True)
class PatentFamily:
    """One simple patent family, the atomic document unit.

    ``ipc_codes`` keeps the source order including duplicates (dominance
    counts multiplicity); ``ipc_set`` is the deduplicated view used for
    domain-relationship logic.
    """

    family_id: str
    title: str
    abstract: str
    first_claim: str
    ipc_codes: tuple[str, ...]
    inventors: frozenset[str]
    filing_date: dt.date
    cites: frozenset[str]
    cited_by_count_5y: int
    cited_by_count_total: int

    @property
    def ipc_set(self) -> frozenset[str]:
        return frozenset(self.ipc_codes)


@dataclass
class IngestStats:
    accepted: int = 0
    rejected: int = 0
    reject_reasons: dict[str, int] = field(default_factory=dict)

    def reject(self, reason: str) -> None:
        self.rejected += 1
        self.reject_reasons[reason] = self.reject_reasons.get(reason, 0) + 1


class Corpus:
    """Immutable collection of PatentFamily records keyed by family_id."""

    def __init__(self, families: Iterable[PatentFamily], stats: IngestStats | None = None):
        self._families: dict[str, PatentFamily] = {}
        for fam in families:
            if fam.family_id in self._families:
                raise DuplicateFamilyId(fam.family_id)
            self._families[fam.family_id] = fam
        self.stats = stats or IngestStats(accepted=len(self._families))

    def __len__(self) -> int:
        return len(self._families)

    def __contains__(self, family_id: str) -> bool:
        return family_id in self._families

    def __getitem__(self, family_id: str) -> PatentFamily:
        return self._families[family_id]

    def __iter__(self) -> Iterator[PatentFamily]:
        return iter(self._families.values())

    def get(self, family_id: str) -> PatentFamily | None:
        return self._families.get(family_id)

    def ids(self) -> list[str]:
        """Family ids in sorted order (stable basis for seeded sampling)."""
        return sorted(self._families)

    def content_hash(self) -> str:
        """64-bit content hash over the sorted family records."""
        import hashlib

        h = hashlib.blake2b(digest_size=8)
        for fid in self.ids():
            fam = self._families[fid]
            h.update(
                "\x1e".join(
                    (
                        fam.family_id,
                        fam.title,
                        fam.abstract,
                        fam.first_claim,
                        ",".join(fam.ipc_codes),
                        ",".join(sorted(fam.inventors)),
                        fam.filing_date.isoformat(),
                        ",".join(sorted(fam.cites)),
                        str(fam.cited_by_count_5y),
                        str(fam.cited_by_count_total),
                    )
                ).encode("utf-8")
            )
        return h.hexdigest()


@dataclass(frozen=True)
class CitationGraph:
    """Symmetrized citation graph without self-loops."""

    adjacency: Mapping[str, frozenset[str]]
    node_count: int
    edge_count: int
    dangling_count: int

    def neighbors(self, family_id: str) -> frozenset[str]:
        return self.adjacency.get(family_id, frozenset())

    def connected(self, a: str, b: str) -> bool:
        return b in self.adjacency.get(a, frozenset())


def _parse_row(raw: dict, stats: IngestStats) -> PatentFamily | None:
    """Validate one raw record; return None (and count) when it violates type constraints."""
    fid = raw["family_id"]
    if not isinstance(fid, str) or not fid:
        stats.reject("bad_family_id")
        return None
    for col in ("title", "abstract", "first_claim"):
        if not isinstance(raw[col], str):
            stats.reject(f"bad_{col}")
            return None
    ipc = raw["ipc_codes"]
    if not isinstance(ipc, (list, tuple)) or any(
        not isinstance(c, str) or len(c) != 3 for c in ipc
    ):
        stats.reject("bad_ipc_codes")
        return None
    inventors = raw["inventors"]
    if not isinstance(inventors, (list, tuple)) or any(not isinstance(v, str) for v in inventors):
        stats.reject("bad_inventors")
        return None
    try:
        filing = dt.date.fromisoformat(raw["filing_date"])
    except (TypeError, ValueError):
        stats.reject("bad_filing_date")
        return None
    cites = raw["cites"]
    if not isinstance(cites, (list, tuple)) or any(not isinstance(c, str) for c in cites):
        stats.reject("bad_cites")
        return None
    try:
        c5 = int(raw["cited_by_count_5y"])
        ct = int(raw["cited_by_count_total"])
    except (TypeError, ValueError):
        stats.reject("bad_citation_counts")
        return None
    if c5 < 0 or ct < 0 or c5 > ct:
        stats.reject("bad_citation_counts")
        return None
    stats.accepted += 1
    return PatentFamily(
        family_id=fid,
        title=raw["title"],
        abstract=raw["abstract"],
        first_claim=raw["first_claim"],
        ipc_codes=tuple(ipc),
        inventors=frozenset(inventors),
        filing_date=filing,
        cites=frozenset(cites),
        cited_by_count_5y=c5,
        cited_by_count_total=ct,
    )


def _iter_jsonl(path: Path) -> Iterator[dict]:
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaMismatch(f"line {lineno}: not valid JSON ({exc})") from exc
            missing = [c for c in CORPUS_COLUMNS if c not in raw]
            if missing:
                raise SchemaMismatch(f"line {lineno}: missing column '{missing[0]}'")
            yield raw


def _iter_parquet(path: Path) -> Iterator[dict]:
    import pyarrow.parquet as pq

    table = pq.read_table(path)
    missing = [c for c in CORPUS_COLUMNS if c not in table.column_names]
    if missing:
        raise SchemaMismatch(f"missing column '{missing[0]}'")
    for batch in table.to_batches():
        for raw in batch.to_pylist():
            yield raw


def ingest_corpus(path: str | Path, format: str | None = None) -> Corpus:
    """Load a corpus file, rejecting rows that violate type constraints.

    ``format`` is inferred from the suffix when omitted. Raises
    DuplicateFamilyId when two rows share a family_id, SchemaMismatch when a
    documented column is missing.
    """
    path = Path(path)
    if not path.exists():
        raise MissingFile(str(path))
    if format is None:
        format = "parquet" if path.suffix == ".parquet" else "jsonl"
    if format not in ("parquet", "jsonl"):
        raise ValueError(f"unsupported format: {format}")
    rows = _iter_parquet(path) if format == "parquet" else _iter_jsonl(path)

    stats = IngestStats()
    families: dict[str, PatentFamily] = {}
    for raw in rows:
        fam = _parse_row(raw, stats)
        if fam is None:
            continue
        if fam.family_id in families:
            raise DuplicateFamilyId(fam.family_id)
        families[fam.family_id] = fam
    return Corpus(families.values(), stats)


def filter_corpus(corpus: Corpus, min_year: int = 1980) -> Corpus:
    """Drop families filed before ``min_year`` or lacking IPC codes."""
    kept = [
        fam
        for fam in corpus
        if fam.filing_date.year >= min_year and len(fam.ipc_codes) > 0
    ]
    stats = IngestStats(accepted=len(kept))
    stats.reject_reasons["filtered_out"] = len(corpus) - len(kept)
    return Corpus(kept, stats)


def build_citation_graph(corpus: Corpus) -> CitationGraph:
    """Symmetrize outgoing citations into a bidirectional graph.

    Citations pointing outside the corpus are dropped (counted, not fatal);
    self-loops are dropped.
    """
    adjacency: dict[str, set[str]] = {fam.family_id: set() for fam in corpus}
    dangling = 0
    edges: set[tuple[str, str]] = set()
    for fam in corpus:
        for cited in fam.cites:
            if cited == fam.family_id:
                continue
            if cited not in corpus:
                dangling += 1
                continue
            adjacency[fam.family_id].add(cited)
            adjacency[cited].add(fam.family_id)
            edges.add((min(fam.family_id, cited), max(fam.family_id, cited)))
    frozen = {fid: frozenset(neigh) for fid, neigh in adjacency.items()}
    return CitationGraph(
        adjacency=frozen,
        node_count=len(frozen),
        edge_count=len(edges),
        dangling_count=dangling,
    )


def _variant_sections(family: PatentFamily, variant: str) -> list[str]:
    drop_abstract = "trim1" in variant  # trim1 and trim1Last
    drop_claim = "trimLast" in variant or "trim1Last" in variant
    sections = [family.title]
    if not drop_abstract:
        sections.append(family.abstract)
    if not drop_claim:
        sections.append(family.first_claim)
    return [s.strip() for s in sections if s.strip()]


def assemble_text(family: PatentFamily, variant: str = "full") -> str:
    """Combine title, abstract, and first claim under a structural variant.

    Sections are joined with the canonical separator token (a single space
    under noSEP variants); empty sections are skipped. The result is capped
    at 8192 whitespace tokens by truncating trailing tokens.
    """
    if variant not in STRUCTURAL_VARIANTS:
        raise ValueError(f"unknown structural variant: {variant}")
    sections = _variant_sections(family, variant)
    if not sections:
        raise EmptyText(family.family_id)
    joiner = " " if variant.startswith("noSEP") else f" {SEPARATOR} "
    text = joiner.join(sections)
    tokens = text.split()
    if len(tokens) > TOKEN_CAP:
        text = " ".join(tokens[:TOKEN_CAP])
    return text
