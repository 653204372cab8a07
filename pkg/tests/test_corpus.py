"""Corpus ingestion, citation graph, and text assembly."""

import json

import pytest

from patenteb.corpus import (
    PatentFamily,
    STRUCTURAL_VARIANTS,
    Corpus,
    assemble_text,
    build_citation_graph,
    filter_corpus,
    ingest_corpus,
)
from patenteb.errors import DuplicateFamilyId, EmptyText, MissingFile, SchemaMismatch

import datetime as dt


def fam(fid="F1", title="T", abstract="A", claim="C", ipc=("A01",), cites=(), **kw):
    defaults = dict(
        family_id=fid,
        title=title,
        abstract=abstract,
        first_claim=claim,
        ipc_codes=tuple(ipc),
        inventors=frozenset({"inv1"}),
        filing_date=dt.date(2000, 1, 1),
        cites=frozenset(cites),
        cited_by_count_5y=1,
        cited_by_count_total=2,
    )
    defaults.update(kw)
    return PatentFamily(**defaults)


def row(fid, cites=(), ipc=("A01",), **overrides):
    base = {
        "family_id": fid,
        "title": f"title {fid}",
        "abstract": f"abstract {fid}",
        "first_claim": f"claim {fid}",
        "ipc_codes": list(ipc),
        "inventors": ["inv1"],
        "filing_date": "2001-05-05",
        "cites": list(cites),
        "cited_by_count_5y": 1,
        "cited_by_count_total": 3,
    }
    base.update(overrides)
    return base


def write_jsonl(path, rows):
    with path.open("w") as fh:
        for r in rows:
            fh.write(json.dumps(r) + "\n")


class TestIngest:
    def test_three_valid_rows(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [row("F1"), row("F2"), row("F3")])
        corpus = ingest_corpus(path)
        assert len(corpus) == 3
        assert corpus.stats.rejected == 0

    def test_duplicate_family_id(self, tmp_path):
        path = tmp_path / "c.jsonl"
        write_jsonl(path, [row("F1"), row("F1")])
        with pytest.raises(DuplicateFamilyId, match="F1"):
            ingest_corpus(path)

    def test_missing_file(self):
        with pytest.raises(MissingFile):
            ingest_corpus("/nonexistent/corpus.jsonl")

    def test_schema_mismatch_names_column(self, tmp_path):
        path = tmp_path / "c.jsonl"
        bad = row("F1")
        del bad["ipc_codes"]
        write_jsonl(path, [bad])
        with pytest.raises(SchemaMismatch, match="ipc_codes"):
            ingest_corpus(path)

    def test_rejects_bad_rows_with_counts(self, tmp_path):
        path = tmp_path / "c.jsonl"
        rows = [
            row("F1"),
            row("F2", ipc=["A012"]),  # ipc code not 3 chars
            row("F3", cited_by_count_5y=9, cited_by_count_total=2),  # 5y > total
            row("F4", filing_date="not-a-date"),
        ]
        write_jsonl(path, rows)
        corpus = ingest_corpus(path)
        assert len(corpus) == 1
        assert corpus.stats.rejected == 3
        assert corpus.stats.reject_reasons["bad_ipc_codes"] == 1

    def test_parquet_round_trip_matches_jsonl(self, tmp_path):
        from patenteb.fixture import write_fixture

        p_parquet = tmp_path / "c.parquet"
        p_jsonl = tmp_path / "c.jsonl"
        write_fixture(p_parquet, seed=3, n_families=80, n_domains=4)
        write_fixture(p_jsonl, seed=3, n_families=80, n_domains=4)
        a = ingest_corpus(p_parquet)
        b = ingest_corpus(p_jsonl)
        assert a.content_hash() == b.content_hash()

    def test_fixture_counts_match_truth(self, small_corpus, small_corpus_path):
        truth = json.loads(
            (small_corpus_path.parent / (small_corpus_path.name + ".truth.json")).read_text()
        )
        assert len(small_corpus) == truth["n_records"]
        filtered = filter_corpus(small_corpus)
        assert len(filtered) == truth["n_retained_expected"]
        graph = build_citation_graph(filtered)
        # edges recomputed by brute force from the raw records
        raw = {fam.family_id: fam for fam in filtered}
        pairs = set()
        dangling = 0
        for fam in filtered:
            for cited in fam.cites:
                if cited == fam.family_id:
                    continue
                if cited in raw:
                    pairs.add((min(fam.family_id, cited), max(fam.family_id, cited)))
                else:
                    dangling += 1
        assert graph.edge_count == len(pairs)
        assert graph.dangling_count == dangling


class TestCitationGraph:
    def test_symmetrization(self):
        corpus = Corpus([fam("A", cites=("B",)), fam("B")])
        graph = build_citation_graph(corpus)
        assert graph.neighbors("A") == {"B"}
        assert graph.neighbors("B") == {"A"}
        assert graph.edge_count == 1

    def test_self_loop_dropped(self):
        corpus = Corpus([fam("A", cites=("A",))])
        graph = build_citation_graph(corpus)
        assert graph.edge_count == 0
        assert graph.neighbors("A") == frozenset()

    def test_dangling_counted_not_fatal(self):
        corpus = Corpus([fam("A", cites=("MISSING",))])
        graph = build_citation_graph(corpus)
        assert graph.edge_count == 0
        assert graph.dangling_count == 1

    def test_symmetry_property_on_fixture(self, small_corpus):
        graph = build_citation_graph(filter_corpus(small_corpus))
        for fid, neighbors in graph.adjacency.items():
            assert fid not in neighbors
            for other in neighbors:
                assert fid in graph.adjacency[other]


class TestAssembleText:
    def test_full(self):
        assert assemble_text(fam(), "full") == "T [SEP] A [SEP] C"

    def test_trim1last_title_only(self):
        assert assemble_text(fam(), "trim1Last") == "T"

    def test_nosep(self):
        assert assemble_text(fam(), "noSEP") == "T A C"

    def test_trim1_drops_abstract(self):
        assert assemble_text(fam(), "trim1") == "T [SEP] C"

    def test_trimlast_drops_claim(self):
        assert assemble_text(fam(), "trimLast") == "T [SEP] A"

    def test_nosep_trim_combinations(self):
        assert assemble_text(fam(), "noSEP+trim1") == "T C"
        assert assemble_text(fam(), "noSEP+trimLast") == "T A"
        assert assemble_text(fam(), "noSEP+trim1Last") == "T"

    def test_empty_sections_skipped(self):
        assert assemble_text(fam(abstract=""), "full") == "T [SEP] C"

    def test_all_empty_raises(self):
        with pytest.raises(EmptyText):
            assemble_text(fam(title="", abstract="", claim=""), "full")

    def test_nosep_equals_full_with_separators_replaced(self, small_corpus):
        for family in list(small_corpus)[:200]:
            full = assemble_text(family, "full")
            nosep = assemble_text(family, "noSEP")
            assert full.replace(" [SEP] ", " ") == nosep

    def test_token_cap(self):
        long_claim = " ".join(f"w{i}" for i in range(9000))
        text = assemble_text(fam(claim=long_claim), "full")
        assert len(text.split()) == 8192

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError):
            assemble_text(fam(), "trim2")

    def test_variant_list_is_table13_grid(self):
        assert STRUCTURAL_VARIANTS == (
            "full",
            "noSEP",
            "trim1",
            "trimLast",
            "trim1Last",
            "noSEP+trim1",
            "noSEP+trimLast",
            "noSEP+trim1Last",
        )
