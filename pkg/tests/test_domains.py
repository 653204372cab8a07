"""Dominant codes, relation classification, filtering, stratified splits."""

import itertools

import pytest
from hypothesis import given, strategies as st

from patenteb.corpus import Corpus
from patenteb.domains import (
    DomainRelation,
    classify_relation,
    dominant_ipc3,
    filter_domains,
    stratified_split,
)
from patenteb.errors import EmptyIpcSet, NoIpcCodes

from test_corpus import fam


class TestDominant:
    def test_singleton(self):
        assert dominant_ipc3(fam(ipc=("A01",))) == "A01"

    def test_multiplicity_wins(self):
        assert dominant_ipc3(fam(ipc=("B02", "B02", "A01"))) == "B02"

    def test_tie_breaks_lexicographic(self):
        assert dominant_ipc3(fam(ipc=("B02", "A01"))) == "A01"

    def test_no_codes(self):
        with pytest.raises(NoIpcCodes):
            dominant_ipc3(fam(ipc=()))


class TestClassifyRelation:
    def test_identical_is_in(self):
        assert classify_relation({"A01"}, {"A01"}) is DomainRelation.IN

    def test_disjoint_is_out(self):
        assert classify_relation({"A01"}, {"B02"}) is DomainRelation.OUT

    def test_partial_overlap_is_part_mix(self):
        assert classify_relation({"A01", "B02"}, {"B02", "C03"}) is DomainRelation.PART_MIX

    def test_strict_containment_is_full_mix(self):
        assert classify_relation({"A01"}, {"A01", "B02"}) is DomainRelation.FULL_MIX
        assert classify_relation({"A01", "B02"}, {"A01"}) is DomainRelation.FULL_MIX

    def test_empty_raises(self):
        with pytest.raises(EmptyIpcSet):
            classify_relation(set(), {"A01"})

    def test_partition_property_exhaustive(self):
        """Exactly one relation per pair over all subset pairs of a 4-code universe."""
        universe = ["A01", "B02", "C03", "D04"]
        subsets = [
            frozenset(c)
            for r in range(1, 5)
            for c in itertools.combinations(universe, r)
        ]
        for q, t in itertools.product(subsets, repeat=2):
            rel = classify_relation(q, t)
            holds = [
                q == t,
                not (q & t),
                (q < t) or (t < q),
                bool(q & t) and not (q <= t) and not (t <= q),
            ]
            assert sum(holds) == 1
            assert holds[
                [
                    DomainRelation.IN,
                    DomainRelation.OUT,
                    DomainRelation.FULL_MIX,
                    DomainRelation.PART_MIX,
                ].index(rel)
            ]

    @given(
        st.sets(st.sampled_from(["A01", "B02", "C03", "D04", "E05"]), min_size=1),
        st.sets(st.sampled_from(["A01", "B02", "C03", "D04", "E05"]), min_size=1),
    )
    def test_symmetric(self, q, t):
        assert classify_relation(q, t) is classify_relation(t, q)


class TestFilterDomains:
    def test_threshold(self):
        families = [fam(f"A{i}", ipc=("A01",)) for i in range(150)]
        families += [fam(f"B{i}", ipc=("B02",)) for i in range(40)]
        corpus, sizes = filter_domains(Corpus(families), min_per_class=100)
        assert len(corpus) == 150
        assert sizes == {"A01": 150}

    def test_identity_when_all_pass(self):
        families = [fam(f"A{i}", ipc=("A01",)) for i in range(5)]
        corpus, sizes = filter_domains(Corpus(families), min_per_class=5)
        assert len(corpus) == 5

    def test_recount_oracle_on_fixture(self, small_corpus):
        from collections import Counter

        corpus, sizes = filter_domains(small_corpus, min_per_class=100)
        recount = Counter(dominant_ipc3(f) for f in corpus)
        assert dict(recount) == sizes
        for size in sizes.values():
            assert size >= 100


class TestStratifiedSplit:
    def _corpus(self, n, domain="A01"):
        return Corpus([fam(f"{domain}{i:04d}", ipc=(domain,)) for i in range(n)])

    def _sizes(self, assignment):
        from collections import Counter

        return Counter(assignment.assignment.values())

    def test_stratum_of_10(self):
        sizes = self._sizes(stratified_split(self._corpus(10), seed=1))
        assert sizes == {"train": 8, "validation": 1, "test": 1}

    def test_stratum_of_100(self):
        sizes = self._sizes(stratified_split(self._corpus(100), seed=1))
        assert sizes == {"train": 80, "validation": 10, "test": 10}

    def test_stratum_of_101_remainder_to_train(self):
        sizes = self._sizes(stratified_split(self._corpus(101), seed=1))
        assert sizes == {"train": 81, "validation": 10, "test": 10}

    def test_small_stratum_goes_to_train_with_warning(self):
        with pytest.warns(UserWarning, match="<10"):
            split = stratified_split(self._corpus(7), seed=1)
        assert self._sizes(split) == {"train": 7}

    def test_no_leakage_and_determinism(self, small_corpus):
        corpus, _ = filter_domains(small_corpus)
        a = stratified_split(corpus, seed=9)
        b = stratified_split(corpus, seed=9)
        assert a.assignment == b.assignment
        members = [set(a.members(s)) for s in ("train", "validation", "test")]
        assert not (members[0] & members[1])
        assert not (members[0] & members[2])
        assert not (members[1] & members[2])
        assert sum(len(m) for m in members) == len(corpus)

    def test_different_seed_changes_assignment(self, small_corpus):
        corpus, _ = filter_domains(small_corpus)
        a = stratified_split(corpus, seed=9)
        b = stratified_split(corpus, seed=10)
        assert a.assignment != b.assignment

    def test_per_stratum_deviation_below_two(self, small_corpus):
        corpus, _ = filter_domains(small_corpus)
        split = stratified_split(corpus, seed=9)
        from collections import Counter

        per_stratum: dict[str, Counter] = {}
        for fid, s in split.assignment.items():
            per_stratum.setdefault(split.stratum_of[fid], Counter())[s] += 1
        for stratum, counts in per_stratum.items():
            n = sum(counts.values())
            for part, ratio in zip(("train", "validation", "test"), (0.8, 0.1, 0.1)):
                assert abs(counts[part] - ratio * n) < 2
