"""Builders for the 15 benchmark tasks plus the end-to-end build pipeline.

All sampling derives from (seed, task_id, split, query_id) so builders are
deterministic regardless of scheduling. Record selection never depends on
the structural variant: variants only change how texts are materialized,
which lets the robustness harness re-render the same records.
"""

from __future__ import annotations

import datetime as dt
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

from ..corpus import (
    Corpus,
    CitationGraph,
    PatentFamily,
    SEPARATOR,
    assemble_text,
    build_citation_graph,
    filter_corpus,
)
from ..domains import (
    DomainRelation,
    SplitAssignment,
    SPLITS,
    classify_relation,
    dominant_ipc3,
    filter_domains,
    stratified_split,
)
from ..errors import EmptyText, FragmentIsWholeText, InsufficientPositives
from ..fragments import (
    SegmentSet,
    contains_normalized,
    extract_segments,
    normalize_text,
    remove_fragment,
)
from ..seeds import rng_for
from ..tasks import CLUSTERING, KIND_OF, TASK_IDS
from .mining import MiningContext
from .records import ClusterMember, LabeledText, PairRecord, RetrievalTriplet, TaskDataset
from .subsample import stratified_subsample

POSITIVE_RELATIONS = {
    "IN": frozenset({DomainRelation.IN}),
    "OUT": frozenset({DomainRelation.OUT}),
    "MIXED": frozenset({DomainRelation.FULL_MIX, DomainRelation.PART_MIX}),
}

ASYM_TASKS = ("title2full", "problem2full", "effect2full", "problem2solution", "effect2substance")

# Published per-task split sizes used as subsampling targets (scaled by
# BuildConfig.scale for desk-size corpora).
FULL_SCALE_TARGETS: dict[str, tuple[int | None, int | None, int | None]] = {
    "retrieval_IN": (150_000, 15_806, 15_809),
    "retrieval_MIXED": (150_000, 15_580, 15_574),
    "retrieval_OUT": (150_000, 11_625, 15_462),
    "title2full": (150_000, 18_729, 18_727),
    "problem2full": (150_000, 18_735, 18_729),
    "problem2solution": (150_000, 18_735, 18_729),
    "effect2full": (16_297, 2_034, 2_043),
    "effect2substance": (16_197, 2_018, 2_037),
    "class_text2ipc3": (150_000, 18_729, 18_727),
    "class_bloom": (58_181, 7_303, 7_347),
    "class_nli_oldnew": (116_076, 14_554, 14_690),
    "para_problem": (150_000, 18_719, 18_726),
    "para_solution": (150_000, 18_648, 18_656),
    # clustering sizes are outcomes of the size filters, not caps
    "clusters_ext_full_ipc": (None, None, None),
    "clusters_inventor": (None, None, None),
}


@dataclass(frozen=True)
class BuildConfig:
    seed: int = 42
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    min_year: int = 1980
    min_per_class: int = 100
    max_positives: int = 100
    max_triplets: int = 10
    bloom_cutoff: dt.date = dt.date(2023, 6, 20)
    paraphrase_rate: float = 0.14
    rate_tolerance: float = 0.005
    ipc_cluster_bounds: tuple[int, int] = (200, 1000)
    inventor_cluster_bounds: tuple[int, int] = (100, 1000)
    scale: float = 1.0
    pair_floor: int = 100  # below this a 14% rate cannot stay within tolerance
    subsample_min_per_stratum: int = 2

    def target_size(self, task_id: str, split: str) -> int | None:
        full = FULL_SCALE_TARGETS[task_id][SPLITS.index(split)]
        if full is None:
            return None
        scaled = int(round(full * self.scale))
        if KIND_OF[task_id] == "pair":
            scaled = max(scaled, self.pair_floor)
        return max(scaled, 1)

    @classmethod
    def desk(cls, seed: int = 42) -> "BuildConfig":
        """Desk-scale preset: published targets at 1/1000 with cluster-size
        bounds shrunk to match a ~5k-family corpus."""
        return cls(
            seed=seed,
            scale=0.001,
            ipc_cluster_bounds=(5, 1000),
            inventor_cluster_bounds=(3, 1000),
            subsample_min_per_stratum=1,
        )

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "split_ratios": list(self.split_ratios),
            "min_year": self.min_year,
            "min_per_class": self.min_per_class,
            "max_positives": self.max_positives,
            "max_triplets": self.max_triplets,
            "bloom_cutoff": self.bloom_cutoff.isoformat(),
            "paraphrase_rate": self.paraphrase_rate,
            "rate_tolerance": self.rate_tolerance,
            "ipc_cluster_bounds": list(self.ipc_cluster_bounds),
            "inventor_cluster_bounds": list(self.inventor_cluster_bounds),
            "scale": self.scale,
            "pair_floor": self.pair_floor,
            "subsample_min_per_stratum": self.subsample_min_per_stratum,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "BuildConfig":
        kwargs = dict(raw)
        if "split_ratios" in kwargs:
            kwargs["split_ratios"] = tuple(kwargs["split_ratios"])
        if "bloom_cutoff" in kwargs and isinstance(kwargs["bloom_cutoff"], str):
            kwargs["bloom_cutoff"] = dt.date.fromisoformat(kwargs["bloom_cutoff"])
        for key in ("ipc_cluster_bounds", "inventor_cluster_bounds"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


class TextMaterializer:
    """Renders evaluation texts for families under a structural variant.

    Document-side texts for asymmetric tasks are one-per-family (the
    family's own fragment removed), so the same id always presents the same
    target whether it appears as a positive or a negative.
    """

    def __init__(self, corpus: Corpus, segments: Mapping[str, SegmentSet], variant: str = "full"):
        self.corpus = corpus
        self.segments = segments
        self.variant = variant
        self._full_cache: dict[str, str] = {}
        self._doc_cache: dict[tuple[str, str], str] = {}
        self._doc_norm_cache: dict[tuple[str, str], str] = {}

    def full(self, fid: str) -> str:
        text = self._full_cache.get(fid)
        if text is None:
            try:
                text = assemble_text(self.corpus[fid], self.variant)
            except EmptyText:
                text = ""
            self._full_cache[fid] = text
        return text

    def fragment(self, fid: str, task_id: str) -> str | None:
        fam = self.corpus[fid]
        seg = self.segments[fid]
        if task_id == "title2full":
            return fam.title.strip() or None
        if task_id in ("problem2full", "problem2solution"):
            return seg.problem
        if task_id in ("effect2full", "effect2substance"):
            return seg.effect
        raise ValueError(task_id)

    def asym_doc(self, fid: str, task_id: str) -> str:
        """Document-side text: the family's reconstruction with its own
        fragment removed, or its complementary segment (also fragment-filtered)."""
        key = (task_id, fid)
        cached = self._doc_cache.get(key)
        if cached is not None:
            return cached
        fam = self.corpus[fid]
        seg = self.segments[fid]
        if task_id == "problem2solution":
            text = seg.solution or ""
        elif task_id == "effect2substance":
            text = seg.substance or ""
        elif task_id == "title2full":
            sections = []
            if "trim1" not in self.variant:
                sections.append(fam.abstract.strip())
            if "trimLast" not in self.variant and "trim1Last" not in self.variant:
                sections.append(fam.first_claim.strip())
            sections = [s for s in sections if s]
            joiner = " " if self.variant.startswith("noSEP") else f" {SEPARATOR} "
            text = joiner.join(sections)
        else:  # problem2full / effect2full
            text = self.full(fid)
        fragment = self.fragment(fid, task_id)
        if text and fragment and contains_normalized(text, fragment):
            try:
                text = remove_fragment(text, fragment)
            except FragmentIsWholeText:
                text = ""
        self._doc_cache[key] = text
        return text

    def asym_doc_normalized(self, fid: str, task_id: str) -> str:
        key = (task_id, fid)
        cached = self._doc_norm_cache.get(key)
        if cached is None:
            cached = normalize_text(self.asym_doc(fid, task_id))
            self._doc_norm_cache[key] = cached
        return cached


def build_symmetric_retrieval(
    corpus: Corpus,
    graph: CitationGraph,
    members: list[str],
    split: str,
    relation_key: str,
    ctx: MiningContext,
    texts: TextMaterializer,
    domain_of: Mapping[str, str],
    config: BuildConfig,
) -> TaskDataset:
    """Triplets whose (query, positive) relation matches the task and whose
    negatives come from the task's negative category, hardest first."""
    task_id = f"retrieval_{relation_key}"
    ds = TaskDataset(task_id, split, "triplet")
    member_set = set(members)
    wanted = POSITIVE_RELATIONS[relation_key]

    pending: list[tuple[str, list[str]]] = []
    for q in sorted(members):
        q_sig = corpus[q].ipc_set
        neighbors = sorted(graph.neighbors(q) & member_set)
        positives = [
            n for n in neighbors if classify_relation(q_sig, corpus[n].ipc_set) in wanted
        ]
        if not positives:
            ds.skip("queries_without_positives")
            continue
        rng = rng_for(config.seed, task_id, split, "positives", q)
        perm = rng.permutation(len(positives))
        sampled = [positives[i] for i in perm[: config.max_positives]]
        if len(positives) > config.max_positives:
            ds.skip("positives_capped")
        pending.append((q, sampled[: config.max_triplets]))

    for start in range(0, len(pending), 256):
        block = pending[start : start + 256]
        token_sets = [set(assemble_text(corpus[q], "full").split()) for q, _ in block]
        scores = ctx.jaccard_scores_block(token_sets)
        for col, (q, chosen) in enumerate(block):
            category = ctx.category_mask(corpus[q].ipc_set, relation_key)
            negatives = ctx.rank_eligible(q, scores[:, col], category, k=len(chosen))
            if not negatives:
                ds.skip("queries_without_negatives")
                continue
            for pos, neg in zip(chosen, negatives):
                ds.records.append(
                    RetrievalTriplet(
                        query_id=q,
                        positive_id=pos,
                        negative_id=neg,
                        query_text=texts.full(q),
                        positive_text=texts.full(pos),
                        negative_text=texts.full(neg),
                        relation=classify_relation(
                            corpus[q].ipc_set, corpus[pos].ipc_set
                        ).value,
                        stratum=domain_of[q],
                    )
                )
    return ds


def build_asymmetric_retrieval(
    corpus: Corpus,
    graph: CitationGraph,
    members: list[str],
    split: str,
    task_id: str,
    ctx: MiningContext,
    texts: TextMaterializer,
    domain_of: Mapping[str, str],
    config: BuildConfig,
) -> TaskDataset:
    """Fragment queries against reconstructed targets of the same family,
    with MIXED-category hard negatives."""
    if task_id not in ASYM_TASKS:
        raise ValueError(task_id)
    ds = TaskDataset(task_id, split, "triplet")
    full_texts = texts if texts.variant == "full" else TextMaterializer(corpus, texts.segments, "full")

    pending: list[tuple[str, str]] = []
    for q in sorted(members):
        fragment = texts.fragment(q, task_id)
        if not fragment:
            ds.skip("missing_fragment")
            continue
        target_full = full_texts.asym_doc(q, task_id)
        if not target_full:
            ds.skip("missing_target")
            continue
        pending.append((q, fragment))

    for start in range(0, len(pending), 256):
        block = pending[start : start + 256]
        token_sets = [set(fragment.split()) for _, fragment in block]
        scores = ctx.jaccard_scores_block(token_sets)
        for col, (q, fragment) in enumerate(block):
            category = ctx.category_mask(corpus[q].ipc_set, "MIXED")
            candidates = ctx.rank_eligible(q, scores[:, col], category, k=16)
            frag_norm = normalize_text(fragment)
            negative = None
            for cand in candidates:
                doc_norm = full_texts.asym_doc_normalized(cand, task_id)
                if doc_norm and frag_norm not in doc_norm:
                    negative = cand
                    break
            if negative is None:
                ds.skip("queries_without_negatives")
                continue
            neg_text = texts.asym_doc(negative, task_id)
            ds.records.append(
                RetrievalTriplet(
                    query_id=q,
                    positive_id=q,
                    negative_id=negative,
                    query_text=fragment,
                    positive_text=texts.asym_doc(q, task_id),
                    negative_text=neg_text,
                    relation=DomainRelation.IN.value,
                    stratum=domain_of[q],
                )
            )
    return ds


def build_text2ipc3(
    corpus: Corpus,
    members: list[str],
    split: str,
    texts: TextMaterializer,
    domain_of: Mapping[str, str],
) -> TaskDataset:
    ds = TaskDataset("class_text2ipc3", split, "labeled")
    for fid in sorted(members):
        text = texts.full(fid)
        if not text:
            ds.skip("empty_text")
            continue
        label = domain_of[fid]
        ds.records.append(LabeledText(text=text, label=label, stratum=label))
    return ds


def _decile_members(
    families: list[PatentFamily], key, descending: bool
) -> set[str]:
    """Ids in the decile (ceil(N/10) positions) of the given count ordering;
    count ties resolve by family_id."""
    k = math.ceil(len(families) / 10)
    sign = -1 if descending else 1
    ranked = sorted(families, key=lambda f: (sign * key(f), f.family_id))
    return {f.family_id for f in ranked[:k]}


def build_bloom(
    corpus: Corpus,
    members: list[str],
    split: str,
    texts: TextMaterializer,
    domain_of: Mapping[str, str],
    cutoff_date: dt.date,
) -> TaskDataset:
    """Early/late/normal labels from per-domain citation-count deciles."""
    ds = TaskDataset("class_bloom", split, "labeled")
    by_domain: dict[str, list[PatentFamily]] = {}
    for fid in sorted(members):
        fam = corpus[fid]
        if fam.filing_date >= cutoff_date:
            ds.skip("filed_after_cutoff")
            continue
        by_domain.setdefault(domain_of[fid], []).append(fam)

    for domain in sorted(by_domain):
        group = by_domain[domain]
        labels: dict[str, str] = {}
        if len(group) < 10:
            ds.skip("domain_too_small")
            for fam in group:
                labels[fam.family_id] = "normal"
        else:
            early = _decile_members(group, lambda f: f.cited_by_count_5y, descending=True)
            top_total = _decile_members(group, lambda f: f.cited_by_count_total, descending=True)
            bottom_5y = _decile_members(group, lambda f: f.cited_by_count_5y, descending=False)
            for fam in group:
                fid = fam.family_id
                if fid in early:
                    labels[fid] = "early"
                elif fid in top_total and fid in bottom_5y:
                    labels[fid] = "late"
                else:
                    labels[fid] = "normal"
        for fam in group:
            text = texts.full(fam.family_id)
            if not text:
                ds.skip("empty_text")
                continue
            label = labels[fam.family_id]
            ds.records.append(LabeledText(text=text, label=label, stratum=label))
    return ds


def build_nli_oldnew(
    corpus: Corpus,
    members: list[str],
    split: str,
    texts: TextMaterializer,
    config: BuildConfig,
    target: int | None,
) -> TaskDataset:
    """Each sampled citation edge yields (citing, cited, 1) and its reversal
    with label 0, so labels balance exactly."""
    ds = TaskDataset("class_nli_oldnew", split, "pair")
    member_set = set(members)
    edges: list[tuple[str, str]] = []
    for a in sorted(members):
        for b in sorted(corpus[a].cites):
            if b != a and b in member_set:
                edges.append((a, b))
    n_keep = len(edges)
    if target is not None:
        n_keep = min(n_keep, max(1, target // 2))
    rng = rng_for(config.seed, "class_nli_oldnew", split, "edges")
    perm = rng.permutation(len(edges))
    selected = sorted(perm[:n_keep].tolist())
    for idx in selected:
        a, b = edges[idx]
        ta, tb = texts.full(a), texts.full(b)
        if not ta or not tb:
            ds.skip("empty_text")
            continue
        ds.records.append(PairRecord(text1=ta, text2=tb, label=1, stratum="1"))
        ds.records.append(PairRecord(text1=tb, text2=ta, label=0, stratum="0"))
    return ds


def build_paraphrase(
    corpus: Corpus,
    graph: CitationGraph,
    members: list[str],
    split: str,
    segment_name: str,
    texts: TextMaterializer,
    config: BuildConfig,
    target: int | None,
) -> TaskDataset:
    """Positives are IN-relation citation pairs sharing the segment; negatives
    are seeded OUT-relation, citation-disconnected pairs. Counts are tuned so
    positives make up the configured rate of each split."""
    task_id = f"para_{segment_name}"
    ds = TaskDataset(task_id, split, "pair")
    member_set = set(members)

    def seg(fid: str) -> str | None:
        return texts.segments[fid].get(segment_name)

    with_segment = [fid for fid in sorted(members) if seg(fid)]
    with_segment_set = set(with_segment)

    pos_pairs: list[tuple[str, str]] = []
    for a in with_segment:
        for b in sorted(graph.neighbors(a)):
            if b <= a or b not in member_set or b not in with_segment_set:
                continue
            if classify_relation(corpus[a].ipc_set, corpus[b].ipc_set) is DomainRelation.IN:
                pos_pairs.append((a, b))

    rate = config.paraphrase_rate
    if target is None:
        n_pos = len(pos_pairs)
        total = int(round(n_pos / rate)) if n_pos else 0
    else:
        n_pos_target = int(round(target * rate))
        if len(pos_pairs) < n_pos_target:
            warnings.warn(
                f"{task_id}/{split}: only {len(pos_pairs)} positive pairs for a "
                f"target of {n_pos_target}; reducing split size",
                category=UserWarning,
                stacklevel=2,
            )
            ds.skip("insufficient_positives")
            n_pos = len(pos_pairs)
            total = int(round(n_pos / rate)) if n_pos else 0
        else:
            n_pos = n_pos_target
            total = target
    if n_pos == 0:
        raise InsufficientPositives(f"{task_id}/{split}: no positive pairs available")
    n_neg = total - n_pos

    rng = rng_for(config.seed, task_id, split, "positives")
    perm = rng.permutation(len(pos_pairs))
    chosen_pos = sorted(perm[:n_pos].tolist())

    neg_rng = rng_for(config.seed, task_id, split, "negatives")
    seen: set[tuple[str, str]] = set()
    negatives: list[tuple[str, str]] = []
    attempts = 0
    max_attempts = 200 * max(n_neg, 1)
    while len(negatives) < n_neg and attempts < max_attempts:
        attempts += 1
        i, j = neg_rng.integers(0, len(with_segment), size=2)
        if i == j:
            continue
        a, b = with_segment[int(i)], with_segment[int(j)]
        if a > b:
            a, b = b, a
        if (a, b) in seen:
            continue
        if graph.connected(a, b):
            continue
        if classify_relation(corpus[a].ipc_set, corpus[b].ipc_set) is not DomainRelation.OUT:
            continue
        seen.add((a, b))
        negatives.append((a, b))
    if len(negatives) < n_neg:
        warnings.warn(
            f"{task_id}/{split}: could only draw {len(negatives)} of {n_neg} negatives",
            category=UserWarning,
            stacklevel=2,
        )
        ds.skip("insufficient_negatives")

    for idx in chosen_pos:
        a, b = pos_pairs[idx]
        ds.records.append(PairRecord(text1=seg(a) or "", text2=seg(b) or "", label=1, stratum="1"))
    for a, b in negatives:
        ds.records.append(PairRecord(text1=seg(a) or "", text2=seg(b) or "", label=0, stratum="0"))
    return ds


def build_clustering(
    corpus: Corpus,
    members: list[str],
    split: str,
    key: str,
    texts: TextMaterializer,
    bounds: tuple[int, int],
) -> TaskDataset:
    """Cluster by full IPC-set signature or by inventor id (one membership
    per inventor); clusters outside the size bounds are dropped."""
    task_id = "clusters_ext_full_ipc" if key == "full_ipc_set" else "clusters_inventor"
    ds = TaskDataset(task_id, split, "cluster")
    groups: dict[str, list[str]] = {}
    for fid in sorted(members):
        fam = corpus[fid]
        if key == "full_ipc_set":
            cid = "|".join(sorted(fam.ipc_set))
            groups.setdefault(cid, []).append(fid)
        elif key == "inventor":
            for inventor in sorted(fam.inventors):
                groups.setdefault(inventor, []).append(fid)
        else:
            raise ValueError(key)
    lo, hi = bounds
    for cid in sorted(groups):
        fids = groups[cid]
        if not lo <= len(fids) <= hi:
            ds.skip("clusters_outside_bounds")
            continue
        for fid in fids:
            text = texts.full(fid)
            if not text:
                ds.skip("empty_text")
                continue
            ds.records.append(ClusterMember(text=text, cluster_id=cid, stratum=cid))
    return ds


@dataclass
class BuildResult:
    datasets: dict[tuple[str, str], TaskDataset]
    corpus: Corpus
    graph: CitationGraph
    split_assignment: SplitAssignment
    domain_of: dict[str, str]
    segments: dict[str, SegmentSet]
    manifest: dict = field(default_factory=dict)

    def dataset(self, task_id: str, split: str) -> TaskDataset:
        return self.datasets[(task_id, split)]


def build_all(raw_corpus: Corpus, config: BuildConfig, variant: str = "full") -> BuildResult:
    """Run the full pipeline: filters, splits, all 15 tasks, subsampling.

    ``variant`` only affects text materialization; record selection always
    works from canonical full texts.
    """
    corpus = filter_corpus(raw_corpus, min_year=config.min_year)
    corpus, domain_sizes = filter_domains(corpus, min_per_class=config.min_per_class)
    domain_of = {fam.family_id: dominant_ipc3(fam) for fam in corpus}
    graph = build_citation_graph(corpus)
    split_assignment = stratified_split(corpus, config.split_ratios, config.seed)
    segments = {fam.family_id: extract_segments(fam.abstract) for fam in corpus}
    texts = TextMaterializer(corpus, segments, variant)

    datasets: dict[tuple[str, str], TaskDataset] = {}
    for split in SPLITS:
        members = split_assignment.members(split)
        ctx = MiningContext(corpus, graph, members)
        for relation_key in ("IN", "MIXED", "OUT"):
            ds = build_symmetric_retrieval(
                corpus, graph, members, split, relation_key, ctx, texts, domain_of, config
            )
            datasets[(ds.task_id, split)] = ds
        for task_id in ASYM_TASKS:
            ds = build_asymmetric_retrieval(
                corpus, graph, members, split, task_id, ctx, texts, domain_of, config
            )
            datasets[(ds.task_id, split)] = ds
        datasets[("class_text2ipc3", split)] = build_text2ipc3(
            corpus, members, split, texts, domain_of
        )
        datasets[("class_bloom", split)] = build_bloom(
            corpus, members, split, texts, domain_of, config.bloom_cutoff
        )
        datasets[("class_nli_oldnew", split)] = build_nli_oldnew(
            corpus, members, split, texts, config, config.target_size("class_nli_oldnew", split)
        )
        for segment_name in ("problem", "solution"):
            ds = build_paraphrase(
                corpus,
                graph,
                members,
                split,
                segment_name,
                texts,
                config,
                config.target_size(f"para_{segment_name}", split),
            )
            datasets[(ds.task_id, split)] = ds

    test_members = split_assignment.members("test")
    datasets[("clusters_ext_full_ipc", "test")] = build_clustering(
        corpus, test_members, "test", "full_ipc_set", texts, config.ipc_cluster_bounds
    )
    datasets[("clusters_inventor", "test")] = build_clustering(
        corpus, test_members, "test", "inventor", texts, config.inventor_cluster_bounds
    )

    for (task_id, split), ds in list(datasets.items()):
        target = config.target_size(task_id, split)
        if target is not None and KIND_OF[task_id] not in ("pair", "cluster"):
            datasets[(task_id, split)] = stratified_subsample(
                ds, target, config.subsample_min_per_stratum, config.seed
            )

    counts = {task_id: {} for task_id in TASK_IDS}
    skipped = {}
    for (task_id, split), ds in sorted(datasets.items()):
        counts[task_id][split] = len(ds)
        if ds.skipped:
            skipped[f"{task_id}/{split}"] = dict(sorted(ds.skipped.items()))
    manifest = {
        "config": config.to_dict(),
        "variant": variant,
        "corpus_hash": corpus.content_hash(),
        "families": len(corpus),
        "domains": domain_sizes,
        "graph": {"edges": graph.edge_count, "dangling_citations": graph.dangling_count},
        "counts": counts,
        "skipped": skipped,
        "split_sizes": {s: len(split_assignment.members(s)) for s in SPLITS},
    }
    return BuildResult(
        datasets=datasets,
        corpus=corpus,
        graph=graph,
        split_assignment=split_assignment,
        domain_of=domain_of,
        segments=segments,
        manifest=manifest,
    )


def expected_export_count() -> int:
    """13 train/val/test tasks plus 2 test-only clustering tasks."""
    return (len(TASK_IDS) - len(CLUSTERING)) * len(SPLITS) + len(CLUSTERING)
