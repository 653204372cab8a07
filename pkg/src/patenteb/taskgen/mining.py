"""Domain-aware hard-negative mining.

Candidates must be citation-disconnected from the query and fall in the
task's negative relation category; they are ranked by token-level Jaccard
similarity to the query text (model-free, fully deterministic), ties broken
by ascending family id.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

from ..corpus import CitationGraph, Corpus, assemble_text
from ..domains import DomainRelation, classify_relation
from ..errors import NoEligibleCandidates

# Negative relation category per task relation.
NEGATIVE_CATEGORIES: dict[str, frozenset[DomainRelation]] = {
    "IN": frozenset({DomainRelation.FULL_MIX, DomainRelation.PART_MIX}),
    "OUT": frozenset({DomainRelation.OUT}),
    "MIXED": frozenset({DomainRelation.PART_MIX}),
}


class MiningContext:
    """Precomputed candidate universe for one split.

    Holds a binary token-incidence matrix over candidate full texts
    (singleton tokens are dropped from the vocabulary: they cannot intersect
    a distinct candidate, so Jaccard scores are unchanged), signature groups
    for relation masks, and the citation graph for exclusion.
    """

    def __init__(self, corpus: Corpus, graph: CitationGraph, candidate_ids: list[str]):
        self.corpus = corpus
        self.graph = graph
        self.ids = sorted(candidate_ids)
        self.row_of = {fid: i for i, fid in enumerate(self.ids)}
        n = len(self.ids)

        token_sets = [set(assemble_text(corpus[fid], "full").split()) for fid in self.ids]
        self.sizes = np.array([len(s) for s in token_sets], dtype=np.float64)

        doc_freq: dict[str, int] = {}
        for toks in token_sets:
            for tok in toks:
                doc_freq[tok] = doc_freq.get(tok, 0) + 1
        self.vocab = {tok: j for j, tok in enumerate(sorted(t for t, c in doc_freq.items() if c >= 2))}

        rows, cols = [], []
        for i, toks in enumerate(token_sets):
            for tok in toks:
                j = self.vocab.get(tok)
                if j is not None:
                    rows.append(i)
                    cols.append(j)
        self.matrix = sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.float64), (rows, cols)),
            shape=(n, max(len(self.vocab), 1)),
        )

        self.sig_rows: dict[frozenset[str], np.ndarray] = {}
        for i, fid in enumerate(self.ids):
            sig = corpus[fid].ipc_set
            self.sig_rows.setdefault(sig, []).append(i)  # type: ignore[arg-type]
        self.sig_rows = {sig: np.asarray(rows, dtype=np.int64) for sig, rows in self.sig_rows.items()}
        self._category_cache: dict[tuple[frozenset[str], str], np.ndarray] = {}

    def category_mask(self, query_sig: frozenset[str], relation: str) -> np.ndarray:
        """Boolean mask of candidates whose relation to ``query_sig`` is in
        the task's negative category."""
        key = (query_sig, relation)
        cached = self._category_cache.get(key)
        if cached is not None:
            return cached
        wanted = NEGATIVE_CATEGORIES[relation]
        mask = np.zeros(len(self.ids), dtype=bool)
        for sig, rows in self.sig_rows.items():
            if classify_relation(query_sig, sig) in wanted:
                mask[rows] = True
        self._category_cache[key] = mask
        return mask

    def query_vector(self, query_tokens: set[str]) -> tuple[np.ndarray, int]:
        """Dense vocab indicator for a query token set, plus its true size."""
        vec = np.zeros(self.matrix.shape[1], dtype=np.float64)
        for tok in query_tokens:
            j = self.vocab.get(tok)
            if j is not None:
                vec[j] = 1.0
        return vec, len(query_tokens)

    def jaccard_scores(self, query_tokens: set[str]) -> np.ndarray:
        vec, q_size = self.query_vector(query_tokens)
        inter = self.matrix @ vec
        union = self.sizes + q_size - inter
        union[union == 0.0] = 1.0
        return inter / union

    def jaccard_scores_block(self, token_sets: list[set[str]]) -> np.ndarray:
        """Scores for a block of queries at once; returns (n_candidates, len(block))."""
        block = np.zeros((self.matrix.shape[1], len(token_sets)), dtype=np.float64)
        q_sizes = np.empty(len(token_sets), dtype=np.float64)
        for col, toks in enumerate(token_sets):
            q_sizes[col] = len(toks)
            for tok in toks:
                j = self.vocab.get(tok)
                if j is not None:
                    block[j, col] = 1.0
        inter = self.matrix @ block
        union = self.sizes[:, None] + q_sizes[None, :] - inter
        union[union == 0.0] = 1.0
        return inter / union

    def rank_eligible(
        self,
        query_id: str,
        scores: np.ndarray,
        category: np.ndarray,
        k: int,
    ) -> list[str]:
        """Top-k eligible candidates by (score desc, family id asc)."""
        mask = category.copy()
        if query_id in self.row_of:
            mask[self.row_of[query_id]] = False
        for neighbor in self.graph.neighbors(query_id):
            row = self.row_of.get(neighbor)
            if row is not None:
                mask[row] = False
        eligible = np.flatnonzero(mask)
        if eligible.size == 0:
            return []
        order = np.lexsort((eligible, -scores[eligible]))
        return [self.ids[eligible[i]] for i in order[:k]]


def mine_hard_negatives(
    query: str,
    relation: str,
    graph: CitationGraph,
    corpus: Corpus,
    k: int,
    seed: int = 0,
    context: MiningContext | None = None,
    query_tokens: set[str] | None = None,
) -> list[str]:
    """Up to ``k`` hard negatives for one query.

    ``relation`` is the task relation (IN / OUT / MIXED); candidates come
    from the corresponding negative category, are never citation-connected
    to the query, and are ranked by lexical hardness. ``seed`` is accepted
    for interface stability; ranking is fully deterministic. Raises
    NoEligibleCandidates when the pool is empty.
    """
    if relation not in NEGATIVE_CATEGORIES:
        raise ValueError(f"unknown task relation: {relation}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if context is None:
        context = MiningContext(corpus, graph, [fam.family_id for fam in corpus])
    if query_tokens is None:
        query_tokens = set(assemble_text(corpus[query], "full").split())
    scores = context.jaccard_scores(query_tokens)
    category = context.category_mask(corpus[query].ipc_set, relation)
    result = context.rank_eligible(query, scores, category, k)
    if not result:
        raise NoEligibleCandidates(query)
    return result
