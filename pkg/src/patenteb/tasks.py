"""Canonical task registry: the 15 benchmark tasks, their families and metrics."""

from __future__ import annotations

RETRIEVAL_SYMMETRIC = ("retrieval_IN", "retrieval_MIXED", "retrieval_OUT")
RETRIEVAL_ASYMMETRIC = (
    "title2full",
    "problem2full",
    "problem2solution",
    "effect2full",
    "effect2substance",
)
CLASSIFICATION = ("class_text2ipc3", "class_bloom", "class_nli_oldnew")
PARAPHRASE = ("para_problem", "para_solution")
CLUSTERING = ("clusters_ext_full_ipc", "clusters_inventor")

TASK_IDS = RETRIEVAL_SYMMETRIC + RETRIEVAL_ASYMMETRIC + CLASSIFICATION + PARAPHRASE + CLUSTERING
TRAINING_TASK_IDS = RETRIEVAL_SYMMETRIC + RETRIEVAL_ASYMMETRIC + CLASSIFICATION + PARAPHRASE

FAMILY_OF = {
    **{t: "retrieval" for t in RETRIEVAL_SYMMETRIC + RETRIEVAL_ASYMMETRIC},
    **{t: "classification" for t in CLASSIFICATION},
    **{t: "paraphrase" for t in PARAPHRASE},
    **{t: "clustering" for t in CLUSTERING},
}

METRIC_OF = {
    **{t: "ndcg_at_10" for t in RETRIEVAL_SYMMETRIC + RETRIEVAL_ASYMMETRIC},
    **{t: "macro_f1" for t in CLASSIFICATION},
    **{t: "pearson" for t in PARAPHRASE},
    **{t: "v_measure" for t in CLUSTERING},
}

# Record layout per task: triplet / pair / labeled / cluster.
KIND_OF = {
    **{t: "triplet" for t in RETRIEVAL_SYMMETRIC + RETRIEVAL_ASYMMETRIC},
    "class_text2ipc3": "labeled",
    "class_bloom": "labeled",
    "class_nli_oldnew": "pair",
    **{t: "pair" for t in PARAPHRASE},
    **{t: "cluster" for t in CLUSTERING},
}

FAMILIES = ("retrieval", "paraphrase", "classification", "clustering")
