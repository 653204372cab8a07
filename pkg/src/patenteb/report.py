"""Evaluation runs and the consolidated JSON/CSV report.

A run embeds every task text (content-hash cached), computes each task's
primary metric, aggregates family means and the Overall Score, and embeds a
config snapshot sufficient to reproduce the report byte for byte. Worker
counts and cache state never appear in the output.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import ingest_corpus
from .embed_io import EmbeddingCache, apply_prompt, embed_texts, make_provider, text_hash
from .errors import DegenerateInput, PatentebError
from .metrics import (
    QueryPool,
    kmeans_cluster,
    macro_f1_probe,
    overall_score,
    pearson,
    retrieval_task_score,
    v_measure,
)
from .taskgen import BuildConfig, TaskDataset, build_all, load_task_dir
from .tasks import FAMILIES, FAMILY_OF, KIND_OF, METRIC_OF, TASK_IDS

SCHEMA_VERSION = 1


@dataclass
class EvalRunConfig:
    """Everything a run needs; the snapshot subset reproduces it exactly."""

    tasks_dir: str | None = None
    corpus_path: str | None = None
    build_config: BuildConfig | None = None
    provider_spec: str = "hash:64"
    prompt_mode: str = "none"
    batch_size: int = 64
    seed: int = 42
    variant: str = "full"
    layer_cap: int | None = None
    jobs: int = 1
    cache_dir: str | None = None

    def __post_init__(self) -> None:
        self._provider = None

    @property
    def provider(self):
        if self._provider is None:
            self._provider = make_provider(self.provider_spec)
        return self._provider

    def snapshot(self) -> dict:
        """The reproducible part of the config (jobs and cache excluded)."""
        return {
            "tasks_dir": self.tasks_dir,
            "corpus_path": self.corpus_path,
            "build_config": self.build_config.to_dict() if self.build_config else None,
            "provider": self.provider_spec,
            "prompt_mode": self.prompt_mode,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "variant": self.variant,
            "layer_cap": self.layer_cap,
        }

    @classmethod
    def from_snapshot(cls, snap: dict, jobs: int = 1, cache_dir: str | None = None) -> "EvalRunConfig":
        build_config = snap.get("build_config")
        return cls(
            tasks_dir=snap.get("tasks_dir"),
            corpus_path=snap.get("corpus_path"),
            build_config=BuildConfig.from_dict(build_config) if build_config else None,
            provider_spec=snap["provider"],
            prompt_mode=snap["prompt_mode"],
            batch_size=snap["batch_size"],
            seed=snap["seed"],
            variant=snap.get("variant", "full"),
            layer_cap=snap.get("layer_cap"),
            jobs=jobs,
            cache_dir=cache_dir,
        )


@dataclass
class TaskResult:
    task_id: str
    metric_name: str
    value: float
    n_evaluated: int
    n_skipped: int
    flags: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "metric_name": self.metric_name,
            "value": self.value,
            "n_evaluated": self.n_evaluated,
            "n_skipped": self.n_skipped,
            "flags": sorted(self.flags),
        }


class _Embedder:
    """Prompt-aware, cache-backed embedding frontend for one run."""

    def __init__(self, config: EvalRunConfig):
        self.config = config
        self.provider = config.provider
        signature = "|".join(
            (
                getattr(self.provider, "name", config.provider_spec),
                config.prompt_mode,
                f"layer_cap={config.layer_cap}",
            )
        )
        self.cache = EmbeddingCache.open(signature, config.cache_dir)
        self.requested = 0

    def embed(self, texts: list[str]) -> np.ndarray:
        self.requested += len(texts)
        keys = [text_hash(t) for t in texts]
        _, missing = self.cache.lookup(keys)
        if missing:
            missing_set = set(missing)
            unique_texts: list[str] = []
            seen: set[str] = set()
            for text, key in zip(texts, keys):
                if key in missing_set and key not in seen:
                    seen.add(key)
                    unique_texts.append(text)
            matrix = embed_texts(
                unique_texts,
                self.provider,
                batch_size=self.config.batch_size,
                layer_cap=self.config.layer_cap,
                jobs=self.config.jobs,
            )
            self.cache.add(matrix.row_keys, matrix.rows)
        return np.stack([self.cache.vectors[k] for k in keys]).astype(np.float32)

    def prompted(self, task_id: str, role: str, texts: list[str]) -> np.ndarray:
        return self.embed([apply_prompt(task_id, role, t, self.config.prompt_mode) for t in texts])


def _eval_retrieval(task_id: str, ds: TaskDataset, embedder: _Embedder) -> TaskResult:
    query_text: dict[str, str] = {}
    doc_text: dict[str, str] = {}
    relevant: dict[str, set[str]] = {}
    for rec in ds.records:
        query_text.setdefault(rec.query_id, rec.query_text)
        doc_text.setdefault(rec.positive_id, rec.positive_text)
        doc_text.setdefault(rec.negative_id, rec.negative_text)
        relevant.setdefault(rec.query_id, set()).add(rec.positive_id)
    query_ids = sorted(query_text)
    doc_ids = sorted(doc_text)
    pools = [QueryPool(query_id=q, relevant=frozenset(relevant[q])) for q in query_ids]
    q_mat = embedder.prompted(task_id, "query", [query_text[q] for q in query_ids])
    d_mat = embedder.prompted(task_id, "doc", [doc_text[d] for d in doc_ids])
    mean, n_eval, n_skipped = retrieval_task_score(pools, q_mat, d_mat, doc_ids)
    return TaskResult(task_id, METRIC_OF[task_id], mean, n_eval, n_skipped)


def _eval_paraphrase(task_id: str, ds: TaskDataset, embedder: _Embedder) -> TaskResult:
    u1 = embedder.prompted(task_id, "text1", [r.text1 for r in ds.records]).astype(np.float64)
    u2 = embedder.prompted(task_id, "text2", [r.text2 for r in ds.records]).astype(np.float64)
    sims = np.sum(u1 * u2, axis=1)
    labels = np.array([r.label for r in ds.records], dtype=np.float64)
    flags: list[str] = []
    try:
        value = pearson(sims, labels)
    except DegenerateInput:
        value = 0.0
        flags.append("degenerate_pearson")
    return TaskResult(task_id, METRIC_OF[task_id], value, len(ds.records), 0, flags)


def _classification_features(
    task_id: str, ds: TaskDataset, embedder: _Embedder
) -> tuple[np.ndarray, list[str]]:
    if KIND_OF[task_id] == "pair":
        u1 = embedder.prompted(task_id, "text1", [r.text1 for r in ds.records])
        u2 = embedder.prompted(task_id, "text2", [r.text2 for r in ds.records])
        feats = np.concatenate([u1, u2], axis=1)
        labels = [str(r.label) for r in ds.records]
    else:
        feats = embedder.prompted(task_id, "text", [r.text for r in ds.records])
        labels = [r.label for r in ds.records]
    return feats.astype(np.float64), labels


def _eval_classification(
    task_id: str, train_ds: TaskDataset, test_ds: TaskDataset, embedder: _Embedder
) -> TaskResult:
    train_x, train_y = _classification_features(task_id, train_ds, embedder)
    test_x, test_y = _classification_features(task_id, test_ds, embedder)
    value = macro_f1_probe(train_x, train_y, test_x, test_y, seed=0)
    return TaskResult(task_id, METRIC_OF[task_id], value, len(test_ds.records), 0)


def _eval_clustering(task_id: str, ds: TaskDataset, embedder: _Embedder) -> TaskResult:
    feats = embedder.prompted(task_id, "text", [r.text for r in ds.records]).astype(np.float64)
    truth = [r.cluster_id for r in ds.records]
    n_clusters = len(set(truth))
    assignment = kmeans_cluster(feats, n_clusters)  # protocol pins seed 42
    score = v_measure(assignment.tolist(), truth)
    return TaskResult(task_id, METRIC_OF[task_id], score.v, len(ds.records), 0)


def _load_or_build(config: EvalRunConfig) -> dict[tuple[str, str], TaskDataset]:
    rebuild_needed = config.variant != "full" or config.tasks_dir is None
    if not rebuild_needed:
        return load_task_dir(config.tasks_dir)
    if config.corpus_path is None:
        raise PatentebError(
            "structural variants re-render texts from the corpus: pass corpus_path"
        )
    build_config = config.build_config or BuildConfig.desk()
    corpus = ingest_corpus(config.corpus_path)
    result = build_all(corpus, build_config, variant=config.variant)
    return result.datasets


def evaluate_run(config: EvalRunConfig, return_text_count: bool = False):
    """Evaluate all 15 tasks and assemble the report dict."""
    datasets = _load_or_build(config)
    embedder = _Embedder(config)

    results: list[TaskResult] = []
    for task_id in TASK_IDS:
        test_ds = datasets.get((task_id, "test"))
        if test_ds is None:
            continue
        family = FAMILY_OF[task_id]
        if len(test_ds) == 0:
            # tiny corpora can starve a task; score 0 with a flag instead of aborting
            results.append(
                TaskResult(task_id, METRIC_OF[task_id], 0.0, 0, 0, ["empty_dataset"])
            )
            continue
        if family == "retrieval":
            results.append(_eval_retrieval(task_id, test_ds, embedder))
        elif family == "paraphrase":
            results.append(_eval_paraphrase(task_id, test_ds, embedder))
        elif family == "classification":
            train_ds = datasets.get((task_id, "train"))
            if train_ds is None:
                raise PatentebError(f"{task_id}: classification probe needs the train split")
            if len(train_ds) == 0:
                results.append(
                    TaskResult(task_id, METRIC_OF[task_id], 0.0, 0, 0, ["empty_dataset"])
                )
                continue
            results.append(_eval_classification(task_id, train_ds, test_ds, embedder))
        else:
            results.append(_eval_clustering(task_id, test_ds, embedder))
    embedder.cache.save()

    report = assemble_report(results, config.snapshot())
    if return_text_count:
        return report, embedder.requested
    return report


def assemble_report(results: list[TaskResult], config_snapshot: dict) -> dict:
    by_family: dict[str, list[float]] = {fam: [] for fam in FAMILIES}
    for res in results:
        by_family[FAMILY_OF[res.task_id]].append(res.value)
    families = {
        fam: (float(np.mean(vals)) if vals else None) for fam, vals in by_family.items()
    }
    overall = None
    if len(results) == len(TASK_IDS):
        overall = overall_score([r.value for r in results])
    return {
        "schema_version": SCHEMA_VERSION,
        "toolkit": {"name": "patenteb", "version": __version__},
        "config": config_snapshot,
        "tasks": [r.as_dict() for r in sorted(results, key=lambda r: r.task_id)],
        "families": families,
        "overall_score": overall,
    }


def report_bytes(report: dict) -> bytes:
    """Canonical serialization: sorted keys, two-space indent, trailing newline."""
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode("utf-8")


def write_report(report: dict, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(report_bytes(report))
    return path


def write_leaderboard_csv(report: dict, path: str | Path) -> Path:
    """One-row CSV: provider, overall, family means, then per-task values."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    task_values = {t["task_id"]: t["value"] for t in report["tasks"]}
    headers = ["provider", "prompt_mode", "variant", "overall_score"]
    row = [
        report["config"]["provider"],
        report["config"]["prompt_mode"],
        report["config"]["variant"],
        report["overall_score"],
    ]
    for fam in FAMILIES:
        headers.append(f"family_{fam}")
        row.append(report["families"][fam])
    for task_id in TASK_IDS:
        headers.append(task_id)
        row.append(task_values.get(task_id))
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        writer.writerow(row)
    return path


def load_report_schema() -> dict:
    with resources.files("patenteb.schemas").joinpath("eval_report.schema.json").open() as fh:
        return json.load(fh)


def validate_report(report: dict) -> None:
    """Raise jsonschema.ValidationError when the report breaks the schema."""
    import jsonschema

    jsonschema.validate(report, load_report_schema())
