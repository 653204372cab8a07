"""Self-verification suite behind `patenteb verify`.

Runs the metric oracles, gradient checks, the PCA oracle, fragment-pattern
fixtures, paper arithmetic, and pipeline soundness on the bundled synthetic
fixture, and prints one pass/fail line per check.
"""

from __future__ import annotations

import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import ablate, losses, metrics, oracles
from .corpus import ingest_corpus
from .distill import fit_incremental_pca, layer_plan
from .domains import classify_relation
from .fixture import write_fixture
from .fragments import extract_segments, normalize_text
from .report import EvalRunConfig, evaluate_run, report_bytes
from .seeds import rng_for
from .taskgen import BuildConfig, build_all, export_all

# Table 14 per-task test scores for the flagship model, and the published
# Table 5 aggregate row they must reproduce.
PUBLISHED_LARGE_TASK_SCORES = {
    "title2full": 0.816,
    "effect2full": 0.725,
    "effect2substance": 0.704,
    "problem2full": 0.923,
    "problem2solution": 0.874,
    "retrieval_IN": 0.512,
    "retrieval_MIXED": 0.443,
    "retrieval_OUT": 0.172,
    "para_problem": 0.874,
    "para_solution": 0.905,
    "class_bloom": 0.422,
    "class_nli_oldnew": 0.665,
    "class_text2ipc3": 0.558,
    "clusters_ext_full_ipc": 0.702,
    "clusters_inventor": 0.522,
}
PUBLISHED_LARGE_AGGREGATES = {
    "overall": 0.6544,
    "retrieval": 0.6460,
    "paraphrase": 0.8893,
    "classification": 0.5483,
    "clustering": 0.6122,
}
TABLE_ROUNDING_TOL = 5e-3

# Table 10 storage column: FP16 megabytes per million embeddings.
PUBLISHED_STORAGE_MB = {32: 64, 64: 128, 128: 256, 256: 512, 512: 1024, 768: 1536, 1024: 2048}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _run(name: str, fn: Callable[[], str]) -> CheckResult:
    start = time.monotonic()
    try:
        detail = fn()
        return CheckResult(name, True, detail, time.monotonic() - start)
    except AssertionError as exc:
        return CheckResult(name, False, str(exc), time.monotonic() - start)
    except Exception as exc:  # a crash is a failure, not an abort
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}", time.monotonic() - start)


def check_ndcg_oracle(n_cases: int = 1000, corrupt: bool = False) -> str:
    rng = rng_for(7, "verify", "ndcg")
    worst = 0.0
    for _ in range(n_cases):
        pool = int(rng.integers(2, 21))
        ids = [f"d{j:03d}" for j in range(pool)]
        scores = rng.standard_normal(pool)
        n_rel = int(rng.integers(1, min(6, pool + 1)))
        relevant = set(str(x) for x in rng.choice(ids, size=n_rel, replace=False))
        ranking = metrics.rank_candidates(scores, ids)
        ours = metrics.ndcg_at_k(ranking, relevant, k=10)
        if corrupt:
            ours += 1e-6
        ref = oracles.ndcg_bruteforce(ranking, relevant, k=10)
        worst = max(worst, abs(ours - ref))
    assert worst <= 1e-12, f"max |ndcg - oracle| = {worst:.3e} > 1e-12"
    return f"{n_cases} cases, max deviation {worst:.1e}"


def check_pearson_oracle(n_cases: int = 1000) -> str:
    rng = rng_for(7, "verify", "pearson")
    worst = 0.0
    for _ in range(n_cases):
        n = int(rng.integers(5, 50))
        x = rng.standard_normal(n)
        y = rng.standard_normal(n) + 0.3 * x
        ours = metrics.pearson(x, y)
        ref = oracles.pearson_twopass(x.tolist(), y.tolist())
        worst = max(worst, abs(ours - ref))
    assert worst <= 1e-12, f"max |pearson - oracle| = {worst:.3e} > 1e-12"
    return f"{n_cases} cases, max deviation {worst:.1e}"


def check_vmeasure_oracle(n_cases: int = 500) -> str:
    rng = rng_for(7, "verify", "vmeasure")
    worst = 0.0
    for _ in range(n_cases):
        n = int(rng.integers(2, 51))
        truth = rng.integers(0, max(2, n // 4), size=n).tolist()
        assignment = rng.integers(0, max(2, n // 3), size=n).tolist()
        ours = metrics.v_measure(assignment, truth)
        h, c, v = oracles.vmeasure_contingency(assignment, truth)
        worst = max(worst, abs(ours.v - v), abs(ours.homogeneity - h), abs(ours.completeness - c))
    assert worst <= 1e-10, f"max |v_measure - oracle| = {worst:.3e} > 1e-10"
    return f"{n_cases} cases, max deviation {worst:.1e}"


def check_macro_f1_oracle(n_cases: int = 200) -> str:
    rng = rng_for(7, "verify", "macrof1")
    worst = 0.0
    for _ in range(n_cases):
        n = int(rng.integers(4, 60))
        n_classes = int(rng.integers(2, 6))
        labels = [str(c) for c in range(n_classes)]
        y_true = [labels[int(i)] for i in rng.integers(0, n_classes, size=n)]
        y_pred = [labels[int(i)] for i in rng.integers(0, n_classes, size=n)]
        ours = metrics.macro_f1(y_true, y_pred, labels)
        ref = oracles.macro_f1_confusion(y_true, y_pred, labels)
        worst = max(worst, abs(ours - ref))
    assert worst <= 1e-12, f"max |macro_f1 - oracle| = {worst:.3e} > 1e-12"
    return f"{n_cases} cases, max deviation {worst:.1e}"


def _gradient_check_mnr(rng) -> float:
    b = int(rng.integers(2, 9))
    d = int(rng.integers(3, 17))
    cfg = losses.LossConfig(temperature=float(rng.uniform(0.5, 2.0)))
    anchors = rng.standard_normal((b, d))
    positives = rng.standard_normal((b, d))
    _, grads = losses.mnr_loss(anchors, positives, cfg)
    fd_a = oracles.finite_difference_gradient(
        lambda x: losses.mnr_loss(x, positives, cfg)[0], anchors.copy()
    )
    fd_p = oracles.finite_difference_gradient(
        lambda x: losses.mnr_loss(anchors, x, cfg)[0], positives.copy()
    )
    return max(
        oracles.max_relative_error(grads["anchors"], fd_a),
        oracles.max_relative_error(grads["positives"], fd_p),
    )


def _gradient_check_contrastive(rng) -> float:
    b = int(rng.integers(2, 9))
    d = int(rng.integers(3, 17))
    cfg = losses.LossConfig(margin=0.5)
    while True:
        e1 = rng.standard_normal((b, d))
        e2 = rng.standard_normal((b, d))
        y = rng.integers(0, 2, size=b)
        cos, _, _ = losses._cosine_pair_grads(e1, e2)
        if np.all(np.abs(cos - cfg.margin) > 0.05):  # stay off the clamp boundary
            break
    _, grads = losses.online_contrastive_loss(e1, e2, y, cfg)
    fd_1 = oracles.finite_difference_gradient(
        lambda x: losses.online_contrastive_loss(x, e2, y, cfg)[0], e1.copy()
    )
    fd_2 = oracles.finite_difference_gradient(
        lambda x: losses.online_contrastive_loss(e1, x, y, cfg)[0], e2.copy()
    )
    return max(
        oracles.max_relative_error(grads["e1"], fd_1),
        oracles.max_relative_error(grads["e2"], fd_2),
    )


def _triplet_selection_gaps(embeddings, labels) -> float:
    """Smallest margin separating each anchor's argmin/argmax from the rest."""
    e = embeddings / np.linalg.norm(embeddings, axis=1, keepdims=True)
    sims = e @ e.T
    b = len(labels)
    smallest = np.inf
    for i in range(b):
        same = [j for j in range(b) if labels[j] == labels[i] and j != i]
        diff = [j for j in range(b) if labels[j] != labels[i]]
        if not same or not diff:
            continue
        pos = sorted(sims[i, j] for j in same)
        neg = sorted((sims[i, j] for j in diff), reverse=True)
        if len(pos) > 1:
            smallest = min(smallest, pos[1] - pos[0])
        if len(neg) > 1:
            smallest = min(smallest, neg[0] - neg[1])
    return float(smallest)


def _gradient_check_triplet(rng) -> float:
    while True:
        b = int(rng.integers(4, 9))
        d = int(rng.integers(3, 17))
        embeddings = rng.standard_normal((b, d))
        labels = rng.integers(0, 2, size=b)
        if len(set(labels.tolist())) < 2:
            continue
        if _triplet_selection_gaps(embeddings, labels) > 1e-3:  # away from ties
            break
    _, grads, _ = losses.batch_hard_triplet_loss(embeddings, labels)
    fd = oracles.finite_difference_gradient(
        lambda x: losses.batch_hard_triplet_loss(x, labels)[0], embeddings.copy()
    )
    return oracles.max_relative_error(grads["embeddings"], fd)


def _gradient_check_pair_softmax(rng) -> float:
    b = int(rng.integers(2, 9))
    d = int(rng.integers(3, 17))
    e1 = rng.standard_normal((b, d))
    e2 = rng.standard_normal((b, d))
    y = rng.integers(0, 2, size=b)
    w = rng.standard_normal((2, 2 * d))
    _, grads = losses.pair_softmax_loss(e1, e2, y, w)
    fd_1 = oracles.finite_difference_gradient(
        lambda x: losses.pair_softmax_loss(x, e2, y, w)[0], e1.copy()
    )
    fd_2 = oracles.finite_difference_gradient(
        lambda x: losses.pair_softmax_loss(e1, x, y, w)[0], e2.copy()
    )
    fd_w = oracles.finite_difference_gradient(
        lambda x: losses.pair_softmax_loss(e1, e2, y, x)[0], w.copy()
    )
    return max(
        oracles.max_relative_error(grads["e1"], fd_1),
        oracles.max_relative_error(grads["e2"], fd_2),
        oracles.max_relative_error(grads["weights"], fd_w),
    )


def check_loss_gradients(n_batches: int = 100) -> str:
    rng = rng_for(7, "verify", "gradients")
    checks = {
        "mnr": _gradient_check_mnr,
        "contrastive": _gradient_check_contrastive,
        "triplet": _gradient_check_triplet,
        "pair_softmax": _gradient_check_pair_softmax,
    }
    worst: dict[str, float] = {}
    for name, fn in checks.items():
        worst[name] = max(fn(rng) for _ in range(n_batches))
        assert worst[name] <= 1e-5, f"{name}: max relative gradient error {worst[name]:.3e} > 1e-5"
    summary = ", ".join(f"{k}={v:.1e}" for k, v in worst.items())
    return f"{n_batches} batches per loss; worst rel err: {summary}"


def check_loss_anchor_values() -> str:
    log2 = float(np.log(2.0))
    # orthogonal batch at tau=1: uniform softmax over 2 gives log 2
    anchors = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]])
    positives = np.array([[0, 0, 1.0, 0], [0, 0, 0, 1.0]])
    val, _ = losses.mnr_loss(anchors, positives, losses.LossConfig(temperature=1.0))
    assert abs(val - log2) <= 1e-12, f"MNR orthogonal anchor: {val} != log 2"

    e1 = np.array([[1.0, 0.0]])
    cos07 = np.array([[0.7, np.sqrt(1 - 0.49)]])
    val, _ = losses.online_contrastive_loss(e1, cos07, np.array([0]), losses.LossConfig())
    assert abs(val - 0.04) <= 1e-12, f"contrastive anchor: {val} != 0.04"

    # equal hardest-positive and hardest-negative cosine: log(1 + e^0)
    emb = np.tile(np.array([[1.0, 0.5]]), (4, 1))
    labels = np.array([0, 0, 1, 1])
    val, _, _ = losses.batch_hard_triplet_loss(emb, labels)
    assert abs(val - log2) <= 1e-12, f"triplet anchor: {val} != log 2"

    w = np.ones((2, 4))
    val, _ = losses.pair_softmax_loss(
        np.array([[0.3, -0.2]]), np.array([[0.1, 0.9]]), np.array([1]), w
    )
    assert abs(val - log2) <= 1e-12, f"pair softmax anchor: {val} != log 2"
    return "all four anchors match within 1e-12"


def check_pca_oracle() -> str:
    rng = rng_for(7, "verify", "pca")
    dim, n, d = 24, 10_000, 6
    scales = np.array([2.0 ** (-i / 2) for i in range(dim)]) * 2.0
    data = rng.standard_normal((n, dim)) * scales + rng.standard_normal(dim)
    proj = fit_incremental_pca(iter(data), d=d, sample_cap=n, batch=1024, seed=3)
    comps, variances, _ = oracles.pca_fullbatch(data, d)

    angles = oracles.principal_angles(proj.w, comps)
    assert np.max(angles) <= 1e-4, f"principal angle {np.max(angles):.3e} > 1e-4 rad"
    rel = np.max(np.abs(proj.explained_variance - variances) / variances)
    assert rel <= 1e-6, f"explained variance rel err {rel:.3e} > 1e-6"
    gram = proj.w @ proj.w.T
    ortho = np.max(np.abs(gram - np.eye(d)))
    assert ortho <= 1e-6, f"W W^T deviates from identity by {ortho:.3e}"
    return f"angles<={np.max(angles):.1e} rad, var rel err<={rel:.1e}, ortho dev<={ortho:.1e}"


def check_fragment_patterns() -> str:
    cases = [
        ("PROBLEM TO BE SOLVED: leaky seal SOLUTION: dual gasket", 1, "problem", "leaky seal"),
        ("PROBLEM: heat loss SOLUTION: foam core", 2, "problem", "heat loss"),
        ("PURPOSE: reduce drag CONSTITUTION: ribbed hull", 3, "problem", "reduce drag"),
        ("[problem] torque spikes [solution] damped coupling", 4, "problem", "torque spikes"),
        (
            "FIELD: optics, laser engraving SUBSTANCE: doped glass EFFECT: sharper focus. Also cheaper.",
            5,
            "field",
            "laser engraving",
        ),
        ("SOLUTION: coated anode EFFECT: longer life. Lower cost.", 6, "solution", "coated anode"),
        ("brittle housings crack SOLUTION: flexible polymer shell", 7, "problem", "brittle housings crack"),
    ]
    for text, expected_pattern, field_name, expected_value in cases:
        seg = extract_segments(text)
        assert seg.matched_pattern == expected_pattern, (
            f"pattern {expected_pattern}: got {seg.matched_pattern} for {text!r}"
        )
        assert seg.get(field_name) == expected_value, (
            f"pattern {expected_pattern}: {field_name}={seg.get(field_name)!r}"
        )
    seg = extract_segments(
        "SOLUTION: coated anode EFFECT: longer life. Lower cost. SELECTED DRAWING: Figure 2"
    )
    assert seg.effect == "longer life.", f"effect truncation/drawing strip failed: {seg.effect!r}"
    return "all seven patterns, drawing strip, sentence truncation, final field value"


def check_paper_arithmetic() -> str:
    for d, mb in PUBLISHED_STORAGE_MB.items():
        got = ablate.storage_estimate(d, 1_000_000)
        assert got == mb, f"storage D{d}: {got} != {mb}"

    scores = [PUBLISHED_LARGE_TASK_SCORES[t] for t in sorted(PUBLISHED_LARGE_TASK_SCORES)]
    overall = metrics.overall_score(scores)
    assert abs(overall - PUBLISHED_LARGE_AGGREGATES["overall"]) <= TABLE_ROUNDING_TOL
    from .tasks import FAMILY_OF

    for family in ("retrieval", "paraphrase", "classification", "clustering"):
        vals = [v for t, v in PUBLISHED_LARGE_TASK_SCORES.items() if FAMILY_OF[t] == family]
        mean = float(np.mean(vals))
        assert abs(mean - PUBLISHED_LARGE_AGGREGATES[family]) <= TABLE_ROUNDING_TOL, (
            f"{family}: {mean} vs {PUBLISHED_LARGE_AGGREGATES[family]}"
        )

    plans = {
        "patembed-base": (tuple(range(0, 24, 2)), 768),
        "patembed-base_small": (tuple(range(0, 24, 3)), 512),
        "patembed-small": (tuple(range(0, 24, 4)), 384),
        "patembed-mini": (tuple(range(0, 24, 6)), 256),
        "patembed-nano": ((0, 12), 128),
    }
    for student, (indices, dim) in plans.items():
        plan = layer_plan(student)
        assert plan.teacher_layer_indices == indices, student
        assert plan.target_dim == dim, student
    return "storage column exact; aggregates within 5e-3; layer plans exact"


def _fixture_build(tmp: Path, families: int = 5000):
    corpus_path = tmp / "fixture.parquet"
    # keep every domain above the min_per_class=100 retention threshold
    n_domains = max(3, min(30, families // 160))
    write_fixture(corpus_path, seed=42, n_families=families, n_domains=n_domains)
    corpus = ingest_corpus(corpus_path)
    config = BuildConfig.desk()
    return corpus_path, corpus, build_all(corpus, config), config


def check_pipeline_soundness(tmp: Path, families: int = 5000) -> str:
    corpus_path, _, result, config = _fixture_build(tmp, families)
    corpus, graph = result.corpus, result.graph
    split_of = result.split_assignment.assignment

    # split leakage across every exported task
    for (task_id, split), ds in result.datasets.items():
        for rec in ds.records:
            for fid in getattr(rec, "query_id", None), getattr(rec, "positive_id", None), getattr(
                rec, "negative_id", None
            ):
                if fid is not None:
                    assert split_of[fid] == split, f"{task_id}: {fid} leaked into {split}"

    n_neg = 0
    per_query: dict[tuple[str, str], set[str]] = {}
    triplet_counts: dict[tuple[str, str], int] = {}
    from .taskgen.mining import NEGATIVE_CATEGORIES
    from .taskgen.builders import POSITIVE_RELATIONS, ASYM_TASKS

    for (task_id, split), ds in result.datasets.items():
        if ds.kind != "triplet":
            continue
        for rec in ds.records:
            assert not graph.connected(rec.query_id, rec.negative_id), (
                f"{task_id}: negative {rec.negative_id} citation-connected to {rec.query_id}"
            )
            assert rec.negative_id != rec.query_id
            n_neg += 1
            q_sig = corpus[rec.query_id].ipc_set
            neg_rel = classify_relation(q_sig, corpus[rec.negative_id].ipc_set)
            if task_id in ASYM_TASKS:
                assert neg_rel in NEGATIVE_CATEGORIES["MIXED"], f"{task_id}: {neg_rel}"
            else:
                rel_key = task_id.split("_")[1]
                assert neg_rel in NEGATIVE_CATEGORIES[rel_key], f"{task_id}: {neg_rel}"
                pos_rel = classify_relation(q_sig, corpus[rec.positive_id].ipc_set)
                assert pos_rel in POSITIVE_RELATIONS[rel_key], f"{task_id}: {pos_rel}"
                assert graph.connected(rec.query_id, rec.positive_id)
            key = (f"{task_id}|{split}", rec.query_id)
            per_query.setdefault(key, set()).add(rec.positive_id)
            triplet_counts[key] = triplet_counts.get(key, 0) + 1

    assert max(len(v) for v in per_query.values()) <= config.max_positives
    assert max(triplet_counts.values()) <= config.max_triplets

    for segment in ("problem", "solution"):
        for split in ("train", "validation", "test"):
            ds = result.datasets[(f"para_{segment}", split)]
            rate = sum(r.label for r in ds.records) / len(ds.records)
            assert abs(rate - config.paraphrase_rate) <= config.rate_tolerance, (
                f"para_{segment}/{split}: positive rate {rate:.4f}"
            )

    # anti-leak scan over every asymmetric record
    leaks = 0
    for task_id in ASYM_TASKS:
        for split in ("train", "validation", "test"):
            for rec in result.datasets[(task_id, split)].records:
                frag = normalize_text(rec.query_text)
                if frag in normalize_text(rec.positive_text):
                    leaks += 1
                if frag in normalize_text(rec.negative_text):
                    leaks += 1
    assert leaks == 0, f"{leaks} normalized-substring leaks"

    # byte-identical rebuild under the same seed
    out_a, out_b = tmp / "export_a", tmp / "export_b"
    corpus2 = ingest_corpus(corpus_path)
    result2 = build_all(corpus2, config)
    export_all(result.datasets, out_a)
    export_all(result2.datasets, out_b)
    files_a = sorted(p.name for p in out_a.glob("*.parquet"))
    files_b = sorted(p.name for p in out_b.glob("*.parquet"))
    assert files_a == files_b
    for name in files_a:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), f"{name} differs"
    return f"{n_neg} negatives sound; caps ok; rates ok; {len(files_a)} files byte-identical"


def check_eval_determinism(tmp: Path, families: int = 1200) -> str:
    corpus_path = tmp / "mini.parquet"
    write_fixture(corpus_path, seed=11, n_families=families, n_domains=10)
    corpus = ingest_corpus(corpus_path)
    config = BuildConfig.desk(seed=11)
    result = build_all(corpus, config)
    tasks_dir = tmp / "tasks"
    export_all(result.datasets, tasks_dir)

    def run(jobs: int) -> bytes:
        cfg = EvalRunConfig(
            tasks_dir=str(tasks_dir), provider_spec="hash:48", prompt_mode="table", jobs=jobs
        )
        return report_bytes(evaluate_run(cfg))

    first, second = run(1), run(4)
    assert first == second, "reports differ across --jobs"
    return f"byte-identical report across jobs ({len(first)} bytes)"


def run_verify(
    out_dir: str | Path | None = None,
    families: int = 5000,
    corrupt_ndcg: bool = False,
) -> list[CheckResult]:
    results: list[CheckResult] = []
    results.append(_run("metric_oracle_ndcg", lambda: check_ndcg_oracle(corrupt=corrupt_ndcg)))
    results.append(_run("metric_oracle_pearson", check_pearson_oracle))
    results.append(_run("metric_oracle_vmeasure", check_vmeasure_oracle))
    results.append(_run("metric_oracle_macro_f1", check_macro_f1_oracle))
    results.append(_run("loss_gradient_checks", check_loss_gradients))
    results.append(_run("loss_anchor_values", check_loss_anchor_values))
    results.append(_run("pca_oracle", check_pca_oracle))
    results.append(_run("fragment_patterns", check_fragment_patterns))
    results.append(_run("paper_arithmetic", check_paper_arithmetic))
    with tempfile.TemporaryDirectory() as tmp_name:
        tmp = Path(out_dir) if out_dir else Path(tmp_name)
        tmp.mkdir(parents=True, exist_ok=True)
        results.append(
            _run("pipeline_soundness", lambda: check_pipeline_soundness(tmp, families))
        )
        results.append(_run("eval_determinism", lambda: check_eval_determinism(tmp)))
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {status}  {r.seconds:7.2f}s  {r.detail}")
    n_fail = sum(1 for r in results if not r.passed)
    lines.append(f"{'-' * width}")
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines)
