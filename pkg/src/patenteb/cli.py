"""Command-line entry points: build, eval, ablate, verify, fixture."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import CorruptFile, PatentebError, SchemaMismatch


def _add_provider_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--provider", help="provider spec: URL, hash:<dim>, or embeddings file")
    parser.add_argument("--provider-url", help="HTTP provider base URL")
    parser.add_argument("--embeddings-file", help="stored embedding file (PTEB-EMB)")
    parser.add_argument("--prompt-mode", choices=["table", "none"], default="none")
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--cache-dir", default=None, help="defaults to PATENTEB_CACHE_DIR")


def _provider_spec(args: argparse.Namespace) -> str:
    given = [s for s in (args.provider, args.provider_url, args.embeddings_file) if s]
    if len(given) != 1:
        raise PatentebError("pass exactly one of --provider / --provider-url / --embeddings-file")
    return given[0]


def cmd_build(args: argparse.Namespace) -> int:
    from .corpus import ingest_corpus
    from .report import report_bytes
    from .taskgen import BuildConfig, build_all, export_all

    if args.config:
        config = BuildConfig.from_dict(json.loads(Path(args.config).read_text()))
    elif args.desk:
        config = BuildConfig.desk(seed=args.seed)
    else:
        config = BuildConfig(seed=args.seed)
    corpus = ingest_corpus(args.corpus)
    result = build_all(corpus, config)
    out_dir = Path(args.out)
    written = export_all(result.datasets, out_dir)
    manifest_path = out_dir / "build_manifest.json"
    manifest_path.write_bytes(report_bytes(result.manifest))
    with (out_dir / "splits.jsonl").open("w") as fh:
        for record in result.split_assignment.to_records():
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    with (out_dir / "segments.jsonl").open("w") as fh:
        for fid in sorted(result.segments):
            seg = result.segments[fid]
            fh.write(
                json.dumps(
                    {
                        "family_id": fid,
                        "problem": seg.problem,
                        "solution": seg.solution,
                        "effect": seg.effect,
                        "field": seg.field,
                        "substance": seg.substance,
                        "matched_pattern": seg.matched_pattern,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"wrote {len(written)} task files, splits.jsonl, segments.jsonl, {manifest_path}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    from .report import (
        EvalRunConfig,
        evaluate_run,
        validate_report,
        write_leaderboard_csv,
        write_report,
    )
    from .taskgen import BuildConfig

    if args.from_report:
        snap = json.loads(Path(args.from_report).read_text())["config"]
        config = EvalRunConfig.from_snapshot(snap, jobs=args.jobs, cache_dir=args.cache_dir)
    else:
        build_config = None
        if args.build_config:
            build_config = BuildConfig.from_dict(json.loads(Path(args.build_config).read_text()))
        config = EvalRunConfig(
            tasks_dir=args.tasks,
            corpus_path=args.corpus,
            build_config=build_config,
            provider_spec=_provider_spec(args),
            prompt_mode=args.prompt_mode,
            batch_size=args.batch_size,
            seed=args.seed,
            variant=args.variant,
            jobs=args.jobs,
            cache_dir=args.cache_dir,
        )
    report = evaluate_run(config)
    validate_report(report)
    out = write_report(report, args.out)
    print(f"wrote {out}")
    if args.csv:
        print(f"wrote {write_leaderboard_csv(report, args.csv)}")
    if report["overall_score"] is not None:
        print(f"overall score: {report['overall_score']:.4f}")
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    import csv as csv_mod

    from .ablate import layer_prune_grid, structural_trim_eval
    from .report import EvalRunConfig, write_report
    from .taskgen import BuildConfig

    grid = json.loads(Path(args.grid).read_text())
    build_config = None
    if args.build_config:
        build_config = BuildConfig.from_dict(json.loads(Path(args.build_config).read_text()))
    base = EvalRunConfig(
        tasks_dir=args.tasks,
        corpus_path=args.corpus,
        build_config=build_config,
        provider_spec=_provider_spec(args),
        prompt_mode=args.prompt_mode,
        batch_size=args.batch_size,
        seed=args.seed,
        jobs=args.jobs,
        cache_dir=args.cache_dir,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows: list[list] = []

    def add_rows(variant_name: str, report: dict) -> None:
        for task in report["tasks"]:
            rows.append([variant_name, task["task_id"], task["metric_name"], task["value"]])

    if grid.get("truncate"):
        for d in grid["truncate"]:
            report = _truncation_eval(base, d)
            add_rows(f"truncate_D{d}", report)
            write_report(report, out_dir / f"report_truncate_D{d}.json")
    if grid.get("layers"):
        results = layer_prune_grid(base, grid["layers"])
        curve_path = out_dir / "layer_curve.csv"
        with curve_path.open("w", newline="") as fh:
            writer = csv_mod.writer(fh)
            writer.writerow(["layer_cap", "overall_score", "per_text_seconds", "speed_ratio"])
            for cap, report, stats in results:
                add_rows(f"layers_L{cap}", report)
                write_report(report, out_dir / f"report_layers_L{cap}.json")
                writer.writerow(
                    [cap, report["overall_score"], stats.per_text_seconds, stats.speed_ratio_vs_full]
                )
    if grid.get("structural"):
        for variant in grid["structural"]:
            report = structural_trim_eval(base, variant)
            add_rows(f"structural_{variant}", report)
            safe = variant.replace("+", "_")
            write_report(report, out_dir / f"report_structural_{safe}.json")

    grid_csv = out_dir / "ablation_grid.csv"
    with grid_csv.open("w", newline="") as fh:
        writer = csv_mod.writer(fh)
        writer.writerow(["variant", "task", "metric", "value"])
        writer.writerows(rows)
    print(f"wrote {grid_csv} ({len(rows)} rows)")
    return 0


def _truncation_eval(base_config, d: int) -> dict:
    """Evaluate with embeddings truncated to the first d dimensions."""
    from dataclasses import replace

    from .ablate import truncate_embeddings
    from .embed_io import EmbeddingMatrix, Provenance
    from .report import evaluate_run

    class _TruncatingProvider:
        def __init__(self, inner, dim: int):
            self.inner = inner
            self.d = dim
            self.name = f"{getattr(inner, 'name', 'provider')}|truncate{dim}"
            self.max_layers = getattr(inner, "max_layers", None)

        def embed(self, texts, layer_cap=None):
            rows = self.inner.embed(texts, layer_cap=layer_cap)
            matrix = EmbeddingMatrix(
                rows=rows,
                row_keys=tuple(str(i) for i in range(rows.shape[0])),
                normalized=True,
                provenance=Provenance(provider=self.name),
            )
            return truncate_embeddings(matrix, self.d).rows

        def info(self):
            return {"name": self.name, "dim": self.d, "max_layers": self.max_layers}

    config = replace(base_config)
    config._provider = _TruncatingProvider(base_config.provider, d)
    config.provider_spec = f"{base_config.provider_spec}|truncate{d}"
    return evaluate_run(config)


def cmd_verify(args: argparse.Namespace) -> int:
    from .verify import format_table, run_verify

    results = run_verify(
        out_dir=args.out, families=args.families, corrupt_ndcg=args.corrupt_ndcg
    )
    print(format_table(results))
    return 0 if all(r.passed for r in results) else 1


def cmd_fixture(args: argparse.Namespace) -> int:
    from .fixture import write_fixture

    truth = write_fixture(
        args.out, seed=args.seed, n_families=args.families, n_domains=args.domains
    )
    print(f"wrote {args.out} ({truth['n_records']} records, {truth['undirected_edges']} edges)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patenteb",
        description="Patent text embedding benchmark construction and evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build all 15 tasks from a corpus file")
    p_build.add_argument("--corpus", required=True)
    p_build.add_argument("--config", help="BuildConfig JSON")
    p_build.add_argument("--desk", action="store_true", help="desk-scale preset (1/1000 targets)")
    p_build.add_argument("--seed", type=int, default=42)
    p_build.add_argument("--out", required=True)
    p_build.set_defaults(fn=cmd_build)

    p_eval = sub.add_parser("eval", help="evaluate a provider on exported tasks")
    p_eval.add_argument("--tasks", help="directory of exported task Parquet files")
    p_eval.add_argument("--corpus", help="corpus file (needed for structural variants)")
    p_eval.add_argument("--build-config", help="BuildConfig JSON used when rebuilding")
    p_eval.add_argument("--variant", default="full")
    p_eval.add_argument("--seed", type=int, default=42)
    p_eval.add_argument("--out", required=True)
    p_eval.add_argument("--csv", help="also write a one-row leaderboard CSV")
    p_eval.add_argument("--from-report", help="re-run from a report's embedded config")
    _add_provider_args(p_eval)
    p_eval.set_defaults(fn=cmd_eval)

    p_ablate = sub.add_parser("ablate", help="run an ablation grid")
    p_ablate.add_argument("--tasks")
    p_ablate.add_argument("--corpus")
    p_ablate.add_argument("--build-config")
    p_ablate.add_argument("--grid", required=True, help="grid config JSON")
    p_ablate.add_argument("--seed", type=int, default=42)
    p_ablate.add_argument("--out", required=True)
    _add_provider_args(p_ablate)
    p_ablate.set_defaults(fn=cmd_ablate)

    p_verify = sub.add_parser("verify", help="run the oracle suites")
    p_verify.add_argument("--out", help="keep fixture/exports in this directory")
    p_verify.add_argument("--families", type=int, default=5000)
    p_verify.add_argument("--corrupt-ndcg", action="store_true", help=argparse.SUPPRESS)
    p_verify.set_defaults(fn=cmd_verify)

    p_fixture = sub.add_parser("fixture", help="write the synthetic corpus fixture")
    p_fixture.add_argument("--out", required=True)
    p_fixture.add_argument("--seed", type=int, default=42)
    p_fixture.add_argument("--families", type=int, default=5000)
    p_fixture.add_argument("--domains", type=int, default=30)
    p_fixture.set_defaults(fn=cmd_fixture)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SchemaMismatch, CorruptFile) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except PatentebError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
