"""Parquet export/ingest for task datasets.

File naming is ``<task>__<split>.parquet``; schemas per record kind:
retrieval triplets carry ids, texts and the relation; pairs carry
text1/text2/label (int8); labeled and clustering records carry text plus
their label or cluster id.
"""

from __future__ import annotations

from pathlib import Path

import pyarrow as pa
import pyarrow.parquet as pq

from ..errors import IoError, SchemaMismatch
from ..tasks import KIND_OF
from .records import ClusterMember, LabeledText, PairRecord, RetrievalTriplet, TaskDataset

_SCHEMAS = {
    "triplet": pa.schema(
        [
            ("query_id", pa.string()),
            ("positive_id", pa.string()),
            ("negative_id", pa.string()),
            ("query_text", pa.string()),
            ("positive_text", pa.string()),
            ("negative_text", pa.string()),
            ("relation", pa.string()),
        ]
    ),
    "pair": pa.schema([("text1", pa.string()), ("text2", pa.string()), ("label", pa.int8())]),
    "labeled": pa.schema([("text", pa.string()), ("label", pa.string())]),
    "cluster": pa.schema([("text", pa.string()), ("cluster_id", pa.string())]),
}


def task_filename(task_id: str, split: str) -> str:
    return f"{task_id}__{split}.parquet"


def export_task(dataset: TaskDataset, path: str | Path) -> Path:
    """Write one (task, split) dataset to Parquet; lossless round trip."""
    schema = _SCHEMAS[dataset.kind]
    columns: dict[str, list] = {name: [] for name in schema.names}
    for record in dataset.records:
        for name in schema.names:
            columns[name].append(getattr(record, name))
    table = pa.table(columns, schema=schema)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        pq.write_table(table, path)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return path


def load_task(path: str | Path) -> TaskDataset:
    """Read one exported Parquet file back into records.

    The task id and split come from the file name; the stratum column is not
    exported and loads as empty."""
    path = Path(path)
    stem = path.stem
    if "__" not in stem:
        raise SchemaMismatch(f"cannot parse task/split from file name: {path.name}")
    task_id, split = stem.rsplit("__", 1)
    if task_id not in KIND_OF:
        raise SchemaMismatch(f"unknown task id in file name: {task_id}")
    kind = KIND_OF[task_id]
    table = pq.read_table(path)
    expected = _SCHEMAS[kind].names
    missing = [c for c in expected if c not in table.column_names]
    if missing:
        raise SchemaMismatch(f"{path.name}: missing column '{missing[0]}'")
    ds = TaskDataset(task_id=task_id, split=split, kind=kind)
    rows = table.to_pylist()
    if kind == "triplet":
        ds.records = [
            RetrievalTriplet(
                query_id=r["query_id"],
                positive_id=r["positive_id"],
                negative_id=r["negative_id"],
                query_text=r["query_text"],
                positive_text=r["positive_text"],
                negative_text=r["negative_text"],
                relation=r["relation"],
            )
            for r in rows
        ]
    elif kind == "pair":
        ds.records = [
            PairRecord(text1=r["text1"], text2=r["text2"], label=int(r["label"])) for r in rows
        ]
    elif kind == "labeled":
        ds.records = [LabeledText(text=r["text"], label=r["label"]) for r in rows]
    else:
        ds.records = [ClusterMember(text=r["text"], cluster_id=r["cluster_id"]) for r in rows]
    return ds


def export_all(datasets: dict[tuple[str, str], TaskDataset], out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    for (task_id, split), ds in sorted(datasets.items()):
        written.append(export_task(ds, out_dir / task_filename(task_id, split)))
    return written


def load_task_dir(task_dir: str | Path) -> dict[tuple[str, str], TaskDataset]:
    task_dir = Path(task_dir)
    datasets = {}
    for path in sorted(task_dir.glob("*.parquet")):
        ds = load_task(path)
        datasets[(ds.task_id, ds.split)] = ds
    return datasets
