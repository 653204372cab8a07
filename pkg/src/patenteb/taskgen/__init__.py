"""Task construction: mining, builders, subsampling, Parquet export."""

from .records import ClusterMember, LabeledText, PairRecord, RetrievalTriplet, TaskDataset
from .mining import MiningContext, mine_hard_negatives
from .builders import (
    BuildConfig,
    build_all,
    build_asymmetric_retrieval,
    build_bloom,
    build_clustering,
    build_nli_oldnew,
    build_paraphrase,
    build_symmetric_retrieval,
    build_text2ipc3,
)
from .subsample import stratified_subsample
from .export import export_all, export_task, load_task, load_task_dir, task_filename

__all__ = [
    "BuildConfig",
    "ClusterMember",
    "LabeledText",
    "MiningContext",
    "PairRecord",
    "RetrievalTriplet",
    "TaskDataset",
    "build_all",
    "build_asymmetric_retrieval",
    "build_bloom",
    "build_clustering",
    "build_nli_oldnew",
    "build_paraphrase",
    "build_symmetric_retrieval",
    "build_text2ipc3",
    "export_all",
    "export_task",
    "load_task",
    "load_task_dir",
    "mine_hard_negatives",
    "stratified_subsample",
    "task_filename",
]
