"""Shared fixtures: a small synthetic corpus and its build, reused per session."""

from __future__ import annotations

import warnings

import pytest

from patenteb.corpus import ingest_corpus
from patenteb.fixture import write_fixture
from patenteb.taskgen import BuildConfig, build_all


@pytest.fixture(scope="session")
def small_corpus_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "small.parquet"
    write_fixture(path, seed=42, n_families=600, n_domains=6)
    return path


@pytest.fixture(scope="session")
def small_corpus(small_corpus_path):
    return ingest_corpus(small_corpus_path)


@pytest.fixture(scope="session")
def small_build(small_corpus):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_all(small_corpus, BuildConfig.desk())


@pytest.fixture(scope="session")
def small_tasks_dir(small_build, tmp_path_factory):
    from patenteb.taskgen import export_all

    out = tmp_path_factory.mktemp("tasks")
    export_all(small_build.datasets, out)
    return out
