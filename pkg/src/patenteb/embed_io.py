"""Prompt application, embedding acquisition, and persistent embedding storage.

Providers speak a minimal JSON-over-HTTP protocol (POST /embed, GET /info);
a file provider replays stored matrices keyed by text-content hash, and a
built-in lexical provider supports fully offline runs and tests.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    CorruptFile,
    DimensionMismatch,
    MissingEmbedding,
    ProviderUnreachable,
    UnknownTaskRole,
)

DEFAULT_BATCH_SIZE = 64

# (task_id, field_role) -> prompt prefix. Prompts are prepended as
# "<prefix> <text>"; the none-prompt mode leaves texts untouched.
PROMPT_TABLE: dict[tuple[str, str], str] = {
    ("retrieval_IN", "query"): "encode query for same document retrieval:",
    ("retrieval_IN", "doc"): "encode document for same retrieval:",
    ("retrieval_OUT", "query"): "encode query for different document retrieval:",
    ("retrieval_OUT", "doc"): "encode document for different retrieval:",
    ("retrieval_MIXED", "query"): "encode query for mixed document retrieval:",
    ("retrieval_MIXED", "doc"): "encode document for mixed retrieval:",
    ("title2full", "query"): "encode title query for document retrieval:",
    ("title2full", "doc"): "encode document for retrieval:",
    ("problem2full", "query"): "encode problem query for document retrieval:",
    ("problem2full", "doc"): "encode document for retrieval:",
    ("effect2full", "query"): "encode effect query for document retrieval:",
    ("effect2full", "doc"): "encode document for retrieval:",
    ("effect2substance", "query"): "encode effect query for substance retrieval:",
    ("effect2substance", "doc"): "encode substance for retrieval:",
    ("problem2solution", "query"): "encode problem query for solution retrieval:",
    ("problem2solution", "doc"): "encode solution for retrieval:",
    ("para_problem", "text1"): "encode problem for problem paraphrase:",
    ("para_problem", "text2"): "encode problem for problem paraphrase:",
    ("para_solution", "text1"): "encode solution for solution paraphrase:",
    ("para_solution", "text2"): "encode solution for solution paraphrase:",
    ("class_text2ipc3", "text"): "encode document for ipc classification:",
    ("class_bloom", "text"): "encode document for bloom prediction classification:",
    ("class_nli_oldnew", "text1"): "encode citing document for pair classification:",
    ("class_nli_oldnew", "text2"): "encode cited document for pair classification:",
    ("clusters_ext_full_ipc", "text"): "encode document for same ipc clustering:",
    ("clusters_inventor", "text"): "encode document for same inventors clustering:",
}


def apply_prompt(task_id: str, field_role: str, text: str, mode: str = "table") -> str:
    """Prepend the task/role prompt prefix, or pass through in none mode."""
    if mode == "none":
        return text
    if mode != "table":
        raise ValueError(f"unknown prompt mode: {mode}")
    key = (task_id, field_role)
    if key not in PROMPT_TABLE:
        raise UnknownTaskRole(f"{task_id}/{field_role}")
    return f"{PROMPT_TABLE[key]} {text}"


def text_hash(text: str) -> str:
    """64-bit content hash of the exact (prompted) text."""
    return hashlib.blake2b(text.encode("utf-8"), digest_size=8).hexdigest()


@dataclass(frozen=True)
class Provenance:
    provider: str
    prompt_mode: str = "none"
    variant: str = "full"
    layer_cap: int | None = None
    truncated_dim: int | None = None

    def as_dict(self) -> dict:
        return {
            "provider": self.provider,
            "prompt_mode": self.prompt_mode,
            "variant": self.variant,
            "layer_cap": self.layer_cap,
            "truncated_dim": self.truncated_dim,
        }


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Dense row-per-text embeddings with provenance.

    Values are stored at 32-bit precision; ``row_keys[i]`` is the content
    hash of input text i.
    """

    rows: np.ndarray
    row_keys: tuple[str, ...]
    normalized: bool
    provenance: Provenance

    def __post_init__(self) -> None:
        if self.rows.shape[0] != len(self.row_keys):
            raise DimensionMismatch("row count must equal key count")

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    def __len__(self) -> int:
        return int(self.rows.shape[0])

    def index(self) -> dict[str, int]:
        return {key: i for i, key in enumerate(self.row_keys)}


def l2_normalize(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return rows / norms


class LocalHashProvider:
    """Deterministic lexical embedder for offline runs.

    Each whitespace token maps to a fixed pseudo-random direction; a text
    embeds as the normalized sum of its token directions, so lexical overlap
    translates into cosine similarity.
    """

    def __init__(self, dim: int = 64):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self.dim = dim
        self.name = f"hash:{dim}"
        self.max_layers: int | None = None
        self._token_cache: dict[str, np.ndarray] = {}

    def _token_vec(self, token: str) -> np.ndarray:
        vec = self._token_cache.get(token)
        if vec is None:
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))
            vec = rng.standard_normal(self.dim)
            self._token_cache[token] = vec
        return vec

    def embed(self, texts: Sequence[str], layer_cap: int | None = None) -> np.ndarray:
        if layer_cap is not None:
            raise ProviderUnreachable("hash provider does not support layer capping")
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for i, text in enumerate(texts):
            tokens = text.split()
            if not tokens:
                tokens = ["\x00empty"]
            for tok in tokens:
                out[i] += self._token_vec(tok)
        return l2_normalize(out).astype(np.float32)

    def info(self) -> dict:
        return {"name": self.name, "dim": self.dim, "max_layers": None, "max_tokens": 1 << 20}


class WireProvider:
    """HTTP client for the provider protocol."""

    def __init__(self, base_url: str, timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._info: dict | None = None

    def info(self) -> dict:
        import requests

        if self._info is None:
            try:
                resp = requests.get(f"{self.base_url}/info", timeout=self.timeout)
                resp.raise_for_status()
            except requests.RequestException as exc:
                raise ProviderUnreachable(f"{self.base_url}: {exc}") from exc
            self._info = resp.json()
        return self._info

    @property
    def name(self) -> str:
        return str(self.info().get("name", self.base_url))

    @property
    def max_layers(self) -> int | None:
        return self.info().get("max_layers")

    def embed(self, texts: Sequence[str], layer_cap: int | None = None) -> np.ndarray:
        import requests

        try:
            resp = requests.post(
                f"{self.base_url}/embed",
                json={"texts": list(texts), "layer_cap": layer_cap},
                timeout=self.timeout,
            )
            resp.raise_for_status()
        except requests.RequestException as exc:
            raise ProviderUnreachable(f"{self.base_url}: {exc}") from exc
        payload = resp.json()
        vectors = np.asarray(payload["vectors"], dtype=np.float32)
        if vectors.ndim != 2 or vectors.shape[0] != len(texts) or vectors.shape[1] != payload["dim"]:
            raise DimensionMismatch("provider returned inconsistent vector shape")
        if not payload.get("normalized", False):
            vectors = l2_normalize(vectors.astype(np.float64)).astype(np.float32)
        return vectors


class FileProvider:
    """Replays embeddings from a stored matrix, keyed by text hash."""

    def __init__(self, path: str | Path):
        self.matrix = load_embeddings(path)
        self._index = self.matrix.index()
        self.name = f"file:{Path(path).name}"
        self.max_layers: int | None = None

    def embed(self, texts: Sequence[str], layer_cap: int | None = None) -> np.ndarray:
        if layer_cap is not None:
            raise ProviderUnreachable("file provider does not support layer capping")
        rows = np.empty((len(texts), self.matrix.dim), dtype=np.float32)
        for i, text in enumerate(texts):
            key = text_hash(text)
            if key not in self._index:
                raise MissingEmbedding(key)
            rows[i] = self.matrix.rows[self._index[key]]
        return rows

    def info(self) -> dict:
        return {
            "name": self.name,
            "dim": self.matrix.dim,
            "max_layers": None,
            "max_tokens": None,
        }


def make_provider(spec: str):
    """Build a provider from a spec string.

    ``http(s)://...`` -> wire provider; ``hash:<dim>`` -> lexical provider;
    anything else -> embedding file path.
    """
    if spec.startswith(("http://", "https://")):
        return WireProvider(spec)
    if spec.startswith("hash:"):
        return LocalHashProvider(int(spec.split(":", 1)[1]))
    return FileProvider(spec)


def embed_texts(
    texts: Sequence[str],
    provider,
    batch_size: int = DEFAULT_BATCH_SIZE,
    layer_cap: int | None = None,
    jobs: int = 1,
    provenance: Provenance | None = None,
) -> EmbeddingMatrix:
    """Embed texts in input order, batching requests.

    Batches may run concurrently up to ``jobs`` in flight; results are
    re-sequenced to input order before the matrix is assembled.
    """
    if provenance is None:
        provenance = Provenance(provider=getattr(provider, "name", "unknown"), layer_cap=layer_cap)
    batches = [list(texts[i : i + batch_size]) for i in range(0, len(texts), batch_size)]
    if not batches:
        raise ValueError("no texts to embed")

    def run(batch: list[str]) -> np.ndarray:
        return provider.embed(batch, layer_cap=layer_cap)

    if jobs <= 1 or len(batches) == 1:
        results = [run(b) for b in batches]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, batches))

    dim = results[0].shape[1]
    for block in results:
        if block.shape[1] != dim:
            raise DimensionMismatch("provider returned inconsistent dimensions across batches")
    rows = np.vstack(results).astype(np.float32)
    keys = tuple(text_hash(t) for t in texts)
    return EmbeddingMatrix(rows=rows, row_keys=keys, normalized=True, provenance=provenance)


_EMB_MAGIC = b"PTEB-EMB" + b"\x00" * 8  # padded to 16 bytes


def store_embeddings(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Write magic, JSON header line, then little-endian float32 rows."""
    header = {
        "dim": matrix.dim,
        "count": len(matrix),
        "normalized": matrix.normalized,
        "provenance": matrix.provenance.as_dict(),
        "row_keys": list(matrix.row_keys),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(_EMB_MAGIC)
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode("utf-8"))
        fh.write(np.ascontiguousarray(matrix.rows, dtype="<f4").tobytes())


def load_embeddings(path: str | Path) -> EmbeddingMatrix:
    path = Path(path)
    if not path.exists():
        raise CorruptFile(f"no such file: {path}")
    with path.open("rb") as fh:
        magic = fh.read(len(_EMB_MAGIC))
        if magic != _EMB_MAGIC:
            raise CorruptFile(f"bad magic in {path}")
        try:
            header = json.loads(fh.readline().decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptFile(f"bad header in {path}") from exc
        count, dim = header["count"], header["dim"]
        payload = fh.read()
    expected = 4 * count * dim
    if len(payload) != expected:
        raise CorruptFile(f"payload length {len(payload)} != expected {expected}")
    rows = np.frombuffer(payload, dtype="<f4").reshape(count, dim).copy()
    prov = header.get("provenance", {})
    return EmbeddingMatrix(
        rows=rows,
        row_keys=tuple(header["row_keys"]),
        normalized=header["normalized"],
        provenance=Provenance(
            provider=prov.get("provider", "unknown"),
            prompt_mode=prov.get("prompt_mode", "none"),
            variant=prov.get("variant", "full"),
            layer_cap=prov.get("layer_cap"),
            truncated_dim=prov.get("truncated_dim"),
        ),
    )


@dataclass
class EmbeddingCache:
    """Hash-keyed embedding cache persisted in the PATENTEB_CACHE_DIR.

    One cache file per provider signature; missing texts are embedded and
    appended on save.
    """

    provider_signature: str
    directory: Path
    vectors: dict[str, np.ndarray] = field(default_factory=dict)
    dim: int | None = None

    @classmethod
    def open(cls, provider_signature: str, directory: str | Path | None = None) -> "EmbeddingCache":
        if directory is None:
            directory = os.environ.get("PATENTEB_CACHE_DIR", "")
        if not directory:
            return cls(provider_signature=provider_signature, directory=Path(""))
        directory = Path(directory)
        cache = cls(provider_signature=provider_signature, directory=directory)
        path = cache._path()
        if path is not None and path.exists():
            matrix = load_embeddings(path)
            cache.dim = matrix.dim
            for key, row in zip(matrix.row_keys, matrix.rows):
                cache.vectors[key] = row
        return cache

    def _path(self) -> Path | None:
        if str(self.directory) in ("", "."):
            return None
        sig = hashlib.blake2b(self.provider_signature.encode("utf-8"), digest_size=8).hexdigest()
        return self.directory / f"cache-{sig}.pteb"

    def lookup(self, keys: Sequence[str]) -> tuple[dict[str, np.ndarray], list[str]]:
        hits = {k: self.vectors[k] for k in keys if k in self.vectors}
        misses = [k for k in keys if k not in self.vectors]
        return hits, misses

    def add(self, keys: Sequence[str], rows: np.ndarray) -> None:
        for key, row in zip(keys, rows):
            self.vectors[key] = np.asarray(row, dtype=np.float32)
        self.dim = rows.shape[1]

    def save(self) -> None:
        path = self._path()
        if path is None or self.dim is None or not self.vectors:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        keys = sorted(self.vectors)
        rows = np.stack([self.vectors[k] for k in keys]).astype(np.float32)
        matrix = EmbeddingMatrix(
            rows=rows,
            row_keys=tuple(keys),
            normalized=True,
            provenance=Provenance(provider=self.provider_signature),
        )
        store_embeddings(matrix, path)


def with_provenance(matrix: EmbeddingMatrix, **changes) -> EmbeddingMatrix:
    return replace(matrix, provenance=replace(matrix.provenance, **changes))
