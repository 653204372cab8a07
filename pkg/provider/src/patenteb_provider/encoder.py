"""Deterministic mean-pooling transformer encoder.

A real transformer stack (multi-head self-attention, feed-forward blocks,
pre-layer-norm residuals, sinusoidal positions) with weights derived from a
fixed seed, so the service is fully reproducible offline. Swapping in a
pretrained checkpoint is a deployment choice: anything that mean-pools token
states and L2-normalizes fits the same interface.

Each text is encoded independently, which makes embeddings batch-size
independent by construction. Inference is pinned to float32.
"""

from __future__ import annotations

import hashlib

import numpy as np

DEFAULT_SPEC = "hash-transformer:6:64:7"


def _seeded_rng(*keys: object) -> np.random.Generator:
    h = hashlib.blake2b(b"patenteb-provider", digest_size=8)
    for key in keys:
        h.update(b"\x1f")
        h.update(str(key).encode("utf-8"))
    return np.random.Generator(np.random.PCG64(int.from_bytes(h.digest(), "little")))


def _layer_norm(x: np.ndarray, gain: np.ndarray, bias: np.ndarray) -> np.ndarray:
    mean = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    return gain * (x - mean) / np.sqrt(var + 1e-5) + bias


def _softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


class _Block:
    """One pre-LN transformer block with seeded weights."""

    def __init__(self, dim: int, n_heads: int, seed_key: tuple):
        scale = 1.0 / np.sqrt(dim)
        def w(name: str, shape) -> np.ndarray:
            return (_seeded_rng(*seed_key, name).standard_normal(shape) * scale).astype(np.float32)

        self.n_heads = n_heads
        self.head_dim = dim // n_heads
        self.wq = w("wq", (dim, dim))
        self.wk = w("wk", (dim, dim))
        self.wv = w("wv", (dim, dim))
        self.wo = w("wo", (dim, dim))
        self.w1 = w("w1", (dim, 4 * dim))
        self.b1 = np.zeros(4 * dim, dtype=np.float32)
        self.w2 = w("w2", (4 * dim, dim))
        self.b2 = np.zeros(dim, dtype=np.float32)
        self.ln1_g = np.ones(dim, dtype=np.float32)
        self.ln1_b = np.zeros(dim, dtype=np.float32)
        self.ln2_g = np.ones(dim, dtype=np.float32)
        self.ln2_b = np.zeros(dim, dtype=np.float32)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        t, dim = x.shape
        h = _layer_norm(x, self.ln1_g, self.ln1_b)
        q = (h @ self.wq).reshape(t, self.n_heads, self.head_dim)
        k = (h @ self.wk).reshape(t, self.n_heads, self.head_dim)
        v = (h @ self.wv).reshape(t, self.n_heads, self.head_dim)
        scores = np.einsum("qhd,khd->hqk", q, k) / np.float32(np.sqrt(self.head_dim))
        attn = _softmax(scores)
        pooled = np.einsum("hqk,khd->qhd", attn, v).reshape(t, dim)
        x = x + pooled @ self.wo
        h = _layer_norm(x, self.ln2_g, self.ln2_b)
        h = np.maximum(h @ self.w1 + self.b1, 0.0)
        return x + h @ self.w2 + self.b2


class TransformerEncoder:
    """Seeded encoder: token hash embeddings -> L transformer blocks ->
    mean pooling over token states -> L2 normalization."""

    def __init__(
        self,
        n_layers: int = 6,
        dim: int = 64,
        n_heads: int = 4,
        max_tokens: int = 512,
        seed: int = 7,
        name: str | None = None,
    ):
        if dim % n_heads != 0:
            raise ValueError("dim must be divisible by n_heads")
        self.n_layers = n_layers
        self.dim = dim
        self.max_tokens = max_tokens
        self.seed = seed
        self.name = name or f"hash-transformer:{n_layers}:{dim}:{seed}"
        self.blocks = [_Block(dim, n_heads, (seed, "block", i)) for i in range(n_layers)]
        self._positions = self._sinusoidal(max_tokens, dim)
        self._token_cache: dict[str, np.ndarray] = {}
        self._empty = self._make_token_vec("\x00<empty>")

    @staticmethod
    def _sinusoidal(length: int, dim: int) -> np.ndarray:
        pos = np.arange(length, dtype=np.float32)[:, None]
        idx = np.arange(dim, dtype=np.float32)[None, :]
        angle = pos / np.power(10000.0, (2 * (idx // 2)) / dim, dtype=np.float32)
        enc = np.where(idx % 2 == 0, np.sin(angle), np.cos(angle))
        return (0.1 * enc).astype(np.float32)

    def _make_token_vec(self, token: str) -> np.ndarray:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))
        return (rng.standard_normal(self.dim) / np.sqrt(self.dim)).astype(np.float32)

    def _token_vec(self, token: str) -> np.ndarray:
        vec = self._token_cache.get(token)
        if vec is None:
            vec = self._make_token_vec(token)
            self._token_cache[token] = vec
        return vec

    def encode_one(self, text: str, layer_cap: int | None = None) -> np.ndarray:
        layers = self.n_layers if layer_cap is None else layer_cap
        tokens = text.split()[: self.max_tokens]
        if not tokens:
            vec = self._empty.astype(np.float64)
            return (vec / np.linalg.norm(vec)).astype(np.float32)
        x = np.stack([self._token_vec(t) for t in tokens])
        x = x + self._positions[: len(tokens)]
        for block in self.blocks[:layers]:
            x = block(x)
        pooled = x.mean(axis=0, dtype=np.float64)
        norm = np.linalg.norm(pooled)
        if norm == 0.0:
            pooled = self._empty.astype(np.float64)
            norm = np.linalg.norm(pooled)
        return (pooled / norm).astype(np.float32)

    def encode(self, texts: list[str], layer_cap: int | None = None) -> np.ndarray:
        if layer_cap is not None and not 1 <= layer_cap <= self.n_layers:
            raise ValueError(f"layer_cap {layer_cap} outside [1, {self.n_layers}]")
        return np.stack([self.encode_one(t, layer_cap) for t in texts])

    def info(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "max_layers": self.n_layers,
            "max_tokens": self.max_tokens,
        }


def encoder_from_spec(spec: str | None = None) -> TransformerEncoder:
    """Parse a PROVIDER_MODEL spec: ``hash-transformer:<layers>:<dim>:<seed>``."""
    spec = spec or DEFAULT_SPEC
    parts = spec.split(":")
    if parts[0] != "hash-transformer":
        raise ValueError(
            f"unknown model spec '{spec}'; this build ships the seeded "
            "hash-transformer encoder family (hash-transformer:<layers>:<dim>:<seed>)"
        )
    layers = int(parts[1]) if len(parts) > 1 else 6
    dim = int(parts[2]) if len(parts) > 2 else 64
    seed = int(parts[3]) if len(parts) > 3 else 7
    return TransformerEncoder(n_layers=layers, dim=dim, seed=seed, name=spec)
