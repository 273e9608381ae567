"""Sentence embedding providers.

Three providers share one interface:

``HashEmbedder``
    deterministic hashed bag-of-tokens with a signed random projection; no
    model needed, used for tests and offline runs.
``PrecomputedEmbedder``
    vectors exported by any external encoder into a JSON Lines file.
``RemoteEmbedder``
    an HTTP service speaking ``{"inputs": [...]}`` -> ``{"vectors": [...]}``.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from abc import ABC, abstractmethod
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _http
from .errors import (
    DimMismatch,
    EmbeddingError,
    EmptyTokens,
    HybridSumError,
    MissingKey,
    ProviderFailure,
    ZeroVector,
)
from .preprocess import PreparedCluster, SentenceRecord

HASH_VOCAB = 1 << 20


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """Row i is the vector of sentence i of the paired PreparedCluster."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] < 1:
            raise DimMismatch(f"embedding matrix must be 2-D with dim >= 1, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise EmbeddingError("embedding matrix contains non-finite values")
        zero = np.flatnonzero(~rows.any(axis=1))
        if zero.size:
            raise ZeroVector(f"all-zero embedding at row {int(zero[0])}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    def __len__(self) -> int:
        return self.rows.shape[0]


class EmbeddingProvider(ABC):
    name: str = "provider"
    dim: int

    @abstractmethod
    def encode(self, sentences: Sequence[SentenceRecord]) -> np.ndarray:
        """Return a ``len(sentences) x dim`` array."""


def embed_sentences(p: EmbeddingProvider, pc: PreparedCluster) -> EmbeddingMatrix:
    if not pc.sentences:
        raise EmbeddingError(f"cluster {pc.cluster_id!r} has no sentences to embed")
    rows = np.asarray(p.encode(pc.sentences), dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] != len(pc.sentences):
        raise DimMismatch(f"{p.name}: expected {len(pc.sentences)} rows, got shape {rows.shape}")
    if rows.shape[1] != p.dim:
        raise DimMismatch(f"{p.name}: expected dim {p.dim}, got {rows.shape[1]}")
    return EmbeddingMatrix(rows)


# --- hashed bag-of-tokens ---------------------------------------------------

def _bucket(token: str, seed: int) -> int:
    h = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=seed.to_bytes(8, "little", signed=True))
    return int.from_bytes(h.digest(), "little") % HASH_VOCAB


@lru_cache(maxsize=65536)
def _sign_row(bucket: int, dim: int, seed: int) -> np.ndarray:
    # Row ``bucket`` of a HASH_VOCAB x dim random sign matrix, generated lazily.
    rng = np.random.default_rng([seed & 0xFFFFFFFF, bucket])
    row = rng.integers(0, 2, size=dim).astype(np.float64) * 2.0 - 1.0
    row.setflags(write=False)
    return row


def hash_embed(tokens: Iterable[str], dim: int, seed: int = 0) -> np.ndarray:
    """Unit-length embedding of a token multiset.

    Token counts over a hashed vocabulary are projected to ``dim`` dimensions
    with a seeded random sign matrix. The result depends only on the
    multiset of tokens, ``dim`` and ``seed``.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    counts = Counter(tokens)
    if not counts:
        raise EmptyTokens("cannot embed an empty token sequence")
    vec = np.zeros(dim)
    by_bucket: Counter[int] = Counter()
    for tok, c in counts.items():
        by_bucket[_bucket(tok, seed)] += c
    for bucket in sorted(by_bucket):
        vec += by_bucket[bucket] * _sign_row(bucket, dim, seed)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        # Signed counts cancelled exactly; fall back to a sign row keyed on the whole multiset.
        key = "\x1f".join(f"{t}\x1e{c}" for t, c in sorted(counts.items()))
        vec = _sign_row(_bucket(key, seed), dim, seed).copy()
        norm = np.sqrt(dim)
    return vec / norm


class HashEmbedder(EmbeddingProvider):
    def __init__(self, dim: int = 64, seed: int = 42):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.seed = seed
        self.name = f"hash-{dim}"

    def encode(self, sentences: Sequence[SentenceRecord]) -> np.ndarray:
        return np.array([hash_embed(s.tokens, self.dim, self.seed) for s in sentences]).reshape(len(sentences), self.dim)


# --- precomputed vectors ------------------------------------------------------

def read_vector_file(path: str | Path) -> tuple[dict[tuple[str, int, int], np.ndarray], int]:
    vectors: dict[tuple[str, int, int], np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                key = (str(obj["cluster"]), int(obj["doc"]), int(obj["sent"]))
                vec = np.asarray(obj["vec"], dtype=np.float64)
            except (KeyError, TypeError, ValueError) as exc:
                raise EmbeddingError(f"{path}:{lineno}: malformed vector record ({exc})") from exc
            if vec.ndim != 1 or vec.size == 0:
                raise DimMismatch(f"{path}:{lineno}: 'vec' must be a non-empty flat array")
            if dim is None:
                dim = vec.size
            elif vec.size != dim:
                raise DimMismatch(f"{path}:{lineno}: vector has dim {vec.size}, earlier lines have {dim}")
            vectors[key] = vec
    if dim is None:
        raise EmbeddingError(f"{path}: no vectors")
    return vectors, dim


def write_vector_file(path: str | Path, items: Iterable[tuple[SentenceRecord, Sequence[float]]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec, vec in items:
            obj = {"cluster": rec.cluster_id, "doc": rec.doc_index, "sent": rec.sent_index,
                   "vec": [float(x) for x in vec]}
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


class PrecomputedEmbedder(EmbeddingProvider):
    def __init__(self, path: str | Path):
        self.path = str(path)
        self.vectors, self.dim = read_vector_file(path)
        self.name = f"precomputed:{Path(path).name}"

    def encode(self, sentences: Sequence[SentenceRecord]) -> np.ndarray:
        rows = []
        for s in sentences:
            key = (s.cluster_id, s.doc_index, s.sent_index)
            if key not in self.vectors:
                raise MissingKey(f"no vector for cluster={s.cluster_id!r} doc={s.doc_index} sent={s.sent_index}")
            rows.append(self.vectors[key])
        return np.array(rows).reshape(len(sentences), self.dim)


def load_precomputed(path: str | Path, pc: PreparedCluster) -> EmbeddingMatrix:
    return embed_sentences(PrecomputedEmbedder(path), pc)


# --- remote service -----------------------------------------------------------

class RemoteEmbedder(EmbeddingProvider):
    """Client for an HTTP embedding service.

    Sentences are sent in batches; at most ``max_in_flight`` requests run at
    once across all threads using this instance.
    """

    RETRY_DELAYS = (0.5, 1.0, 2.0)

    def __init__(self, dim: int, url: str | None = None, *, batch_size: int = 32,
                 max_in_flight: int = 4, timeout: float = 60.0,
                 retry_delays: Sequence[float] = RETRY_DELAYS,
                 sleep: Callable[[float], None] = time.sleep):
        url = url or os.environ.get("EMBED_URL")
        if not url:
            raise ValueError("no embedding endpoint: pass url or set EMBED_URL")
        self.url = url
        self.dim = dim
        self.batch_size = batch_size
        self.max_in_flight = max_in_flight
        self.timeout = timeout
        self.retry_delays = tuple(retry_delays)
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self.name = f"remote:{url}"

    def _request(self, texts: list[str]) -> list[list[float]]:
        def call():
            with self._slots:
                return _http.post_json(self.url, {"inputs": texts}, timeout=self.timeout)

        try:
            resp = _http.with_retries(call, self.retry_delays, self._sleep)
        except HybridSumError as exc:
            raise ProviderFailure(f"{self.name}: {exc}") from exc
        vectors = resp.get("vectors") if isinstance(resp, dict) else None
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProviderFailure(f"{self.name}: response must carry {len(texts)} vectors")
        for v in vectors:
            if not isinstance(v, list) or len(v) != self.dim:
                got = len(v) if isinstance(v, list) else type(v).__name__
                raise DimMismatch(f"{self.name}: expected dim {self.dim}, got {got}")
        return vectors

    def encode(self, sentences: Sequence[SentenceRecord]) -> np.ndarray:
        texts = [s.text for s in sentences]
        batches = [texts[i:i + self.batch_size] for i in range(0, len(texts), self.batch_size)]
        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            results = list(pool.map(self._request, batches))
        return np.array([v for batch in results for v in batch], dtype=np.float64).reshape(len(texts), self.dim)
