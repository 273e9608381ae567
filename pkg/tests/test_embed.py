import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridsum.corpus import DocumentCluster
from hybridsum.embed import (
    EmbeddingMatrix,
    EmbeddingProvider,
    HashEmbedder,
    PrecomputedEmbedder,
    RemoteEmbedder,
    embed_sentences,
    hash_embed,
    load_precomputed,
    write_vector_file,
)
from hybridsum.errors import DimMismatch, EmptyTokens, MissingKey, ProviderFailure, ZeroVector
from hybridsum.preprocess import preprocess_cluster
from hybridsum.testing import MockEmbedServer


@pytest.fixture
def pc():
    dc = DocumentCluster.from_texts("c", ["Một hai ba. Bốn năm.", "Một hai ba. Sáu bảy tám."], ["r"])
    return preprocess_cluster(dc)


def test_hash_embed_deterministic():
    v = hash_embed(["a"], 4, 7)
    assert np.array_equal(v, hash_embed(["a"], 4, 7))
    assert v.shape == (4,)


def test_hash_embed_multiset_symmetry():
    assert np.array_equal(hash_embed(["a", "b"], 16, 7), hash_embed(["b", "a"], 16, 7))


def test_hash_embed_distinct_tokens_regression():
    # Computed once and pinned: sign rows of "a" and "b" agree on 33 of 64 coordinates.
    cos = float(hash_embed(["a"], 64, 7) @ hash_embed(["b"], 64, 7))
    assert abs(cos) < 0.5
    assert cos == pytest.approx(0.03125, abs=1e-12)


def test_hash_embed_changes_with_multiset():
    base = hash_embed(["trời", "mưa"], 64, 1)
    assert not np.allclose(base, hash_embed(["trời", "mưa", "mưa"], 64, 1))
    assert not np.allclose(base, hash_embed(["trời", "nắng"], 64, 1))


def test_hash_embed_rejects_empty():
    with pytest.raises(EmptyTokens):
        hash_embed([], 8, 0)


@settings(max_examples=200)
@given(st.lists(st.sampled_from(list("abcdefg")), min_size=1, max_size=10),
       st.integers(1, 40), st.integers(0, 2**31))
def test_hash_embed_unit_norm_and_permutation(tokens, dim, seed):
    v = hash_embed(tokens, dim, seed)
    assert abs(np.linalg.norm(v) - 1.0) <= 1e-9
    assert np.array_equal(v, hash_embed(list(reversed(tokens)), dim, seed))


def test_hash_embed_cancellation_fallback_nonzero():
    # dim=1 guarantees collisions of +1/-1 rows; every multiset must still embed.
    for toks in (["a", "b"], ["a", "c"], ["b", "c"], ["a", "b", "c", "d"]):
        v = hash_embed(toks, 1, 3)
        assert abs(abs(v[0]) - 1.0) < 1e-12


def test_embed_sentences_shape(pc):
    E = embed_sentences(HashEmbedder(16, 0), pc)
    assert len(E) == len(pc) and E.dim == 16
    assert np.all(np.linalg.norm(E.rows, axis=1) > 0)
    # "một hai ba" occurs twice: identical rows
    assert pc.texts[0] == pc.texts[2]
    assert np.array_equal(E.rows[0], E.rows[2])


class IndexProvider(EmbeddingProvider):
    """Row i encodes its own position, to check alignment."""

    name = "index"
    dim = 3

    def encode(self, sentences):
        return np.array([[s.doc_index + 1, s.sent_index + 1, i + 1] for i, s in enumerate(sentences)], float)


def test_rows_align_with_sentences(pc):
    E = embed_sentences(IndexProvider(), pc)
    for i, s in enumerate(pc.sentences):
        assert tuple(E.rows[i]) == (s.doc_index + 1, s.sent_index + 1, i + 1)


class Broken(EmbeddingProvider):
    name = "broken"

    def __init__(self, rows, dim):
        self.rows, self.dim = rows, dim

    def encode(self, sentences):
        return self.rows


def test_zero_row_rejected(pc):
    rows = np.ones((len(pc), 4))
    rows[1] = 0
    with pytest.raises(ZeroVector):
        embed_sentences(Broken(rows, 4), pc)


def test_dim_mismatch(pc):
    with pytest.raises(DimMismatch):
        embed_sentences(Broken(np.ones((len(pc), 5)), 4), pc)


def test_matrix_is_immutable():
    E = EmbeddingMatrix(np.ones((2, 2)))
    with pytest.raises(ValueError):
        E.rows[0, 0] = 5


# --- precomputed ---

def test_precomputed_round_trip(tmp_path, pc):
    E = embed_sentences(HashEmbedder(8, 1), pc)
    path = tmp_path / "vec.jsonl"
    write_vector_file(path, zip(pc.sentences, E.rows))
    again = load_precomputed(path, pc)
    assert np.array_equal(again.rows, E.rows)


def test_precomputed_missing_key(tmp_path, pc):
    path = tmp_path / "vec.jsonl"
    write_vector_file(path, [(s, [1.0, 2.0]) for s in pc.sentences if s.key != (0, 1)])
    with pytest.raises(MissingKey, match="doc=0 sent=1"):
        load_precomputed(path, pc)


def test_precomputed_mixed_dims(tmp_path, pc):
    path = tmp_path / "vec.jsonl"
    lines = [{"cluster": "c", "doc": 0, "sent": 0, "vec": [1.0, 2.0]},
             {"cluster": "c", "doc": 0, "sent": 1, "vec": [1.0, 2.0, 3.0]}]
    path.write_text("\n".join(json.dumps(x) for x in lines), encoding="utf-8")
    with pytest.raises(DimMismatch):
        PrecomputedEmbedder(path)


# --- remote ---

def _fake_vectors(dim):
    return lambda texts: [[float(len(t)), 1.0] + [0.5] * (dim - 2) for t in texts]


def test_remote_provider(pc):
    with MockEmbedServer(_fake_vectors(16)) as srv:
        E = embed_sentences(RemoteEmbedder(16, srv.url, batch_size=2), pc)
    assert E.rows.shape == (len(pc), 16)
    assert [r[0] for r in E.rows] == [len(t) for t in pc.texts]
    assert all(req is not None and set(req) == {"inputs"} for req in srv.requests)
    assert sum(len(r["inputs"]) for r in srv.requests) == len(pc)


def test_remote_dim_mismatch(pc):
    with MockEmbedServer(_fake_vectors(15)) as srv:
        with pytest.raises(DimMismatch):
            embed_sentences(RemoteEmbedder(16, srv.url), pc)


def test_remote_retries_then_succeeds(pc):
    waits = []
    with MockEmbedServer(_fake_vectors(4), fail_first=2) as srv:
        E = embed_sentences(RemoteEmbedder(4, srv.url, batch_size=100, sleep=waits.append), pc)
    assert len(E) == len(pc)
    assert waits == [0.5, 1.0]


def test_remote_retry_exhaustion(pc):
    waits = []
    with MockEmbedServer(_fake_vectors(4), fail_first=100) as srv:
        with pytest.raises(ProviderFailure, match="4 attempts failed"):
            embed_sentences(RemoteEmbedder(4, srv.url, batch_size=100, sleep=waits.append), pc)
    assert waits == [0.5, 1.0, 2.0]


def test_remote_url_from_env(monkeypatch):
    monkeypatch.setenv("EMBED_URL", "http://example.invalid/embed")
    assert RemoteEmbedder(8).url == "http://example.invalid/embed"
