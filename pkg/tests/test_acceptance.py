"""Acceptance criteria, one test each at its stated tolerance.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line per criterion
in the terminal summary.
"""

import random
import time

import numpy as np
import pytest

from hybridsum.abstract import ChatClient, build_prompt, collapse_repetition
from hybridsum.cli import main
from hybridsum.extract import cosine_sim, elbow_k, kmeans
from hybridsum.harness import (
    COLUMNS,
    RunConfig,
    SweepReport,
    compare_baselines,
    load_static_tables,
    render_table,
    run_pipeline,
    sweep_alpha,
)
from hybridsum.preprocess import preprocess_cluster
from hybridsum.rouge import lcs_len, rouge_l, rouge_n
from hybridsum.testing import MockChatServer

from oracles import best_two_partition, naive_rouge_l, naive_rouge_n, partition_wcss, three_blobs

criterion = pytest.mark.criterion


def _triple(s):
    return (s.precision, s.recall, s.f1)


@criterion("1. ROUGE oracle equivalence")
def test_rouge_matches_brute_force():
    rng = random.Random(1)
    pairs = [([rng.choice("abcd") for _ in range(rng.randint(0, 12))],
              [rng.choice("abcd") for _ in range(rng.randint(0, 12))]) for _ in range(1000)]
    start = time.perf_counter()
    worst = 0.0
    for a, b in pairs:
        for got, want in ((rouge_n(a, b, 1), naive_rouge_n(a, b, 1)),
                          (rouge_n(a, b, 2), naive_rouge_n(a, b, 2)),
                          (rouge_l(a, b), naive_rouge_l(a, b))):
            worst = max(worst, *(abs(x - y) for x, y in zip(_triple(got), want)))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-12
    assert elapsed < 5.0


@criterion("2. Hand-derived ROUGE fixtures")
def test_rouge_fixtures():
    p, r, f = _triple(rouge_n("the cat".split(), "the cat sat".split(), 1))
    assert abs(p - 1.0) <= 1e-12 and abs(r - 2 / 3) <= 1e-12 and abs(f - 0.8) <= 1e-12
    assert lcs_len("abcd", "acbd") == 3
    assert all(abs(x - 0.75) <= 1e-12 for x in _triple(rouge_l(list("abcd"), list("acbd"))))


@criterion("3. Cosine properties")
def test_cosine_properties():
    rng = np.random.default_rng(3)
    cases = []
    for _ in range(10_000):
        d = int(rng.integers(2, 65))
        cases.append((rng.standard_normal(d), rng.standard_normal(d), float(rng.uniform(1e-3, 1e3))))
    start = time.perf_counter()
    for u, v, c in cases:
        s = cosine_sim(u, v)
        assert abs(s - cosine_sim(v, u)) <= 1e-9
        assert -1 - 1e-9 <= s <= 1 + 1e-9
        assert abs(cosine_sim(c * u, v) - s) <= 1e-9
        assert abs(cosine_sim(u, u) - 1) <= 1e-9
    assert time.perf_counter() - start < 2.0


@criterion("4. k-means correctness")
def test_kmeans_correctness():
    pts = [[0.0], [0.1], [10.0], [10.1]]
    w_opt, _ = best_two_partition(pts)
    res = kmeans(np.array(pts), 2)
    assert abs(res.wcss - 0.01) <= 1e-9 and abs(res.wcss - w_opt) <= 1e-9
    groups = {frozenset(np.flatnonzero(res.assignments == j).tolist()) for j in range(2)}
    assert groups == {frozenset({0, 1}), frozenset({2, 3})}

    rng = np.random.default_rng(4)
    for trial in range(100):
        n = int(rng.integers(1, 21))
        X = rng.standard_normal((n, int(rng.integers(1, 5))))
        res = kmeans(X, int(rng.integers(1, n + 1)), seed=trial)
        d = ((X[:, None, :] - res.centroids[None]) ** 2).sum(axis=2)
        assert np.all(d[np.arange(n), res.assignments] <= d.min(axis=1) + 1e-12)
        for j in range(res.k):
            assert np.allclose(res.centroids[j], X[res.assignments == j].mean(axis=0), atol=1e-9)
        assert abs(res.wcss - partition_wcss(X.tolist(), res.assignments.tolist())) <= 1e-9


@criterion("5. Elbow recovery")
def test_elbow_recovery():
    hits = sum(elbow_k(three_blobs(np.random.default_rng(s)), seed=s)[0] == 3 for s in range(100))
    assert hits >= 95
    assert elbow_k(np.full((8, 3), 0.5))[0] == 1
    assert elbow_k(np.array([[0.0, 1.0], [1.0, 0.0]]))[0] == 2


@criterion("6. Extraction verbatim property")
def test_extraction_verbatim(mini_corpus):
    start = time.perf_counter()
    cfg = RunConfig(seed=42, extractive_only=True)
    result = run_pipeline(mini_corpus, cfg)
    elapsed = time.perf_counter() - start
    assert result.ok and len(result.outcomes) == 3
    for dc in mini_corpus.clusters:
        pc = preprocess_cluster(dc)
        sources = {s.text.encode("utf-8") for s in pc.sentences}
        ex = result.outcomes[dc.cluster_id].extraction
        picks = ex.summary.picks
        assert all(rec.text.encode("utf-8") in sources for rec, _ in picks)
        assert sorted(c for _, c in picks) == list(range(ex.clustering.k))
        keys = [rec.key for rec, _ in picks]
        assert keys == sorted(keys)
    assert elapsed < 5.0


@criterion("7. End-to-end determinism")
def test_end_to_end_determinism(mini_path, mini_corpus, tmp_path, monkeypatch):
    monkeypatch.delenv("LLM_URL", raising=False)
    for name in ("a", "b"):
        assert main(["summarize", "--corpus", str(mini_path), "--extractive-only", "--seed", "7",
                     "--out", str(tmp_path / name)]) == 0
    files = ["scores.json"] + sorted(f"summaries/{p.name}" for p in (tmp_path / "a/summaries").iterdir())
    assert len(files) == 4
    for rel in files:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()

    with MockChatServer("echo") as srv:
        cfg = RunConfig(seed=7, llm=ChatClient(srv.url))
        result = run_pipeline(mini_corpus, cfg)
    assert result.ok
    for outcome in result.outcomes.values():
        payload = build_prompt(outcome.extraction.summary, cfg.prompt).user
        assert outcome.text == collapse_repetition(payload)


@criterion("8. Sweep schema fidelity")
def test_sweep_schema(mini_corpus):
    report = sweep_alpha(mini_corpus, [0.1, 0.2, 0.3, 0.4, 0.5], RunConfig(seed=42))
    lines = render_table(report).splitlines()
    assert lines[0] == "| α | R1-P | R1-R | R1-F1 | R2-P | R2-R | R2-F1 | RL-P | RL-R | RL-F1 |"
    assert [line.split(" | ")[0] for line in lines[2:]] == ["| 0.1", "| 0.2", "| 0.3", "| 0.4", "| 0.5"]
    assert all(len(line.split("|")) == 12 for line in lines)
    assert set(report.best) == set(COLUMNS)

    reported = next(r for r in load_static_tables()["reported_extractive_sweep"] if r["alpha"] == 0.2)
    row = render_table(SweepReport.from_percent_rows([reported]), highlight=False).splitlines()[2]
    assert "0.2 | 49.5 | 90.4 | 61.4 | 33.2 | 63.3 | 41.7 | 28.2 | 54.7 | 35.6" in row


@criterion("9. Baseline comparison fixture")
def test_baseline_comparison():
    out = render_table(compare_baselines(None), highlight=False)
    rows = {line.split(" | ")[0][2:]: line for line in out.splitlines()[2:]}
    assert rows["Thanh et al."].split(" | ")[6] == "34.89"
    expected = {"MART": ("70.2", "49.8", "49.6", "41.6"),
                "KL": ("65.1", "60.2", "38.0", "40.4"),
                "LSA": ("62.5", "49.2", "36.0", "39.2")}
    for name, (r1r, r1f, r2r, r2f) in expected.items():
        cells = rows[name].split(" | ")
        assert (cells[2], cells[3], cells[5], cells[6]) == (r1r, r1f, r2r, r2f)


@criterion("10. Repetition collapse")
def test_repetition_collapse():
    rng = random.Random(10)
    vocab = ["tốt", "Tốt", "rồi", "mưa.", "trời", "hết!", "a", "a.", "b?", "c,"]
    for _ in range(1000):
        s = " ".join(rng.choice(vocab) for _ in range(rng.randint(0, 20)))
        once = collapse_repetition(s)
        assert collapse_repetition(once) == once
        assert set(once.split()) <= set(s.split())
    assert collapse_repetition("tốt tốt tốt") == "tốt"
    assert collapse_repetition("trời mưa. trời mưa. hết.") == "trời mưa. hết."
