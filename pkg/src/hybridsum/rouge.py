"""ROUGE-1, ROUGE-2 and ROUGE-L written from scratch.

ROUGE-L here is summary-level: one LCS over the full token sequences.
F1 uses beta = 1. With several references the per-reference scores are
averaged.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import EmptyReference
from .preprocess import DEFAULT_ABBREVIATIONS, Lexicon, NormConfig, preprocess_text

VARIANTS = ("R1", "R2", "RL")
COMPONENTS = ("precision", "recall", "f1")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float
    variant: str = "R1"

    @classmethod
    def from_pr(cls, precision: float, recall: float, variant: str) -> "RougeScore":
        denom = precision + recall
        f1 = 2 * precision * recall / denom if denom > 0 else 0.0
        return cls(precision, recall, f1, variant)

    def as_dict(self) -> dict[str, float]:
        return {"p": self.precision, "r": self.recall, "f1": self.f1}


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    if n < 1:
        raise ValueError("n must be >= 1")
    tokens = list(tokens)
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int = 1) -> RougeScore:
    cand = ngrams(candidate, n)
    ref = ngrams(reference, n)
    overlap = sum((cand & ref).values())
    return RougeScore.from_pr(_ratio(overlap, sum(cand.values())),
                              _ratio(overlap, sum(ref.values())),
                              f"R{n}")


def lcs_len(a: Sequence, b: Sequence) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    ell = lcs_len(candidate, reference)
    return RougeScore.from_pr(_ratio(ell, len(candidate)), _ratio(ell, len(reference)), "RL")


def score_tokens(candidate: Sequence[str], reference: Sequence[str]) -> dict[str, RougeScore]:
    return {"R1": rouge_n(candidate, reference, 1),
            "R2": rouge_n(candidate, reference, 2),
            "RL": rouge_l(candidate, reference)}


def text_tokens(text: str, cfg: NormConfig | None = None, lexicon: Lexicon | None = None,
                abbreviations: Sequence[str] = DEFAULT_ABBREVIATIONS) -> list[str]:
    """Tokens of ``text`` through the same path the pipeline uses for sources."""
    return [t for _, toks in preprocess_text(text, cfg, lexicon, abbreviations) for t in toks]


def mean_scores(scores: Iterable[Mapping[str, RougeScore]]) -> dict[str, RougeScore]:
    """Component-wise arithmetic mean, per variant."""
    scores = list(scores)
    out = {}
    for v in VARIANTS:
        rows = [s[v] for s in scores if v in s]
        if not rows:
            continue
        k = len(rows)
        out[v] = RougeScore(sum(r.precision for r in rows) / k,
                            sum(r.recall for r in rows) / k,
                            sum(r.f1 for r in rows) / k, v)
    return out


def score_cluster(candidate: str, references: Sequence[str], cfg: NormConfig | None = None,
                  lexicon: Lexicon | None = None,
                  abbreviations: Sequence[str] = DEFAULT_ABBREVIATIONS) -> dict[str, RougeScore]:
    if not references:
        raise EmptyReference("at least one reference summary is required")
    cand = text_tokens(candidate, cfg, lexicon, abbreviations)
    per_ref = [score_tokens(cand, text_tokens(r, cfg, lexicon, abbreviations)) for r in references]
    return mean_scores(per_ref)


@dataclass
class ScoreTable:
    """Per-cluster scores plus their corpus mean."""

    per_cluster: dict[str, dict[str, RougeScore]] = field(default_factory=dict)

    def add(self, cluster_id: str, scores: Mapping[str, RougeScore]) -> None:
        self.per_cluster[cluster_id] = dict(scores)

    @property
    def cluster_count(self) -> int:
        return len(self.per_cluster)

    @property
    def mean(self) -> dict[str, RougeScore]:
        return mean_scores(self.per_cluster[c] for c in sorted(self.per_cluster))

    def to_dict(self) -> dict:
        def block(scores):
            return {v.lower(): scores[v].as_dict() for v in VARIANTS if v in scores}

        return {
            "cluster_count": self.cluster_count,
            "mean": block(self.mean),
            "clusters": {c: block(self.per_cluster[c]) for c in sorted(self.per_cluster)},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ScoreTable":
        table = cls()
        for cid, block in data.get("clusters", {}).items():
            table.add(cid, {v.upper(): RougeScore(s["p"], s["r"], s["f1"], v.upper())
                            for v, s in block.items()})
        return table
