"""Corpus-level evaluation: run the pipeline, sweep alpha, render tables."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

from .abstract import AbstractiveSummary, ChatClient, PromptSpec, build_prompt, summarize
from .corpus import Corpus, DocumentCluster, validate_cluster
from .embed import EmbeddingProvider, HashEmbedder, embed_sentences
from .errors import AlphaOutOfRange, ConfigError, DuplicateAlpha, HybridSumError
from .extract import DEFAULT_ALPHA, DEFAULT_K_MAX, DEFAULT_RESTARTS, Extraction, extract
from .preprocess import DEFAULT_ABBREVIATIONS, Lexicon, NormConfig, preprocess_cluster
from .rouge import COMPONENTS, VARIANTS, RougeScore, ScoreTable, score_cluster

log = logging.getLogger(__name__)

DEFAULT_ALPHAS = (0.1, 0.2, 0.3, 0.4, 0.5)
COLUMNS = tuple((v, c) for v in VARIANTS for c in COMPONENTS)
_SHORT = {"precision": "P", "recall": "R", "f1": "F1"}
_KEY = {"precision": "p", "recall": "r", "f1": "f1"}


def _check_alpha(alpha: float) -> None:
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha <= 1.0):
        raise AlphaOutOfRange(f"alpha must be in (0, 1], got {alpha!r}")


@dataclass
class RunConfig:
    alpha: float = DEFAULT_ALPHA
    k_max: int = DEFAULT_K_MAX
    seed: int = 42
    kmeans_restarts: int = DEFAULT_RESTARTS
    embedder: EmbeddingProvider | None = None
    llm: ChatClient | None = None
    extractive_only: bool = False
    prompt: PromptSpec = field(default_factory=PromptSpec)
    norm: NormConfig = field(default_factory=NormConfig)
    lexicon: Lexicon | None = None
    abbreviations: tuple[str, ...] = DEFAULT_ABBREVIATIONS
    output_dir: Path | None = None
    workers: int = 1

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.k_max < 2:
            raise ConfigError(f"k_max must be >= 2, got {self.k_max}")
        if self.kmeans_restarts < 1:
            raise ConfigError("kmeans_restarts must be >= 1")
        if self.embedder is None:
            self.embedder = HashEmbedder(dim=64, seed=self.seed)
        if self.output_dir is not None:
            self.output_dir = Path(self.output_dir)

    @property
    def mode(self) -> str:
        return "extractive-only" if self.extractive_only or self.llm is None else "hybrid"


@dataclass
class ClusterOutcome:
    cluster_id: str
    extraction: Extraction
    abstractive: AbstractiveSummary | None
    scores: dict[str, RougeScore]

    @property
    def extractive_text(self) -> str:
        return self.extraction.summary.text

    @property
    def text(self) -> str:
        return self.abstractive.text if self.abstractive else self.extractive_text


@dataclass
class RunResult:
    config: RunConfig
    outcomes: dict[str, ClusterOutcome]
    scores: ScoreTable
    failures: dict[str, str]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def summaries(self) -> dict[str, str]:
        return {cid: o.text for cid, o in self.outcomes.items()}

    def scores_json(self) -> str:
        data = {
            "seed": self.config.seed,
            "alpha": self.config.alpha,
            "mode": self.config.mode,
            **self.scores.to_dict(),
            "failures": dict(sorted(self.failures.items())),
        }
        return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def run_cluster(dc: DocumentCluster, cfg: RunConfig) -> ClusterOutcome:
    findings = validate_cluster(dc)
    if findings:
        raise HybridSumError("; ".join(str(f) for f in findings))
    pc = preprocess_cluster(dc, cfg.norm, cfg.lexicon, cfg.abbreviations)
    E = embed_sentences(cfg.embedder, pc)
    ex = extract(pc, E, cfg.alpha, cfg.k_max, cfg.seed, cfg.kmeans_restarts)
    abstractive = None
    if cfg.mode == "hybrid":
        prompt = build_prompt(ex.summary, cfg.prompt)
        abstractive = summarize(cfg.llm, prompt, cfg.prompt, dc.cluster_id)
    candidate = abstractive.text if abstractive else ex.summary.text
    scores = score_cluster(candidate, dc.references, cfg.norm, cfg.lexicon, cfg.abbreviations)
    return ClusterOutcome(dc.cluster_id, ex, abstractive, scores)


def _safe_name(cluster_id: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in cluster_id) or "_"


def run_pipeline(corpus: Corpus | Sequence[DocumentCluster], cfg: RunConfig) -> RunResult:
    """Summarize and score every cluster; one failing cluster does not stop the run."""
    clusters = list(corpus.clusters if isinstance(corpus, Corpus) else corpus)

    def attempt(dc):
        try:
            return dc.cluster_id, run_cluster(dc, cfg), None
        except Exception as exc:  # fail-soft per cluster
            log.warning("cluster %s failed: %s: %s", dc.cluster_id, type(exc).__name__, exc)
            return dc.cluster_id, None, f"{type(exc).__name__}: {exc}"

    if cfg.workers > 1 and len(clusters) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(attempt, clusters))
    else:
        results = [attempt(dc) for dc in clusters]

    outcomes: dict[str, ClusterOutcome] = {}
    failures: dict[str, str] = {}
    table = ScoreTable()
    for cid, outcome, err in sorted(results, key=lambda r: r[0]):
        if err is not None:
            failures[cid] = err
            continue
        outcomes[cid] = outcome
        table.add(cid, outcome.scores)
    result = RunResult(cfg, outcomes, table, failures)
    if cfg.output_dir is not None:
        write_outputs(result, cfg.output_dir)
    return result


def write_outputs(result: RunResult, out_dir: Path) -> None:
    summ_dir = Path(out_dir) / "summaries"
    summ_dir.mkdir(parents=True, exist_ok=True)
    for cid, outcome in result.outcomes.items():
        (summ_dir / f"{_safe_name(cid)}.txt").write_text(outcome.text + "\n", encoding="utf-8")
    (Path(out_dir) / "scores.json").write_text(result.scores_json(), encoding="utf-8")


# --- alpha sweep ----------------------------------------------------------------

@dataclass
class SweepRow:
    alpha: float
    scores: dict[str, RougeScore]
    failures: int = 0

    def value(self, variant: str, component: str) -> float | None:
        s = self.scores.get(variant)
        return None if s is None else getattr(s, component)


@dataclass
class SweepReport:
    rows: list[SweepRow]
    best: dict[tuple[str, str], float] = field(default_factory=dict)

    def __post_init__(self):
        self.rows.sort(key=lambda r: r.alpha)
        if not self.best:
            self.best = best_per_column(self.rows)

    @classmethod
    def from_percent_rows(cls, rows: Sequence[Mapping[str, Any]]) -> "SweepReport":
        """Build a report from ``{"alpha": a, "r1": {"p": 49.5, ...}, ...}`` percent rows."""
        out = []
        for row in rows:
            scores = {}
            for v in VARIANTS:
                block = row.get(v.lower())
                if block:
                    scores[v] = RougeScore(block["p"] / 100, block["r"] / 100, block["f1"] / 100, v)
            out.append(SweepRow(float(row["alpha"]), scores))
        return cls(out)


def best_per_column(rows: Sequence[SweepRow]) -> dict[tuple[str, str], float]:
    """Alpha of the maximum in every (variant, component) column; ties go to the smaller alpha."""
    best = {}
    for col in COLUMNS:
        cands = [(r.value(*col), r.alpha) for r in rows if r.value(*col) is not None]
        if cands:
            best[col] = max(cands, key=lambda t: (t[0], -t[1]))[1]
    return best


def sweep_alpha(corpus: Corpus | Sequence[DocumentCluster], alphas: Sequence[float] = DEFAULT_ALPHAS,
                base_cfg: RunConfig | None = None) -> SweepReport:
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ConfigError("alphas must be non-empty")
    for a in alphas:
        _check_alpha(a)
    if len(set(alphas)) != len(alphas):
        dupes = sorted({a for a in alphas if alphas.count(a) > 1})
        raise DuplicateAlpha(f"duplicate alpha values: {dupes}")
    base_cfg = base_cfg or RunConfig()
    rows = []
    for a in sorted(alphas):
        cfg = replace(base_cfg, alpha=a, extractive_only=True, output_dir=None)
        res = run_pipeline(corpus, cfg)
        rows.append(SweepRow(a, res.scores.mean, len(res.failures)))
    return SweepReport(rows)


# --- baselines --------------------------------------------------------------------

@dataclass
class ComparisonRow:
    name: str
    values: dict[tuple[str, str], float]   # percent
    decimals: int | None = None             # None: render as stored
    citation: str = ""


@dataclass
class Comparison:
    rows: list[ComparisonRow]

    @property
    def best(self) -> dict[tuple[str, str], set[str]]:
        out = {}
        for col in COLUMNS:
            vals = [(r.values[col], r.name) for r in self.rows if col in r.values]
            if vals:
                top = max(v for v, _ in vals)
                out[col] = {name for v, name in vals if v == top}
        return out


def load_static_tables() -> dict:
    text = resources.files("hybridsum").joinpath("data/baselines.json").read_text(encoding="utf-8")
    return json.loads(text)


def _percent_block(scores: Mapping[str, Mapping[str, float]]) -> dict[tuple[str, str], float]:
    out = {}
    for v in VARIANTS:
        block = scores.get(v.lower(), {})
        for comp in COMPONENTS:
            if _KEY[comp] in block:
                out[(v, comp)] = float(block[_KEY[comp]])
    return out


def compare_baselines(our: ScoreTable | Mapping[str, RougeScore] | None,
                      baseline_rows: Sequence[Mapping[str, Any]] | None = None,
                      our_name: str = "Ours") -> Comparison:
    """Place our corpus-mean scores next to the bundled published baselines."""
    if baseline_rows is None:
        baseline_rows = load_static_tables()["baselines"]
    rows = [ComparisonRow(b["name"], _percent_block(b["scores"]), None, b.get("citation", ""))
            for b in baseline_rows]
    if our is not None:
        mean = our.mean if isinstance(our, ScoreTable) else dict(our)
        if mean:
            values = {(v, c): round(getattr(mean[v], c) * 100, 1) for v in VARIANTS if v in mean
                      for c in COMPONENTS}
            rows.append(ComparisonRow(our_name, values, 1))
    return Comparison(rows)


# --- rendering ------------------------------------------------------------------------

def _pct(x: float, decimals: int = 1) -> str:
    return f"{x * 100:.{decimals}f}"


def _bold(s: str, on: bool) -> str:
    return f"**{s}**" if on else s


def _md(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _col_names(sep: str = "-") -> list[str]:
    return [f"{v}{sep}{_SHORT[c]}" for v, c in COLUMNS]


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt_alpha(a: float) -> str:
    return f"{a:g}"


def _render_sweep(rep: SweepReport, fmt: str, highlight: bool) -> str:
    if fmt == "markdown":
        body = []
        for r in rep.rows:
            cells = [_fmt_alpha(r.alpha)]
            for col in COLUMNS:
                v = r.value(*col)
                cells.append("-" if v is None else _bold(_pct(v), highlight and rep.best.get(col) == r.alpha))
            body.append(cells)
        return _md(["α"] + _col_names(), body)
    if fmt == "csv":
        return _csv(["alpha"] + [f"{v.lower()}_{_KEY[c]}" for v, c in COLUMNS],
                    [[repr(r.alpha)] + ["" if r.value(*col) is None else repr(r.value(*col)) for col in COLUMNS]
                     for r in rep.rows])
    data = {
        "rows": [{"alpha": r.alpha, "failures": r.failures,
                  **{v.lower(): r.scores[v].as_dict() for v in VARIANTS if v in r.scores}}
                 for r in rep.rows],
        "best": {f"{v.lower()}_{_KEY[c]}": a for (v, c), a in rep.best.items()},
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _render_scores(table: ScoreTable, fmt: str) -> str:
    ids = sorted(table.per_cluster)
    items = [(cid, table.per_cluster[cid]) for cid in ids]
    if items:
        items.append(("mean", table.mean))
    if fmt == "markdown":
        return _md(["cluster"] + _col_names(),
                   [[cid] + [_pct(getattr(s[v], c)) if v in s else "-" for v, c in COLUMNS]
                    for cid, s in items])
    if fmt == "csv":
        return _csv(["cluster"] + [f"{v.lower()}_{_KEY[c]}" for v, c in COLUMNS],
                    [[cid] + [repr(getattr(s[v], c)) if v in s else "" for v, c in COLUMNS]
                     for cid, s in items])
    return json.dumps(table.to_dict(), indent=2, sort_keys=True) + "\n"


def _render_comparison(cmp: Comparison, fmt: str, highlight: bool) -> str:
    best = cmp.best
    if fmt == "markdown":
        body = []
        for r in cmp.rows:
            cells = [r.name]
            for col in COLUMNS:
                if col not in r.values:
                    cells.append("-")
                    continue
                v = r.values[col]
                s = f"{v:.{r.decimals}f}" if r.decimals is not None else f"{v}"
                cells.append(_bold(s, highlight and r.name in best.get(col, ())))
            body.append(cells)
        return _md(["Model"] + _col_names(), body)
    if fmt == "csv":
        return _csv(["model"] + [f"{v.lower()}_{_KEY[c]}" for v, c in COLUMNS],
                    [[r.name] + [repr(r.values[col]) if col in r.values else "" for col in COLUMNS]
                     for r in cmp.rows])
    data = {"rows": [{"model": r.name, "citation": r.citation,
                      **{f"{v.lower()}_{_KEY[c]}": r.values[(v, c)] for v, c in COLUMNS if (v, c) in r.values}}
                     for r in cmp.rows]}
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_table(report: SweepReport | ScoreTable | Comparison, fmt: str = "markdown",
                 highlight: bool = True) -> str:
    """Render as ``markdown`` (percent, 1 decimal, best cells bold), ``csv`` or ``json``.

    csv and json carry the raw fractions (percent for baseline comparisons).
    """
    if fmt not in ("markdown", "csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(report, SweepReport):
        return _render_sweep(report, fmt, highlight)
    if isinstance(report, ScoreTable):
        return _render_scores(report, fmt)
    if isinstance(report, Comparison):
        return _render_comparison(report, fmt, highlight)
    raise TypeError(f"cannot render {type(report).__name__}")
