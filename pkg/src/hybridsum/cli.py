"""``hybridsum`` command line: summarize, score, sweep, compare, validate.

Exit status: 0 success, 1 partial failure (some clusters failed or corpus
findings), 2 usage or input error. Results go to stdout or ``--out``;
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from .abstract import ChatClient, PromptSpec
from .corpus import load_corpus, validate_corpus
from .embed import HashEmbedder, PrecomputedEmbedder, RemoteEmbedder
from .errors import HybridSumError
from .harness import (
    DEFAULT_ALPHAS,
    RunConfig,
    ScoreTable,
    compare_baselines,
    render_table,
    run_pipeline,
    sweep_alpha,
)
from .preprocess import DEFAULT_ABBREVIATIONS, Lexicon, load_abbreviations
from .rouge import VARIANTS, score_cluster

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("hybridsum")


class UsageError(Exception):
    pass


def _alpha_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc


def _add_corpus(p):
    p.add_argument("--corpus", metavar="PATH",
                   help="corpus directory or JSON corpus file (default: %(default)s)")


def _add_text_opts(p):
    p.add_argument("--lexicon", metavar="FILE",
                   help="multi-word lexicon for word segmentation, one entry per line (default: %(default)s)")
    p.add_argument("--abbrev-file", metavar="FILE",
                   help="abbreviations that do not end a sentence, one per line (default: built-in list)")


def _add_run_opts(p, sweep: bool = False):
    _add_corpus(p)
    if not sweep:
        p.add_argument("--alpha", type=float, default=0.2,
                       help="fraction of similarity columns kept as clustering features (default: %(default)s)")
    p.add_argument("--k-max", type=int, default=10,
                   help="largest k tried by the elbow search, capped at n-1 (default: %(default)s)")
    p.add_argument("--seed", type=int, default=42, help="random seed (default: %(default)s)")
    p.add_argument("--kmeans-restarts", type=int, default=5,
                   help="k-means++ restarts per k (default: %(default)s)")
    p.add_argument("--embedder", choices=("hash", "remote", "precomputed"), default="hash",
                   help="sentence embedding provider (default: %(default)s)")
    p.add_argument("--embed-dim", type=int, default=64,
                   help="embedding dimension for hash/remote providers (default: %(default)s)")
    p.add_argument("--embed-url", metavar="URL",
                   help="remote embedding endpoint (default: $EMBED_URL)")
    p.add_argument("--embed-file", metavar="FILE",
                   help="JSON Lines file of precomputed vectors (default: %(default)s)")
    _add_text_opts(p)
    p.add_argument("--workers", type=int, default=None,
                   help="clusters processed concurrently (default: number of CPUs, at most 8)")
    p.add_argument("--out", metavar="DIR", default="out", help="output directory (default: %(default)s)")
    p.add_argument("--format", choices=("markdown", "csv", "json"), default="markdown",
                   help="table format printed to stdout (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridsum",
        description="Hybrid extractive/abstractive multi-document summarization with ROUGE evaluation.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("summarize", help="summarize and score every cluster of a corpus",
                       description="Summarize and score every cluster of a corpus.")
    _add_run_opts(p)
    p.add_argument("--extractive-only", action="store_true",
                   help="skip the LLM rewriting stage; implied when no LLM endpoint is set (default: %(default)s)")
    p.add_argument("--llm-url", metavar="URL", help="chat-completions endpoint (default: $LLM_URL)")
    p.add_argument("--llm-token", metavar="TOKEN", help="bearer token for the endpoint (default: $LLM_TOKEN)")
    p.add_argument("--llm-model", default="vbd-llama2-7b-50b",
                   help="model name sent to the endpoint (default: %(default)s)")
    p.add_argument("--max-output-tokens", type=int, default=256,
                   help="completion length limit (default: %(default)s)")
    p.add_argument("--temperature", type=float, default=0.0,
                   help="sampling temperature (default: %(default)s)")
    p.add_argument("--config", metavar="PATH", help="TOML key = value file; flags override it (default: %(default)s)")

    p = sub.add_parser("sweep", help="extractive-only ROUGE for several alpha values",
                       description="Run the extractive stage for each alpha and tabulate corpus-mean ROUGE.")
    _add_run_opts(p, sweep=True)
    p.add_argument("--alphas", type=_alpha_list, default=list(DEFAULT_ALPHAS),
                   help="comma-separated alpha grid (default: 0.1,0.2,0.3,0.4,0.5)")
    p.add_argument("--config", metavar="PATH", help="TOML key = value file; flags override it (default: %(default)s)")

    p = sub.add_parser("score", help="ROUGE-1/2/L of one candidate against references",
                       description="ROUGE-1/2/L of one candidate against one or more references.")
    p.add_argument("--candidate", metavar="FILE", help="candidate summary (default: %(default)s)")
    p.add_argument("--reference", metavar="FILE", nargs="+", help="reference summaries (default: %(default)s)")
    p.add_argument("--human", action="store_true", help="print a 4-decimal table instead of JSON (default: %(default)s)")
    _add_text_opts(p)
    p.add_argument("--config", metavar="PATH", help="TOML key = value file; flags override it (default: %(default)s)")

    p = sub.add_parser("compare", help="render scores next to published baselines",
                       description="Render corpus-mean scores next to the bundled published baselines.")
    p.add_argument("--scores", metavar="FILE", help="scores.json written by summarize (default: baselines only)")
    p.add_argument("--name", default="Ours", help="row label for --scores (default: %(default)s)")
    p.add_argument("--format", choices=("markdown", "csv", "json"), default="markdown",
                   help="output format (default: %(default)s)")
    p.add_argument("--config", metavar="PATH", help="TOML key = value file; flags override it (default: %(default)s)")

    p = sub.add_parser("validate", help="check a corpus for structural problems",
                       description="Check a corpus for structural problems.")
    _add_corpus(p)
    p.add_argument("--config", metavar="PATH", help="TOML key = value file; flags override it (default: %(default)s)")
    return parser


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _apply_config(parser, argv: Sequence[str], args) -> argparse.Namespace:
    sub = _subparser(parser, args.command)
    try:
        with open(args.config, "rb") as fh:
            conf = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"bad config {args.config}: {exc}") from exc
    known = {a.dest for a in sub._actions if a.dest not in ("help", "config")}
    conf = {k.replace("-", "_"): v for k, v in conf.items()}
    unknown = sorted(set(conf) - known)
    if unknown:
        raise UsageError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
    if isinstance(conf.get("alphas"), str):
        conf["alphas"] = _alpha_list(conf["alphas"])
    if isinstance(conf.get("reference"), str):
        conf["reference"] = [conf["reference"]]
    sub.set_defaults(**conf)
    return parser.parse_args(argv)


def _lexicon(args) -> Lexicon | None:
    return Lexicon.from_file(args.lexicon) if args.lexicon else None


def _abbrevs(args) -> tuple[str, ...]:
    return load_abbreviations(args.abbrev_file) if args.abbrev_file else DEFAULT_ABBREVIATIONS


def _embedder(args):
    if args.embedder == "precomputed":
        if not args.embed_file:
            raise UsageError("--embedder precomputed requires --embed-file")
        return PrecomputedEmbedder(args.embed_file)
    if args.embedder == "remote":
        url = args.embed_url or os.environ.get("EMBED_URL")
        if not url:
            raise UsageError("--embedder remote requires --embed-url or EMBED_URL")
        return RemoteEmbedder(args.embed_dim, url)
    return HashEmbedder(args.embed_dim, args.seed)


def _workers(args) -> int:
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        return args.workers
    return min(os.cpu_count() or 1, 8)


def _run_config(args, alpha: float) -> RunConfig:
    llm = None
    extractive_only = True
    if args.command == "summarize":
        url = args.llm_url or os.environ.get("LLM_URL")
        extractive_only = args.extractive_only or not url
        if not extractive_only:
            llm = ChatClient(url, token=args.llm_token, model=args.llm_model)
        prompt = PromptSpec(max_output_tokens=args.max_output_tokens, temperature=args.temperature)
    else:
        prompt = PromptSpec()
    return RunConfig(alpha=alpha, k_max=args.k_max, seed=args.seed, kmeans_restarts=args.kmeans_restarts,
                     embedder=_embedder(args), llm=llm, extractive_only=extractive_only, prompt=prompt,
                     lexicon=_lexicon(args), abbreviations=_abbrevs(args),
                     output_dir=Path(args.out) if args.command == "summarize" else None,
                     workers=_workers(args))


def _load(args):
    if not args.corpus:
        raise UsageError("--corpus is required")
    return load_corpus(args.corpus)


def _header(args, cfg: RunConfig, extra: str = "") -> None:
    print(f"# hybridsum {args.command} seed={cfg.seed} k_max={cfg.k_max} restarts={cfg.kmeans_restarts} "
          f"mode={cfg.mode} embedder={cfg.embedder.name}{extra}", file=sys.stderr)


def cmd_summarize(args) -> int:
    cfg = _run_config(args, args.alpha)
    corpus = _load(args)
    _header(args, cfg, f" alpha={cfg.alpha} clusters={len(corpus)}")
    result = run_pipeline(corpus, cfg)
    sys.stdout.write(render_table(result.scores, args.format))
    for cid, err in result.failures.items():
        print(f"cluster {cid} failed: {err}", file=sys.stderr)
    print(f"# wrote {len(result.outcomes)} summaries and scores.json to {cfg.output_dir}", file=sys.stderr)
    return 0 if result.ok else 1


def cmd_sweep(args) -> int:
    cfg = _run_config(args, 0.2)
    corpus = _load(args)
    _header(args, cfg, f" alphas={','.join(f'{a:g}' for a in args.alphas)} clusters={len(corpus)}")
    report = sweep_alpha(corpus, args.alphas, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.md").write_text(render_table(report, "markdown"), encoding="utf-8")
    (out / "sweep.csv").write_text(render_table(report, "csv"), encoding="utf-8")
    sys.stdout.write(render_table(report, args.format))
    failed = sum(r.failures for r in report.rows)
    if failed:
        print(f"{failed} cluster runs failed across the sweep", file=sys.stderr)
    return 0 if not failed else 1


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def cmd_score(args) -> int:
    if not args.candidate or not args.reference:
        raise UsageError("--candidate and --reference are required")
    scores = score_cluster(_read(args.candidate), [_read(p) for p in args.reference],
                           lexicon=_lexicon(args), abbreviations=_abbrevs(args))
    if args.human:
        print(f"{'':6}{'P':>8}{'R':>8}{'F1':>8}")
        for v in VARIANTS:
            s = scores[v]
            print(f"{v:6}{s.precision:8.4f}{s.recall:8.4f}{s.f1:8.4f}")
    else:
        print(json.dumps({v.lower(): scores[v].as_dict() for v in VARIANTS}, sort_keys=True))
    return 0


def cmd_compare(args) -> int:
    ours = None
    if args.scores:
        try:
            ours = ScoreTable.from_dict(json.loads(_read(args.scores)))
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise UsageError(f"{args.scores} is not a scores.json file: {exc}") from exc
    sys.stdout.write(render_table(compare_baselines(ours, our_name=args.name), args.format))
    return 0


def cmd_validate(args) -> int:
    corpus = _load(args)
    findings = validate_corpus(corpus)
    for w in corpus.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for f in findings:
        print(f)
    print(f"# {len(corpus)} clusters, {len(findings)} findings", file=sys.stderr)
    return 0 if not findings else 1


COMMANDS = {"summarize": cmd_summarize, "sweep": cmd_sweep, "score": cmd_score,
            "compare": cmd_compare, "validate": cmd_validate}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "config", None):
            args = _apply_config(parser, argv, args)
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, HybridSumError, ValueError) as exc:
        name = type(exc).__name__
        print(f"hybridsum {args.command}: error: {name}: {exc}", file=sys.stderr)
        _subparser(parser, args.command).print_usage(sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
