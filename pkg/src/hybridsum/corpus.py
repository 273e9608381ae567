"""Loading and validation of multi-document corpora.

A corpus is a list of topic clusters. Each cluster holds an ordered list of
source documents and one or more reference summaries. Two on-disk layouts
are supported:

* a directory with one sub-directory per cluster, where ``<k>.ref.txt``
  files are reference summaries and every other file is a document
  (conventionally ``<k>.body.txt``);
* a single JSON file ``{"clusters": [{"id": ..., "documents": [...],
  "references": [...]}]}``.

Only UTF-8 is accepted.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import (
    CorpusEncodingError,
    CorpusFormatError,
    EmptyCluster,
    MissingRoot,
    NoReference,
)

log = logging.getLogger(__name__)

REF_SUFFIX = ".ref.txt"
BODY_SUFFIX = ".body.txt"


@dataclass(frozen=True)
class Document:
    doc_index: int
    body: str


@dataclass(frozen=True)
class DocumentCluster:
    cluster_id: str
    documents: tuple[Document, ...]
    references: tuple[str, ...]

    @classmethod
    def from_texts(cls, cluster_id: str, documents: Iterable[str],
                   references: Iterable[str]) -> "DocumentCluster":
        docs = tuple(Document(i, body) for i, body in enumerate(documents))
        return cls(cluster_id, docs, tuple(references))


@dataclass(frozen=True)
class Corpus:
    clusters: tuple[DocumentCluster, ...]
    source_path: str = field(default="", compare=False)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def get(self, cluster_id: str) -> DocumentCluster:
        for c in self.clusters:
            if c.cluster_id == cluster_id:
                return c
        raise KeyError(cluster_id)


@dataclass(frozen=True)
class Finding:
    cluster_id: str
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        msg = f"[{self.cluster_id}] {self.rule}"
        return f"{msg}: {self.detail}" if self.detail else msg


def _read_utf8(path: Path) -> str:
    try:
        return path.read_bytes().decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise CorpusEncodingError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from exc


def _is_reference(name: str) -> bool:
    return name.endswith(REF_SUFFIX)


def _load_cluster_dir(path: Path) -> DocumentCluster:
    files = sorted(p for p in path.iterdir() if p.is_file() and not p.name.startswith("."))
    docs = [p for p in files if not _is_reference(p.name)]
    refs = [p for p in files if _is_reference(p.name)]
    if not docs:
        raise EmptyCluster(f"cluster {path.name!r} has no document files")
    if not refs:
        raise NoReference(f"cluster {path.name!r} has no *{REF_SUFFIX} file")
    return DocumentCluster.from_texts(
        path.name,
        [_read_utf8(p) for p in docs],
        [_read_utf8(p) for p in refs],
    )


def load_corpus(root_path: str | Path) -> Corpus:
    """Load a corpus from a cluster directory tree or a JSON corpus file.

    Clusters and the files inside each cluster are read in lexicographic
    order, so the same tree always yields the same Corpus.
    """
    root = Path(root_path)
    if not root.exists():
        raise MissingRoot(f"corpus path does not exist: {root}")
    if root.is_file():
        return corpus_from_json(_read_utf8(root), source_path=str(root))

    cluster_dirs = sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith("."))
    warnings: list[str] = []
    if not cluster_dirs:
        warnings.append(f"no cluster directories under {root}")
        log.warning(warnings[-1])
    clusters = tuple(_load_cluster_dir(p) for p in cluster_dirs)
    return Corpus(clusters, source_path=str(root), warnings=tuple(warnings))


def corpus_to_dict(corpus: Corpus) -> dict[str, Any]:
    return {
        "clusters": [
            {
                "id": c.cluster_id,
                "documents": [d.body for d in c.documents],
                "references": list(c.references),
            }
            for c in corpus.clusters
        ]
    }


def corpus_to_json(corpus: Corpus, indent: int | None = 2) -> str:
    return json.dumps(corpus_to_dict(corpus), ensure_ascii=False, indent=indent)


def corpus_from_json(text: str | dict, source_path: str = "") -> Corpus:
    data = json.loads(text) if isinstance(text, str) else text
    if not isinstance(data, dict) or not isinstance(data.get("clusters"), list):
        raise CorpusFormatError("JSON corpus must be an object with a 'clusters' array")
    clusters = []
    for i, item in enumerate(data["clusters"]):
        try:
            cid = item["id"]
            documents = item["documents"]
            references = item["references"]
        except (KeyError, TypeError) as exc:
            raise CorpusFormatError(f"cluster #{i}: missing field {exc}") from exc
        if not isinstance(cid, str):
            raise CorpusFormatError(f"cluster #{i}: id must be a string")
        if not _all_str(documents) or not _all_str(references):
            raise CorpusFormatError(f"cluster {cid!r}: documents/references must be string arrays")
        if not documents:
            raise EmptyCluster(f"cluster {cid!r} has no documents")
        if not references:
            raise NoReference(f"cluster {cid!r} has no references")
        clusters.append(DocumentCluster.from_texts(cid, documents, references))
    warnings = () if clusters else ("corpus has no clusters",)
    return Corpus(tuple(clusters), source_path=source_path, warnings=warnings)


def _all_str(xs: Any) -> bool:
    return isinstance(xs, list) and all(isinstance(x, str) for x in xs)


def validate_cluster(c: DocumentCluster) -> list[Finding]:
    out = []
    if not c.documents:
        out.append(Finding(c.cluster_id, "no documents"))
    for pos, d in enumerate(c.documents):
        if d.doc_index != pos:
            out.append(Finding(c.cluster_id, "doc_index mismatch",
                               f"document at position {pos} has doc_index {d.doc_index}"))
        if not d.body.strip():
            out.append(Finding(c.cluster_id, "empty document body", f"doc_index {d.doc_index}"))
    if not c.references:
        out.append(Finding(c.cluster_id, "no references"))
    for j, ref in enumerate(c.references):
        if not ref.strip():
            out.append(Finding(c.cluster_id, "empty reference", f"reference {j}"))
    return out


def validate_corpus(c: Corpus | Sequence[DocumentCluster]) -> list[Finding]:
    """Check every cluster invariant; an empty list means the corpus is well-formed."""
    clusters = c.clusters if isinstance(c, Corpus) else tuple(c)
    findings: list[Finding] = []
    seen: set[str] = set()
    for cluster in clusters:
        if cluster.cluster_id in seen:
            findings.append(Finding(cluster.cluster_id, "duplicate cluster_id"))
        seen.add(cluster.cluster_id)
        findings.extend(validate_cluster(cluster))
    return findings
