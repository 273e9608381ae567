"""Cleaning, sentence splitting and word segmentation for Vietnamese text."""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import DocumentCluster
from .errors import EmptyAfterPreprocess

TERMINATORS = frozenset(".!?")
DEFAULT_STRIP_SYMBOLS = frozenset("%;:")
DEFAULT_ABBREVIATIONS = ("tp.", "ts.", "gs.", "mr.", "dr.")

# Combining marks used by decomposed Vietnamese tone/vowel diacritics.
_VI_COMBINING = range(0x0300, 0x0370)


@dataclass(frozen=True)
class NormConfig:
    """Options for :func:`normalize`.

    ``stop_tokens`` is empty by default: removing function words would break
    verbatim extraction of source sentences later in the pipeline.
    """

    lowercase: bool = True
    strip_symbols: frozenset[str] = DEFAULT_STRIP_SYMBOLS
    strip_non_alnum: bool = True
    stop_tokens: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "strip_symbols", frozenset(self.strip_symbols))
        object.__setattr__(self, "stop_tokens", frozenset(self.stop_tokens))
        bad = self.strip_symbols & TERMINATORS
        if bad:
            raise ValueError(f"strip_symbols may not contain sentence terminators: {sorted(bad)}")


@dataclass(frozen=True)
class SentenceRecord:
    cluster_id: str
    doc_index: int
    sent_index: int
    text: str
    tokens: tuple[str, ...]

    @property
    def key(self) -> tuple[int, int]:
        return (self.doc_index, self.sent_index)


@dataclass(frozen=True)
class PreparedCluster:
    cluster_id: str
    sentences: tuple[SentenceRecord, ...]

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def texts(self) -> list[str]:
        return [s.text for s in self.sentences]


def _keep(ch: str) -> bool:
    if ch.isspace() or ch in TERMINATORS or ch == ",":
        return True
    cat = unicodedata.category(ch)
    if cat[0] in "LN":
        return True
    return cat == "Mn" and ord(ch) in _VI_COMBINING


def normalize(text: str, cfg: NormConfig | None = None) -> str:
    """Lowercase, drop noise symbols and collapse whitespace.

    >>> normalize("Hà Nội 100%")
    'hà nội 100'
    """
    cfg = cfg or NormConfig()
    text = unicodedata.normalize("NFC", text)
    if cfg.lowercase:
        text = text.lower()
    if cfg.strip_symbols:
        text = "".join(ch for ch in text if ch not in cfg.strip_symbols)
    if cfg.strip_non_alnum:
        text = "".join(ch for ch in text if _keep(ch))
    # Removing characters can leave base letters next to combining marks.
    text = unicodedata.normalize("NFC", text)
    words = text.split()
    if cfg.stop_tokens:
        words = [w for w in words if w not in cfg.stop_tokens]
    return " ".join(words)


def split_sentences(text: str, abbreviations: Iterable[str] = DEFAULT_ABBREVIATIONS) -> list[str]:
    """Split on ``.``, ``!`` and ``?``.

    A period between two digits (``3.5``) or closing a known abbreviation
    (``tp.``) does not end a sentence. Terminators are dropped from the
    output, as are empty fragments.
    """
    abbrevs = {a.lower() for a in abbreviations}
    out: list[str] = []
    buf: list[str] = []
    n = len(text)

    def flush():
        frag = "".join(buf).strip()
        if frag:
            out.append(frag)
        buf.clear()

    for i, ch in enumerate(text):
        if ch not in TERMINATORS:
            buf.append(ch)
            continue
        if ch == ".":
            if 0 < i < n - 1 and text[i - 1].isdigit() and text[i + 1].isdigit():
                buf.append(ch)
                continue
            if abbrevs and buf and not buf[-1].isspace():
                word = "".join(buf).rsplit(None, 1)[-1]
                if (word + ".").lower() in abbrevs:
                    buf.append(ch)
                    continue
        flush()
    flush()
    return out


class Lexicon:
    """Multi-word entries for greedy longest-match segmentation."""

    def __init__(self, entries: Iterable[str] = ()):
        self.entries: frozenset[tuple[str, ...]] = frozenset(
            tuple(e.split()) for e in entries if len(e.split()) > 1
        )
        self.max_len = max((len(e) for e in self.entries), default=1)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, phrase) -> bool:
        if isinstance(phrase, str):
            phrase = tuple(phrase.split())
        return tuple(phrase) in self.entries

    @classmethod
    def from_file(cls, path: str | Path) -> "Lexicon":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls(line.strip() for line in lines if line.strip())


def load_abbreviations(path: str | Path) -> tuple[str, ...]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return tuple(line.strip() for line in lines if line.strip())


def tokenize(sentence: str, lexicon: Lexicon | Iterable[str] | None = None) -> list[str]:
    """Split a normalized sentence into word tokens.

    Without a lexicon every whitespace-separated syllable is a token. With
    one, the longest lexicon entry starting at each position is emitted as a
    single ``_``-joined token.

    >>> tokenize("học sinh giỏi", {"học sinh"})
    ['học_sinh', 'giỏi']
    """
    syllables = sentence.split()
    if lexicon is None:
        return syllables
    if not isinstance(lexicon, Lexicon):
        lexicon = Lexicon(lexicon)
    if not lexicon.entries:
        return syllables

    tokens = []
    i = 0
    while i < len(syllables):
        for span in range(min(lexicon.max_len, len(syllables) - i), 1, -1):
            if tuple(syllables[i:i + span]) in lexicon.entries:
                tokens.append("_".join(syllables[i:i + span]))
                i += span
                break
        else:
            tokens.append(syllables[i])
            i += 1
    return tokens


def preprocess_text(text: str, cfg: NormConfig | None = None,
                    lexicon: Lexicon | None = None,
                    abbreviations: Sequence[str] = DEFAULT_ABBREVIATIONS) -> list[tuple[str, list[str]]]:
    """normalize -> split -> tokenize; returns (sentence, tokens) pairs, empty ones dropped."""
    out = []
    for sent in split_sentences(normalize(text, cfg), abbreviations):
        toks = tokenize(sent, lexicon)
        if toks:
            out.append((sent, toks))
    return out


def preprocess_cluster(dc: DocumentCluster, cfg: NormConfig | None = None,
                       lexicon: Lexicon | None = None,
                       abbreviations: Sequence[str] = DEFAULT_ABBREVIATIONS) -> PreparedCluster:
    records = []
    for doc in dc.documents:
        for m, (sent, toks) in enumerate(preprocess_text(doc.body, cfg, lexicon, abbreviations)):
            records.append(SentenceRecord(dc.cluster_id, doc.doc_index, m, sent, tuple(toks)))
    if not records:
        raise EmptyAfterPreprocess(f"cluster {dc.cluster_id!r} has no sentences after preprocessing")
    return PreparedCluster(dc.cluster_id, tuple(records))
