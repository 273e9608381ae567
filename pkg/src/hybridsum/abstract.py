"""Abstractive stage: prompt rendering, chat-completion client, repetition cleanup.

The rewriting model is reached over HTTP using the common chat-completions
JSON shape, so VBD-LLaMA2, PhoGPT or Vistral deployments are interchangeable
by URL. See ``docs/wire_formats.md`` for the exact request and response.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from . import _http
from .errors import BadResponse, EmptyExtract, InvalidPromptSpec
from .extract import ExtractiveSummary

PLACEHOLDER = "{sentences}"
DEFAULT_SYSTEM = (
    "Summarize the following Vietnamese sentences into one coherent paragraph, "
    "preserving facts. Answer in Vietnamese."
)
DEFAULT_TEMPLATE = "Tóm tắt: {sentences}"
_EDGE_PUNCT = ".,!?;:\"'()[]{}«»“”‘’…-–—"


@dataclass(frozen=True)
class PromptSpec:
    system_text: str = DEFAULT_SYSTEM
    user_template: str = DEFAULT_TEMPLATE
    max_output_tokens: int = 256
    temperature: float = 0.0

    def __post_init__(self):
        count = self.user_template.count(PLACEHOLDER)
        if count != 1:
            raise InvalidPromptSpec(f"user_template must contain {PLACEHOLDER} exactly once (found {count})")
        if self.max_output_tokens < 1:
            raise InvalidPromptSpec("max_output_tokens must be >= 1")


@dataclass(frozen=True)
class Prompt:
    system: str
    user: str


@dataclass(frozen=True)
class AbstractiveSummary:
    cluster_id: str
    text: str
    model_name: str
    raw_text: str
    request_id: str


def build_prompt(es: ExtractiveSummary | Sequence[str], spec: PromptSpec | None = None) -> Prompt:
    spec = spec or PromptSpec()
    sentences = es.sentences if isinstance(es, ExtractiveSummary) else list(es)
    if not sentences:
        raise EmptyExtract("extractive summary has no sentences")
    return Prompt(spec.system_text, spec.user_template.replace(PLACEHOLDER, ". ".join(sentences)))


# --- repetition cleanup -------------------------------------------------------

def _token_key(tok: str) -> str:
    return tok.lower().strip(_EDGE_PUNCT) or tok.lower()


def collapse_repetition(text: str) -> str:
    """Remove stutter produced by autoregressive decoding.

    Runs of the same word (case- and edge-punctuation-insensitive) shrink to
    their last occurrence, so a trailing period survives. Then runs of
    identical consecutive sentences shrink to one.

    >>> collapse_repetition("tốt tốt tốt rồi")
    'tốt rồi'
    """
    words: list[str] = []
    for tok in text.split():
        if words and _token_key(words[-1]) == _token_key(tok):
            words[-1] = tok
        else:
            words.append(tok)

    sentences: list[list[str]] = []
    cur: list[str] = []
    for tok in words:
        cur.append(tok)
        if tok[-1] in ".!?":
            sentences.append(cur)
            cur = []
    if cur:
        sentences.append(cur)

    out: list[str] = []
    prev = None
    for sent in sentences:
        if sent != prev:
            out.extend(sent)
        prev = sent
    return " ".join(out)


# --- endpoint client ----------------------------------------------------------

class ChatClient:
    """Blocking chat-completions client with retries and an in-flight cap."""

    RETRY_DELAYS = (1.0, 2.0, 4.0)

    def __init__(self, url: str | None = None, *, token: str | None = None, model: str = "vbd-llama2-7b-50b",
                 timeout: float = 60.0, max_in_flight: int = 2,
                 retry_delays: Sequence[float] = RETRY_DELAYS,
                 sleep: Callable[[float], None] = time.sleep):
        self.url = url or os.environ.get("LLM_URL")
        if not self.url:
            raise ValueError("no LLM endpoint: pass url or set LLM_URL")
        self.token = token if token is not None else os.environ.get("LLM_TOKEN")
        self.model = model
        self.timeout = timeout
        self.retry_delays = tuple(retry_delays)
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(max_in_flight)

    def payload(self, prompt: Prompt, spec: PromptSpec) -> dict:
        return {
            "model": self.model,
            "messages": [
                {"role": "system", "content": prompt.system},
                {"role": "user", "content": prompt.user},
            ],
            "temperature": spec.temperature,
            "max_tokens": spec.max_output_tokens,
        }

    def complete(self, prompt: Prompt, spec: PromptSpec) -> tuple[str, str]:
        """Return ``(completion_text, request_id)``."""
        payload = self.payload(prompt, spec)
        headers = {"Authorization": f"Bearer {self.token}"} if self.token else {}

        def call():
            with self._slots:
                return _http.post_json(self.url, payload, headers, self.timeout)

        resp = _http.with_retries(call, self.retry_delays, self._sleep)
        try:
            content = resp["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BadResponse(f"response lacks choices[0].message.content: {exc!r}") from exc
        if not isinstance(content, str) or not content.strip():
            raise BadResponse("empty completion")
        rid = resp.get("id") if isinstance(resp.get("id"), str) else None
        if rid is None:
            digest = hashlib.sha256(json.dumps(payload, sort_keys=True, ensure_ascii=False).encode()).hexdigest()
            rid = f"local-{digest[:16]}"
        return content, rid


def summarize(client: ChatClient, prompt: Prompt, spec: PromptSpec | None = None,
              cluster_id: str = "") -> AbstractiveSummary:
    spec = spec or PromptSpec()
    raw, rid = client.complete(prompt, spec)
    text = collapse_repetition(raw)
    if not text:
        raise BadResponse("completion is empty after repetition cleanup")
    return AbstractiveSummary(cluster_id, text, client.model, raw, rid)
