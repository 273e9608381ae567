"""Minimal JSON-over-HTTP helpers with retry/backoff (stdlib only)."""

from __future__ import annotations

import json
import logging
import socket
import time
import urllib.error
import urllib.request
from typing import Any, Callable, Sequence

from .errors import BadResponse, EndpointUnreachable, RetriesExhausted

log = logging.getLogger(__name__)


class TransientError(Exception):
    """Timeout or 5xx; worth retrying."""


def post_json(url: str, payload: Any, headers: dict[str, str] | None = None,
              timeout: float = 60.0) -> Any:
    body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
    req = urllib.request.Request(url, data=body, method="POST")
    req.add_header("Content-Type", "application/json; charset=utf-8")
    for k, v in (headers or {}).items():
        req.add_header(k, v)
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            raw = resp.read()
    except urllib.error.HTTPError as exc:
        if exc.code >= 500:
            raise TransientError(f"HTTP {exc.code} from {url}") from exc
        raise BadResponse(f"HTTP {exc.code} from {url}") from exc
    except (socket.timeout, TimeoutError) as exc:
        raise TransientError(f"timeout after {timeout}s from {url}") from exc
    except urllib.error.URLError as exc:
        if isinstance(exc.reason, (socket.timeout, TimeoutError)):
            raise TransientError(f"timeout after {timeout}s from {url}") from exc
        raise EndpointUnreachable(f"{url}: {exc.reason}") from exc
    except ConnectionError as exc:
        raise TransientError(f"connection dropped by {url}: {exc}") from exc
    try:
        return json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BadResponse(f"non-JSON response from {url}") from exc


def with_retries(call: Callable[[], Any], delays: Sequence[float],
                 sleep: Callable[[float], None] = time.sleep) -> Any:
    """Run ``call``; on TransientError wait ``delays[i]`` and try again.

    Makes ``len(delays) + 1`` attempts in total.
    """
    errors = []
    for attempt in range(len(delays) + 1):
        try:
            return call()
        except TransientError as exc:
            errors.append(str(exc))
            if attempt == len(delays):
                break
            log.warning("attempt %d failed (%s); retrying in %.1fs", attempt + 1, exc, delays[attempt])
            sleep(delays[attempt])
    raise RetriesExhausted(f"{len(errors)} attempts failed: " + "; ".join(errors))
