"""In-process mock HTTP endpoints for the LLM and embedding wire formats.

Usage::

    with MockChatServer(mode="echo") as srv:
        client = ChatClient(srv.url)
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Sequence


class _Server:
    def __init__(self):
        self.requests: list[dict] = []
        self.headers: list[dict] = []
        self._lock = threading.Lock()
        handler = self._make_handler()
        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, args=(0.05,), daemon=True)

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/v1/chat/completions"

    def respond(self, body: dict) -> tuple[int, bytes]:
        raise NotImplementedError

    def _make_handler(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length)
                try:
                    body = json.loads(raw.decode("utf-8"))
                except ValueError:
                    body = None
                with server._lock:
                    server.requests.append(body)
                    server.headers.append(dict(self.headers))
                status, payload = server.respond(body)
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        return Handler

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._httpd.shutdown()
        self._httpd.server_close()


def _json(obj) -> bytes:
    return json.dumps(obj, ensure_ascii=False).encode("utf-8")


class MockChatServer(_Server):
    """Chat-completions endpoint.

    ``mode``:
      * ``"echo"`` replies with the user message;
      * ``"fixed"`` replies with ``reply``;
      * ``"raw"`` sends ``reply`` bytes verbatim (for malformed-body tests).

    ``fail_first`` makes the first N requests return HTTP ``fail_status``.
    """

    def __init__(self, mode: str = "echo", reply: str = "", fail_first: int = 0, fail_status: int = 503):
        self.mode = mode
        self.reply = reply
        self.fail_first = fail_first
        self.fail_status = fail_status
        super().__init__()

    def respond(self, body):
        if len(self.requests) <= self.fail_first:
            return self.fail_status, _json({"error": "unavailable"})
        if self.mode == "raw":
            return 200, self.reply.encode("utf-8")
        if self.mode == "echo":
            content = next((m["content"] for m in body["messages"] if m["role"] == "user"), "")
        else:
            content = self.reply
        return 200, _json({
            "id": f"mock-{len(self.requests)}",
            "object": "chat.completion",
            "model": body.get("model", "mock"),
            "choices": [{"index": 0, "message": {"role": "assistant", "content": content},
                         "finish_reason": "stop"}],
        })


class MockEmbedServer(_Server):
    """Embedding endpoint; ``embed`` maps a list of texts to a list of vectors."""

    def __init__(self, embed: Callable[[Sequence[str]], list[list[float]]], fail_first: int = 0):
        self.embed = embed
        self.fail_first = fail_first
        super().__init__()

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/embed"

    def respond(self, body):
        if len(self.requests) <= self.fail_first:
            return 503, _json({"error": "unavailable"})
        return 200, _json({"vectors": self.embed(body["inputs"])})
