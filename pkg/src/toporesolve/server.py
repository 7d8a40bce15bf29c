"""Minimal JSON-over-HTTP resolve endpoint.

``POST /resolve`` takes ``{"text": ..., "toponyms": [{"start", "end"}],
"resolver"?: ..., "tau"?: ...}`` and answers ``{"resolutions": [...]}`` in the
same encoding as ``toporesolve resolve``.  ``GET /healthz`` reports the
gazetteer size.
"""

from __future__ import annotations

import json
import logging
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any

from .api import RESOLVERS, dumps, resolution_records, resolve_document
from .chf import DEFAULT_TAU
from .corpus import CorpusError, build_document
from .gazetteer import Gazetteer

log = logging.getLogger(__name__)

DEFAULT_MAX_BODY = 1 << 20


class RequestError(Exception):
    def __init__(self, status: int, path: str, message: str):
        super().__init__(message)
        self.status = status
        self.path = path


def handle_resolve(g: Gazetteer, body: Any, max_iterations: int = 2) -> dict:
    """Validate a decoded request body and resolve it."""
    if not isinstance(body, dict):
        raise RequestError(400, "$", "expected a JSON object")
    text = body.get("text")
    if not isinstance(text, str):
        raise RequestError(400, "$.text", "expected string")
    resolver = body.get("resolver", "chf")
    if resolver not in RESOLVERS:
        raise RequestError(400, "$.resolver", f"unknown resolver {resolver!r}")
    tau = body.get("tau", DEFAULT_TAU)
    if isinstance(tau, bool) or not isinstance(tau, (int, float)) or not 0 <= tau <= 1:
        raise RequestError(400, "$.tau", "expected a number in [0, 1]")
    spans = body.get("toponyms", [])
    if not isinstance(spans, list):
        raise RequestError(400, "$.toponyms", "expected list")
    try:
        doc = build_document("request", text, spans)
    except CorpusError as exc:
        raise RequestError(400, exc.path, str(exc)) from None
    results = resolve_document(doc, g, resolver, float(tau), max_iterations)
    return {"resolutions": resolution_records(results)}


def make_handler(g: Gazetteer, max_body: int = DEFAULT_MAX_BODY):
    class Handler(BaseHTTPRequestHandler):
        server_version = "toporesolve"

        def _send(self, status: int, payload: Any) -> None:
            data = dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            if self.path == "/healthz":
                self._send(200, {"status": "ok", "entries": len(g)})
            else:
                self._send(404, {"error": "not found"})

        def do_POST(self):
            if self.path != "/resolve":
                self._send(404, {"error": "not found"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
            except ValueError:
                self._send(400, {"error": "bad Content-Length", "path": "$"})
                return
            if length > max_body:
                self._send(HTTPStatus.REQUEST_ENTITY_TOO_LARGE,
                           {"error": f"body exceeds {max_body} bytes", "path": "$"})
                self.close_connection = True
                return
            raw = self.rfile.read(length)
            try:
                body = json.loads(raw.decode("utf-8"))
                self._send(200, handle_resolve(g, body))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                self._send(400, {"error": f"invalid JSON: {exc}", "path": "$"})
            except RequestError as exc:
                self._send(exc.status, {"error": str(exc), "path": exc.path})

        def log_message(self, fmt, *args):
            log.info("%s - %s", self.address_string(), fmt % args)

    return Handler


def make_server(g: Gazetteer, host: str = "127.0.0.1", port: int = 8080,
                max_body: int = DEFAULT_MAX_BODY) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((host, port), make_handler(g, max_body))
