"""Stateless JSON-over-HTTP mode backing the web calculator.

Endpoints mirror the subcommand parameters by name; every response is
JSON, validation failures answer 400 with {"error", "field"}.  The only
state is the immutable static-directory configuration, so concurrent
requests need no coordination.  Intended as a local calculator backend:
no authentication, TLS or persistence.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from bioquake import api
from bioquake.core import DomainError

log = logging.getLogger("bioquake.server")


class _BadRequest(Exception):
    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


def _need(payload: dict, name: str, caster, default=_BadRequest):
    if name not in payload or payload[name] is None:
        if default is _BadRequest:
            raise _BadRequest(f"missing field {name!r}", name)
        return default
    try:
        return caster(payload[name])
    except (TypeError, ValueError):
        raise _BadRequest(f"field {name!r} has the wrong type", name)


def _as_int(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(value)
    return value


def _as_float(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(value)
    return float(value)


def _as_bool(value) -> bool:
    if not isinstance(value, bool):
        raise ValueError(value)
    return value


def _as_str(value) -> str:
    if not isinstance(value, str):
        raise ValueError(value)
    return value


def _handle_uncertainty(payload: dict) -> dict:
    return api.uncertainty_result(
        comparisons=_need(payload, "comparisons", _as_int),
        error_rate=_need(payload, "error_rate", _as_float),
        confidence=_need(payload, "confidence", _as_float, 0.95),
        errors=_need(payload, "errors", _as_int, None),
    )


def _handle_plan(payload: dict) -> dict:
    return api.plan_result(
        error_rate=_need(payload, "error_rate", _as_float),
        target_delta=_need(payload, "target_delta", _as_float),
        confidence=_need(payload, "confidence", _as_float, 0.95),
        mode=_need(payload, "mode", _as_str, "exact"),
        conservative=_need(payload, "conservative", _as_bool, False),
    )


def _handle_min_error(payload: dict) -> dict:
    return api.min_error_result(
        comparisons=_need(payload, "comparisons", _as_int),
        delta=_need(payload, "delta", _as_float, 0.061),
        confidence=_need(payload, "confidence", _as_float, 0.95),
    )


_POST_ROUTES = {
    "/api/uncertainty": _handle_uncertainty,
    "/api/plan": _handle_plan,
    "/api/min-error": _handle_min_error,
}


def _curve_from_query(query: dict) -> list[dict]:
    def single(name: str, caster, default=_BadRequest):
        values = query.get(name)
        if not values:
            if default is _BadRequest:
                raise _BadRequest(f"missing query parameter {name!r}", name)
            return default
        try:
            return caster(values[0])
        except ValueError:
            raise _BadRequest(f"query parameter {name!r} is malformed", name)

    def floats(text: str) -> tuple[float, ...]:
        return tuple(float(part) for part in text.split(",") if part.strip())

    return api.curve_result(
        deltas=single("deltas", floats),
        confidence=single("confidence", float, 0.95),
        lo=single("lo", float, 1e-4),
        hi=single("hi", float, 0.5),
        points=single("points", int, 50),
        exact=single("exact", lambda v: v.lower() in ("1", "true", "yes"), False),
    )


def make_handler(static_dir: str | None):
    root = Path(static_dir).resolve() if static_dir else None

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            log.debug("%s %s", self.address_string(), fmt % args)

        def _send(self, status: int, body: bytes, content_type: str):
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()
            self.wfile.write(body)

        def _send_json(self, status: int, obj):
            self._send(
                status,
                json.dumps(obj).encode("utf-8"),
                "application/json; charset=utf-8",
            )

        def _send_error_json(self, status: int, message: str, field=None):
            self._send_json(status, {"error": message, "field": field})

        def do_OPTIONS(self):
            self._send(204, b"", "text/plain")

        def do_POST(self):
            route = _POST_ROUTES.get(urlparse(self.path).path)
            if route is None:
                self._send_error_json(404, "not found")
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                raw = self.rfile.read(length) if length else b"{}"
                payload = json.loads(raw.decode("utf-8"))
                if not isinstance(payload, dict):
                    raise _BadRequest("request body must be a JSON object")
                self._send_json(200, route(payload))
            except json.JSONDecodeError:
                self._send_error_json(400, "request body is not valid JSON")
            except _BadRequest as exc:
                self._send_error_json(400, str(exc), exc.field)
            except api.ValidationError as exc:
                self._send_error_json(400, str(exc), exc.field)
            except DomainError as exc:
                self._send_error_json(400, str(exc))
            except Exception:
                log.exception("unhandled error in %s", self.path)
                self._send_error_json(500, "internal error")

        def do_GET(self):
            parsed = urlparse(self.path)
            if parsed.path == "/healthz":
                self._send_json(200, {"status": "ok"})
                return
            if parsed.path == "/api/curve":
                try:
                    self._send_json(200, _curve_from_query(parse_qs(parsed.query)))
                except _BadRequest as exc:
                    self._send_error_json(400, str(exc), exc.field)
                except api.ValidationError as exc:
                    self._send_error_json(400, str(exc), exc.field)
                except DomainError as exc:
                    self._send_error_json(400, str(exc))
                return
            if parsed.path.startswith("/api/"):
                self._send_error_json(404, "not found")
                return
            self._serve_static(parsed.path)

        def _serve_static(self, path: str):
            if root is None:
                self._send_error_json(404, "no static directory configured")
                return
            relative = path.lstrip("/") or "index.html"
            candidate = (root / relative).resolve()
            if root not in candidate.parents and candidate != root:
                self._send_error_json(404, "not found")
                return
            if candidate.is_dir():
                candidate = candidate / "index.html"
            if not candidate.is_file():
                self._send_error_json(404, "not found")
                return
            content_type = (
                mimetypes.guess_type(candidate.name)[0] or "application/octet-stream"
            )
            self._send(200, candidate.read_bytes(), content_type)

    return Handler


def create_server(
    bind: str = "127.0.0.1", port: int = 0, static_dir: str | None = None
) -> ThreadingHTTPServer:
    return ThreadingHTTPServer((bind, port), make_handler(static_dir))


def run_server(bind: str, port: int, static_dir: str | None = None):
    server = create_server(bind, port, static_dir)
    host, actual_port = server.server_address[:2]
    print(f"bioquake API listening on http://{host}:{actual_port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
