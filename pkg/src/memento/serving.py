"""Real-socket deployment for the same handler objects the harness runs.

A WSGI adapter exposes any Handler through wsgiref, and HttpTransport is
the socket-backed counterpart of the simulated web's dispatch, so the
gateway works unchanged against live services.
"""

from __future__ import annotations

import http.client
import json
from pathlib import Path
from wsgiref.simple_server import make_server

from .aggregator import Aggregator, ArchiveRegistry
from .archive import ArchiveNode, ArchiveStore
from .errors import ConnectionFailure
from .gateway import GatewayConfig, GatewayService
from .httpdate import DatetimeStamp
from .message import Handler, Headers, Request, Response, split_target, text_response
from .middleware import OriginMiddleware, RedirectPolicy


class HttpTransport:
    """Sends abstract requests over plain sockets; deployment-mode only."""

    def __init__(self, timeout: float = 10.0):
        self.timeout = timeout

    def send(self, request: Request, source: str = "client") -> Response:
        scheme, host, target = split_target(request.uri)
        conn_cls = (http.client.HTTPSConnection if scheme == "https"
                    else http.client.HTTPConnection)
        conn = conn_cls(host, timeout=self.timeout)
        try:
            conn.request(request.method, target,
                         body=request.body or None,
                         headers=dict(request.headers.items()))
            raw = conn.getresponse()
            body = raw.read()
            headers = Headers(raw.getheaders())
            return Response(raw.status, headers, body)
        except OSError as exc:
            raise ConnectionFailure(f"{host}: {exc}") from exc
        finally:
            conn.close()


def wsgi_app(handler: Handler):
    """Adapt a Handler to WSGI.

    The absolute URI is rebuilt without re-quoting so appended original
    URIs (``/timegate/http://...``) reach the handler verbatim.
    """

    def app(environ, start_response):
        length = int(environ.get("CONTENT_LENGTH") or 0)
        body = environ["wsgi.input"].read(length) if length else b""
        headers = Headers()
        for key, value in environ.items():
            if key.startswith("HTTP_"):
                headers.add(key[5:].replace("_", "-").title(), value)
        if environ.get("CONTENT_TYPE"):
            headers.add("Content-Type", environ["CONTENT_TYPE"])
        scheme = environ.get("wsgi.url_scheme", "http")
        host = environ.get("HTTP_HOST") or environ["SERVER_NAME"]
        target = environ.get("PATH_INFO") or "/"
        query = environ.get("QUERY_STRING")
        if query:
            target = f"{target}?{query}"
        request = Request(environ["REQUEST_METHOD"],
                          f"{scheme}://{host}{target}", headers, body)
        response = handler(request)
        start_response(f"{response.status} {response.reason or 'Status'}",
                       response.headers.items())
        return [response.body]

    return app


def run_server(handler: Handler, listen: str) -> None:
    host, _, port = listen.partition(":")
    server = make_server(host or "127.0.0.1", int(port or 8080),
                         wsgi_app(handler))
    server.serve_forever()


def _load_config(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def run_gateway(config_path: str | Path) -> None:
    doc = _load_config(config_path)
    service = GatewayService(GatewayConfig.from_json(doc), HttpTransport())
    handler: Handler = service
    ui_dir = doc.get("ui_dir")
    if ui_dir:
        handler = with_static_ui(service, ui_dir)
    run_server(handler, doc.get("listen", "127.0.0.1:8080"))


def run_archive(config_path: str | Path) -> None:
    doc = _load_config(config_path)
    store = ArchiveStore(doc.get("store_path"))
    node = ArchiveNode(doc["base"], store, doc.get("window_half_width", 3))
    run_server(node, doc.get("listen", "127.0.0.1:8081"))


def run_aggregator(config_path: str | Path) -> None:
    doc = _load_config(config_path)
    registry = ArchiveRegistry.from_json(doc)
    import time

    def wall_clock() -> DatetimeStamp:
        return DatetimeStamp(int(time.time()))

    aggregator = Aggregator(doc["base"], registry, HttpTransport(), wall_clock,
                            doc.get("window_half_width", 3))
    run_server(aggregator, doc.get("listen", "127.0.0.1:8082"))


def run_proxy(upstream: str, policy_path: str | Path, listen: str) -> None:
    """Reverse proxy: temporal requests peel off to a TimeGate, the rest
    forward to the upstream origin."""
    policy = RedirectPolicy.load(policy_path)
    transport = HttpTransport()
    upstream_base = upstream.rstrip("/")

    def forward(request: Request) -> Response:
        _, _, target = split_target(request.uri)
        return transport.send(Request(request.method,
                                      f"{upstream_base}{target}",
                                      request.headers, request.body))

    run_server(OriginMiddleware(policy, forward), listen)


_CONTENT_TYPES = {".html": "text/html", ".js": "text/javascript",
                  ".css": "text/css", ".json": "application/json",
                  ".map": "application/json", ".png": "image/png",
                  ".svg": "image/svg+xml"}


def with_static_ui(handler: Handler, ui_dir: str | Path) -> Handler:
    """Mount a static directory at /ui/ next to the gateway API."""
    root = Path(ui_dir).resolve()

    def wrapped(request: Request) -> Response:
        _, _, target = split_target(request.uri)
        path = target.partition("?")[0]
        if path == "/" or path == "/ui":
            path = "/ui/index.html"
        if not path.startswith("/ui/"):
            return handler(request)
        candidate = (root / path[len("/ui/"):]).resolve()
        if root not in candidate.parents and candidate != root:
            return text_response(404, "not found\n")
        if not candidate.is_file():
            return text_response(404, "not found\n")
        headers = Headers()
        headers.set("Content-Type", _CONTENT_TYPES.get(candidate.suffix,
                                                       "application/octet-stream"))
        return Response(200, headers, candidate.read_bytes())

    return wrapped
