"""Origin-side participation in datetime negotiation.

Two flavours: a thin wrapper that 302-redirects temporal requests to a
configured external TimeGate (servers without archival capability), and
a self-archiving mode where the original URI doubles as its own TimeGate
over a local store (CMS-style servers).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fnmatch import fnmatch
from pathlib import Path

from .archive import (
    ArchiveNode,
    MEMENTO_PREFIX,
    TIMEBUNDLE_PREFIX,
    TIMEMAP_PREFIX,
    timegate_uri,
)
from .headers import VARY, X_ACCEPT_DATETIME
from .message import Handler, Headers, Request, Response, split_target


@dataclass(frozen=True)
class RedirectPolicy:
    """Ordered pattern rules choosing a TimeGate base per original URI."""

    default: str
    rules: tuple[tuple[str, str], ...] = ()

    def timegate_base_for(self, uri_r: str) -> str:
        for pattern, base in self.rules:
            if fnmatch(uri_r, pattern):
                return base
        return self.default

    @classmethod
    def from_json(cls, doc: dict) -> "RedirectPolicy":
        rules = tuple((rule["pattern"], rule["timegate_base"])
                      for rule in doc.get("rules", ()))
        return cls(default=doc["default"], rules=rules)

    @classmethod
    def load(cls, path: str | Path) -> "RedirectPolicy":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def intercept(request: Request, policy: RedirectPolicy,
              inner_handler: Handler) -> Response:
    """Redirect temporal requests to the policy's TimeGate; else pass through.

    A malformed X-Accept-Datetime still redirects: validation belongs to
    the TimeGate. The passthrough branch is byte-transparent.
    """
    if request.headers.get(X_ACCEPT_DATETIME) is None:
        return inner_handler(request)
    base = policy.timegate_base_for(request.uri)
    headers = Headers()
    headers.set("Location", timegate_uri(base, request.uri))
    headers.set(VARY, "accept-datetime")
    return Response(302, headers, b"")


class OriginMiddleware:
    """Handler wrapper form of intercept, for mounting in a host registry."""

    def __init__(self, policy: RedirectPolicy, inner: Handler):
        self.policy = policy
        self.inner = inner

    def __call__(self, request: Request) -> Response:
        return intercept(request, self.policy, self.inner)


def self_timegate_mode(request: Request, local_store,
                       inner_handler: Handler,
                       window_half_width: int = 3) -> Response:
    """Serve a temporal request from the origin's own archive.

    The original URI acts as its own TimeGate; version and inventory
    endpoints live under the same host. Non-temporal requests pass
    through untouched.
    """
    scheme, host, target = split_target(request.uri)
    node = ArchiveNode(f"{scheme}://{host}", local_store, window_half_width)
    if target.startswith((TIMEBUNDLE_PREFIX, TIMEMAP_PREFIX, MEMENTO_PREFIX)):
        return node(request)
    if request.headers.get(X_ACCEPT_DATETIME) is not None:
        return node.handle_timegate(request.uri, request.headers)
    return inner_handler(request)


class SelfArchivingOrigin:
    """An origin with local archival capability (URI-R = URI-G)."""

    def __init__(self, store, inner: Handler, window_half_width: int = 3):
        self.store = store
        self.inner = inner
        self.k = window_half_width

    def __call__(self, request: Request) -> Response:
        return self_timegate_mode(request, self.store, self.inner, self.k)
