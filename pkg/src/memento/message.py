"""The request/response shape every service in this package speaks.

One abstract handler interface lets the same service objects run inside
the in-process simulated web and behind a real socket server. A handler
is any callable taking a Request and returning a Response; a transport is
anything with ``send(request, source=...)`` that can also raise
ConnectionFailure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol
from urllib.parse import parse_qsl

REASONS = {
    200: "OK",
    300: "Multiple Choices",
    302: "Found",
    303: "See Other",
    400: "Bad Request",
    404: "Not Found",
    406: "Not Acceptable",
    500: "Internal Server Error",
}


class Headers:
    """An ordered, case-insensitive header map preserving original casing."""

    def __init__(self, items=None):
        self._items: list[tuple[str, str]] = []
        if items:
            pairs = items.items() if hasattr(items, "items") else items
            for name, value in pairs:
                self.add(name, value)

    def get(self, name: str, default: str | None = None) -> str | None:
        lowered = name.lower()
        for key, value in self._items:
            if key.lower() == lowered:
                return value
        return default

    def set(self, name: str, value: str) -> None:
        lowered = name.lower()
        for i, (key, _) in enumerate(self._items):
            if key.lower() == lowered:
                self._items[i] = (name, value)
                return
        self._items.append((name, value))

    def add(self, name: str, value: str) -> None:
        self._items.append((name, str(value)))

    def remove(self, name: str) -> None:
        lowered = name.lower()
        self._items = [(k, v) for k, v in self._items if k.lower() != lowered]

    def items(self) -> list[tuple[str, str]]:
        return list(self._items)

    def copy(self) -> "Headers":
        return Headers(self._items)

    def __contains__(self, name: str) -> bool:
        return self.get(name) is not None

    def __eq__(self, other) -> bool:
        return isinstance(other, Headers) and self._items == other._items

    def __repr__(self) -> str:
        return f"Headers({self._items!r})"


@dataclass
class Request:
    method: str
    uri: str
    headers: Headers = field(default_factory=Headers)
    body: bytes = b""


@dataclass
class Response:
    status: int
    headers: Headers = field(default_factory=Headers)
    body: bytes = b""

    @property
    def reason(self) -> str:
        return REASONS.get(self.status, "")

    def to_bytes(self) -> bytes:
        """Byte-exact rendering used by transparency comparisons."""
        lines = [f"HTTP/1.1 {self.status} {self.reason}"]
        lines += [f"{name}: {value}" for name, value in self.headers.items()]
        head = ("\r\n".join(lines) + "\r\n\r\n").encode()
        return head + self.body


Handler = Callable[[Request], Response]


class Transport(Protocol):
    """Client-side sender; raises ConnectionFailure/UnknownHost on dead hosts."""

    def send(self, request: Request, source: str = "client") -> Response:
        ...


def split_target(uri: str) -> tuple[str, str, str]:
    """Split an absolute URI into (scheme, host, target).

    The target keeps path and query verbatim; appended original-resource
    URIs must survive unencoded, so no normalization happens here.
    """
    scheme, sep, rest = uri.partition("://")
    if not sep:
        raise ValueError(f"not an absolute URI: {uri!r}")
    slash = rest.find("/")
    if slash < 0:
        return scheme, rest, "/"
    return scheme, rest[:slash], rest[slash:]


def query_params(target: str) -> dict[str, str]:
    """Decode the query string of a request target; last value wins."""
    _, _, query = target.partition("?")
    return dict(parse_qsl(query, keep_blank_values=True))


def text_response(status: int, text: str, media_type: str = "text/plain",
                  headers: Headers | None = None) -> Response:
    hs = headers or Headers()
    hs.set("Content-Type", media_type)
    return Response(status, hs, text.encode())


def redirect(status: int, location: str,
             headers: Headers | None = None) -> Response:
    hs = headers or Headers()
    hs.set("Location", location)
    return Response(status, hs, b"")
