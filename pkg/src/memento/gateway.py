"""The time-travel client.

Executes the full datetime-negotiation flow for one (URI-R, datetime)
request: send the temporal headers to the origin, follow redirects, and
when the origin turns out to be unaware of the protocol (plain 200, 404,
or a dead host) take over its redirecting role by querying a configured
fallback TimeGate. Every network exchange lands in a transaction trace.

Also exposed as an HTTP service: ``GET /travel?uri=&datetime=`` returns
the rewritten memento page, ``GET /trace/{id}`` the hop-by-hop JSON, and
``GET /timemap?uri=`` the merged inventory from the fallback aggregator.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from urllib.parse import quote, quote_from_bytes

from .archive import timegate_uri
from .errors import (
    ConnectionFailure,
    HopLimitExceeded,
    MalformedHeader,
    MalformedResponse,
    NoMementoFound,
    UnknownHost,
)
from .headers import (
    ALTERNATES,
    CONTENT_LOCATION,
    LINK,
    LOCATION,
    TCN,
    X_ACCEPT_DATETIME,
    X_ARCHIVE_INTERVAL,
    X_DATETIME_VALIDITY,
    DatetimeInterval,
    DatetimePreference,
    parse_alternates,
    parse_interval,
    serialize_accept_datetime,
)
from .httpdate import DatetimeStamp, format_http_date, parse_http_date
from .message import (
    Headers,
    Request,
    Response,
    Transport,
    query_params,
    split_target,
    text_response,
)
from .negotiation import select_descriptor

REDIRECT_STATUSES = (301, 302, 303, 307)


def cache_bypass_headers() -> dict[str, str]:
    """The two literals that force caches out of the temporal path."""
    return {
        "Cache-Control": "no-cache",
        "If-Modified-Since": "Thu, 01 Jan 1970 00:00:00 GMT",
    }


@dataclass(frozen=True)
class TravelRequest:
    uri_r: str
    datetime_prefs: tuple[DatetimePreference, ...]
    max_hops: int = 8

    def __post_init__(self):
        if self.max_hops < 1:
            raise ValueError("max_hops must be at least 1")
        if not self.datetime_prefs:
            raise ValueError("travel needs at least one datetime preference")


@dataclass(frozen=True)
class Hop:
    """One request/response exchange as seen by the gateway."""

    uri: str
    sent_headers: Headers
    status: int
    tcn: str | None = None
    location: str | None = None
    content_location: str | None = None
    archive_interval: str | None = None
    link: str | None = None

    def to_json(self) -> dict:
        return {
            "uri": self.uri,
            "sent_headers": dict(self.sent_headers.items()),
            "status": self.status,
            "tcn": self.tcn,
            "location": self.location,
            "content_location": self.content_location,
            "archive_interval": self.archive_interval,
            "link": self.link,
        }


@dataclass(frozen=True)
class TransactionTrace:
    hops: tuple[Hop, ...] = ()

    def to_json(self) -> list[dict]:
        return [hop.to_json() for hop in self.hops]


@dataclass(frozen=True)
class MementoResult:
    final_uri: str
    body: bytes
    media_type: str
    memento_datetime: DatetimeStamp | None
    validity: DatetimeInterval | None
    trace: TransactionTrace
    remediated: bool


@dataclass(frozen=True)
class GatewayConfig:
    fallback_timegate_base: str
    gateway_base: str
    max_hops: int = 8

    @classmethod
    def from_json(cls, doc: dict) -> "GatewayConfig":
        return cls(
            fallback_timegate_base=doc["fallback_timegate_base"].rstrip("/"),
            gateway_base=doc["gateway_base"].rstrip("/"),
            max_hops=doc.get("max_hops", 8),
        )

    @classmethod
    def load(cls, path: str | Path) -> "GatewayConfig":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def _hop_from(uri: str, sent: Headers, response: Response) -> Hop:
    tcn = response.headers.get(TCN)
    return Hop(
        uri=uri,
        sent_headers=sent,
        status=response.status,
        tcn=tcn.lower() if tcn else None,
        location=response.headers.get(LOCATION),
        content_location=response.headers.get(CONTENT_LOCATION),
        archive_interval=response.headers.get(X_ARCHIVE_INTERVAL),
        link=response.headers.get(LINK),
    )


_MEMENTO_TS_RE = re.compile(r"/memento/(\d{14})/")


def _stamp_from_memento_uri(uri: str) -> DatetimeStamp | None:
    match = _MEMENTO_TS_RE.search(uri)
    if match is None:
        return None
    try:
        dt = datetime.strptime(match.group(1), "%Y%m%d%H%M%S")
    except ValueError:
        return None
    return DatetimeStamp(int(dt.replace(tzinfo=timezone.utc).timestamp()))


def _covers_any(interval: DatetimeInterval,
                prefs: tuple[DatetimePreference, ...]) -> bool:
    return any(p.quality.millis > 0 and interval.contains(p.datetime)
               for p in prefs)


def travel(req: TravelRequest, config: GatewayConfig,
           transport: Transport) -> MementoResult:
    """Run one time-travel act and return the memento it lands on.

    Remediation (the client performing the redirect an unaware origin
    should have issued) triggers on a plain 200, a 404/odd status, or a
    connection failure. A Choice whose X-Archive-Interval misses every
    requested datetime is escalated once to the fallback TimeGate, which
    aggregates broader coverage.
    """
    hops: list[Hop] = []
    temporal_value = serialize_accept_datetime(list(req.datetime_prefs))
    fallback_gate = timegate_uri(config.fallback_timegate_base, req.uri_r)
    current = req.uri_r
    remediated = False
    escalated = False
    chosen_datetimes: dict[str, DatetimeStamp] = {}

    def trace() -> TransactionTrace:
        return TransactionTrace(tuple(hops))

    def remediate() -> bool:
        nonlocal remediated, current
        if remediated or current == fallback_gate:
            return False
        remediated = True
        current = fallback_gate
        return True

    for _ in range(req.max_hops):
        sent = Headers()
        sent.set(X_ACCEPT_DATETIME, temporal_value)
        for name, value in cache_bypass_headers().items():
            sent.set(name, value)
        try:
            response = transport.send(Request("GET", current, sent.copy()),
                                      source="gateway")
        except (ConnectionFailure, UnknownHost):
            hops.append(Hop(current, sent, 0))
            if remediate():
                continue
            raise NoMementoFound(f"no route to a memento of {req.uri_r}",
                                 trace=trace())
        hop = _hop_from(current, sent, response)
        hops.append(hop)

        if response.status in REDIRECT_STATUSES:
            if not hop.location:
                raise MalformedResponse(f"{response.status} without Location "
                                        f"from {current}")
            if hop.tcn == "choice":
                interval = _parse_optional_interval(hop.archive_interval)
                if (interval is not None and not escalated
                        and current != fallback_gate
                        and not _covers_any(interval, req.datetime_prefs)):
                    escalated = True
                    current = fallback_gate
                    continue
                stamp = _datetime_from_alternates(response, hop.location)
                if stamp is not None:
                    chosen_datetimes[hop.location] = stamp
            current = hop.location
            continue

        if response.status == 200:
            if hop.tcn == "choice":
                validity = _parse_optional_interval(
                    response.headers.get(X_DATETIME_VALIDITY))
                stamp = (chosen_datetimes.get(current)
                         or _stamp_from_memento_uri(current))
                return MementoResult(
                    final_uri=current,
                    body=response.body,
                    media_type=(response.headers.get("Content-Type")
                                or "application/octet-stream"),
                    memento_datetime=stamp,
                    validity=validity,
                    trace=trace(),
                    remediated=remediated,
                )
            if remediate():
                continue
            raise NoMementoFound(f"{current} answered a current "
                                 "representation", trace=trace())

        if response.status in (300, 406):
            alternates = response.headers.get(ALTERNATES)
            descriptors = parse_alternates(alternates) if alternates else []
            best = select_descriptor(descriptors, req.datetime_prefs)
            if best is None:
                if remediate():
                    continue
                raise NoMementoFound(f"{current} offered no acceptable "
                                     "variant", trace=trace())
            if best.datetime is not None:
                chosen_datetimes[best.uri] = best.datetime
            current = best.uri
            continue

        # 4xx/5xx, including the 404 an unaware origin gives for a gone page
        if remediate():
            continue
        raise NoMementoFound(f"{current} answered {response.status}",
                             trace=trace())

    raise HopLimitExceeded(f"gave up after {req.max_hops} hops", trace=trace())


def _parse_optional_interval(text: str | None) -> DatetimeInterval | None:
    if not text:
        return None
    try:
        return parse_interval(text)
    except MalformedHeader:
        return None


def _datetime_from_alternates(response: Response,
                              location: str) -> DatetimeStamp | None:
    alternates = response.headers.get(ALTERNATES)
    if not alternates:
        return None
    try:
        descriptors = parse_alternates(alternates)
    except MalformedHeader:
        return None
    for d in descriptors:
        if d.uri == location:
            return d.datetime
    return None


# --- link rewriting -----------------------------------------------------

_ATTR_RE = re.compile(
    rb"(?P<prefix>\b(?:href|src)\s*=\s*)"
    rb"(?:\"(?P<dq>[^\"]*)\"|'(?P<sq>[^']*)')",
    re.IGNORECASE)


def travel_url(gateway_base: str, uri: str, datetime_text: str) -> str:
    return (f"{gateway_base}/travel?uri={quote(uri, safe='')}"
            f"&datetime={quote(datetime_text, safe='')}")


def rewrite_links(html_body: bytes,
                  datetime_prefs: tuple[DatetimePreference, ...],
                  gateway_base: str) -> bytes:
    """Point every absolute http(s) href/src at the gateway.

    Runs on raw bytes so everything outside matching attributes is
    byte-preserved; relative and fragment URIs stay untouched (they
    resolve within the serving archive's own space).
    """
    datetime_text = format_http_date(datetime_prefs[0].datetime)

    def replace(match: re.Match) -> bytes:
        value = match.group("dq") if match.group("dq") is not None \
            else match.group("sq")
        if not value.startswith((b"http://", b"https://")):
            return match.group(0)
        target = (f"{gateway_base}/travel"
                  f"?uri={quote_from_bytes(value, safe=b'')}"
                  f"&datetime={quote(datetime_text, safe='')}").encode()
        quote_char = b'"' if match.group("dq") is not None else b"'"
        return match.group("prefix") + quote_char + target + quote_char

    return _ATTR_RE.sub(replace, html_body)


# --- the gateway HTTP service ------------------------------------------------

class GatewayService:
    """HTTP face of the travel client, consumed by the browser UI."""

    def __init__(self, config: GatewayConfig, transport: Transport):
        self.config = config
        self.transport = transport
        self.traces: dict[str, dict] = {}
        self._ids = itertools.count(1)

    def __call__(self, request: Request) -> Response:
        _, _, target = split_target(request.uri)
        path = target.partition("?")[0]
        if path == "/travel":
            return self._travel(target)
        if path.startswith("/trace/"):
            return self._trace(path[len("/trace/"):])
        if path == "/timemap":
            return self._timemap(target)
        return text_response(404, "unknown path\n")

    def _travel(self, target: str) -> Response:
        params = query_params(target)
        uri = params.get("uri")
        datetime_text = params.get("datetime")
        if not uri or not datetime_text:
            return text_response(400, "travel needs uri and datetime\n")
        try:
            stamp = parse_http_date(datetime_text)
        except MalformedHeader:
            return text_response(400, f"unparseable datetime: "
                                      f"{datetime_text}\n")
        prefs = (DatetimePreference(stamp),)
        req = TravelRequest(uri, prefs, self.config.max_hops)
        travel_id = str(next(self._ids))
        base = {"id": travel_id, "uri_r": uri, "datetime": datetime_text}
        try:
            result = travel(req, self.config, self.transport)
        except (NoMementoFound, HopLimitExceeded) as exc:
            self.traces[travel_id] = {
                **base,
                "error": str(exc) or exc.__class__.__name__,
                "remediated": None,
                "final_uri": None,
                "memento_datetime": None,
                "hops": exc.trace.to_json() if exc.trace else [],
            }
            response = text_response(404, f"no memento found for {uri}\n")
            response.headers.set("X-Travel-Id", travel_id)
            return response
        self.traces[travel_id] = {
            **base,
            "error": None,
            "remediated": result.remediated,
            "final_uri": result.final_uri,
            "memento_datetime": (format_http_date(result.memento_datetime)
                                 if result.memento_datetime else None),
            "hops": result.trace.to_json(),
        }
        body = result.body
        if result.media_type.split(";")[0].strip() == "text/html":
            body = rewrite_links(body, prefs, self.config.gateway_base)
        headers = Headers()
        headers.set("Content-Type", result.media_type)
        headers.set("X-Travel-Id", travel_id)
        return Response(200, headers, body)

    def _trace(self, travel_id: str) -> Response:
        doc = self.traces.get(travel_id)
        if doc is None:
            return text_response(404, "unknown travel id\n")
        headers = Headers()
        headers.set("Content-Type", "application/json")
        return Response(200, headers, json.dumps(doc, indent=1).encode())

    def _timemap(self, target: str) -> Response:
        params = query_params(target)
        uri = params.get("uri")
        if not uri:
            return text_response(400, "timemap needs uri\n")
        upstream = (f"{self.config.fallback_timegate_base}/timemap/{uri}")
        try:
            response = self.transport.send(Request("GET", upstream),
                                           source="gateway")
        except (ConnectionFailure, UnknownHost):
            return text_response(502, "aggregator unreachable\n")
        headers = Headers()
        headers.set("Content-Type",
                    response.headers.get("Content-Type") or "application/json")
        return Response(response.status, headers, response.body)
