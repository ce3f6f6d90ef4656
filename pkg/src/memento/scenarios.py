"""Declarative scenario scripts and the canned protocol fixtures.

A script lists hosts with roles (plain origin, self-archiving origin,
archive, aggregator, gateway), memento seed data, and timed events;
loading one wires a complete SimWeb deterministically. The canned set
covers both negotiation flows, the split hurricane coverage, and the
vanished-domain / new-custodian failure stories.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .aggregator import Aggregator, ArchiveRegistry
from .archive import ArchiveNode
from .errors import InvalidScript
from .gateway import GatewayConfig, GatewayService
from .headers import DatetimeInterval
from .httpdate import DatetimeStamp, parse_http_date
from .message import Handler, Headers, Request, Response, text_response
from .middleware import OriginMiddleware, RedirectPolicy
from .netsim import SimWeb
from .records import MementoRecord

ROLES = ("origin", "self-archiving-origin", "archive", "aggregator", "gateway")


@dataclass(frozen=True)
class ScenarioScript:
    """A validated scenario fixture; loading it twice gives identical webs."""

    doc: dict

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioScript":
        _validate(doc)
        return cls(doc)

    @classmethod
    def load_file(cls, path: str | Path) -> "ScenarioScript":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidScript(f"{path}: {exc}") from exc
        return cls.from_dict(doc)


def _fail(where: str, problem: str):
    raise InvalidScript(f"{where}: {problem}")


def _validate(doc) -> None:
    if not isinstance(doc, dict) or not doc:
        _fail("script", "must be a non-empty object")
    hosts = doc.get("hosts")
    if not isinstance(hosts, list) or not hosts:
        _fail("hosts", "at least one host is required")
    seen = set()
    for i, host in enumerate(hosts):
        where = f"hosts[{i}]"
        if not isinstance(host, dict):
            _fail(where, "must be an object")
        name = host.get("name")
        if not name:
            _fail(where, "missing name")
        if name in seen:
            _fail(where, f"duplicate hostname {name}")
        seen.add(name)
        role = host.get("role")
        if role not in ROLES:
            _fail(where, f"unknown role {role!r}")
        if role == "archive":
            for j, m in enumerate(host.get("mementos", ())):
                for key in ("uri_r", "datetime", "media_type", "body"):
                    if key not in m:
                        _fail(f"{where}.mementos[{j}]", f"missing {key}")
        if role == "self-archiving-origin" and not host.get("versions"):
            _fail(where, "self-archiving origin needs versions")
        if role == "aggregator" and not host.get("archives"):
            _fail(where, "aggregator needs an archive list")
        if role == "gateway" and not host.get("fallback"):
            _fail(where, "gateway needs a fallback TimeGate base")
    for i, event in enumerate(doc.get("events", ())):
        where = f"events[{i}]"
        if event.get("action") not in ("vanish", "restore", "set_body"):
            _fail(where, f"unknown action {event.get('action')!r}")
        if "at" not in event or "host" not in event:
            _fail(where, "needs at and host")
        if event["action"] == "set_body" and ("uri" not in event
                                              or "body" not in event):
            _fail(where, "set_body needs uri and body")


class StaticOrigin:
    """A live origin serving current representations from a page table."""

    def __init__(self, pages: dict[str, dict]):
        self.pages = pages

    def set_body(self, uri: str, body: bytes) -> None:
        page = self.pages.setdefault(uri, {"media_type": "text/html"})
        page["body"] = body

    def __call__(self, request: Request) -> Response:
        page = self.pages.get(request.uri)
        if page is None:
            return text_response(404, f"no such page: {request.uri}\n")
        headers = Headers()
        headers.set("Content-Type", page["media_type"])
        body = page["body"]
        return Response(200, headers, body if isinstance(body, bytes)
                        else body.encode())


class TransactionalOrigin:
    """Pushes every representation it serves into an attached archive."""

    def __init__(self, inner: Handler, archive: ArchiveNode, clock):
        self.inner = inner
        self.archive = archive
        self.clock = clock

    def __call__(self, request: Request) -> Response:
        response = self.inner(request)
        if response.status == 200:
            media_type = (response.headers.get("Content-Type")
                          or "application/octet-stream")
            self.archive.ingest_transaction(request.uri, response.body,
                                            media_type, self.clock())
        return response


@dataclass
class Scenario:
    """A loaded script: the simulated web plus handles on its services."""

    name: str
    web: SimWeb
    script: ScenarioScript
    resource: str | None = None
    travel_datetime: str | None = None
    gateway: GatewayService | None = None
    gateway_base: str | None = None
    archives: dict[str, ArchiveNode] = field(default_factory=dict)
    aggregators: dict[str, Aggregator] = field(default_factory=dict)
    origins: dict[str, StaticOrigin] = field(default_factory=dict)

    def travel_prefs_text(self) -> str:
        return "{%s}" % self.travel_datetime


def load_scenario(source) -> Scenario:
    """Build a SimWeb from a canned name, a dict, a file path, or a script."""
    if isinstance(source, ScenarioScript):
        script = source
    elif isinstance(source, dict):
        script = ScenarioScript.from_dict(source)
    elif isinstance(source, (str, Path)) and str(source) in CANNED:
        script = ScenarioScript.from_dict(CANNED[str(source)]())
    elif isinstance(source, (str, Path)):
        script = ScenarioScript.load_file(source)
    else:
        raise InvalidScript(f"cannot load scenario from {source!r}")

    doc = script.doc
    web = SimWeb(clock=DatetimeStamp(0))
    scenario = Scenario(
        name=doc.get("name", "unnamed"),
        web=web,
        script=script,
        resource=doc.get("resource"),
        travel_datetime=doc.get("travel_datetime"),
    )

    for host in doc["hosts"]:
        name = host["name"]
        base = f"http://{name}"
        role = host["role"]
        reachable = host.get("reachable", True)
        if role == "archive":
            node = ArchiveNode(base, window_half_width=host.get("k", 3))
            for m in host.get("mementos", ()):
                node.store.put_memento(_seed_record(base, m))
            scenario.archives[name] = node
            web.add_host(name, node, reachable)
        elif role == "origin":
            origin = StaticOrigin({p["uri"]: {"media_type": p["media_type"],
                                              "body": p["body"]}
                                   for p in host.get("pages", ())})
            scenario.origins[name] = origin
            handler: Handler = origin
            push_base = host.get("push_archive")
            if push_base:
                archive_name = push_base.removeprefix("http://")
                target = scenario.archives.get(archive_name)
                if target is None:
                    _fail(f"host {name}", f"push_archive {push_base} is not "
                                          "a previously declared archive")
                handler = TransactionalOrigin(handler, target, web.now)
            redirect = host.get("redirect")
            if redirect:
                policy = RedirectPolicy.from_json(redirect)
                handler = OriginMiddleware(policy, handler)
            web.add_host(name, handler, reachable)
        elif role == "self-archiving-origin":
            node = ArchiveNode(base, window_half_width=host.get("k", 3))
            versions = host["versions"]
            for v in versions:
                node.ingest_transaction(
                    v["uri_r"], v["body"].encode(), v["media_type"],
                    parse_http_date(v["datetime"]))
            current = versions[-1]
            origin = StaticOrigin({current["uri_r"]: {
                "media_type": current["media_type"],
                "body": current["body"]}})
            scenario.origins[name] = origin
            scenario.archives[name] = node
            from .middleware import SelfArchivingOrigin
            web.add_host(name, SelfArchivingOrigin(node.store, origin,
                                                   host.get("k", 3)),
                         reachable)
        elif role == "aggregator":
            registry = ArchiveRegistry(
                archives=tuple((a["id"], a["base"].rstrip("/"))
                               for a in host["archives"]),
                harvest_ttl=host.get("ttl", 300))
            aggregator = Aggregator(base, registry, web, web.now,
                                    window_half_width=host.get("k", 3))
            scenario.aggregators[name] = aggregator
            web.add_host(name, aggregator, reachable)
        elif role == "gateway":
            config = GatewayConfig(
                fallback_timegate_base=host["fallback"].rstrip("/"),
                gateway_base=base,
                max_hops=host.get("max_hops", 8))
            gateway = GatewayService(config, web)
            scenario.gateway = gateway
            scenario.gateway_base = base
            web.add_host(name, gateway, reachable)

    for event in doc.get("events", ()):
        _schedule_event(web, scenario, event)

    clock_text = doc.get("clock")
    if clock_text:
        web.advance_clock(parse_http_date(clock_text))
    return scenario


def _seed_record(base: str, m: dict) -> MementoRecord:
    from .archive import memento_uri
    stamp = parse_http_date(m["datetime"])
    validity = None
    if m.get("validity"):
        validity = DatetimeInterval(parse_http_date(m["validity"]["from"]),
                                    parse_http_date(m["validity"]["until"]))
    return MementoRecord(
        uri_m=memento_uri(base, m["uri_r"], stamp),
        uri_r=m["uri_r"],
        datetime_i=stamp,
        created=stamp,
        media_type=m["media_type"],
        body=m["body"].encode(),
        language=m.get("language"),
        validity=validity,
    )


def _schedule_event(web: SimWeb, scenario: Scenario, event: dict) -> None:
    at = parse_http_date(event["at"])
    action = event["action"]
    host = event["host"]
    if action == "vanish":
        web.schedule(at, lambda: web.set_reachable(host, False),
                     f"vanish {host}")
    elif action == "restore":
        web.schedule(at, lambda: web.set_reachable(host, True),
                     f"restore {host}")
    elif action == "set_body":
        origin = scenario.origins.get(host)
        if origin is None:
            _fail("events", f"set_body targets non-origin host {host}")
        web.schedule(at, lambda: origin.set_body(event["uri"],
                                                 event["body"].encode()),
                     f"set_body {host}")


# --- canned scenarios -----------------------------------------------------

NOW_TEXT = "Mon, 02 Nov 2009 16:25:00 GMT"
TRAVEL_TEXT = "Mon, 12 Oct 2009 16:25:00 GMT"

NOAA = "http://www.noaa.gov/"
KATRINA_SNAPSHOTS = [
    ("archive-it.example", "Thu, 08 Sep 2005 17:48:47 GMT", "A"),
    ("internet-archive.example", "Thu, 08 Sep 2005 21:07:05 GMT", "B"),
    ("internet-archive.example", "Fri, 09 Sep 2005 01:58:48 GMT", "C"),
    ("archive-it.example", "Sat, 10 Sep 2005 08:11:47 GMT", "D"),
]


def _page(title: str, extra: str = "") -> str:
    return (f'<html><body><h1>{title}</h1>'
            f'<a href="{NOAA}">home</a> <a href="#top">top</a>{extra}'
            f"</body></html>")


def katrina_script() -> dict:
    archives: dict[str, list] = {"archive-it.example": [],
                                 "internet-archive.example": []}
    for hostname, datetime_text, label in KATRINA_SNAPSHOTS:
        archives[hostname].append({
            "uri_r": NOAA,
            "datetime": datetime_text,
            "media_type": "text/html",
            "body": _page(f"noaa snapshot {label}"),
        })
    return {
        "name": "katrina",
        "clock": NOW_TEXT,
        "resource": NOAA,
        "travel_datetime": "Fri, 09 Sep 2005 12:00:00 GMT",
        "hosts": [
            {"name": "www.noaa.gov", "role": "origin",
             "pages": [{"uri": NOAA, "media_type": "text/html",
                        "body": _page("noaa current")}]},
            {"name": "archive-it.example", "role": "archive",
             "mementos": archives["archive-it.example"]},
            {"name": "internet-archive.example", "role": "archive",
             "mementos": archives["internet-archive.example"]},
            {"name": "aggr.example", "role": "aggregator",
             "archives": [{"id": "archive-it",
                           "base": "http://archive-it.example"},
                          {"id": "internet-archive",
                           "base": "http://internet-archive.example"}]},
            {"name": "gw.example", "role": "gateway",
             "fallback": "http://aggr.example"},
        ],
    }


def flow1_script() -> dict:
    page = "http://cms.example/page"
    versions = [
        {"uri_r": page, "datetime": "Mon, 05 Oct 2009 08:00:00 GMT",
         "media_type": "text/html", "body": _page("cms page v1")},
        {"uri_r": page, "datetime": "Mon, 12 Oct 2009 09:30:00 GMT",
         "media_type": "text/html", "body": _page("cms page v2")},
        {"uri_r": page, "datetime": "Mon, 02 Nov 2009 10:00:00 GMT",
         "media_type": "text/html", "body": _page("cms page v3")},
    ]
    return {
        "name": "flow1",
        "clock": NOW_TEXT,
        "resource": page,
        "travel_datetime": TRAVEL_TEXT,
        "hosts": [
            {"name": "cms.example", "role": "self-archiving-origin",
             "versions": versions},
            {"name": "gw.example", "role": "gateway",
             "fallback": "http://cms.example"},
        ],
    }


def flow2_script() -> dict:
    page = "http://plain.example/page"
    return {
        "name": "flow2",
        "clock": NOW_TEXT,
        "resource": page,
        "travel_datetime": TRAVEL_TEXT,
        "hosts": [
            {"name": "archive.example", "role": "archive",
             "mementos": [
                 {"uri_r": page, "datetime": "Thu, 01 Oct 2009 12:00:00 GMT",
                  "media_type": "text/html", "body": _page("plain page m1")},
                 {"uri_r": page, "datetime": "Thu, 15 Oct 2009 12:00:00 GMT",
                  "media_type": "text/html", "body": _page("plain page m2")},
                 {"uri_r": page, "datetime": "Sun, 01 Nov 2009 12:00:00 GMT",
                  "media_type": "text/html", "body": _page("plain page m3")},
             ]},
            {"name": "plain.example", "role": "origin",
             "pages": [{"uri": page, "media_type": "text/html",
                        "body": _page("plain page current")}],
             "redirect": {"default": "http://archive.example"}},
            {"name": "gw.example", "role": "gateway",
             "fallback": "http://archive.example"},
        ],
    }


def unaware_origin_script() -> dict:
    page = "http://news.example/"
    return {
        "name": "unaware-origin",
        "clock": NOW_TEXT,
        "resource": page,
        "travel_datetime": TRAVEL_TEXT,
        "hosts": [
            {"name": "news.example", "role": "origin",
             "pages": [{"uri": page, "media_type": "text/html",
                        "body": _page("news current")}]},
            {"name": "archive.example", "role": "archive",
             "mementos": [
                 {"uri_r": page, "datetime": "Sun, 11 Oct 2009 06:00:00 GMT",
                  "media_type": "text/html", "body": _page("news m1")},
                 {"uri_r": page, "datetime": "Tue, 13 Oct 2009 06:00:00 GMT",
                  "media_type": "text/html", "body": _page("news m2")},
             ]},
            {"name": "aggr.example", "role": "aggregator",
             "archives": [{"id": "archive", "base": "http://archive.example"}]},
            {"name": "gw.example", "role": "gateway",
             "fallback": "http://aggr.example"},
        ],
    }


def vanished_domain_script() -> dict:
    page = "http://gone.example/page"
    return {
        "name": "vanished-domain",
        "clock": NOW_TEXT,
        "resource": page,
        "travel_datetime": NOW_TEXT,
        "hosts": [
            {"name": "gone.example", "role": "origin", "reachable": False,
             "pages": [{"uri": page, "media_type": "text/html",
                        "body": _page("gone current")}]},
            {"name": "archive.example", "role": "archive",
             "mementos": [
                 {"uri_r": page, "datetime": "Wed, 01 Jul 2009 00:00:00 GMT",
                  "media_type": "text/html", "body": _page("gone m1")},
                 {"uri_r": page, "datetime": "Tue, 01 Sep 2009 00:00:00 GMT",
                  "media_type": "text/html", "body": _page("gone m2")},
                 {"uri_r": page, "datetime": "Sun, 01 Nov 2009 12:00:00 GMT",
                  "media_type": "text/html", "body": _page("gone m3 latest")},
             ]},
            {"name": "aggr.example", "role": "aggregator",
             "archives": [{"id": "archive", "base": "http://archive.example"}]},
            {"name": "gw.example", "role": "gateway",
             "fallback": "http://aggr.example"},
        ],
    }


def new_custodian_script() -> dict:
    page = "http://taken.example/"
    return {
        "name": "new-custodian",
        "clock": NOW_TEXT,
        "resource": page,
        "travel_datetime": "Fri, 01 Jul 2005 00:00:00 GMT",
        "hosts": [
            {"name": "oldarc.example", "role": "archive",
             "mementos": [
                 {"uri_r": page, "datetime": "Wed, 01 Jun 2005 00:00:00 GMT",
                  "media_type": "text/html", "body": _page("old custodian june")},
                 {"uri_r": page, "datetime": "Thu, 01 Dec 2005 00:00:00 GMT",
                  "media_type": "text/html", "body": _page("old custodian december")},
             ]},
            {"name": "newarc.example", "role": "archive",
             "mementos": [
                 {"uri_r": page, "datetime": "Thu, 01 Oct 2009 00:00:00 GMT",
                  "media_type": "text/html", "body": _page("new custodian october")},
                 {"uri_r": page, "datetime": "Sun, 01 Nov 2009 00:00:00 GMT",
                  "media_type": "text/html", "body": _page("new custodian november")},
             ]},
            {"name": "taken.example", "role": "origin",
             "pages": [{"uri": page, "media_type": "text/html",
                        "body": _page("taken current")}],
             "redirect": {"default": "http://newarc.example"}},
            {"name": "aggr.example", "role": "aggregator",
             "archives": [{"id": "oldarc", "base": "http://oldarc.example"},
                          {"id": "newarc", "base": "http://newarc.example"}]},
            {"name": "gw.example", "role": "gateway",
             "fallback": "http://aggr.example"},
        ],
    }


CANNED = {
    "katrina": katrina_script,
    "flow1": flow1_script,
    "flow2": flow2_script,
    "unaware-origin": unaware_origin_script,
    "vanished-domain": vanished_domain_script,
    "new-custodian": new_custodian_script,
}
