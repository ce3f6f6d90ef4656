"""Cross-archive TimeGates over harvested, merged TimeMaps.

The aggregator stores no bodies. Per request it fetches each registered
archive's TimeBundle (following the 303 to the TimeMap), merges the
inventories, and negotiates over the union; every Choice points at the
owning archive's memento. Harvests are cached per original URI for a
TTL; partial archive failures are skipped and reported in an
X-Aggregator-Sources diagnostic header.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .archive import (
    MEMENTO_PREFIX,
    TIMEBUNDLE_PREFIX,
    TIMEGATE_PREFIX,
    TIMEMAP_PREFIX,
    render_timegate_decision,
    timebundle_uri,
    timegate_uri,
    timemap_uri,
)
from .errors import (
    AllArchivesEmpty,
    ConnectionFailure,
    MalformedResponse,
    MixedOriginals,
    UnknownHost,
)
from .headers import LOCATION
from .httpdate import DatetimeStamp
from .message import Headers, Request, Response, Transport, split_target, text_response
from .negotiation import negotiate
from .records import MementoEntry, TimeMap, build_timemap, parse_timemap_body, timemap_body

X_AGGREGATOR_SOURCES = "X-Aggregator-Sources"


@dataclass(frozen=True)
class ArchiveRegistry:
    """Ordered archive membership; order decides metadata precedence."""

    archives: tuple[tuple[str, str], ...]  # (archive id, base URI)
    harvest_ttl: int = 300

    def __post_init__(self):
        ids = [aid for aid, _ in self.archives]
        if len(set(ids)) != len(ids):
            raise ValueError("archive ids must be unique")
        if self.harvest_ttl <= 0:
            raise ValueError("harvest_ttl must be positive")

    @classmethod
    def from_json(cls, doc: dict) -> "ArchiveRegistry":
        archives = tuple((a["id"], a["base"].rstrip("/"))
                         for a in doc["archives"])
        return cls(archives=archives, harvest_ttl=doc.get("ttl", 300))

    @classmethod
    def load(cls, path: str | Path) -> "ArchiveRegistry":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def tag_provenance(timemap: TimeMap, archive_id: str) -> TimeMap:
    entries = [MementoEntry(m.uri_m, m.datetime_i, m.media_type, m.language,
                            m.digest, m.validity, archive_id)
               for m in timemap.mementos]
    return build_timemap(timemap.uri_r, timemap.uri_g, timemap.uri_b, entries)


def merge_timemaps(maps: Sequence[TimeMap], uri_g: str | None = None,
                   uri_b: str | None = None) -> TimeMap:
    """Union of several archives' inventories for one original resource.

    Deduplicates by URI-M with earlier maps winning metadata conflicts;
    the merged interval is recomputed from the union. Merging with an
    empty sequence element is the identity.
    """
    maps = [m for m in maps if m is not None]
    if not maps:
        raise AllArchivesEmpty("nothing to merge")
    originals = {m.uri_r for m in maps}
    if len(originals) != 1:
        raise MixedOriginals(f"cannot merge TimeMaps for {sorted(originals)}")
    seen: dict[str, MementoEntry] = {}
    for timemap in maps:
        for entry in timemap.mementos:
            seen.setdefault(entry.uri_m, entry)
    return build_timemap(
        uri_r=maps[0].uri_r,
        uri_g=uri_g or maps[0].uri_g,
        uri_b=uri_b or maps[0].uri_b,
        entries=list(seen.values()),
    )


@dataclass
class _CacheSlot:
    expires: int
    timemap: TimeMap | None
    sources: tuple[tuple[str, str], ...]


class Aggregator:
    """Storeless cross-archive TimeGate/TimeBundle/TimeMap service."""

    def __init__(self, base: str, registry: ArchiveRegistry,
                 transport: Transport, clock: Callable[[], DatetimeStamp],
                 window_half_width: int = 3):
        self.base = base.rstrip("/")
        self.registry = registry
        self.transport = transport
        self.clock = clock
        self.k = window_half_width
        self._cache: dict[str, _CacheSlot] = {}
        self._lock = threading.Lock()

    # -- harvesting -----------------------------------------------------------

    def harvest(self, uri_r: str) -> TimeMap:
        timemap, _ = self.harvest_with_sources(uri_r)
        return timemap

    def harvest_with_sources(self, uri_r: str) -> tuple[TimeMap, tuple[tuple[str, str], ...]]:
        """Merged TimeMap plus per-archive ok/empty/fail outcomes.

        Served from cache within one TTL window; per-URI refreshes are
        serialized. Raises AllArchivesEmpty when no archive contributes.
        """
        now = self.clock().seconds
        with self._lock:
            slot = self._cache.get(uri_r)
            if slot is not None and now < slot.expires:
                return self._unpack(uri_r, slot)
            harvested: list[TimeMap] = []
            sources: list[tuple[str, str]] = []
            for archive_id, base in self.registry.archives:
                try:
                    timemap = self._fetch_timemap(base, uri_r)
                except (ConnectionFailure, UnknownHost, MalformedResponse):
                    sources.append((archive_id, "fail"))
                    continue
                if timemap is None:
                    sources.append((archive_id, "empty"))
                    continue
                harvested.append(tag_provenance(timemap, archive_id))
                sources.append((archive_id, "ok"))
            merged = None
            if harvested:
                merged = merge_timemaps(
                    harvested,
                    uri_g=timegate_uri(self.base, uri_r),
                    uri_b=timebundle_uri(self.base, uri_r),
                )
            slot = _CacheSlot(now + self.registry.harvest_ttl, merged,
                              tuple(sources))
            self._cache[uri_r] = slot
            return self._unpack(uri_r, slot)

    def _unpack(self, uri_r, slot: _CacheSlot):
        if slot.timemap is None:
            raise AllArchivesEmpty(uri_r)
        return slot.timemap, slot.sources

    def _fetch_timemap(self, archive_base: str, uri_r: str) -> TimeMap | None:
        """GET the TimeBundle, follow the 303, parse the TimeMap."""
        bundle = Request("GET", timebundle_uri(archive_base, uri_r))
        response = self.transport.send(bundle, source="aggregator")
        if response.status == 404:
            return None
        if response.status != 303 or not response.headers.get(LOCATION):
            raise MalformedResponse(
                f"TimeBundle for {uri_r} at {archive_base} answered "
                f"{response.status}")
        follow = Request("GET", response.headers.get(LOCATION))
        doc = self.transport.send(follow, source="aggregator")
        if doc.status != 200:
            raise MalformedResponse(f"TimeMap fetch failed: {doc.status}")
        return parse_timemap_body(doc.body)

    # -- endpoints ---------------------------------------------------------------

    def __call__(self, request: Request) -> Response:
        _, _, target = split_target(request.uri)
        if target.startswith(TIMEGATE_PREFIX):
            return self.handle_timegate(target[len(TIMEGATE_PREFIX):],
                                        request.headers)
        if target.startswith(TIMEBUNDLE_PREFIX):
            return self.handle_timebundle(target[len(TIMEBUNDLE_PREFIX):])
        if target.startswith(TIMEMAP_PREFIX):
            return self.handle_timemap(target[len(TIMEMAP_PREFIX):])
        if target.startswith(MEMENTO_PREFIX):
            # storeless: bodies live on member archives
            return text_response(404, "the aggregator stores no mementos\n")
        return text_response(404, "unknown path\n")

    def handle_timegate(self, uri_r: str, raw_headers) -> Response:
        try:
            timemap, sources = self.harvest_with_sources(uri_r)
        except AllArchivesEmpty:
            return self._with_sources(
                text_response(404, f"no archive holds {uri_r}\n"), uri_r)
        decision = negotiate(timemap, raw_headers, k=self.k)
        response = render_timegate_decision(decision, timemap)
        response.headers.set(X_AGGREGATOR_SOURCES, _format_sources(sources))
        return response

    def handle_timebundle(self, uri_r: str) -> Response:
        try:
            self.harvest_with_sources(uri_r)
        except AllArchivesEmpty:
            return self._with_sources(
                text_response(404, f"no archive holds {uri_r}\n"), uri_r)
        headers = Headers()
        headers.set(LOCATION, timemap_uri(self.base, uri_r))
        return self._with_sources(Response(303, headers, b""), uri_r)

    def handle_timemap(self, uri_r: str) -> Response:
        try:
            timemap, sources = self.harvest_with_sources(uri_r)
        except AllArchivesEmpty:
            return self._with_sources(
                text_response(404, f"no archive holds {uri_r}\n"), uri_r)
        headers = Headers()
        headers.set("Content-Type", "application/json")
        headers.set(X_AGGREGATOR_SOURCES, _format_sources(sources))
        return Response(200, headers, timemap_body(timemap))

    def _with_sources(self, response: Response, uri_r: str) -> Response:
        slot = self._cache.get(uri_r)
        if slot is not None:
            response.headers.set(X_AGGREGATOR_SOURCES,
                                 _format_sources(slot.sources))
        return response


def _format_sources(sources: tuple[tuple[str, str], ...]) -> str:
    return ", ".join(f"{archive_id}={status}" for archive_id, status in sources)
