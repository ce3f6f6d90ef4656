"""An archive server: memento store, TimeGate, TimeBundle/TimeMap, delivery.

URI layout follows the appended-original convention: the original URI
goes verbatim (unencoded) after a fixed prefix::

    {base}/timegate/{URI-R}
    {base}/timebundle/{URI-R}
    {base}/timemap/{URI-R}
    {base}/memento/{yyyymmddhhmmss}/{URI-R}

The store is append-only for bodies and journals every change to a flat
JSONL file, replayed at startup.
"""

from __future__ import annotations

import base64
import json
import threading
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from .errors import DuplicateMemento, InvalidRecord
from .headers import (
    ALTERNATES,
    LINK,
    LOCATION,
    TCN,
    VARY,
    X_ARCHIVE_INTERVAL,
    X_DATETIME_VALIDITY,
    DatetimeInterval,
    parse_interval,
    serialize_alternates,
    serialize_interval,
    timebundle_link,
)
from .httpdate import DatetimeStamp, format_http_date, parse_http_date
from .message import Headers, Request, Response, split_target, text_response
from .negotiation import DecisionKind, negotiate
from .records import MementoRecord, TimeMap, build_timemap, content_digest

TIMEGATE_PREFIX = "/timegate/"
TIMEBUNDLE_PREFIX = "/timebundle/"
TIMEMAP_PREFIX = "/timemap/"
MEMENTO_PREFIX = "/memento/"


def compact_timestamp(stamp: DatetimeStamp) -> str:
    dt = datetime.fromtimestamp(stamp.seconds, tz=timezone.utc)
    return dt.strftime("%Y%m%d%H%M%S")


def timegate_uri(base: str, uri_r: str) -> str:
    return f"{base}{TIMEGATE_PREFIX}{uri_r}"


def timebundle_uri(base: str, uri_r: str) -> str:
    return f"{base}{TIMEBUNDLE_PREFIX}{uri_r}"


def timemap_uri(base: str, uri_r: str) -> str:
    return f"{base}{TIMEMAP_PREFIX}{uri_r}"


def memento_uri(base: str, uri_r: str, stamp: DatetimeStamp) -> str:
    return f"{base}{MEMENTO_PREFIX}{compact_timestamp(stamp)}/{uri_r}"


class ArchiveStore:
    """Keyed memento collection with an append-only JSONL journal.

    Bodies never change once stored; validity intervals may only extend.
    Safe for concurrent readers with exclusive writers.
    """

    def __init__(self, journal_path: str | Path | None = None):
        self._lock = threading.RLock()
        self._by_r: dict[str, list[MementoRecord]] = {}
        self._by_m: dict[str, MementoRecord] = {}
        self._journal_path = Path(journal_path) if journal_path else None
        if self._journal_path and self._journal_path.exists():
            self._replay()

    def put_memento(self, record: MementoRecord) -> str:
        with self._lock:
            if record.uri_m in self._by_m:
                raise DuplicateMemento(record.uri_m)
            self._insert(record)
            self._journal({"op": "put", **_record_to_json(record)})
        return record.uri_m

    def extend_validity(self, uri_m: str, until: DatetimeStamp) -> None:
        with self._lock:
            record = self._by_m.get(uri_m)
            if record is None:
                raise InvalidRecord(f"no memento {uri_m}")
            start = record.validity.from_ if record.validity else record.datetime_i
            if until < start:
                raise InvalidRecord("validity may only extend forward")
            updated = replace(record, validity=DatetimeInterval(start, until))
            self._replace(updated)
            self._journal({"op": "extend_validity", "uri_m": uri_m,
                           "until": format_http_date(until)})

    def get(self, uri_m: str) -> MementoRecord | None:
        with self._lock:
            record = self._by_m.get(uri_m)
        if record is not None and content_digest(record.body) != record.digest:
            raise InvalidRecord(f"stored body fails digest check: {uri_m}")
        return record

    def mementos_for(self, uri_r: str) -> list[MementoRecord]:
        with self._lock:
            return list(self._by_r.get(uri_r, ()))

    def latest(self, uri_r: str) -> MementoRecord | None:
        with self._lock:
            records = self._by_r.get(uri_r)
            return records[-1] if records else None

    def originals(self) -> list[str]:
        with self._lock:
            return list(self._by_r)

    def _insert(self, record: MementoRecord) -> None:
        self._by_m[record.uri_m] = record
        bucket = self._by_r.setdefault(record.uri_r, [])
        bucket.append(record)
        bucket.sort(key=lambda r: (r.datetime_i.seconds, r.uri_m))

    def _replace(self, record: MementoRecord) -> None:
        self._by_m[record.uri_m] = record
        bucket = self._by_r[record.uri_r]
        for i, existing in enumerate(bucket):
            if existing.uri_m == record.uri_m:
                bucket[i] = record
                break

    def _journal(self, entry: dict) -> None:
        if self._journal_path is None:
            return
        with self._journal_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry) + "\n")

    def _replay(self) -> None:
        for line in self._journal_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            entry = json.loads(line)
            if entry["op"] == "put":
                self._insert(_record_from_json(entry))
            elif entry["op"] == "extend_validity":
                record = self._by_m[entry["uri_m"]]
                start = (record.validity.from_ if record.validity
                         else record.datetime_i)
                self._replace(replace(record, validity=DatetimeInterval(
                    start, parse_http_date(entry["until"]))))


def _record_to_json(record: MementoRecord) -> dict:
    return {
        "uri_m": record.uri_m,
        "uri_r": record.uri_r,
        "datetime": format_http_date(record.datetime_i),
        "created": format_http_date(record.created),
        "media_type": record.media_type,
        "language": record.language,
        "digest": record.digest,
        "validity": ({"from": format_http_date(record.validity.from_),
                      "until": format_http_date(record.validity.until)}
                     if record.validity else None),
        "body": base64.b64encode(record.body).decode(),
    }


def _record_from_json(entry: dict) -> MementoRecord:
    validity = None
    if entry["validity"]:
        validity = DatetimeInterval(parse_http_date(entry["validity"]["from"]),
                                    parse_http_date(entry["validity"]["until"]))
    return MementoRecord(
        uri_m=entry["uri_m"],
        uri_r=entry["uri_r"],
        datetime_i=parse_http_date(entry["datetime"]),
        created=parse_http_date(entry["created"]),
        media_type=entry["media_type"],
        language=entry["language"],
        body=base64.b64decode(entry["body"]),
        validity=validity,
        digest=entry["digest"],
    )


class ArchiveNode:
    """HTTP face of one archive; also the ingestion hook for push archiving."""

    def __init__(self, base: str, store: ArchiveStore | None = None,
                 window_half_width: int = 3):
        self.base = base.rstrip("/")
        self.store = store or ArchiveStore()
        self.k = window_half_width

    # -- request routing --------------------------------------------------

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
            return self.handle_memento(request.uri)
        return text_response(404, "unknown path\n")

    # -- inventory ----------------------------------------------------------

    def timemap(self, uri_r: str) -> TimeMap | None:
        records = self.store.mementos_for(uri_r)
        if not records:
            return None
        return build_timemap(
            uri_r=uri_r,
            uri_g=timegate_uri(self.base, uri_r),
            uri_b=timebundle_uri(self.base, uri_r),
            entries=[r.entry() for r in records],
        )

    # -- endpoints ------------------------------------------------------------

    def handle_timegate(self, uri_r: str, raw_headers) -> Response:
        timemap = self.timemap(uri_r)
        if timemap is None:
            return text_response(404, f"no mementos for {uri_r}\n")
        decision = negotiate(timemap, raw_headers, k=self.k)
        return render_timegate_decision(decision, timemap)

    def handle_timebundle(self, uri_r: str) -> Response:
        if not self.store.mementos_for(uri_r):
            return text_response(404, f"no mementos for {uri_r}\n")
        headers = Headers()
        headers.set(LOCATION, timemap_uri(self.base, uri_r))
        return Response(303, headers, b"")

    def handle_timemap(self, uri_r: str) -> Response:
        timemap = self.timemap(uri_r)
        if timemap is None:
            return text_response(404, f"no mementos for {uri_r}\n")
        from .records import timemap_body
        headers = Headers()
        headers.set("Content-Type", "application/json")
        return Response(200, headers, timemap_body(timemap))

    def handle_memento(self, uri_m: str) -> Response:
        record = self.store.get(uri_m)
        if record is None:
            return text_response(404, f"no memento at {uri_m}\n")
        headers = Headers()
        headers.set("Content-Type", record.media_type)
        if record.language:
            headers.set("Content-Language", record.language)
        headers.set(TCN, "choice")
        if record.validity is not None:
            headers.set(X_DATETIME_VALIDITY, serialize_interval(record.validity))
        return Response(200, headers, record.body)

    # -- ingestion ---------------------------------------------------------

    def ingest_transaction(self, uri_r: str, served_body: bytes,
                           media_type: str, now: DatetimeStamp) -> str | None:
        """Push one served representation into the archive.

        A body identical to the latest stored memento only stretches that
        memento's validity to ``now``. A materially different body closes
        the previous validity interval at ``now - 1s`` (the change is
        first observable at this serve) and opens a new memento with
        t_i = t_c = now.
        """
        digest = content_digest(served_body)
        latest = self.store.latest(uri_r)
        if latest is not None and latest.digest == digest:
            until = latest.validity.until if latest.validity else latest.datetime_i
            if now > until:
                self.store.extend_validity(latest.uri_m, now)
            return None
        if latest is not None and latest.validity is not None:
            closed = max(latest.validity.until.seconds, now.seconds - 1)
            self.store.extend_validity(latest.uri_m, DatetimeStamp(closed))
        record = MementoRecord(
            uri_m=memento_uri(self.base, uri_r, now),
            uri_r=uri_r,
            datetime_i=now,
            created=now,
            media_type=media_type,
            body=served_body,
            validity=DatetimeInterval(now, now),
        )
        return self.store.put_memento(record)


def render_timegate_decision(decision, timemap: TimeMap) -> Response:
    """Emit the response for a negotiation decision; shared with services
    that negotiate over merged TimeMaps."""
    headers = Headers()
    headers.set(VARY, "negotiate, accept-datetime")
    if decision.alternates_window:
        headers.set(ALTERNATES,
                    serialize_alternates(list(decision.alternates_window)))
    if decision.archive_interval is not None:
        headers.set(X_ARCHIVE_INTERVAL,
                    serialize_interval(decision.archive_interval))
    headers.set(LINK, timebundle_link(timemap.uri_b))
    if decision.kind is DecisionKind.CHOICE:
        headers.set(TCN, "choice")
        headers.set(LOCATION, decision.chosen.uri_m)
        return Response(302, headers, b"")
    if decision.kind is DecisionKind.BAD_REQUEST:
        return text_response(400, "unparseable X-Accept-Datetime\n",
                             headers=headers)
    headers.set(TCN, "list")
    status = 300 if decision.kind is DecisionKind.LIST else 406
    listing = "\n".join(v.uri for v in decision.alternates_window) + "\n"
    return text_response(status, listing, headers=headers)
