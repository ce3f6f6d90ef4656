"""Archival records and the TimeMap inventory document.

A MementoRecord is one frozen snapshot of an original resource. A TimeMap
is the machine-readable inventory of every memento an archive (or an
aggregator) knows for that resource, exchanged as a JSON document.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import InvalidRecord, MalformedResponse
from .headers import DatetimeInterval
from .httpdate import DatetimeStamp, format_http_date, parse_http_date

DIGEST_ALGORITHM = "sha256"


def content_digest(body: bytes) -> str:
    return hashlib.sha256(body).hexdigest()


@dataclass(frozen=True)
class MementoRecord:
    """One archival snapshot: the representation URI-R served at datetime_i.

    Immutable after construction; ``created >= datetime_i`` always holds,
    the digest always matches the body, and a validity interval (when the
    archive can know one) brackets datetime_i.
    """

    uri_m: str
    uri_r: str
    datetime_i: DatetimeStamp
    created: DatetimeStamp
    media_type: str
    body: bytes
    language: str | None = None
    validity: DatetimeInterval | None = None
    digest: str = ""

    def __post_init__(self):
        if self.created < self.datetime_i:
            raise InvalidRecord(
                f"created {format_http_date(self.created)} precedes "
                f"archival datetime {format_http_date(self.datetime_i)}")
        expected = content_digest(self.body)
        if not self.digest:
            object.__setattr__(self, "digest", expected)
        elif self.digest != expected:
            raise InvalidRecord(f"digest mismatch for {self.uri_m}")
        if self.validity is not None and not self.validity.contains(self.datetime_i):
            raise InvalidRecord(
                f"validity interval does not bracket archival datetime "
                f"for {self.uri_m}")

    def entry(self, archive: str | None = None) -> "MementoEntry":
        return MementoEntry(self.uri_m, self.datetime_i, self.media_type,
                            self.language, self.digest, self.validity, archive)


@dataclass(frozen=True)
class MementoEntry:
    """TimeMap metadata for one memento; no body, optionally provenance."""

    uri_m: str
    datetime_i: DatetimeStamp
    media_type: str
    language: str | None = None
    digest: str = ""
    validity: DatetimeInterval | None = None
    archive: str | None = None


@dataclass(frozen=True)
class TimeMap:
    """The full inventory for one original resource.

    Entries are sorted ascending by archival datetime (ties by URI-M) and
    the interval spans exactly the first and last entries.
    """

    uri_r: str
    uri_g: str
    uri_b: str
    mementos: tuple[MementoEntry, ...]
    interval: DatetimeInterval

    def __post_init__(self):
        if not self.mementos:
            raise InvalidRecord("a TimeMap must hold at least one memento")
        ordered = sorted(self.mementos, key=_entry_key)
        if list(self.mementos) != ordered:
            object.__setattr__(self, "mementos", tuple(ordered))
        stamps = [m.datetime_i for m in self.mementos]
        span = DatetimeInterval(min(stamps), max(stamps))
        if self.interval != span:
            object.__setattr__(self, "interval", span)


def _entry_key(entry: MementoEntry) -> tuple[int, str]:
    return (entry.datetime_i.seconds, entry.uri_m)


def build_timemap(uri_r: str, uri_g: str, uri_b: str,
                  entries: list[MementoEntry]) -> TimeMap:
    ordered = tuple(sorted(entries, key=_entry_key))
    stamps = [m.datetime_i for m in ordered]
    return TimeMap(uri_r, uri_g, uri_b, ordered,
                   DatetimeInterval(min(stamps), max(stamps)))


# --- JSON document ------------------------------------------------------

def _interval_to_json(interval: DatetimeInterval) -> dict:
    return {"from": format_http_date(interval.from_),
            "until": format_http_date(interval.until)}


def _interval_from_json(obj: dict) -> DatetimeInterval:
    return DatetimeInterval(parse_http_date(obj["from"]),
                            parse_http_date(obj["until"]))


def timemap_to_json(timemap: TimeMap) -> dict:
    """Render the TimeMap document; key set is part of the wire contract."""
    mementos = []
    for m in timemap.mementos:
        entry = {
            "uri": m.uri_m,
            "datetime": format_http_date(m.datetime_i),
            "media_type": m.media_type,
            "language": m.language,
            "digest": m.digest,
            "validity": _interval_to_json(m.validity) if m.validity else None,
        }
        if m.archive is not None:
            entry["archive"] = m.archive
        mementos.append(entry)
    return {
        "original": timemap.uri_r,
        "timegate": timemap.uri_g,
        "timebundle": timemap.uri_b,
        "archive_interval": _interval_to_json(timemap.interval),
        "digest_algorithm": DIGEST_ALGORITHM,
        "mementos": mementos,
    }


def timemap_from_json(doc: dict) -> TimeMap:
    try:
        entries = [
            MementoEntry(
                uri_m=m["uri"],
                datetime_i=parse_http_date(m["datetime"]),
                media_type=m["media_type"],
                language=m["language"],
                digest=m["digest"],
                validity=_interval_from_json(m["validity"]) if m["validity"] else None,
                archive=m.get("archive"),
            )
            for m in doc["mementos"]
        ]
        timemap = TimeMap(
            uri_r=doc["original"],
            uri_g=doc["timegate"],
            uri_b=doc["timebundle"],
            mementos=tuple(entries),
            interval=_interval_from_json(doc["archive_interval"]),
        )
    except (KeyError, TypeError) as exc:
        raise MalformedResponse(f"not a TimeMap document: {exc}") from exc
    return timemap


def timemap_body(timemap: TimeMap) -> bytes:
    return json.dumps(timemap_to_json(timemap), indent=1).encode()


def parse_timemap_body(body: bytes) -> TimeMap:
    try:
        doc = json.loads(body.decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedResponse(f"TimeMap body is not JSON: {exc}") from exc
    return timemap_from_json(doc)
