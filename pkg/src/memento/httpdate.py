"""Fixed-width GMT HTTP-date parsing and formatting.

The wire form is the classic RFC-1123 style, always in GMT and always
fixed width::

    Sun, 06 Nov 1994 08:49:37 GMT

Parsing is strict: the weekday must agree with the calendar date, the day
is two digits, and the zone is the literal ``GMT``. Anything else raises
MalformedDate. ``format_http_date(parse_http_date(text)) == text`` holds
for every accepted text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from .errors import MalformedDate

__all__ = ["DatetimeStamp", "parse_http_date", "format_http_date"]

_WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
_MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
           "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")

_HTTP_DATE_RE = re.compile(
    r"^(?P<wday>Mon|Tue|Wed|Thu|Fri|Sat|Sun), "
    r"(?P<day>\d{2}) (?P<mon>Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec) "
    r"(?P<year>\d{4}) (?P<hour>\d{2}):(?P<min>\d{2}):(?P<sec>\d{2}) GMT$"
)

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True, order=True)
class DatetimeStamp:
    """An instant with second resolution, the protocol's temporal coordinate."""

    seconds: int

    def delta(self, other: "DatetimeStamp") -> int:
        """Absolute distance to another stamp, in seconds."""
        return abs(self.seconds - other.seconds)

    def plus(self, seconds: int) -> "DatetimeStamp":
        return DatetimeStamp(self.seconds + seconds)

    def __str__(self) -> str:
        return format_http_date(self)


def parse_http_date(text: str) -> DatetimeStamp:
    """Parse a fixed-width GMT HTTP-date, validating the weekday.

    Raises MalformedDate for any deviation from the canonical form,
    including a weekday token inconsistent with the calendar date.
    """
    m = _HTTP_DATE_RE.match(text)
    if m is None:
        raise MalformedDate(f"not an HTTP-date: {text!r}")
    year = int(m.group("year"))
    month = _MONTHS.index(m.group("mon")) + 1
    day = int(m.group("day"))
    try:
        dt = datetime(year, month, day,
                      int(m.group("hour")), int(m.group("min")),
                      int(m.group("sec")), tzinfo=timezone.utc)
    except ValueError as exc:
        raise MalformedDate(f"impossible date: {text!r}") from exc
    if _WEEKDAYS[dt.weekday()] != m.group("wday"):
        raise MalformedDate(
            f"weekday {m.group('wday')} inconsistent with date: {text!r}")
    return DatetimeStamp(int((dt - _EPOCH).total_seconds()))


def format_http_date(stamp: DatetimeStamp) -> str:
    """Render the canonical fixed-width GMT text for a stamp.

    Supports any instant whose GMT year falls in 1..9999; the protocol
    only ever produces years 1970 and later.
    """
    dt = _EPOCH + timedelta(seconds=stamp.seconds)
    return (
        f"{_WEEKDAYS[dt.weekday()]}, {dt.day:02d} {_MONTHS[dt.month - 1]} "
        f"{dt.year:04d} {dt.hour:02d}:{dt.minute:02d}:{dt.second:02d} GMT"
    )
