"""Grammar for the temporal negotiation headers.

Covers the request side (X-Accept-Datetime, Accept, Accept-Language,
Negotiate) and the response side (Alternates with a datetime attribute,
X-Archive-Interval / X-Datetime-Validity, Link rel="timebundle").

Every parser has a matching serializer and ``parse(serialize(x)) == x``
holds exactly; serializers emit one canonical spelling. HTTP-dates embed
commas, so list grammars brace each date: ``{Sun, 06 Nov 1994 08:49:37
GMT};q=0.8, {...}``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyHeader, InvertedInterval, MalformedHeader
from .httpdate import DatetimeStamp, format_http_date, parse_http_date

# Header names used on the wire, bit-exact.
X_ACCEPT_DATETIME = "X-Accept-Datetime"
ALTERNATES = "Alternates"
X_ARCHIVE_INTERVAL = "X-Archive-Interval"
X_DATETIME_VALIDITY = "X-Datetime-Validity"
TCN = "TCN"
VARY = "Vary"
NEGOTIATE = "Negotiate"
LINK = "Link"
CONTENT_LOCATION = "Content-Location"
LOCATION = "Location"


@dataclass(frozen=True, order=True)
class QualityValue:
    """A preference weight in [0, 1] with at most three decimal digits.

    Stored as integer thousandths so parsing and arithmetic are exact.
    """

    millis: int

    def __post_init__(self):
        if not 0 <= self.millis <= 1000:
            raise MalformedHeader(f"q out of range: {self.millis / 1000}")

    @classmethod
    def of(cls, q: float) -> "QualityValue":
        return cls(round(q * 1000))

    @property
    def value(self) -> float:
        return self.millis / 1000.0

    def __str__(self) -> str:
        return format_qvalue(self)


Q_DEFAULT = QualityValue(1000)
Q_ZERO = QualityValue(0)


def parse_qvalue(text: str) -> QualityValue:
    text = text.strip()
    head, dot, frac = text.partition(".")
    if head not in ("0", "1") or (dot and not frac) or len(frac) > 3:
        raise MalformedHeader(f"bad q-value: {text!r}")
    if frac and not frac.isdigit():
        raise MalformedHeader(f"bad q-value: {text!r}")
    millis = int(head) * 1000 + int(frac.ljust(3, "0")) if frac else int(head) * 1000
    if millis > 1000:
        raise MalformedHeader(f"q above 1.0: {text!r}")
    return QualityValue(millis)


def format_qvalue(q: QualityValue) -> str:
    if q.millis == 1000:
        return "1.0"
    frac = f"{q.millis:03d}".rstrip("0") or "0"
    return f"0.{frac}"


@dataclass(frozen=True)
class DatetimePreference:
    datetime: DatetimeStamp
    quality: QualityValue = Q_DEFAULT


@dataclass(frozen=True)
class DatetimeInterval:
    """A closed datetime interval; from_ <= until enforced at construction."""

    from_: DatetimeStamp
    until: DatetimeStamp

    def __post_init__(self):
        if self.from_ > self.until:
            raise InvertedInterval(
                f"interval from {format_http_date(self.from_)} "
                f"after {format_http_date(self.until)}")

    def contains(self, stamp: DatetimeStamp) -> bool:
        return self.from_ <= stamp <= self.until


@dataclass(frozen=True)
class VariantDescriptor:
    """One entry of an Alternates list."""

    uri: str
    source_quality: QualityValue = Q_DEFAULT
    media_type: str | None = None
    language: str | None = None
    datetime: DatetimeStamp | None = None

    def __post_init__(self):
        if not self.uri:
            raise MalformedHeader("variant URI must be non-empty")


@dataclass(frozen=True)
class NegotiationRequest:
    """Parsed client preferences across every negotiated dimension.

    Empty type/language preference lists mean any value is acceptable at
    q=1.0; an empty datetime list means the client sent no
    X-Accept-Datetime header.
    """

    datetime_prefs: tuple[DatetimePreference, ...] = ()
    type_prefs: tuple[tuple[str, QualityValue], ...] = ()
    language_prefs: tuple[tuple[str, QualityValue], ...] = ()
    force_list: bool = False


# --- X-Accept-Datetime ------------------------------------------------

def parse_accept_datetime(header_value: str) -> list[DatetimePreference]:
    """Parse ``{HTTP-date}[;q=val]`` items, comma-separated.

    Braces delimit each date because HTTP-dates contain commas. A missing
    q defaults to 1.0.
    """
    if header_value is None or not header_value.strip():
        raise EmptyHeader("X-Accept-Datetime is empty")
    prefs = []
    rest = header_value.strip()
    while rest:
        if not rest.startswith("{"):
            raise MalformedHeader(f"expected '{{' at: {rest!r}")
        end = rest.find("}")
        if end < 0:
            raise MalformedHeader(f"unbalanced braces in: {header_value!r}")
        stamp = parse_http_date(rest[1:end])
        rest = rest[end + 1:].lstrip()
        quality = Q_DEFAULT
        if rest.startswith(";"):
            rest = rest[1:].lstrip()
            if not rest.startswith("q="):
                raise MalformedHeader(f"expected q= at: {rest!r}")
            comma = rest.find(",")
            qtext = rest[2:] if comma < 0 else rest[2:comma]
            quality = parse_qvalue(qtext)
            rest = "" if comma < 0 else rest[comma:]
        prefs.append(DatetimePreference(stamp, quality))
        if rest.startswith(","):
            rest = rest[1:].lstrip()
            if not rest:
                raise MalformedHeader("trailing comma in X-Accept-Datetime")
        elif rest:
            raise MalformedHeader(f"unexpected text: {rest!r}")
    return prefs


def serialize_accept_datetime(prefs: list[DatetimePreference]) -> str:
    if not prefs:
        raise EmptyHeader("cannot serialize an empty preference list")
    items = []
    for pref in prefs:
        item = "{" + format_http_date(pref.datetime) + "}"
        if pref.quality != Q_DEFAULT:
            item += f";q={format_qvalue(pref.quality)}"
        items.append(item)
    return ", ".join(items)


# --- Alternates -------------------------------------------------------

class _Cursor:
    """Tiny scanner over a header value; parse errors carry position."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise MalformedHeader(
                f"expected {ch!r} at offset {self.pos} in {self.text!r}")
        self.pos += 1

    def quoted(self) -> str:
        self.expect('"')
        end = self.text.find('"', self.pos)
        if end < 0:
            raise MalformedHeader(f"unterminated string in {self.text!r}")
        value = self.text[self.pos:end]
        self.pos = end + 1
        return value

    def token(self) -> str:
        start = self.pos
        while not self.eof() and self.text[self.pos] not in ' \t\r\n{}",':
            self.pos += 1
        if self.pos == start:
            raise MalformedHeader(
                f"expected token at offset {start} in {self.text!r}")
        return self.text[start:self.pos]


def _parse_variant(cur: _Cursor) -> VariantDescriptor:
    cur.expect("{")
    cur.skip_ws()
    uri = cur.quoted()
    if not uri:
        raise MalformedHeader("variant URI must be non-empty")
    cur.skip_ws()
    quality = parse_qvalue(cur.token())
    media_type = language = None
    datetime_ = None
    cur.skip_ws()
    while cur.peek() == "{":
        cur.expect("{")
        cur.skip_ws()
        name = cur.token().lower()
        cur.skip_ws()
        if name == "datetime":
            datetime_ = parse_http_date(cur.quoted())
        elif name == "type":
            media_type = cur.token()
        elif name == "language":
            language = cur.token()
        else:
            # Unknown attribute: swallow its value, quoted or token.
            if cur.peek() == '"':
                cur.quoted()
            else:
                cur.token()
        cur.skip_ws()
        cur.expect("}")
        cur.skip_ws()
    cur.expect("}")
    return VariantDescriptor(uri, quality, media_type, language, datetime_)


def parse_alternates(header_value: str) -> list[VariantDescriptor]:
    """Parse an RFC-2295-style variant list.

    The datetime extension attribute nests a quoted HTTP-date:
    ``{"<uri-m>" 1.0 {datetime "Sun, 06 Nov 1994 08:49:37 GMT"}}``.
    """
    if header_value is None or not header_value.strip():
        raise MalformedHeader("Alternates is empty")
    cur = _Cursor(header_value)
    variants = []
    while True:
        cur.skip_ws()
        variants.append(_parse_variant(cur))
        cur.skip_ws()
        if cur.eof():
            return variants
        cur.expect(",")


def serialize_alternates(variants: list[VariantDescriptor]) -> str:
    if not variants:
        raise MalformedHeader("cannot serialize an empty variant list")
    items = []
    for v in variants:
        parts = [f'"{v.uri}"', format_qvalue(v.source_quality)]
        if v.media_type is not None:
            parts.append("{type " + v.media_type + "}")
        if v.language is not None:
            parts.append("{language " + v.language + "}")
        if v.datetime is not None:
            parts.append('{datetime "' + format_http_date(v.datetime) + '"}')
        items.append("{" + " ".join(parts) + "}")
    return ", ".join(items)


# --- X-Archive-Interval / X-Datetime-Validity -------------------------

def parse_interval(header_value: str) -> DatetimeInterval:
    """Parse ``{HTTP-date} - {HTTP-date}``; braces fence the inner commas."""
    if header_value is None or not header_value.strip():
        raise MalformedHeader("interval header is empty")
    cur = _Cursor(header_value.strip())
    cur.expect("{")
    end = cur.text.find("}", cur.pos)
    if end < 0:
        raise MalformedHeader(f"unbalanced braces in {header_value!r}")
    start_stamp = parse_http_date(cur.text[cur.pos:end])
    cur.pos = end + 1
    cur.skip_ws()
    cur.expect("-")
    cur.skip_ws()
    cur.expect("{")
    end = cur.text.find("}", cur.pos)
    if end < 0:
        raise MalformedHeader(f"unbalanced braces in {header_value!r}")
    end_stamp = parse_http_date(cur.text[cur.pos:end])
    cur.pos = end + 1
    if cur.pos != len(cur.text):
        raise MalformedHeader(f"trailing text in {header_value!r}")
    return DatetimeInterval(start_stamp, end_stamp)


def serialize_interval(interval: DatetimeInterval) -> str:
    return ("{" + format_http_date(interval.from_) + "} - {"
            + format_http_date(interval.until) + "}")


# --- Link -------------------------------------------------------------

def _split_link_values(header_value: str) -> list[str]:
    parts, depth, quoted, start = [], 0, False, 0
    for i, ch in enumerate(header_value):
        if ch == '"':
            quoted = not quoted
        elif quoted:
            continue
        elif ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(header_value[start:i])
            start = i + 1
    parts.append(header_value[start:])
    return [p.strip() for p in parts if p.strip()]


def parse_link_timebundle(header_value: str | None) -> str | None:
    """Return the first Link target carrying rel "timebundle", if any."""
    if header_value is None:
        return None
    if not header_value.strip():
        raise MalformedHeader("Link header is empty")
    for value in _split_link_values(header_value):
        if not value.startswith("<"):
            raise MalformedHeader(f"link-value missing <uri>: {value!r}")
        end = value.find(">")
        if end < 0:
            raise MalformedHeader(f"unterminated <uri> in {value!r}")
        uri = value[1:end]
        for param in value[end + 1:].split(";"):
            param = param.strip()
            if not param:
                continue
            name, _, raw = param.partition("=")
            if name.strip().lower() == "rel":
                rels = raw.strip().strip('"').lower().split()
                if "timebundle" in rels:
                    return uri
    return None


def timebundle_link(uri: str) -> str:
    return f'<{uri}>; rel="timebundle"'


# --- Accept / Accept-Language / Negotiate ------------------------------

def parse_accept_list(header_value: str) -> list[tuple[str, QualityValue]]:
    """Parse a plain ``token[;q=val]`` comma list (Accept, Accept-Language)."""
    prefs = []
    for item in header_value.split(","):
        item = item.strip()
        if not item:
            continue
        token, _, params = item.partition(";")
        token = token.strip().lower()
        if not token:
            raise MalformedHeader(f"empty token in {header_value!r}")
        quality = Q_DEFAULT
        for param in params.split(";"):
            param = param.strip()
            if param.startswith("q="):
                quality = parse_qvalue(param[2:])
        prefs.append((token, quality))
    return prefs


def parse_negotiation_request(headers) -> NegotiationRequest:
    """Build a NegotiationRequest from a header mapping.

    ``headers`` needs only a case-insensitive ``get``; both the shared
    Headers type and plain dicts with canonical names work. Raises
    MalformedHeader when X-Accept-Datetime is present but unparseable.
    """
    accept_datetime = headers.get(X_ACCEPT_DATETIME)
    datetime_prefs = ()
    if accept_datetime is not None:
        datetime_prefs = tuple(parse_accept_datetime(accept_datetime))
    type_prefs = ()
    accept = headers.get("Accept")
    if accept:
        type_prefs = tuple(parse_accept_list(accept))
    language_prefs = ()
    accept_language = headers.get("Accept-Language")
    if accept_language:
        language_prefs = tuple(parse_accept_list(accept_language))
    negotiate = headers.get(NEGOTIATE)
    force_list = bool(negotiate) and "1.0" in negotiate
    return NegotiationRequest(datetime_prefs, type_prefs, language_prefs,
                              force_list)
