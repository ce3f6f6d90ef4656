"""Datetime content negotiation for HTTP: time travel for the web.

Temporal header grammars, TimeGate variant selection, archive and
aggregator services, origin middleware, a steerable gateway client, and
a deterministic in-process simulated web to verify it all against.
"""

from .httpdate import DatetimeStamp, format_http_date, parse_http_date
from .headers import (
    DatetimeInterval,
    DatetimePreference,
    NegotiationRequest,
    QualityValue,
    VariantDescriptor,
)
from .records import MementoEntry, MementoRecord, TimeMap

__all__ = [
    "DatetimeStamp",
    "format_http_date",
    "parse_http_date",
    "DatetimeInterval",
    "DatetimePreference",
    "NegotiationRequest",
    "QualityValue",
    "VariantDescriptor",
    "MementoEntry",
    "MementoRecord",
    "TimeMap",
]
