"""Variant selection in the datetime dimension.

The datetime axis composes multiplicatively with the media-type and
language axes: each candidate scores

    max over prefs i of  q_i * proximity(|t_i - t_m|) * tq * lq

with proximity(d) = 1 / (1 + d seconds). An unacceptable dimension
(q = 0, or a value missing from a non-empty Accept list) vetoes the
candidate; acceptable-but-dispreferred values merely scale it. For a
single datetime preference this reduces to plain closest-in-time,
whatever strictly decreasing proximity is used.

Candidates with a validity interval that covers a requested datetime are
preferred outright: an archive that knows exactly when a representation
was live answers from that knowledge, proximity only breaks the rest.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

from .errors import MalformedHeader
from .headers import (
    DatetimeInterval,
    DatetimePreference,
    NegotiationRequest,
    QualityValue,
    VariantDescriptor,
    parse_negotiation_request,
)
from .records import MementoEntry, TimeMap

ProximityFn = Callable[[int], float]


def proximity(delta_seconds: int) -> float:
    """Default closeness weight; strictly decreasing, 1.0 at an exact hit."""
    return 1.0 / (1.0 + delta_seconds)


def _dimension_quality(value: str | None,
                       prefs: Sequence[tuple[str, QualityValue]]) -> float:
    if not prefs:
        return 1.0
    if value is None:
        return 0.0
    lowered = value.lower()
    for token, quality in prefs:
        if token == lowered:
            return quality.value
    return 0.0


def score_variant(m, req: NegotiationRequest,
                  proximity_fn: ProximityFn = proximity) -> float:
    """Score one candidate against the request; total, in [0, 1].

    ``m`` needs datetime_i, media_type and language attributes, so both
    full MementoRecords and TimeMap entries qualify.
    """
    tq = _dimension_quality(m.media_type, req.type_prefs)
    lq = _dimension_quality(m.language, req.language_prefs)
    if tq == 0.0 or lq == 0.0:
        return 0.0
    best = 0.0
    for pref in req.datetime_prefs:
        score = (pref.quality.value
                 * proximity_fn(pref.datetime.delta(m.datetime_i))
                 * tq * lq)
        if score > best:
            best = score
    return best


def _covers_requested(m, req: NegotiationRequest) -> bool:
    if m.validity is None:
        return False
    return any(pref.quality.millis > 0 and m.validity.contains(pref.datetime)
               for pref in req.datetime_prefs)


def select_memento(candidates: Iterable, req: NegotiationRequest,
                   proximity_fn: ProximityFn = proximity):
    """Pick the best-scoring candidate, or None when nothing is acceptable.

    Ties break toward the earlier archival datetime, then the smaller
    URI-M, so selection is deterministic regardless of input order.
    Candidates whose validity interval contains a requested datetime are
    considered first.
    """
    scored = [(score_variant(m, req, proximity_fn), m) for m in candidates]
    covering = [(s, m) for s, m in scored if s > 0.0 and _covers_requested(m, req)]
    pool = covering or [(s, m) for s, m in scored if s > 0.0]
    winner = None
    winner_key = None
    for score, m in pool:
        key = (-score, m.datetime_i.seconds, m.uri_m)
        if winner is None or key < winner_key:
            winner, winner_key = m, key
    return winner


class DecisionKind(Enum):
    CHOICE = "choice"
    LIST = "list"
    NOT_ACCEPTABLE = "not_acceptable"
    BAD_REQUEST = "bad_request"


@dataclass(frozen=True)
class NegotiationDecision:
    kind: DecisionKind
    chosen: MementoEntry | None
    alternates_window: tuple[VariantDescriptor, ...]
    archive_interval: DatetimeInterval | None


def descriptor_for(entry: MementoEntry, center, proximity_fn: ProximityFn = proximity) -> VariantDescriptor:
    closeness = proximity_fn(entry.datetime_i.delta(center.datetime_i))
    millis = max(1, min(1000, round(closeness * 1000)))
    return VariantDescriptor(
        uri=entry.uri_m,
        source_quality=QualityValue(millis),
        media_type=entry.media_type,
        language=entry.language,
        datetime=entry.datetime_i,
    )


def build_alternates_window(timemap: TimeMap, chosen, k: int = 3,
                            proximity_fn: ProximityFn = proximity) -> list[VariantDescriptor]:
    """List the chosen memento plus at most k neighbours on each side.

    Descriptors come back sorted ascending by datetime; each one's source
    quality is its proximity to the chosen memento, rounded to three
    decimals and clamped into [0.001, 1.0] so it stays an acceptable q.
    """
    uris = [m.uri_m for m in timemap.mementos]
    centre = uris.index(chosen.uri_m)
    lo = max(0, centre - k)
    window = timemap.mementos[lo:centre + k + 1]
    return [descriptor_for(m, chosen, proximity_fn) for m in window]


def _datetime_only(req: NegotiationRequest) -> NegotiationRequest:
    prefs = tuple(p for p in req.datetime_prefs if p.quality.millis > 0)
    return NegotiationRequest(datetime_prefs=prefs)


def negotiate(timemap: TimeMap, raw_headers, k: int = 3,
              proximity_fn: ProximityFn = proximity) -> NegotiationDecision:
    """Run the full datetime negotiation for one TimeGate request.

    BadRequest when X-Accept-Datetime is present but unparseable; List on
    an explicit ``Negotiate: 1.0``; NotAcceptable when every candidate is
    vetoed; Choice otherwise. A request without any datetime preference
    negotiates for the most recent memento. Every decision carries the
    alternates window and the archive interval.
    """
    latest = timemap.mementos[-1]
    try:
        req = parse_negotiation_request(raw_headers)
    except MalformedHeader:
        window = build_alternates_window(timemap, latest, k, proximity_fn)
        return NegotiationDecision(DecisionKind.BAD_REQUEST, None,
                                   tuple(window), timemap.interval)
    if not req.datetime_prefs:
        req = NegotiationRequest(
            datetime_prefs=(DatetimePreference(timemap.interval.until),),
            type_prefs=req.type_prefs,
            language_prefs=req.language_prefs,
            force_list=req.force_list,
        )
    winner = select_memento(timemap.mementos, req, proximity_fn)
    centre = winner
    if centre is None:
        centre = select_memento(timemap.mementos, _datetime_only(req),
                                proximity_fn) or latest
    window = tuple(build_alternates_window(timemap, centre, k, proximity_fn))
    if req.force_list:
        return NegotiationDecision(DecisionKind.LIST, None, window,
                                   timemap.interval)
    if winner is None:
        return NegotiationDecision(DecisionKind.NOT_ACCEPTABLE, None, window,
                                   timemap.interval)
    return NegotiationDecision(DecisionKind.CHOICE, winner, window,
                               timemap.interval)


def select_descriptor(descriptors: Sequence[VariantDescriptor],
                      prefs: Sequence[DatetimePreference],
                      proximity_fn: ProximityFn = proximity) -> VariantDescriptor | None:
    """Client-side pick from an Alternates list (300/406 handling).

    Datetime closeness to the client's own preferences decides; a zero
    source quality vetoes a descriptor, and descriptors lacking a
    datetime rank by source quality alone.
    """
    best = None
    best_key = None
    for d in descriptors:
        if d.source_quality.millis == 0:
            continue
        if d.datetime is not None and prefs:
            score = max((p.quality.value
                         * proximity_fn(p.datetime.delta(d.datetime))
                         for p in prefs), default=0.0)
        else:
            score = d.source_quality.value
        if score <= 0.0:
            continue
        stamp = d.datetime.seconds if d.datetime else 0
        key = (-score, stamp, d.uri)
        if best is None or key < best_key:
            best, best_key = d, key
    return best
