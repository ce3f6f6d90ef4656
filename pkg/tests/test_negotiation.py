"""Selection logic against an exhaustive argmax oracle."""

import random

import pytest

from memento.headers import (
    DatetimePreference,
    NegotiationRequest,
    QualityValue,
)
from memento.httpdate import DatetimeStamp, parse_http_date
from memento.negotiation import (
    DecisionKind,
    build_alternates_window,
    negotiate,
    proximity,
    score_variant,
    select_descriptor,
    select_memento,
)
from memento.records import build_timemap

from fixtures import KATRINA_DATES, NOAA, katrina_records, katrina_timemap
from gen import gen_record, gen_request

Q1 = QualityValue(1000)


def single_pref_request(date_text: str) -> NegotiationRequest:
    return NegotiationRequest(
        datetime_prefs=(DatetimePreference(parse_http_date(date_text), Q1),))


# --- independent oracle -------------------------------------------------

def oracle_score(m, req):
    if req.type_prefs:
        tq = 0.0
        if m.media_type is not None:
            for token, quality in req.type_prefs:
                if token == m.media_type.lower():
                    tq = quality.value
                    break
    else:
        tq = 1.0
    if req.language_prefs:
        lq = 0.0
        if m.language is not None:
            for token, quality in req.language_prefs:
                if token == m.language.lower():
                    lq = quality.value
                    break
    else:
        lq = 1.0
    best = 0.0
    for pref in req.datetime_prefs:
        delta = abs(pref.datetime.seconds - m.datetime_i.seconds)
        best = max(best, pref.quality.value * (1.0 / (1.0 + delta)) * tq * lq)
    return best


def oracle_select(candidates, req):
    scored = [(oracle_score(m, req), m) for m in candidates]
    positive = [(s, m) for s, m in scored if s > 0.0]
    if not positive:
        return None
    top = max(s for s, _ in positive)
    tied = [m for s, m in positive if s == top]
    tied.sort(key=lambda m: (m.datetime_i.seconds, m.uri_m))
    return tied[0]


# --- score examples -----------------------------------------------------

def test_score_exact_match_is_one():
    m = katrina_records("B")[0]
    req = single_pref_request(KATRINA_DATES["B"])
    assert score_variant(m, req) == 1.0


def test_score_one_second_off_is_half():
    m = katrina_records("B")[0]
    req = NegotiationRequest(
        datetime_prefs=(DatetimePreference(m.datetime_i.plus(1), Q1),))
    assert score_variant(m, req) == 0.5


def test_score_takes_best_preference():
    m = katrina_records("B")[0]
    req = NegotiationRequest(datetime_prefs=(
        DatetimePreference(m.datetime_i.plus(10), Q1),
        DatetimePreference(m.datetime_i, QualityValue(500)),
    ))
    assert score_variant(m, req) == max(1.0 / 11.0, 0.5) == 0.5


def test_score_type_and_language_factors():
    m = katrina_records("B")[0]  # text/html, no language
    req = NegotiationRequest(
        datetime_prefs=(DatetimePreference(m.datetime_i, Q1),),
        type_prefs=(("text/html", QualityValue(800)),))
    assert score_variant(m, req) == pytest.approx(0.8)
    vetoed = NegotiationRequest(
        datetime_prefs=(DatetimePreference(m.datetime_i, Q1),),
        type_prefs=(("application/pdf", Q1),))
    assert score_variant(m, vetoed) == 0.0
    lang_listed = NegotiationRequest(
        datetime_prefs=(DatetimePreference(m.datetime_i, Q1),),
        language_prefs=(("en", Q1),))
    # candidate has no language token: absent from a non-empty list scores 0
    assert score_variant(m, lang_listed) == 0.0


# --- selection on the hurricane coverage --------------------------------

def test_select_exact_match():
    records = katrina_records()
    winner = select_memento(records, single_pref_request(KATRINA_DATES["B"]))
    assert winner.uri_m == records[1].uri_m


def test_select_closest_in_time_midrange():
    records = katrina_records()
    req = single_pref_request("Fri, 09 Sep 2005 12:00:00 GMT")
    target = req.datetime_prefs[0].datetime
    deltas = {r.uri_m: r.datetime_i.delta(target) for r in records}
    by_delta = min(records, key=lambda r: deltas[r.uri_m])
    assert by_delta.uri_m == records[2].uri_m          # C, delta 36072 s
    assert deltas[records[2].uri_m] == 36072
    assert select_memento(records, req).uri_m == by_delta.uri_m


def test_select_before_coverage_clamps_to_first():
    records = katrina_records()
    req = single_pref_request("Thu, 01 Sep 2005 00:00:00 GMT")
    target = req.datetime_prefs[0].datetime
    by_delta = min(records, key=lambda r: r.datetime_i.delta(target))
    assert by_delta.uri_m == records[0].uri_m
    assert select_memento(records, req).uri_m == records[0].uri_m


def test_select_empty_candidates():
    assert select_memento([], single_pref_request(KATRINA_DATES["A"])) is None


def test_select_all_vetoed_returns_none():
    records = katrina_records()
    req = NegotiationRequest(
        datetime_prefs=(DatetimePreference(records[0].datetime_i, Q1),),
        type_prefs=(("application/pdf", Q1),))
    assert select_memento(records, req) is None


def test_select_agrees_with_exhaustive_oracle_500():
    rng = random.Random(0x5E1EC7)
    for _ in range(500):
        uri_r = "http://site.example/page"
        candidates = [gen_record(rng, uri_r) for _ in range(rng.randint(1, 50))]
        req = gen_request(rng, lo=900_000_000, hi=1_400_000_000)
        expected = oracle_select(candidates, req)
        actual = select_memento(candidates, req)
        if expected is None:
            assert actual is None
        else:
            assert actual.uri_m == expected.uri_m


def test_single_datetime_winner_invariant_under_proximity_swap():
    rng = random.Random(0x90B0)
    alternative = lambda d: 1.0 / (7.0 + d)
    for _ in range(200):
        candidates = [gen_record(rng, "http://s.example/p")
                      for _ in range(rng.randint(1, 30))]
        stamp = DatetimeStamp(rng.randrange(900_000_000, 1_400_000_000))
        req = NegotiationRequest(datetime_prefs=(DatetimePreference(stamp, Q1),))
        default_winner = select_memento(candidates, req)
        swapped_winner = select_memento(candidates, req, proximity_fn=alternative)
        assert default_winner.uri_m == swapped_winner.uri_m
        closest = min(candidates,
                      key=lambda m: (m.datetime_i.delta(stamp),
                                     m.datetime_i.seconds, m.uri_m))
        assert default_winner.uri_m == closest.uri_m


def test_out_of_range_requests_clamp_to_boundaries():
    rng = random.Random(0xC1A)
    for _ in range(100):
        candidates = [gen_record(rng, "http://s.example/p")
                      for _ in range(rng.randint(2, 20))]
        ordered = sorted(candidates, key=lambda m: (m.datetime_i.seconds, m.uri_m))
        lo, hi = ordered[0], ordered[-1]
        before = NegotiationRequest(datetime_prefs=(
            DatetimePreference(DatetimeStamp(lo.datetime_i.seconds - 10_000), Q1),))
        after = NegotiationRequest(datetime_prefs=(
            DatetimePreference(DatetimeStamp(hi.datetime_i.seconds + 10_000), Q1),))
        assert select_memento(candidates, before).datetime_i == lo.datetime_i
        assert select_memento(candidates, after).datetime_i == hi.datetime_i


def test_selection_deterministic_under_shuffle():
    rng = random.Random(0xDE7)
    candidates = [gen_record(rng, "http://s.example/p") for _ in range(25)]
    req = gen_request(rng, lo=900_000_000, hi=1_400_000_000)
    baseline = select_memento(candidates, req)
    for _ in range(20):
        shuffled = candidates[:]
        rng.shuffle(shuffled)
        again = select_memento(shuffled, req)
        assert (again is None) == (baseline is None)
        if baseline is not None:
            assert again.uri_m == baseline.uri_m


# --- alternates window ----------------------------------------------------

def evenly_spaced_timemap(n, step=1000):
    records = []
    for i in range(n):
        stamp = DatetimeStamp(1_000_000_000 + i * step)
        from memento.records import MementoRecord
        records.append(MementoRecord(
            uri_m=f"http://arc.example/memento/{i:02d}/http://s.example/p",
            uri_r="http://s.example/p",
            datetime_i=stamp, created=stamp,
            media_type="text/html", body=f"v{i}".encode()))
    return build_timemap("http://s.example/p", "g", "b",
                         [r.entry() for r in records])


def test_window_smaller_than_k_lists_all():
    timemap = katrina_timemap()
    window = build_alternates_window(timemap, timemap.mementos[1], k=3)
    assert [w.uri for w in window] == [m.uri_m for m in timemap.mementos]


def test_window_centered_interior():
    timemap = evenly_spaced_timemap(10)
    window = build_alternates_window(timemap, timemap.mementos[5], k=3)
    expected = [m.uri_m for m in timemap.mementos[2:9]]
    assert [w.uri for w in window] == expected


def test_window_at_left_edge():
    timemap = evenly_spaced_timemap(10)
    window = build_alternates_window(timemap, timemap.mementos[0], k=3)
    expected = [m.uri_m for m in timemap.mementos[0:4]]
    assert [w.uri for w in window] == expected


def test_window_source_quality_is_clamped_proximity():
    timemap = evenly_spaced_timemap(4, step=1)
    window = build_alternates_window(timemap, timemap.mementos[0], k=3)
    assert [w.source_quality.millis for w in window] == [1000, 500, 333, 250]
    far = evenly_spaced_timemap(2, step=10_000_000)
    window = build_alternates_window(far, far.mementos[0], k=3)
    assert window[1].source_quality.millis == 1  # clamped floor


def test_window_soundness_property():
    rng = random.Random(0x77)
    for _ in range(50):
        n = rng.randint(1, 30)
        timemap = evenly_spaced_timemap(n, step=rng.randint(1, 99999))
        k = rng.randint(0, 6)
        idx = rng.randrange(n)
        chosen = timemap.mementos[idx]
        window = build_alternates_window(timemap, chosen, k=k)
        uris = [w.uri for w in window]
        assert chosen.uri_m in uris
        all_uris = [m.uri_m for m in timemap.mementos]
        assert set(uris) <= set(all_uris)
        stamps = [w.datetime.seconds for w in window]
        assert stamps == sorted(stamps)
        assert uris == all_uris[max(0, idx - k):idx + k + 1]


# --- negotiate -------------------------------------------------------------

def test_negotiate_choice_with_window():
    timemap = katrina_timemap()
    headers = {"X-Accept-Datetime": "{Fri, 09 Sep 2005 12:00:00 GMT}"}
    decision = negotiate(timemap, headers)
    assert decision.kind is DecisionKind.CHOICE
    assert decision.chosen.uri_m == timemap.mementos[2].uri_m
    assert len(decision.alternates_window) == 4
    assert decision.archive_interval == timemap.interval
    assert decision.chosen.uri_m in [w.uri for w in decision.alternates_window]


def test_negotiate_force_list():
    timemap = katrina_timemap()
    headers = {"X-Accept-Datetime": "{Fri, 09 Sep 2005 12:00:00 GMT}",
               "Negotiate": "1.0"}
    decision = negotiate(timemap, headers)
    assert decision.kind is DecisionKind.LIST
    assert decision.chosen is None
    assert len(decision.alternates_window) == 4


def test_negotiate_unparseable_datetime_is_bad_request():
    timemap = katrina_timemap()
    decision = negotiate(timemap, {"X-Accept-Datetime": "{garbage}"})
    assert decision.kind is DecisionKind.BAD_REQUEST
    assert decision.chosen is None
    assert decision.alternates_window


def test_negotiate_vetoed_type_is_not_acceptable():
    timemap = katrina_timemap()
    headers = {"X-Accept-Datetime": "{Fri, 09 Sep 2005 12:00:00 GMT}",
               "Accept": "application/pdf"}
    decision = negotiate(timemap, headers)
    assert decision.kind is DecisionKind.NOT_ACCEPTABLE
    assert decision.chosen is None
    assert decision.alternates_window


def test_negotiate_without_datetime_chooses_most_recent():
    timemap = katrina_timemap()
    decision = negotiate(timemap, {})
    assert decision.kind is DecisionKind.CHOICE
    assert decision.chosen.datetime_i == timemap.interval.until


def test_negotiate_repeated_identical():
    timemap = katrina_timemap()
    headers = {"X-Accept-Datetime": "{Fri, 09 Sep 2005 12:00:00 GMT}"}
    first = negotiate(timemap, headers)
    second = negotiate(timemap, headers)
    assert first == second


# --- client-side descriptor selection --------------------------------------

def test_select_descriptor_prefers_closest():
    timemap = katrina_timemap()
    window = build_alternates_window(timemap, timemap.mementos[2], k=3)
    prefs = (DatetimePreference(parse_http_date("Fri, 09 Sep 2005 12:00:00 GMT"), Q1),)
    best = select_descriptor(window, prefs)
    assert best.uri == timemap.mementos[2].uri_m


def test_select_descriptor_skips_zero_quality():
    timemap = katrina_timemap()
    window = build_alternates_window(timemap, timemap.mementos[2], k=3)
    prefs = (DatetimePreference(parse_http_date(KATRINA_DATES["A"]), Q1),)
    assert select_descriptor(window, prefs).uri == timemap.mementos[0].uri_m
    assert select_descriptor([], prefs) is None
