"""Harvest, merge, TTL caching, and cross-archive negotiation."""

import random

import pytest

from memento.aggregator import (
    Aggregator,
    ArchiveRegistry,
    merge_timemaps,
    tag_provenance,
)
from memento.archive import ArchiveNode
from memento.errors import AllArchivesEmpty, MixedOriginals
from memento.httpdate import DatetimeStamp, parse_http_date
from memento.message import Headers, Request
from memento.netsim import SimWeb
from memento.records import parse_timemap_body

from fixtures import (
    ARCHIVE_HOSTS,
    KATRINA_DATES,
    NOAA,
    katrina_record,
    katrina_records,
    katrina_timemap,
)
from gen import gen_record

REGISTRY = ArchiveRegistry(archives=(
    ("archive-it", "http://archive-it.example"),
    ("internet-archive", "http://internet-archive.example"),
), harvest_ttl=300)


def katrina_web(clock=DatetimeStamp(1_257_178_000)):
    """Two archives holding the A/D and B/C split, plus the aggregator."""
    web = SimWeb(clock=clock)
    nodes = {}
    for archive_id, base in REGISTRY.archives:
        node = ArchiveNode(base)
        hostname = base.removeprefix("http://")
        web.add_host(hostname, node)
        nodes[archive_id] = node
    for label in "AD":
        nodes["archive-it"].store.put_memento(katrina_record(label))
    for label in "BC":
        nodes["internet-archive"].store.put_memento(katrina_record(label))
    aggregator = Aggregator("http://aggr.example", REGISTRY, web, web.now)
    web.add_host("aggr.example", aggregator)
    return web, aggregator, nodes


def timegate(web, date_text, extra=None):
    headers = Headers({"X-Accept-Datetime": "{%s}" % date_text})
    for name, value in (extra or {}).items():
        headers.set(name, value)
    return web.dispatch(Request("GET", f"http://aggr.example/timegate/{NOAA}",
                                headers))


# --- harvest and merge ---------------------------------------------------------

def test_harvest_merges_split_coverage_with_provenance():
    _, aggregator, _ = katrina_web()
    merged = aggregator.harvest(NOAA)
    assert [m.datetime_i for m in merged.mementos] == [
        parse_http_date(KATRINA_DATES[label]) for label in "ABCD"]
    assert [m.archive for m in merged.mementos] == [
        "archive-it", "internet-archive", "internet-archive", "archive-it"]


def test_harvest_skips_offline_archive():
    web, aggregator, _ = katrina_web()
    web.set_reachable("internet-archive.example", False)
    merged, sources = aggregator.harvest_with_sources(NOAA)
    assert [m.archive for m in merged.mementos] == ["archive-it", "archive-it"]
    assert dict(sources) == {"archive-it": "ok", "internet-archive": "fail"}


def test_harvest_all_empty_raises():
    _, aggregator, _ = katrina_web()
    with pytest.raises(AllArchivesEmpty):
        aggregator.harvest("http://nobody-has-this.example/")


def test_harvest_reports_empty_archives():
    _, aggregator, nodes = katrina_web()
    other = "http://only-one-archive.example/"
    nodes["archive-it"].store.put_memento(
        gen_record(random.Random(3), other))
    merged, sources = aggregator.harvest_with_sources(other)
    assert dict(sources) == {"archive-it": "ok", "internet-archive": "empty"}
    assert len(merged.mementos) == 1


def test_harvest_dedups_identical_uri_m():
    web, aggregator, nodes = katrina_web()
    # the same memento pushed to both archives keeps one merged entry
    nodes["internet-archive"].store.put_memento(katrina_record("A"))
    merged = aggregator.harvest(NOAA)
    uris = [m.uri_m for m in merged.mementos]
    assert len(uris) == len(set(uris)) == 4
    (entry,) = [m for m in merged.mementos
                if m.uri_m == katrina_record("A").uri_m]
    assert entry.archive == "archive-it"  # registry order wins the conflict


def test_merge_with_identity_and_conflicts():
    left = tag_provenance(katrina_timemap("AD"), "archive-it")
    right = tag_provenance(katrina_timemap("BC"), "internet-archive")
    merged = merge_timemaps([left, right])
    assert [m.datetime_i for m in merged.mementos] == [
        parse_http_date(KATRINA_DATES[label]) for label in "ABCD"]
    assert merge_timemaps([left]).mementos == left.mementos
    assert merge_timemaps([left, left]).mementos == left.mementos
    both = merge_timemaps([left, right])
    flipped = merge_timemaps([right, left])
    assert {m.uri_m for m in both.mementos} == {m.uri_m for m in flipped.mementos}


def test_merge_rejects_mixed_originals():
    other = katrina_timemap("AB")
    different = tag_provenance(
        katrina_timemap("CD"), "x")
    object.__setattr__(different, "uri_r", "http://other.example/")
    with pytest.raises(MixedOriginals):
        merge_timemaps([other, different])


# --- aggregated endpoints ----------------------------------------------------

def test_aggregated_timegate_chooses_across_archives():
    web, _, _ = katrina_web()
    resp = timegate(web, "Fri, 09 Sep 2005 12:00:00 GMT")
    assert resp.status == 302
    assert resp.headers.get("Location") == katrina_record("C").uri_m
    assert "internet-archive.example" in resp.headers.get("Location")
    assert resp.headers.get("X-Aggregator-Sources") == \
        "archive-it=ok, internet-archive=ok"


def test_aggregated_timegate_fine_granularity_beats_coarse():
    web, _, _ = katrina_web()
    resp = timegate(web, "Fri, 09 Sep 2005 02:00:00 GMT")
    # C is 72 s away; B alone would be 17575 s
    assert resp.headers.get("Location") == katrina_record("C").uri_m


def test_aggregated_timegate_exact_match_on_other_archive():
    web, _, _ = katrina_web()
    resp = timegate(web, KATRINA_DATES["A"])
    assert resp.headers.get("Location") == katrina_record("A").uri_m
    assert "archive-it.example" in resp.headers.get("Location")


def test_aggregator_serves_no_bodies():
    web, _, _ = katrina_web()
    resp = timegate(web, KATRINA_DATES["A"])
    location = resp.headers.get("Location")
    assert "aggr.example" not in location
    follow = web.dispatch(Request("GET", location))
    assert follow.status == 200
    assert follow.body == katrina_record("A").body
    miss = web.dispatch(Request("GET", f"http://aggr.example/memento/x/{NOAA}"))
    assert miss.status == 404


def test_aggregated_timebundle_and_timemap():
    web, _, _ = katrina_web()
    bundle = web.dispatch(
        Request("GET", f"http://aggr.example/timebundle/{NOAA}"))
    assert bundle.status == 303
    doc = web.dispatch(Request("GET", bundle.headers.get("Location")))
    assert doc.status == 200
    merged = parse_timemap_body(doc.body)
    assert len(merged.mementos) == 4
    assert merged.uri_g == f"http://aggr.example/timegate/{NOAA}"
    unknown = web.dispatch(
        Request("GET", "http://aggr.example/timebundle/http://none.example/"))
    assert unknown.status == 404


def test_aggregated_timegate_propagates_bad_request():
    web, _, _ = katrina_web()
    headers = Headers({"X-Accept-Datetime": "{garbage}"})
    resp = web.dispatch(Request(
        "GET", f"http://aggr.example/timegate/{NOAA}", headers))
    assert resp.status == 400


# --- TTL cache ----------------------------------------------------------------

def upstream_requests(web):
    return [e for e in web.exchange_log if e.source == "aggregator"]


def test_cache_suppresses_upstream_within_ttl():
    web, aggregator, _ = katrina_web()
    aggregator.harvest(NOAA)
    first_count = len(upstream_requests(web))
    assert first_count == 4  # two archives x (303 + timemap fetch)
    aggregator.harvest(NOAA)
    aggregator.harvest(NOAA)
    assert len(upstream_requests(web)) == first_count


def test_cache_expires_after_ttl():
    web, aggregator, _ = katrina_web()
    aggregator.harvest(NOAA)
    first_count = len(upstream_requests(web))
    web.advance_clock(DatetimeStamp(web.clock.seconds + REGISTRY.harvest_ttl + 1))
    aggregator.harvest(NOAA)
    assert len(upstream_requests(web)) == first_count * 2


def test_cache_reflects_archive_updates_after_expiry():
    web, aggregator, nodes = katrina_web()
    assert len(aggregator.harvest(NOAA).mementos) == 4
    extra = gen_record(random.Random(1), NOAA,
                       base=parse_http_date(KATRINA_DATES["D"]).seconds + 50)
    nodes["archive-it"].store.put_memento(extra)
    assert len(aggregator.harvest(NOAA).mementos) == 4  # still cached
    web.advance_clock(DatetimeStamp(web.clock.seconds + 301))
    assert len(aggregator.harvest(NOAA).mementos) == 5


# --- granularity dominance ------------------------------------------------------

def test_granularity_dominance_on_random_topologies():
    rng = random.Random(0x6D0)
    for _ in range(20):
        web = SimWeb(clock=DatetimeStamp(1_300_000_000))
        registry_entries = []
        nodes = []
        for i in range(rng.randint(2, 4)):
            base = f"http://arc{i}.example"
            node = ArchiveNode(base)
            web.add_host(f"arc{i}.example", node)
            registry_entries.append((f"arc{i}", base))
            nodes.append(node)
        uri_r = "http://site.example/page"
        for node in nodes:
            for _ in range(rng.randint(1, 8)):
                node.store.put_memento(gen_record(rng, uri_r))
        registry = ArchiveRegistry(tuple(registry_entries))
        aggregator = Aggregator("http://aggr.example", registry, web, web.now)
        merged = aggregator.harvest(uri_r)
        for _ in range(5):
            target = DatetimeStamp(rng.randrange(900_000_000, 1_400_000_000))
            merged_best = min(m.datetime_i.delta(target)
                              for m in merged.mementos)
            for node in nodes:
                solo = [r.datetime_i.delta(target)
                        for r in node.store.mementos_for(uri_r)]
                assert merged_best <= min(solo)
