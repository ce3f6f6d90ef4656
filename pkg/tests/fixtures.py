"""Shared fixtures: the four-memento hurricane coverage used throughout.

A and D live on the archive-it node, B and C on the internet-archive
node; together they give the aggregator finer granularity than either
archive alone.
"""

from memento.httpdate import parse_http_date
from memento.records import MementoRecord, build_timemap

NOAA = "http://www.noaa.gov/"

KATRINA_DATES = {
    "A": "Thu, 08 Sep 2005 17:48:47 GMT",
    "B": "Thu, 08 Sep 2005 21:07:05 GMT",
    "C": "Fri, 09 Sep 2005 01:58:48 GMT",
    "D": "Sat, 10 Sep 2005 08:11:47 GMT",
}

KATRINA_ARCHIVES = {"A": "archive-it", "B": "internet-archive",
                    "C": "internet-archive", "D": "archive-it"}

ARCHIVE_HOSTS = {"archive-it": "http://archive-it.example",
                 "internet-archive": "http://internet-archive.example"}


def katrina_record(label: str, uri_r: str = NOAA) -> MementoRecord:
    stamp = parse_http_date(KATRINA_DATES[label])
    base = ARCHIVE_HOSTS[KATRINA_ARCHIVES[label]]
    ts = _compact(KATRINA_DATES[label])
    return MementoRecord(
        uri_m=f"{base}/memento/{ts}/{uri_r}",
        uri_r=uri_r,
        datetime_i=stamp,
        created=stamp,
        media_type="text/html",
        body=f"<html><body>noaa snapshot {label}</body></html>".encode(),
    )


def _compact(date_text: str) -> str:
    from memento.archive import compact_timestamp
    return compact_timestamp(parse_http_date(date_text))


def katrina_records(labels: str = "ABCD", uri_r: str = NOAA) -> list[MementoRecord]:
    return [katrina_record(label, uri_r) for label in labels]


def katrina_timemap(labels: str = "ABCD", base: str = "http://arc.example"):
    records = katrina_records(labels)
    return build_timemap(
        uri_r=NOAA,
        uri_g=f"{base}/timegate/{NOAA}",
        uri_b=f"{base}/timebundle/{NOAA}",
        entries=[r.entry() for r in records],
    )
