"""Command-line entry points.

``travel`` runs one time-travel act (against the live web, or a scenario
fixture with --scenario), ``timemap`` prints the merged inventory, and
``serve``/``archive``/``aggregator``/``proxy`` run the services.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import HopLimitExceeded, MalformedDate, MementoError, NoMementoFound
from .gateway import GatewayConfig, TravelRequest, travel
from .headers import DatetimePreference
from .httpdate import format_http_date, parse_http_date
from .message import Request

EXIT_OK = 0
EXIT_NO_MEMENTO = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memento",
        description="Datetime-negotiated time travel for the web.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_travel = sub.add_parser("travel", help="retrieve a memento of a URI")
    p_travel.add_argument("uri")
    p_travel.add_argument("--datetime", required=True,
                          help='target instant, e.g. "Mon, 12 Oct 2009 '
                               '16:25:00 GMT"')
    p_travel.add_argument("--trace", action="store_true",
                          help="print the hop-by-hop transaction table")
    p_travel.add_argument("--raw", action="store_true",
                          help="print only the memento body")
    p_travel.add_argument("--scenario",
                          help="run inside a canned or scripted simulation")
    p_travel.add_argument("--timegate",
                          help="fallback TimeGate base (an aggregator)")
    p_travel.add_argument("--max-hops", type=int, default=8)

    p_timemap = sub.add_parser("timemap",
                               help="print the merged TimeMap for a URI")
    p_timemap.add_argument("uri")
    p_timemap.add_argument("--scenario")
    p_timemap.add_argument("--aggregator",
                           help="aggregator base URI")

    p_serve = sub.add_parser("serve", help="run the gateway HTTP service")
    p_serve.add_argument("--config", required=True)

    p_archive = sub.add_parser("archive", help="run an archive node")
    p_archive.add_argument("--config", required=True)

    p_aggr = sub.add_parser("aggregator", help="run a TimeGate aggregator")
    p_aggr.add_argument("--config", required=True)

    p_proxy = sub.add_parser("proxy",
                             help="reverse proxy adding TimeGate redirects")
    p_proxy.add_argument("--upstream", required=True)
    p_proxy.add_argument("--policy", required=True)
    p_proxy.add_argument("--listen", default="127.0.0.1:8090")

    return parser


def _scenario_setup(scenario_ref):
    from .scenarios import load_scenario
    scenario = load_scenario(scenario_ref)
    return scenario


def _travel_command(args, parser) -> int:
    try:
        stamp = parse_http_date(args.datetime)
    except MalformedDate:
        parser.error(f"--datetime is not an HTTP-date: {args.datetime!r}")
    prefs = (DatetimePreference(stamp),)

    if args.scenario:
        scenario = _scenario_setup(args.scenario)
        transport = scenario.web
        if scenario.gateway is not None:
            config = scenario.gateway.config
        elif args.timegate:
            config = GatewayConfig(args.timegate, "http://gateway.local")
        else:
            parser.error("scenario has no gateway; pass --timegate")
        if args.timegate:
            config = replace(config, fallback_timegate_base=args.timegate)
    else:
        if not args.timegate:
            parser.error("--timegate is required outside --scenario mode")
        from .serving import HttpTransport
        transport = HttpTransport()
        config = GatewayConfig(args.timegate, "http://gateway.local")

    request = TravelRequest(args.uri, prefs, max_hops=args.max_hops)
    try:
        result = travel(request, config, transport)
    except (NoMementoFound, HopLimitExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.trace and getattr(exc, "trace", None):
            _print_trace(exc.trace)
        return EXIT_NO_MEMENTO

    if args.raw:
        sys.stdout.buffer.write(result.body)
        return EXIT_OK
    print(f"URI-M: {result.final_uri}")
    if result.memento_datetime is not None:
        print(f"Memento-Datetime: {format_http_date(result.memento_datetime)}")
    print(f"Remediated: {'yes' if result.remediated else 'no'}")
    if args.trace:
        _print_trace(result.trace)
    else:
        print()
        sys.stdout.write(result.body.decode(errors="replace"))
        if not result.body.endswith(b"\n"):
            print()
    return EXIT_OK


def _print_trace(trace) -> None:
    print()
    print(f"{'#':>2}  {'status':>6}  {'tcn':<6}  uri")
    for i, hop in enumerate(trace.hops, start=1):
        status = hop.status if hop.status else "fail"
        print(f"{i:>2}  {status:>6}  {hop.tcn or '-':<6}  {hop.uri}")
        if hop.location:
            print(f"{'':>2}  {'':>6}  {'':<6}  -> {hop.location}")


def _timemap_command(args, parser) -> int:
    if args.scenario:
        scenario = _scenario_setup(args.scenario)
        transport = scenario.web
        base = args.aggregator
        if base is None and scenario.aggregators:
            base = next(iter(scenario.aggregators.values())).base
        if base is None and scenario.gateway is not None:
            base = scenario.gateway.config.fallback_timegate_base
    else:
        from .serving import HttpTransport
        transport = HttpTransport()
        base = args.aggregator
    if not base:
        parser.error("--aggregator is required outside --scenario mode")
    try:
        response = transport.send(
            Request("GET", f"{base.rstrip('/')}/timemap/{args.uri}"),
            source="cli")
    except MementoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_MEMENTO
    if response.status != 200:
        print(f"error: {response.status} for {args.uri}", file=sys.stderr)
        return EXIT_NO_MEMENTO
    sys.stdout.write(response.body.decode())
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "travel":
        return _travel_command(args, parser)
    if args.command == "timemap":
        return _timemap_command(args, parser)
    from . import serving
    if args.command == "serve":
        serving.run_gateway(args.config)
    elif args.command == "archive":
        serving.run_archive(args.config)
    elif args.command == "aggregator":
        serving.run_aggregator(args.config)
    elif args.command == "proxy":
        serving.run_proxy(args.upstream, args.policy, args.listen)
    return EXIT_OK


def entrypoint() -> None:
    sys.exit(main())
