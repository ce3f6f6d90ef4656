"""A deterministic in-process web of named hosts.

Dispatch routes absolute-URI requests to registered handler objects,
simulating connection failures for vanished hosts, and records every
exchange in order. A single settable clock drives transactional
archiving, TTL caching, and timed scenario events; nothing here touches
a real socket.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ClockMovedBackwards, ConnectionFailure, UnknownHost
from .httpdate import DatetimeStamp
from .message import Handler, Headers, Request, Response, split_target


@dataclass
class SimHost:
    hostname: str
    handler: Handler
    reachable: bool = True


@dataclass(frozen=True)
class Exchange:
    source: str
    request: Request
    response: Response


FAILURE_STATUS = 0  # synthetic status recorded for unreachable targets


class SimWeb:
    """Host registry, settable clock, and append-only exchange log."""

    def __init__(self, clock: DatetimeStamp = DatetimeStamp(0)):
        self.hosts: dict[str, SimHost] = {}
        self.clock = clock
        self.exchange_log: list[Exchange] = []
        self._events: list[tuple[int, int, str, object]] = []
        self._event_seq = 0

    # -- registry ----------------------------------------------------------

    def add_host(self, hostname: str, handler: Handler,
                 reachable: bool = True) -> SimHost:
        if hostname in self.hosts:
            raise ValueError(f"hostname already registered: {hostname}")
        host = SimHost(hostname, handler, reachable)
        self.hosts[hostname] = host
        return host

    def set_reachable(self, hostname: str, flag: bool) -> None:
        if hostname not in self.hosts:
            raise UnknownHost(hostname)
        self.hosts[hostname].reachable = flag

    # -- clock and timed events ---------------------------------------------

    def now(self) -> DatetimeStamp:
        return self.clock

    def schedule(self, at: DatetimeStamp, action, description: str = "") -> None:
        """Queue a zero-argument callable to run when the clock passes at."""
        self._events.append((at.seconds, self._event_seq, description, action))
        self._event_seq += 1
        self._events.sort(key=lambda e: (e[0], e[1]))

    def advance_clock(self, to: DatetimeStamp) -> None:
        if to < self.clock:
            raise ClockMovedBackwards(
                f"clock at {self.clock.seconds} cannot move to {to.seconds}")
        due = [e for e in self._events if e[0] <= to.seconds]
        self._events = [e for e in self._events if e[0] > to.seconds]
        self.clock = to
        for _, _, _, action in due:
            action()

    # -- transport -----------------------------------------------------------

    def dispatch(self, request: Request, source: str = "client") -> Response:
        """Route one request; every attempt lands in the exchange log.

        Raises UnknownHost for unregistered hostnames and
        ConnectionFailure for vanished ones, after logging a synthetic
        status-0 exchange so traces and the log stay 1:1.
        """
        _, hostname, _ = split_target(request.uri)
        host = self.hosts.get(hostname)
        if host is None:
            self._log(source, request, _failure_response("unknown host"))
            raise UnknownHost(hostname)
        if not host.reachable:
            self._log(source, request, _failure_response("unreachable"))
            raise ConnectionFailure(hostname)
        response = host.handler(request)
        self._log(source, request, response)
        return response

    def send(self, request: Request, source: str = "client") -> Response:
        return self.dispatch(request, source)

    def _log(self, source: str, request: Request, response: Response) -> None:
        self.exchange_log.append(Exchange(source, request, response))

    def exchanges_from(self, source: str) -> list[Exchange]:
        return [e for e in self.exchange_log if e.source == source]


def _failure_response(reason: str) -> Response:
    return Response(FAILURE_STATUS, Headers({"X-Sim-Failure": reason}), b"")
