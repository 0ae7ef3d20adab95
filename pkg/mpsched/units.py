"""Time and rate units.

All simulated time is an integer count of nanoseconds (``SimTime``) and all rates are integer
bytes per second, so event ordering never depends on float rounding.
"""

from __future__ import annotations

import math
import re

from .const import NS_PER_MS, NS_PER_SECOND, NS_PER_US

SimTime = int
"""Nanoseconds since the simulation epoch (or a signed nanosecond delta)."""

_DURATION_UNITS = {
    "ns": 1,
    "us": NS_PER_US,
    "ms": NS_PER_MS,
    "s": NS_PER_SECOND,
}

# Bits per second, except "Bps" which is already bytes.
_BANDWIDTH_UNITS = {
    "bps": 1,
    "kbps": 1_000,
    "mbps": 1_000_000,
    "gbps": 1_000_000_000,
}

_QUANTITY = re.compile(r"^\s*([+-]?\d+(?:\.\d+)?)\s*([A-Za-z]*)\s*$")


def ms(value: float) -> SimTime:
    """Convert milliseconds to SimTime.

    >>> ms(12)
    12000000
    """
    return round(value * NS_PER_MS)


def seconds(value: float) -> SimTime:
    """Convert seconds to SimTime.

    >>> seconds(3.7)
    3700000000
    """
    return round(value * NS_PER_SECOND)


def to_seconds(ticks: SimTime | float) -> float:
    """Convert SimTime (or a float nanosecond quantity) to seconds."""
    return ticks / NS_PER_SECOND


def serialization_time(size: int, bandwidth: int) -> SimTime:
    """Time to clock ``size`` bytes onto a link of ``bandwidth`` bytes/s, rounded up.

    >>> serialization_time(1000, 500_000)
    2000000
    """
    return -(-size * NS_PER_SECOND // bandwidth)


def parse_duration(text: str | int) -> SimTime:
    """Parse a signed duration such as ``10ms``, ``-10s`` or ``3.7s``; bare numbers are ns.

    >>> parse_duration("10ms")
    10000000
    >>> parse_duration("-10s")
    -10000000000
    """
    if isinstance(text, int):
        return text
    match = _QUANTITY.match(text)
    if not match:
        msg = f"not a duration: {text!r}"
        raise ValueError(msg)
    number, unit = match.groups()
    unit = unit.lower() or "ns"
    if unit not in _DURATION_UNITS:
        msg = f"unknown duration unit {unit!r} in {text!r}"
        raise ValueError(msg)
    return round(float(number) * _DURATION_UNITS[unit])


def parse_bandwidth(text: str | int) -> int:
    """Parse a link rate such as ``4Mbps`` or ``500000Bps`` into bytes per second.

    >>> parse_bandwidth("4Mbps")
    500000
    >>> parse_bandwidth("0.5Mbps")
    62500
    """
    if isinstance(text, int):
        return text
    match = _QUANTITY.match(text)
    if not match:
        msg = f"not a bandwidth: {text!r}"
        raise ValueError(msg)
    number, unit = match.groups()
    if unit == "Bps":
        return round(float(number))
    unit = unit.lower() or "bps"
    if unit not in _BANDWIDTH_UNITS:
        msg = f"unknown bandwidth unit {unit!r} in {text!r}"
        raise ValueError(msg)
    return math.floor(float(number) * _BANDWIDTH_UNITS[unit] / 8)


def mbps(value: float) -> int:
    """Megabits per second to bytes per second.

    >>> mbps(4)
    500000
    """
    return math.floor(value * 1_000_000 / 8)
