"""Unit conversion at the public boundary.

Everything inside the package runs on hours, dollars and kilometres.  A year
is 366 days and a month 30.5 days, so 2 months is 61 days and 2 years is
732 days.
"""

from __future__ import annotations

import re

HOURS_PER_DAY = 24.0
HOURS_PER_MONTH = 30.5 * HOURS_PER_DAY
HOURS_PER_YEAR = 366.0 * HOURS_PER_DAY

_DURATION = {
    "h": 1.0,
    "hr": 1.0,
    "hour": 1.0,
    "hours": 1.0,
    "d": HOURS_PER_DAY,
    "day": HOURS_PER_DAY,
    "days": HOURS_PER_DAY,
    "month": HOURS_PER_MONTH,
    "months": HOURS_PER_MONTH,
    "y": HOURS_PER_YEAR,
    "yr": HOURS_PER_YEAR,
    "year": HOURS_PER_YEAR,
    "years": HOURS_PER_YEAR,
}
_LENGTH = {"km": 1.0, "m": 1e-3}
_SPEED = {"km/h": 1.0, "kmh": 1.0, "kph": 1.0}
_MONEY = {"$": 1.0, "usd": 1.0}
_RATE = {"$/h": 1.0, "usd/h": 1.0}
_COST_KM = {"$/km": 1.0, "usd/km": 1.0}

DIMENSIONS = {
    "duration": _DURATION,
    "length": _LENGTH,
    "speed": _SPEED,
    "money": _MONEY,
    "rate": _RATE,
    "cost_per_km": _COST_KM,
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


class UnitError(ValueError):
    """A value carried a unit of the wrong dimension or an unknown unit."""


def parse_quantity(value, dimension: str) -> float:
    """Convert ``value`` to the canonical unit of ``dimension``.

    Bare numbers are taken to already be canonical (hours, km, km/h, $).
    Strings look like ``"6 months"``, ``"50km"`` or ``"80 km/h"``.
    """
    table = DIMENSIONS[dimension]
    if isinstance(value, bool):
        raise UnitError(f"expected a {dimension}, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise UnitError(f"expected a {dimension}, got {type(value).__name__}")
    m = _QUANTITY.match(value)
    if m is None:
        raise UnitError(f"cannot parse {value!r} as a {dimension}")
    number, unit = float(m.group(1)), m.group(2).lower()
    if not unit:
        return number
    if unit not in table:
        for other, other_table in DIMENSIONS.items():
            if unit in other_table:
                raise UnitError(f"{value!r} is a {other}, expected a {dimension}")
        raise UnitError(f"unknown unit {unit!r} in {value!r}")
    return number * table[unit]


def months(x: float) -> float:
    return x * HOURS_PER_MONTH


def years(x: float) -> float:
    return x * HOURS_PER_YEAR
