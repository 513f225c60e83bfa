import pytest

from distmaint.units import HOURS_PER_MONTH, HOURS_PER_YEAR, UnitError, months, parse_quantity, years


def test_calendar_constants():
    # 2 months is 61 days and 2 years is 732 days
    assert months(2) == 61 * 24
    assert years(2) == 732 * 24
    assert HOURS_PER_YEAR == 12 * HOURS_PER_MONTH


@pytest.mark.parametrize("text, dim, expected", [
    ("6 months", "duration", 6 * 732.0),
    ("2months", "duration", 1464.0),
    ("1 year", "duration", 8784.0),
    ("3 h", "duration", 3.0),
    ("50 km", "length", 50.0),
    ("500 m", "length", 0.5),
    ("80 km/h", "speed", 80.0),
    ("100 $/h", "rate", 100.0),
    ("2 $/km", "cost_per_km", 2.0),
    ("1e5 $", "money", 1e5),
    (12, "duration", 12.0),
    ("7", "length", 7.0),
])
def test_parse_quantity(text, dim, expected):
    assert parse_quantity(text, dim) == pytest.approx(expected, rel=1e-15)


def test_wrong_dimension_is_named():
    with pytest.raises(UnitError, match="duration"):
        parse_quantity("5 h", "length")


@pytest.mark.parametrize("bad", ["km", "5 parsecs", True, None, [1]])
def test_rejects_garbage(bad):
    with pytest.raises(UnitError):
        parse_quantity(bad, "length")
