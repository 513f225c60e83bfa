"""Weibull failure model, expected downtime and site availability.

All times are hours.  The expected-downtime integral is evaluated by adaptive
Simpson quadrature on a time axis normalised by the model's scale, so the
tolerance is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from .units import HOURS_PER_YEAR

#: Below this interval failure probability the conditional expectation is 0/0.
DEGENERATE_PROB = 1e-12
QUAD_TOL = 1e-8
QUAD_MAX_INTERVALS = 20000


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class FailureModel:
    """Weibull time-to-failure with scale ``eta`` (hours) and shape ``beta``."""

    eta: float
    beta: float

    def __post_init__(self):
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not self.beta >= 1:
            # beta < 1 puts a pole in the pdf at t = 0
            raise ValueError(f"beta must be >= 1, got {self.beta}")

    @classmethod
    def from_years(cls, eta_years: float, beta: float) -> "FailureModel":
        return cls(eta=eta_years * HOURS_PER_YEAR, beta=beta)

    def cdf(self, t: float) -> float:
        return weibull_cdf(t, self)

    def pdf(self, t: float) -> float:
        return weibull_pdf(t, self)


@dataclass(frozen=True)
class DowntimeEstimate:
    ttd: float
    failure_prob: float


def _check_time(t: float) -> None:
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")


def weibull_cdf(t: float, model: FailureModel) -> float:
    _check_time(t)
    return -math.expm1(-((t / model.eta) ** model.beta))


def weibull_pdf(t: float, model: FailureModel) -> float:
    _check_time(t)
    b, eta = model.beta, model.eta
    z = t / eta
    return (b / eta) * z ** (b - 1.0) * math.exp(-(z**b))


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = QUAD_TOL,
    max_intervals: int = QUAD_MAX_INTERVALS,
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Iterative (explicit stack) so deep refinement cannot hit the recursion
    limit.  Raises :class:`QuadratureError` once more than ``max_intervals``
    panels would be needed.
    """
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_intervals)
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol)]
    total = 0.0
    panels = 1
    while stack:
        lo, hi, flo, fmid, fhi, s, eps = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - s
        if abs(delta) <= 15.0 * eps or hi - lo < 1e-14 * max(1.0, abs(hi)):
            total += left + right + delta / 15.0
            continue
        panels += 1
        if panels > max_intervals:
            raise QuadratureError(f"no convergence on [{a}, {b}] within {max_intervals} panels")
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps))
    return total


def _excess_area(model, a: float, b: float, prob: float) -> float:
    """``∫_a^b (F(t) - F(a)) dt`` in hours.

    Integrating ``∫ t·f(t) dt`` by parts gives ``ttd = excess_area / prob``,
    which avoids the cancellation in ``b - E[T | a < T <= b]`` when the
    interval carries little failure mass.
    """
    scale = float(getattr(model, "eta", 1.0))
    cdf = model.cdf
    fa = cdf(a)
    # the area is at most prob·(b - a); keep the error relative to that bound
    tol = min(QUAD_TOL, QUAD_TOL * prob * (b - a) / scale)
    # substitute t = scale·u so the integrand is dimensionless
    return scale * adaptive_simpson(lambda u: cdf(u * scale) - fa, a / scale, b / scale, tol)


@lru_cache(maxsize=65536)
def _weibull_downtime(eta: float, beta: float, a: float, b: float) -> tuple[float, float]:
    model = FailureModel(eta, beta)
    return _downtime(model, a, b)


def _downtime(model, a: float, b: float) -> tuple[float, float]:
    prob = model.cdf(b) - model.cdf(a)
    if prob < DEGENERATE_PROB:
        return 0.0, 0.0
    area = _excess_area(model, a, b, prob)
    ttd = min(max(area / prob, 0.0), b - a)
    return ttd, min(prob, 1.0)


def expected_downtime(
    prev_start: float, next_start: float, model, *, renewed: bool = True
) -> DowntimeEstimate:
    """Expected time a site waits, failed, for the operation at ``next_start``.

    ``failure_prob`` is the probability that the equipment fails between the
    two operations and ``ttd`` is the interval length minus the conditional
    expected failure instant inside the interval.

    With ``renewed=True`` (the default) the operation at ``prev_start``
    replaced the equipment, so its age restarts from zero there.  With
    ``renewed=False`` the lifetime runs from t = 0 and the interval mass is
    ``cdf(next_start) - cdf(prev_start)``.

    ``model`` needs ``cdf`` and ``pdf`` methods; a ``eta`` attribute, when
    present, sets the time scale for the quadrature tolerance.
    """
    _check_time(prev_start)
    if not next_start > prev_start:
        raise ValueError(f"need prev_start < next_start, got {prev_start}, {next_start}")
    if renewed:
        a, b = 0.0, next_start - prev_start
    else:
        a, b = prev_start, next_start
    if isinstance(model, FailureModel):
        ttd, prob = _weibull_downtime(model.eta, model.beta, a, b)
    else:
        ttd, prob = _downtime(model, a, b)
    return DowntimeEstimate(ttd=ttd, failure_prob=prob)


def site_availability(
    starts: Sequence[float],
    ttds: Sequence[float],
    probs: Sequence[float],
    horizon: float,
) -> float:
    """Fraction of the horizon the site is expected to be up.

    ``starts`` is accepted for symmetry with the plan structures; the ratio
    only depends on the downtime terms.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if len(ttds) != len(probs):
        raise ValueError("ttds and probs must have the same length")
    lost = 0.0
    for ttd, p in zip(ttds, probs):
        if ttd < 0 or not 0 <= p <= 1:
            raise ValueError(f"invalid downtime term (ttd={ttd}, prob={p})")
        lost += ttd * p
    return min(1.0, max(0.0, (horizon - lost) / horizon))
