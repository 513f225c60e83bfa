"""Maintenance planning: operation counts, start times and time windows.

Each site is planned independently.  The horizon is treated as one period of
a repeating plan: the interval ahead of the first operation begins at the
last operation of the previous period (``s_nop - horizon``), so ``nop``
operations close exactly ``nop`` renewal intervals that tile the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .reliability import DowntimeEstimate, FailureModel

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
NOP_CAP = 200
DEFAULT_WINDOW_FRACTION = 0.25
START_TOL = 1e-2  # hours


class EvaluationError(ArithmeticError):
    """The objective returned a non-finite value."""


@dataclass(frozen=True)
class Site:
    id: str
    x: float
    y: float
    mttr: float
    cr: float
    cp: float
    model: FailureModel
    window: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if not self.mttr > 0:
            raise ValueError(f"site {self.id}: mttr must be positive")
        if self.cr < 0 or self.cp < 0:
            raise ValueError(f"site {self.id}: costs must be non-negative")


@dataclass(frozen=True)
class SitePlan:
    nop: int
    starts: tuple[float, ...]
    windows: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if self.nop < 1 or len(self.starts) != self.nop or len(self.windows) != self.nop:
            raise ValueError("nop, starts and windows disagree")


@dataclass(frozen=True)
class MaintenancePlan:
    site_plans: tuple[SitePlan, ...]
    horizon: float

    @property
    def n(self) -> int:
        return sum(p.nop for p in self.site_plans)

    @property
    def nops(self) -> tuple[int, ...]:
        return tuple(p.nop for p in self.site_plans)


def golden_section_minimize(
    objective: Callable[[float], float], lo: float, hi: float, tol: float = 1e-6
) -> float:
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")

    def f(x):
        y = objective(x)
        if not math.isfinite(y):
            raise EvaluationError(f"objective({x}) = {y}")
        return y

    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def cyclic_gaps(starts: Sequence[float], horizon: float) -> list[float]:
    """Length of the renewal interval ending at each operation."""
    gaps = [starts[0] + horizon - starts[-1]]
    gaps.extend(starts[o] - starts[o - 1] for o in range(1, len(starts)))
    return gaps


def nop_upper_bound(site: Site, horizon: float) -> int:
    return min(NOP_CAP, max(1, math.ceil(horizon / (2.0 * site.mttr))))


def _bounds(site: Site, horizon: float) -> tuple[float, float]:
    a, b = site.window if site.window is not None else (0.0, horizon)
    return max(0.0, a), min(horizon, b)


def planning_cost(site: Site, horizon: float, starts: Sequence[float], ttd: float) -> float:
    """Operations plus downtime rate ($/h) for one site with a fixed per-op TTD."""
    cdf = site.model.cdf
    downtime = sum(cdf(g) for g in cyclic_gaps(starts, horizon)) * ttd * site.cp
    return (len(starts) * site.cr + downtime) / horizon


def refine_starts(site: Site, horizon: float, nop: int, ttd: float) -> tuple[float, ...]:
    """Equal spacing ``o·τ/(nop+1)`` followed by one coordinate-wise golden pass.

    A move is kept only when it strictly lowers the local objective, so the
    result never costs more than the initial spacing.
    """
    lo, hi = _bounds(site, horizon)
    starts = [lo + o * (hi - lo) / (nop + 1) for o in range(1, nop + 1)]
    if nop == 1 or ttd <= 0 or site.cp <= 0:
        return tuple(starts)
    cdf = site.model.cdf
    gap = site.mttr
    for o in range(nop):
        prev = starts[o - 1] - horizon if o == 0 else starts[o - 1]
        nxt = starts[0] + horizon if o == nop - 1 else starts[o + 1]
        left = max(lo, prev + gap)
        right = min(hi, nxt - gap)
        if not left < right:
            continue

        def local(x, prev=prev, nxt=nxt):
            return cdf(x - prev) + cdf(nxt - x)

        x = golden_section_minimize(local, left, right, START_TOL)
        if local(x) < local(starts[o]):
            starts[o] = x
    return tuple(starts)


def site_windows(
    site: Site, horizon: float, starts: Sequence[float], fraction: float = DEFAULT_WINDOW_FRACTION
) -> tuple[tuple[float, float], ...]:
    """Symmetric windows of half-width ``fraction`` times the smaller adjacent gap."""
    lo, hi = _bounds(site, horizon)
    gaps = cyclic_gaps(starts, horizon)
    nop = len(starts)
    out = []
    for o, s in enumerate(starts):
        after = gaps[(o + 1) % nop]
        half = fraction * min(gaps[o], after)
        half = max(0.0, min(half, s - lo, hi - s))
        out.append((s - half, s + half))
    return tuple(out)


def plan_site(
    site: Site,
    horizon: float,
    ttd_feedback: Sequence[float] = (),
    *,
    window_fraction: float = DEFAULT_WINDOW_FRACTION,
) -> SitePlan:
    """Pick the operation count and start times for one site.

    ``ttd_feedback`` holds the downtimes realised for this site in the
    previous loop iteration; their mean is used for every candidate
    operation.  The sweep over ``nop`` stops as soon as the operations cost
    alone reaches the best total found, which cannot change the argmin.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    ttd = sum(ttd_feedback) / len(ttd_feedback) if len(ttd_feedback) else 0.0
    best = None
    best_cost = math.inf
    for nop in range(1, nop_upper_bound(site, horizon) + 1):
        if nop * site.cr / horizon >= best_cost:
            break
        starts = refine_starts(site, horizon, nop, ttd)
        cost = planning_cost(site, horizon, starts, ttd)
        if cost < best_cost:
            best, best_cost = starts, cost
    return SitePlan(nop=len(best), starts=best, windows=site_windows(site, horizon, best, window_fraction))


def plan_all(
    sites: Sequence[Site],
    horizon: float,
    ttd_matrix: Optional[Sequence[Sequence[float]]] = None,
    *,
    window_fraction: float = DEFAULT_WINDOW_FRACTION,
) -> MaintenancePlan:
    if ttd_matrix is None:
        ttd_matrix = [()] * len(sites)
    if len(ttd_matrix) != len(sites):
        raise ValueError("one feedback row per site is required")
    plans = tuple(
        plan_site(site, horizon, fb, window_fraction=window_fraction)
        for site, fb in zip(sites, ttd_matrix)
    )
    return MaintenancePlan(site_plans=plans, horizon=horizon)


def maintenance_cost(
    plan: MaintenancePlan,
    sites: Sequence[Site],
    ttds: Sequence[Sequence[DowntimeEstimate]],
) -> tuple[float, float]:
    """Operations and downtime rates ($/h) averaged over the horizon."""
    if len(sites) != len(plan.site_plans) or len(ttds) != len(sites):
        raise ValueError("plan, sites and downtime matrix have different site counts")
    ops = 0.0
    down = 0.0
    for site, sp, row in zip(sites, plan.site_plans, ttds):
        if len(row) != sp.nop:
            raise ValueError(f"site {site.id}: {len(row)} downtime entries for {sp.nop} operations")
        ops += site.cr * sp.nop
        down += sum(site.cp * est.failure_prob * est.ttd for est in row)
    return ops / plan.horizon, down / plan.horizon
