"""Depot location and vehicle capacity selection."""

from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

from .lhsa import VehicleSpec
from .mpa import Site
from .omcr import ConvergenceConfig, CostBreakdown, OmcrResult, run_omcr

log = logging.getLogger(__name__)

__all__ = [
    "CandidateEvaluation", "DesignInfeasible", "DesignResult", "VehicleSpec", "barycentre_location",
    "near_site_candidates", "optimize_design", "write_candidates",
]


class DesignInfeasible(RuntimeError):
    """Every (depot, capacity) pair failed."""


@dataclass
class CandidateEvaluation:
    depot: tuple[float, float]
    capacity: int
    total: Optional[float]
    error: Optional[str] = None
    result: Optional[OmcrResult] = field(default=None, repr=False)


@dataclass
class DesignResult:
    depot: tuple[float, float]
    capacity: int
    costs: CostBreakdown
    result: OmcrResult
    per_candidate: list[CandidateEvaluation]


def barycentre_location(sites: Sequence[Site], horizon: float) -> tuple[float, float]:
    """Site positions averaged with weights ``F_i(horizon)``.

    Falls back to the plain centroid (with a warning) when every weight is 0.
    """
    if not sites:
        raise ValueError("no sites")
    w = [s.model.cdf(horizon) for s in sites]
    total = math.fsum(w)
    if total <= 0:
        warnings.warn("all failure probabilities are zero; using the unweighted centroid")
        w = [1.0] * len(sites)
        total = float(len(sites))
    x = math.fsum(wi * s.x for wi, s in zip(w, sites)) / total
    y = math.fsum(wi * s.y for wi, s in zip(w, sites)) / total
    return (x, y)


def near_site_candidates(sites: Sequence[Site]) -> list[tuple[float, float]]:
    if not sites:
        raise ValueError("no sites")
    return sorted({(float(s.x), float(s.y)) for s in sites})


def optimize_design(
    sites: Sequence[Site],
    capacities: Iterable[int],
    depot_candidates: Iterable[tuple[float, float]],
    horizon: float,
    convergence: Optional[ConvergenceConfig] = None,
    *,
    cd: float = 2.0,
    ct: float = 30.0,
    speed: float = 80.0,
) -> DesignResult:
    """Run the planning/routing loop on every (depot, capacity) pair.

    Ties go to the smaller capacity, then to the lexicographically smaller
    depot coordinates.
    """
    capacities = sorted(set(capacities))
    candidates = sorted({(float(x), float(y)) for x, y in depot_candidates})
    if not capacities or not candidates:
        raise ValueError("need at least one capacity and one depot candidate")
    table = []
    for q in capacities:
        vehicle = VehicleSpec(capacity=q, cd=cd, ct=ct, speed=speed)
        for depot in candidates:
            try:
                res = run_omcr(sites, depot, vehicle, horizon, convergence)
            except Exception as exc:  # recorded, excluded from the argmin
                log.warning("design (%s, Q=%d) failed: %s", depot, q, exc)
                table.append(CandidateEvaluation(depot, q, None, f"{type(exc).__name__}: {exc}"))
                continue
            table.append(CandidateEvaluation(depot, q, res.costs.total, None, res))
    ok = [c for c in table if c.total is not None]
    if not ok:
        raise DesignInfeasible("every design candidate failed: " + "; ".join(c.error for c in table))
    best = min(ok, key=lambda c: (c.total, c.capacity, c.depot))
    return DesignResult(best.depot, best.capacity, best.result.costs, best.result, table)


def write_candidates(result: DesignResult, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["depot_x_km", "depot_y_km", "capacity", "total", "error"])
    for c in result.per_candidate:
        w.writerow([repr(c.depot[0]), repr(c.depot[1]), c.capacity,
                    "" if c.total is None else repr(c.total), c.error or ""])
