"""Joint planning/routing loop with downtime feedback.

Iteration 1 plans with zero downtime feedback, which yields one operation per
site.  Each later iteration re-plans with the downtimes realised by the
previous routing.  The loop stops on a relative change of the total cost
below ``rel_tol``, at ``max_iter``, or on the first iteration whose plan was
already evaluated: plan to feedback is deterministic, so from then on the
iterates cycle and no unseen one can appear.  The cheapest iterate is
returned, the earliest one on ties.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

from .lhsa import RoutingInfeasible, RoutingSolution, VehicleSpec, build_operation_graph, solve_routing_problem
from .mpa import DEFAULT_WINDOW_FRACTION, MaintenancePlan, Site, maintenance_cost, plan_all
from .reliability import DowntimeEstimate, expected_downtime, site_availability

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConvergenceConfig:
    rel_tol: float = 0.01
    max_iter: int = 20
    window_fraction: float = DEFAULT_WINDOW_FRACTION


@dataclass(frozen=True)
class CostBreakdown:
    transport: float
    operations: float
    downtime: float
    total: float

    @classmethod
    def from_parts(cls, transport: float, operations: float, downtime: float) -> "CostBreakdown":
        return cls(transport, operations, downtime, transport + operations + downtime)


@dataclass
class IterationRecord:
    iteration: int
    nops: tuple[int, ...]
    costs: CostBreakdown


@dataclass
class OmcrResult:
    plan: MaintenancePlan
    schedule: RoutingSolution
    costs: CostBreakdown
    availability: list[float]
    iterations: int
    cost_trace: list[float]
    ttd: list[list[DowntimeEstimate]] = field(default_factory=list)
    trace: list[IterationRecord] = field(default_factory=list)
    best_iteration: int = 1

    @property
    def annual_distance(self) -> float:
        from .units import HOURS_PER_YEAR

        return self.schedule.distance_km * HOURS_PER_YEAR / self.plan.horizon


class OmcrError(RuntimeError):
    pass


def realized_starts(schedule: RoutingSolution, plan: MaintenancePlan) -> list[list[float]]:
    starts = [[None] * sp.nop for sp in plan.site_plans]
    for node, (i, o) in schedule.node_ops.items():
        starts[i][o] = schedule.times[node]
    for i, row in enumerate(starts):
        for o, s in enumerate(row):
            if s is None:
                raise ValueError(f"operation {o} of site {i} is missing from the schedule")
    return starts


def compute_ttd_matrix(
    schedule: RoutingSolution, plan: MaintenancePlan, sites: Sequence[Site]
) -> list[list[DowntimeEstimate]]:
    """Expected downtime ahead of every operation at its realised start time.

    The interval ahead of the first operation starts at the last operation of
    the previous period, ``s_nop - horizon``.
    """
    tau = plan.horizon
    out = []
    for site, row in zip(sites, realized_starts(schedule, plan)):
        ests = []
        for o, s in enumerate(row):
            prev = row[-1] - tau if o == 0 else row[o - 1]
            ests.append(expected_downtime(0.0, s - prev, site.model))
        out.append(ests)
    return out


def _evaluate(plan, schedule, sites):
    ttd = compute_ttd_matrix(schedule, plan, sites)
    ops, down = maintenance_cost(plan, sites, ttd)
    costs = CostBreakdown.from_parts(schedule.transport_cost, ops, down)
    starts = realized_starts(schedule, plan)
    avail = [
        site_availability(st, [e.ttd for e in row], [e.failure_prob for e in row], plan.horizon)
        for st, row in zip(starts, ttd)
    ]
    return ttd, costs, avail


def run_omcr(
    sites: Sequence[Site],
    depot: tuple[float, float],
    vehicle: VehicleSpec,
    horizon: float,
    convergence: Optional[ConvergenceConfig] = None,
) -> OmcrResult:
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    cfg = convergence or ConvergenceConfig()
    feedback: list[Sequence[float]] = [()] * len(sites)
    evaluated: dict = {}
    iterates = []
    trace: list[IterationRecord] = []
    prev_total = None
    for k in range(1, cfg.max_iter + 1):
        plan = plan_all(sites, horizon, feedback, window_fraction=cfg.window_fraction)
        key = tuple(sp.starts for sp in plan.site_plans)
        repeated = key in evaluated
        if repeated:
            plan, schedule, costs, avail, ttd = evaluated[key]
        else:
            problem = build_operation_graph(plan, sites, depot, vehicle)
            try:
                schedule = solve_routing_problem(problem)
            except RoutingInfeasible as exc:
                raise OmcrError(f"routing infeasible at iteration {k}: {exc}") from exc
            ttd, costs, avail = _evaluate(plan, schedule, sites)
            evaluated[key] = (plan, schedule, costs, avail, ttd)
        iterates.append((plan, schedule, costs, avail, ttd, k))
        trace.append(IterationRecord(k, plan.nops, costs))
        if repeated:
            log.debug("plan repeated at iteration %d, stopping", k)
            break
        feedback = [[e.ttd for e in row] for row in ttd]
        if prev_total is not None and prev_total > 0:
            if abs(costs.total - prev_total) / prev_total < cfg.rel_tol:
                break
        prev_total = costs.total
    best = min(iterates, key=lambda it: it[2].total)
    plan, schedule, costs, avail, ttd, k_best = best
    return OmcrResult(
        plan=plan,
        schedule=schedule,
        costs=costs,
        availability=avail,
        iterations=len(iterates),
        cost_trace=[it[2].total for it in iterates],
        ttd=ttd,
        trace=trace,
        best_iteration=k_best,
    )


def write_trace(result: OmcrResult, out: TextIO) -> None:
    """Per-iteration record: iteration, nop vector, cost components."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["iteration", "nops", "transport", "operations", "downtime", "total"])
    for rec in result.trace:
        c = rec.costs
        w.writerow([rec.iteration, " ".join(map(str, rec.nops)),
                    repr(c.transport), repr(c.operations), repr(c.downtime), repr(c.total)])
