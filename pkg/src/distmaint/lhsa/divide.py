"""Divide-and-conquer scaling of the exact solver.

Operations are sorted by the centre of their time window and cut into
consecutive chunks of at most ``Q``.  Each chunk is an independent routing
problem whose routes leave from and return to the depot.
"""

from __future__ import annotations

import math
from typing import Sequence

from ..mpa import MaintenancePlan, Site
from .exact import EXACT_CAP, solve_exact
from .graph import OperationNode, RoutingProblem, VehicleSpec, build_operation_graph
from .solution import RoutingInfeasible, RoutingSolution, merge_solutions


def split_operations(operations: Sequence[OperationNode], capacity: int) -> list[list[int]]:
    """Chunks of 1-based node ids, ordered by window centre.

    Ties on the centre are broken by (site id, operation index).
    """
    if capacity < 1:
        raise ValueError("capacity must be at least 1")
    order = sorted(
        range(1, len(operations) + 1),
        key=lambda k: (operations[k - 1].center, operations[k - 1].site_id, operations[k - 1].op_index),
    )
    return [order[i : i + capacity] for i in range(0, len(order), capacity)]


def _solve_chunk(problem: RoutingProblem, nodes: list[int], cap: int) -> RoutingSolution:
    m = max(1, math.ceil(len(nodes) / problem.capacity))
    while True:
        sub = problem.subproblem(nodes, fleet=m)
        try:
            local = solve_exact(sub, cap=cap)
        except RoutingInfeasible as exc:
            if m >= len(nodes):
                raise RoutingInfeasible(
                    f"chunk {nodes} infeasible even with one vehicle per operation", exc.windows
                ) from exc
            m += 1
            continue
        # relabel local ids to the ids of the full problem
        out = local.copy()
        relabel = {0: 0, **{k + 1: g for k, g in enumerate(nodes)}}
        out.routes = [[relabel[v] for v in r] for r in local.routes]
        out.arcs = {(relabel[a], relabel[b]): x for (a, b), x in local.arcs.items()}
        out.loads = {relabel[k]: v for k, v in local.loads.items()}
        out.times = {relabel[k]: v for k, v in local.times.items()}
        out.node_ops = {relabel[k]: v for k, v in local.node_ops.items()}
        return out


def solve_routing_problem(problem: RoutingProblem, *, cap: int = EXACT_CAP) -> RoutingSolution:
    """Split, solve every chunk exactly and stitch the routes together."""
    chunks = split_operations(problem.operations, problem.capacity)
    parts = [_solve_chunk(problem, chunk, cap) for chunk in chunks]
    return merge_solutions(parts, problem.horizon)


def solve_long_term(
    plan: MaintenancePlan,
    sites: Sequence[Site],
    depot: tuple[float, float],
    vehicle: VehicleSpec,
    *,
    cap: int = EXACT_CAP,
) -> RoutingSolution:
    problem = build_operation_graph(plan, sites, depot, vehicle)
    return solve_routing_problem(problem, cap=cap)
