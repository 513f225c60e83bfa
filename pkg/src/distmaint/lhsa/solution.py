from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .graph import RoutingProblem


class RoutingInfeasible(RuntimeError):
    """No schedule satisfies the time windows with the given fleet."""

    def __init__(self, message: str, windows: Sequence[tuple] = ()):
        super().__init__(message)
        self.windows = list(windows)


@dataclass
class RoutingSolution:
    """Routes plus the MILP variables they induce.

    ``routes`` hold node ids with the depot (0) at both ends.  ``arcs`` maps
    each traversed arc to its ``x_ij`` value, ``loads`` is the cumulative
    number of parts delivered on the route up to and including the node
    (``y_i``), ``times`` are realised start times ``s_i``.  ``node_ops`` maps
    node ids to ``(site_index, op_index)``.
    """

    routes: list[list[int]]
    arcs: dict[tuple[int, int], int]
    loads: dict[int, int]
    times: dict[int, float]
    fleet: int
    transport_cost: float
    distance_km: float
    node_ops: dict[int, tuple[int, int]] = field(default_factory=dict)

    def copy(self) -> "RoutingSolution":
        return RoutingSolution(
            routes=[list(r) for r in self.routes],
            arcs=dict(self.arcs),
            loads=dict(self.loads),
            times=dict(self.times),
            fleet=self.fleet,
            transport_cost=self.transport_cost,
            distance_km=self.distance_km,
            node_ops=dict(self.node_ops),
        )


def route_times(problem: RoutingProblem, route: Sequence[int]) -> Optional[list[float]]:
    """Start times along one route, as close to the planned starts as feasible.

    Returns ``None`` when the route violates a time window.  ``route`` lists
    operation node ids without the depot.
    """
    ops = problem.operations
    T = problem.time
    # earliest feasible starts
    earliest = []
    t = None
    for k, j in enumerate(route):
        op = ops[j - 1]
        s = op.earliest if k == 0 else max(op.earliest, t + T[route[k - 1], j])
        if s > op.latest + 1e-9:
            return None
        earliest.append(s)
        t = s + op.service
    # latest starts that keep the rest of the route feasible
    latest = [0.0] * len(route)
    nxt = None
    for k in range(len(route) - 1, -1, -1):
        j = route[k]
        op = ops[j - 1]
        lim = op.latest
        if nxt is not None:
            lim = min(lim, nxt - op.service - T[j, route[k + 1]])
        latest[k] = lim
        nxt = lim
    times = []
    prev_finish = None
    for k, j in enumerate(route):
        op = ops[j - 1]
        arrival = op.earliest if k == 0 else prev_finish + T[route[k - 1], j]
        s = min(max(op.planned, arrival, op.earliest), latest[k])
        s = max(s, earliest[k])
        times.append(s)
        prev_finish = s + op.service
    return times


def solution_from_routes(
    problem: RoutingProblem,
    routes: Sequence[Sequence[int]],
    node_ids: Optional[Sequence[int]] = None,
) -> RoutingSolution:
    """Assemble a solution from depot-free routes over ``problem`` node ids.

    ``node_ids`` relabels local ids ``1..n`` to global ids (used when stitching
    subproblem solutions together).
    """
    label = (lambda k: k) if node_ids is None else (lambda k: 0 if k == 0 else node_ids[k - 1])
    W = problem.weights
    D = problem.dist
    arcs: dict[tuple[int, int], int] = {}
    loads: dict[int, int] = {}
    times: dict[int, float] = {}
    node_ops: dict[int, tuple[int, int]] = {}
    cost = 0.0
    km = 0.0
    full = []
    for route in routes:
        st = route_times(problem, route)
        if st is None:
            raise RoutingInfeasible(f"route {list(route)} violates its time windows")
        path = [0, *route, 0]
        for a, b in zip(path, path[1:]):
            arcs[(label(a), label(b))] = 1
            cost += W[a, b]
            km += D[a, b]
        for pos, (j, s) in enumerate(zip(route, st), start=1):
            g = label(j)
            loads[g] = pos
            times[g] = s
            op = problem.operations[j - 1]
            node_ops[g] = (op.site_index, op.op_index)
        full.append([label(k) for k in path])
    return RoutingSolution(
        routes=full,
        arcs=arcs,
        loads=loads,
        times=times,
        fleet=len(full),
        transport_cost=cost / problem.horizon,
        distance_km=km,
        node_ops=node_ops,
    )


def merge_solutions(parts: Sequence[RoutingSolution], horizon: float) -> RoutingSolution:
    routes, arcs, loads, times, node_ops = [], {}, {}, {}, {}
    cost = 0.0
    km = 0.0
    for p in parts:
        routes.extend(p.routes)
        for arc, v in p.arcs.items():
            arcs[arc] = arcs.get(arc, 0) + v
        loads.update(p.loads)
        times.update(p.times)
        node_ops.update(p.node_ops)
        cost += p.transport_cost
        km += p.distance_km
    return RoutingSolution(routes, arcs, loads, times, len(routes), cost, km, node_ops)
