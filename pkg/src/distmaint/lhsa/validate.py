"""Independent check of a routing solution against the MILP constraints.

Works from the decision variables alone (``arcs``, ``loads``, ``times`` and
``fleet``); the routes list is never consulted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graph import RoutingProblem
from .solution import RoutingSolution

CONSTRAINTS = ("5", "6", "7", "8", "9", "10", "11", "12", "13", "14")
TOL = 1e-7


@dataclass(frozen=True)
class ConstraintCheck:
    passed: bool
    violation: Optional[str] = None


class ConstraintReport(dict):
    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.values())

    @property
    def failed(self) -> list[str]:
        return [k for k, c in self.items() if not c.passed]

    def lines(self) -> list[str]:
        out = []
        for k, c in self.items():
            out.append(f"({k}) {'pass' if c.passed else 'FAIL: ' + str(c.violation)}")
        return out


def validate_solution(problem: RoutingProblem, solution: RoutingSolution) -> ConstraintReport:
    n = problem.n
    Q = problem.capacity
    tau = problem.horizon
    m = solution.fleet
    x = solution.arcs
    y = solution.loads
    s = solution.times
    ops = problem.operations
    nodes = range(1, n + 1)
    report = ConstraintReport()

    def first(gen):
        for item in gen:
            return item
        return None

    # (5) enough vehicles for every operation
    report["5"] = ConstraintCheck(
        Q * m >= n, None if Q * m >= n else f"Q*m = {Q}*{m} < n = {n}"
    )

    # (6) exactly m arcs leave the depot towards operations
    out0 = sum(v for (i, j), v in x.items() if i == 0 and j != 0)
    report["6"] = ConstraintCheck(out0 == m, None if out0 == m else f"{out0} routes leave the depot, m = {m}")

    # (7) no self loops
    loop = first((i, j) for (i, j), v in x.items() if i == j and v != 0)
    report["7"] = ConstraintCheck(loop is None, None if loop is None else f"self loop on node {loop[0]}")

    # (8) every operation entered exactly once
    indeg = {j: 0 for j in nodes}
    outdeg = {i: 0 for i in nodes}
    for (i, j), v in x.items():
        if i != j:
            if j in indeg:
                indeg[j] += v
            if i in outdeg and j != 0:
                outdeg[i] += v
    bad = first(j for j in nodes if indeg[j] != 1)
    report["8"] = ConstraintCheck(
        bad is None, None if bad is None else f"operation {bad} entered {indeg[bad]} times"
    )

    # (9) at most one successor operation
    bad = first(i for i in nodes if outdeg[i] > 1)
    report["9"] = ConstraintCheck(
        bad is None, None if bad is None else f"operation {bad} has {outdeg[bad]} successors"
    )

    op_arcs = [(i, j, v) for (i, j), v in x.items() if i != j and i in outdeg and j in indeg]

    # (10) load increases by the demand along each arc
    def load_violation():
        for i, j, v in op_arcs:
            if i not in y or j not in y:
                return f"missing load on arc ({i}, {j})"
            if y[i] - y[j] + (1 + Q) * v > Q:
                return f"arc ({i}, {j}): y_i = {y[i]}, y_j = {y[j]}"
        return None

    msg = load_violation()
    report["10"] = ConstraintCheck(msg is None, msg)

    # (11) successive operations leave room for service and travel
    def time_violation():
        for i, j, v in op_arcs:
            if i not in s or j not in s:
                return f"missing start time on arc ({i}, {j})"
            lhs = s[i] - s[j] + (ops[i - 1].service + problem.time[i, j] + tau) * v
            if lhs > tau + TOL:
                return f"arc ({i}, {j}): s_j = {s[j]:.6g} < s_i + MTTR_i + t_ij"
        return None

    msg = time_violation()
    report["11"] = ConstraintCheck(msg is None, msg)

    # (12) load bounds
    bad = first(j for j in nodes if not (j in y and 1 <= y[j] <= Q))
    report["12"] = ConstraintCheck(
        bad is None, None if bad is None else f"y_{bad} = {y.get(bad)} outside [1, {Q}]"
    )

    # (13) time windows
    bad = first(
        j for j in nodes
        if not (j in s and ops[j - 1].earliest - TOL <= s[j] <= ops[j - 1].latest + TOL)
    )
    report["13"] = ConstraintCheck(
        bad is None,
        None if bad is None else
        f"s_{bad} = {s.get(bad)} outside [{ops[bad - 1].earliest:.6g}, {ops[bad - 1].latest:.6g}]",
    )

    # (14) binary arc variables over valid nodes
    bad = first((i, j) for (i, j), v in x.items() if v not in (0, 1) or not (0 <= i <= n and 0 <= j <= n))
    report["14"] = ConstraintCheck(
        bad is None, None if bad is None else f"x_{bad} = {x.get(bad)}"
    )
    return report
