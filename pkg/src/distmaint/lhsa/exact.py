"""Exact CVRPTW solver for small operation sets.

Depth-first branch-and-bound over route extensions.  Children are explored in
node-id order with "return to depot" first, so complete solutions appear in
lexicographic order of their flattened node sequence and only strict
improvements replace the incumbent; among optimal solutions the
lexicographically first one is returned.  The lower bound is the cost so far
plus a minimum spanning tree over the current node, the depot and every
unvisited operation.
"""

from __future__ import annotations

import math

from .graph import RoutingProblem
from .solution import RoutingInfeasible, RoutingSolution, solution_from_routes

EXACT_CAP = 12
_EPS = 1e-9


def _mst(nodes: list[int], W) -> float:
    if len(nodes) < 2:
        return 0.0
    first, rest = nodes[0], nodes[1:]
    best = {v: W[first][v] for v in rest}
    total = 0.0
    while best:
        v = min(best, key=best.__getitem__)
        total += best.pop(v)
        row = W[v]
        for u in best:
            if row[u] < best[u]:
                best[u] = row[u]
    return total


def solve_exact(problem: RoutingProblem, *, cap: int = EXACT_CAP) -> RoutingSolution:
    """Minimum transport cost schedule using exactly ``problem.fleet`` routes."""
    n = problem.n
    if n > cap:
        raise ValueError(f"{n} operations exceed the exact solver cap of {cap}")
    m = problem.fleet if problem.fleet is not None else problem.min_fleet
    Q = problem.capacity
    if Q * m < n:
        raise RoutingInfeasible(f"fleet {m} x capacity {Q} cannot cover {n} operations")
    if m > n:
        raise RoutingInfeasible(f"{m} routes need at least {m} operations, got {n}")

    W = problem.weights.tolist()
    T = problem.time.tolist()
    ops = problem.operations
    earliest = [0.0] + [op.earliest for op in ops]
    latest = [0.0] + [op.latest for op in ops]
    service = [0.0] + [op.service for op in ops]
    full = (1 << (n + 1)) - 2  # bits 1..n
    mst_cache: dict[tuple[int, int], float] = {}

    def bound(cur: int, unvisited: int) -> float:
        key = (cur, unvisited)
        val = mst_cache.get(key)
        if val is None:
            nodes = [cur] + [j for j in range(1, n + 1) if unvisited >> j & 1]
            if cur != 0:
                nodes.append(0)
            val = _mst(nodes, W)
            mst_cache[key] = val
        return val

    best_cost = math.inf
    best_routes = None
    routes: list[list[int]] = []

    def dfs(cur, finish, load, opened, last_first, visited, cost):
        nonlocal best_cost, best_routes
        unvisited = full & ~visited
        if cost + bound(cur, unvisited) >= best_cost - _EPS:
            return
        if cur == 0:
            if not unvisited:
                if opened == m:
                    best_cost = cost
                    best_routes = [list(r) for r in routes]
                return
            if opened == m:
                return
            left = bin(unvisited).count("1")
            for j in range(last_first + 1, n + 1):
                if not unvisited >> j & 1:
                    continue
                # each remaining route needs its own operation
                if left - 1 < m - opened - 1:
                    break
                routes.append([j])
                dfs(j, earliest[j] + service[j], 1, opened + 1, j, visited | 1 << j, cost + W[0][j])
                routes.pop()
            return
        # close the route
        dfs(0, 0.0, 0, opened, last_first, visited, cost + W[cur][0])
        if load >= Q:
            return
        Wc, Tc = W[cur], T[cur]
        for j in range(1, n + 1):
            if not unvisited >> j & 1:
                continue
            s = finish + Tc[j]
            if s < earliest[j]:
                s = earliest[j]
            if s > latest[j] + 1e-9:
                continue
            routes[-1].append(j)
            dfs(j, s + service[j], load + 1, opened, last_first, visited | 1 << j, cost + Wc[j])
            routes[-1].pop()

    dfs(0, 0.0, 0, 0, 0, 0, 0.0)
    if best_routes is None:
        raise RoutingInfeasible(
            f"no schedule with {m} vehicle(s)",
            windows=[(op.site_id, op.op_index, op.earliest, op.latest) for op in ops],
        )
    sol = solution_from_routes(problem, best_routes)
    sol.fleet = m
    return sol
