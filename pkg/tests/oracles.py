"""Independent reference implementations used by the tests.

Nothing here calls the solvers under test except through their public
output, so a bug in the package cannot hide inside its own oracle.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate

from distmaint.lhsa import OperationNode, RoutingProblem, VehicleSpec, euclidean_matrix


def random_problem(rng: np.random.Generator, n: int, *, capacity=None, horizon=500.0,
                   width=(20.0, 200.0), fleet=None) -> RoutingProblem:
    """Operations at random points of a 50 km disc with random symmetric windows."""
    capacity = int(rng.integers(2, 5)) if capacity is None else capacity
    n_sites = int(rng.integers(1, n + 1))
    pts = []
    for _ in range(n_sites):
        r, a = 50.0 * math.sqrt(rng.random()), 2 * math.pi * rng.random()
        pts.append((r * math.cos(a), r * math.sin(a)))
    ops = []
    counts = {}
    for k in range(n):
        i = int(rng.integers(0, n_sites))
        half = float(rng.uniform(*width)) / 2
        centre = float(rng.uniform(half, horizon - half))
        o = counts.get(i, 0)
        counts[i] = o + 1
        ops.append(OperationNode(i, f"s{i:02d}", o, pts[i][0], pts[i][1], 3.0,
                                 centre - half, centre + half, centre))
    depot = (float(rng.uniform(-10, 10)), float(rng.uniform(-10, 10)))
    dist = euclidean_matrix([depot] + [(op.x, op.y) for op in ops])
    vehicle = VehicleSpec(capacity=capacity)
    return RoutingProblem(depot, ops, dist, dist / vehicle.speed, vehicle, horizon, fleet)


def route_feasible(problem: RoutingProblem, route) -> bool:
    """Earliest-start propagation along one route."""
    t = None
    prev = 0
    for j in route:
        op = problem.operations[j - 1]
        s = op.earliest if t is None else max(op.earliest, t + problem.time[prev, j])
        if s > op.latest + 1e-9:
            return False
        t = s + op.service
        prev = j
    return True


def exhaustive_optimum(problem: RoutingProblem, fleet=None):
    """Minimum of the transport objective over all partitions into ``fleet`` ordered routes.

    Returns ``None`` when no feasible schedule exists.
    """
    n = problem.n
    m = fleet or problem.fleet or max(1, math.ceil(n / problem.capacity))
    W = problem.weights
    best = None
    for perm in itertools.permutations(range(1, n + 1)):
        for cuts in itertools.combinations(range(1, n), m - 1):
            bounds = (0, *cuts, n)
            routes = [perm[a:b] for a, b in zip(bounds, bounds[1:])]
            if any(len(r) > problem.capacity for r in routes):
                continue
            if not all(route_feasible(problem, r) for r in routes):
                continue
            cost = 0.0
            for r in routes:
                path = (0, *r, 0)
                cost += sum(W[a, b] for a, b in zip(path, path[1:]))
            if best is None or cost < best:
                best = cost
    return None if best is None else best / problem.horizon


def quad_cdf(model, t: float) -> float:
    """Integral of the density over [0, t]."""
    val, _ = integrate.quad(model.pdf, 0.0, t, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def quad_downtime(model, length: float) -> tuple[float, float]:
    """(ttd, probability) for a renewed interval of ``length`` via F * ttd = integral of F."""
    prob = model.cdf(length)
    area, _ = integrate.quad(model.cdf, 0.0, length, epsabs=0.0, epsrel=1e-12, limit=200)
    return area / prob, prob


def monte_carlo_downtime(eta: float, beta: float, length: float, samples: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    t = eta * rng.weibull(beta, samples)
    hit = t[t <= length]
    return float(np.mean(length - hit))


# constraint mutations: each returns a mutated copy or None when not applicable


def _op_arcs(sol, n):
    return [(i, j) for (i, j), v in sorted(sol.arcs.items()) if v and 1 <= i <= n and 1 <= j <= n]


def mutate(problem, sol, target: str, rng):
    n, Q = problem.n, problem.capacity
    out = sol.copy()
    op_arcs = _op_arcs(sol, n)
    nodes = sorted(k for k in sol.loads)
    if target == "5":
        out.fleet = 0
    elif target == "6":
        out.fleet = sol.fleet + 1
    elif target == "7":
        j = int(rng.choice(nodes))
        out.arcs[(j, j)] = 1
    elif target == "8":
        if op_arcs:
            i, j = op_arcs[int(rng.integers(len(op_arcs)))]
            del out.arcs[(i, j)]
        else:
            j = int(rng.choice(nodes))
            out.arcs[(0, j)] = 0
    elif target == "9":
        # a second successor for a node that already has one
        heads = sorted({i for i, _ in op_arcs})
        if not heads:
            return None
        i = int(rng.choice(heads))
        others = [k for k in nodes if k != i and (i, k) not in sol.arcs]
        if not others:
            return None
        out.arcs[(i, int(rng.choice(others)))] = 1
    elif target == "10":
        if not op_arcs:
            return None
        i, j = op_arcs[int(rng.integers(len(op_arcs)))]
        out.loads[j] = sol.loads[i]
    elif target == "11":
        if not op_arcs:
            return None
        i, j = op_arcs[int(rng.integers(len(op_arcs)))]
        out.times[j] = sol.times[i]
    elif target == "12":
        firsts = [j for (i, j), v in sol.arcs.items() if i == 0 and v and j != 0]
        j = int(rng.choice(firsts))
        out.loads[j] = 0 if rng.random() < 0.5 else Q + 1
        if out.loads[j] == Q + 1:
            # keep (10) satisfied downstream so only the bound is broken
            k, cur = Q + 2, j
            succ = {a: b for (a, b), v in sol.arcs.items() if v and a != 0 and b != 0}
            while cur in succ:
                cur = succ[cur]
                out.loads[cur] = k
                k += 1
    elif target == "13":
        j = int(rng.choice(nodes))
        op = problem.operations[j - 1]
        out.times[j] = op.earliest - 1.0 if rng.random() < 0.5 else op.latest + 1.0
    elif target == "14":
        (i, j) = sorted(k for k, v in sol.arcs.items() if v)[0]
        out.arcs[(i, j)] = 2 if rng.random() < 0.5 else 1
        if out.arcs[(i, j)] == 1:
            out.arcs[(0, n + 1)] = 1
    else:
        raise ValueError(target)
    return out
