"""Plain-text tables for routing problems and solutions.

A file is a sequence of ``[section]`` blocks, each a CSV table with a header
row.  Lines starting with ``#`` are metadata.  Floats are written with
``repr`` so a round trip is exact.

Problem file::

    [problem]   horizon_h,capacity,cd,ct,speed_kmh,fleet
    [nodes]     node,site_index,site_id,op_index,x_km,y_km,service_h,earliest_h,latest_h,planned_h,demand
    [edges]     i,j,dist_km,time_h          (one row per unordered pair i < j)

Node 0 is the depot; its site fields are empty.

Solution file::

    [solution]  fleet,transport_cost,distance_km
    [nodes]     node,site_index,op_index,load,start_h
    [arcs]      i,j,x                       (one row per traversed arc)
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, TextIO

import numpy as np

from .graph import OperationNode, RoutingProblem, VehicleSpec
from .solution import RoutingSolution


def _f(v) -> str:
    return repr(float(v))


def _write_section(out: TextIO, name: str, header: list[str], rows: Iterable[list]) -> None:
    out.write(f"[{name}]\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)


def _read_sections(text: str) -> dict[str, list[dict[str, str]]]:
    sections: dict[str, list[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
        elif current is None:
            raise ValueError(f"data before the first section: {line!r}")
        else:
            sections[current].append(line)
    return {k: list(csv.DictReader(io.StringIO("\n".join(v)))) for k, v in sections.items()}


def dump_problem(problem: RoutingProblem, out: TextIO, comments: Iterable[str] = ()) -> None:
    out.write("# distmaint routing problem v1\n")
    for c in comments:
        out.write(f"# {c}\n")
    v = problem.vehicle
    _write_section(
        out, "problem",
        ["horizon_h", "capacity", "cd", "ct", "speed_kmh", "fleet"],
        [[_f(problem.horizon), v.capacity, _f(v.cd), _f(v.ct), _f(v.speed),
          "" if problem.fleet is None else problem.fleet]],
    )
    rows = [[0, "", "depot", "", _f(problem.depot[0]), _f(problem.depot[1]), "0.0", "0.0",
             _f(problem.horizon), "0.0", 0]]
    for k, op in enumerate(problem.operations, start=1):
        rows.append([k, op.site_index, op.site_id, op.op_index, _f(op.x), _f(op.y), _f(op.service),
                     _f(op.earliest), _f(op.latest), _f(op.planned), op.demand])
    _write_section(
        out, "nodes",
        ["node", "site_index", "site_id", "op_index", "x_km", "y_km", "service_h",
         "earliest_h", "latest_h", "planned_h", "demand"],
        rows,
    )
    size = problem.n + 1
    _write_section(
        out, "edges", ["i", "j", "dist_km", "time_h"],
        ([i, j, _f(problem.dist[i, j]), _f(problem.time[i, j])]
         for i in range(size) for j in range(i + 1, size)),
    )


def load_problem(text: str) -> RoutingProblem:
    sec = _read_sections(text)
    p = sec["problem"][0]
    vehicle = VehicleSpec(int(p["capacity"]), float(p["cd"]), float(p["ct"]), float(p["speed_kmh"]))
    nodes = sorted(sec["nodes"], key=lambda r: int(r["node"]))
    depot = (float(nodes[0]["x_km"]), float(nodes[0]["y_km"]))
    ops = [
        OperationNode(
            site_index=int(r["site_index"]), site_id=r["site_id"], op_index=int(r["op_index"]),
            x=float(r["x_km"]), y=float(r["y_km"]), service=float(r["service_h"]),
            earliest=float(r["earliest_h"]), latest=float(r["latest_h"]),
            planned=float(r["planned_h"]), demand=int(r["demand"]),
        )
        for r in nodes[1:]
    ]
    size = len(ops) + 1
    dist = np.zeros((size, size))
    time = np.zeros((size, size))
    for r in sec["edges"]:
        i, j = int(r["i"]), int(r["j"])
        dist[i, j] = dist[j, i] = float(r["dist_km"])
        time[i, j] = time[j, i] = float(r["time_h"])
    return RoutingProblem(
        depot=depot, operations=ops, dist=dist, time=time, vehicle=vehicle,
        horizon=float(p["horizon_h"]), fleet=int(p["fleet"]) if p["fleet"] else None,
    )


def dump_solution(solution: RoutingSolution, out: TextIO, comments: Iterable[str] = ()) -> None:
    out.write("# distmaint routing solution v1\n")
    for c in comments:
        out.write(f"# {c}\n")
    _write_section(
        out, "solution", ["fleet", "transport_cost", "distance_km"],
        [[solution.fleet, _f(solution.transport_cost), _f(solution.distance_km)]],
    )
    rows = []
    for k in sorted(set(solution.loads) | set(solution.times)):
        site, op = solution.node_ops.get(k, ("", ""))
        load = solution.loads.get(k, "")
        start = solution.times.get(k)
        rows.append([k, site, op, load, "" if start is None else _f(start)])
    _write_section(out, "nodes", ["node", "site_index", "op_index", "load", "start_h"], rows)
    _write_section(out, "arcs", ["i", "j", "x"],
                   ([i, j, v] for (i, j), v in sorted(solution.arcs.items())))


def _routes_from_arcs(arcs: dict[tuple[int, int], int]) -> list[list[int]]:
    succ = {i: j for (i, j), v in arcs.items() if v and i != 0}
    routes = []
    for (i, j), v in sorted(arcs.items()):
        if i == 0 and v and j != 0:
            route, cur, seen = [0, j], j, {j}
            while cur in succ and succ[cur] != 0 and succ[cur] not in seen:
                cur = succ[cur]
                seen.add(cur)
                route.append(cur)
            route.append(0)
            routes.append(route)
    return routes


def load_solution(text: str) -> RoutingSolution:
    sec = _read_sections(text)
    head = sec["solution"][0]
    loads, times, node_ops = {}, {}, {}
    for r in sec["nodes"]:
        k = int(r["node"])
        if r["load"] != "":
            loads[k] = int(r["load"])
        if r["start_h"] != "":
            times[k] = float(r["start_h"])
        if r["site_index"] != "":
            node_ops[k] = (int(r["site_index"]), int(r["op_index"]))
    arcs = {(int(r["i"]), int(r["j"])): int(r["x"]) for r in sec.get("arcs", [])}
    return RoutingSolution(
        routes=_routes_from_arcs(arcs), arcs=arcs, loads=loads, times=times,
        fleet=int(head["fleet"]), transport_cost=float(head["transport_cost"]),
        distance_km=float(head["distance_km"]), node_ops=node_ops,
    )
