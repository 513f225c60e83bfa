"""Command-line front end.

Exit status: 0 ok, 1 usage or configuration error, 2 infeasible problem or
failed validation, 3 internal error.  Failures also print a one-line JSON
record on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import ConfigError, RunManifest, config_digest, default_config, parse_config
from .design import DesignInfeasible, barycentre_location, near_site_candidates, optimize_design, write_candidates
from .expkit import (
    ExperimentError, InvalidConfig, ScenarioConfig, StudyResult, capacity_study, depot_advantage,
    extension_study, fmt, generate_instance, run_scenario, write_aggregate, write_long, write_raw,
)
from .lhsa import (
    RoutingInfeasible, build_operation_graph, dump_problem, dump_solution, load_problem, load_solution,
    validate_solution,
)
from .omcr import OmcrError, realized_starts, write_trace
from .units import HOURS_PER_MONTH, UnitError, parse_quantity

log = logging.getLogger("distmaint")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class ValidationFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _duration(text: str) -> float:
    try:
        return parse_quantity(text, "duration")
    except UnitError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _rate(text: str) -> float:
    try:
        return parse_quantity(text, "rate")
    except UnitError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _length(text: str) -> float:
    try:
        return parse_quantity(text, "length")
    except UnitError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML study configuration (defaults ship with the package)")
    common.add_argument("--seed", type=int)
    common.add_argument("--n", type=int, help="number of sites N")
    common.add_argument("--radius-km", type=_length, help="disc radius R")
    common.add_argument("--q", type=int, nargs="+", help="vehicle capacities Q")
    common.add_argument("--replications", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="distmaint", description="Distributed maintenance planning and routing studies.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="one instance, full design loop")
    p.add_argument("--horizon", type=_duration, help="scheduling horizon, e.g. 6months")
    p.add_argument("--cp", type=_rate, help="downtime penalty CP ($/h)")
    p.add_argument("--depot", choices=("barycentre", "near-site"), default="barycentre")

    p = sub.add_parser("horizon-sweep", parents=[common], help="cost and availability against the horizon")
    p.add_argument("--horizon", type=_duration, nargs="+", help="horizon values")
    p.add_argument("--cp", type=_rate, nargs="+", help="penalty values")
    p.add_argument("--depot", choices=("barycentre", "near-site"), nargs="+")

    for name, text in (("depot-study", "annual distance per depot method as sites are added"),
                       ("capacity-study", "distance and transport cost per vehicle capacity"),
                       ("extension-study", "all costs as sites are added to a fixed depot")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--horizon", type=_duration, help="study horizon")
        p.add_argument("--cp", type=_rate, help="penalty value")
        p.add_argument("--added", type=int, help="sites added after the depot is fixed")
        p.add_argument("--step", type=int, help="site-count step")
        if name != "capacity-study":
            p.add_argument("--depot", choices=("barycentre", "near-site"), nargs="+")

    p = sub.add_parser("validate", help="check a stored routing solution against its problem")
    p.add_argument("problem", type=Path)
    p.add_argument("solution", type=Path)
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


_FLAGS = {
    "seed": "--seed", "n_sites": "--n", "radius_km": "--radius-km", "capacities": "--q",
    "replications": "--replications", "workers": "--workers", "horizons_h": "--horizon",
    "cp_values": "--cp", "study_horizon_h": "--horizon", "study_cp": "--cp",
    "extension_added": "--added", "extension_step": "--step", "depot_methods": "--depot",
}


def resolve_config(args) -> ScenarioConfig:
    cfg = parse_config(args.config) if args.config else default_config()
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.n is not None:
        over["n_sites"] = args.n
    if args.radius_km is not None:
        over["radius_km"] = args.radius_km
    if args.q:
        over["capacities"] = tuple(args.q)
    if args.replications is not None:
        over["replications"] = args.replications
    if args.workers is not None:
        over["workers"] = args.workers
    horizon, cp = getattr(args, "horizon", None), getattr(args, "cp", None)
    if args.command == "horizon-sweep":
        if horizon:
            over["horizons_h"] = tuple(horizon)
        if cp:
            over["cp_values"] = tuple(cp)
    elif args.command == "solve":
        if horizon is not None:
            over["horizons_h"] = (horizon,)
        if cp is not None:
            over["cp_values"] = (cp,)
    else:
        if horizon is not None:
            over["study_horizon_h"] = horizon
        if cp is not None:
            over["study_cp"] = cp
        if args.added is not None:
            over["extension_added"] = args.added
        if args.step is not None:
            over["extension_step"] = args.step
    depot = getattr(args, "depot", None)
    if args.command == "depot-study":
        over["depot_methods"] = tuple(depot or ("barycentre", "near-site"))
    elif args.command == "solve":
        over["depot_methods"] = (depot,)
    elif depot:
        over["depot_methods"] = tuple(depot)
    try:
        return replace(cfg, **over)
    except InvalidConfig as exc:
        name, msg = exc.problems[0]
        raise ConfigError(f"{_FLAGS.get(name, name)}: {msg}") from exc


class _Outputs:
    """Writes files under one directory, each headed by the manifest digest."""

    def __init__(self, root: Path, command: str, digest: str, seed: int):
        self.root = root
        self.meta = {"command": command, "digest": digest, "seed": seed, "tool_version": __version__}
        self.paths: list[str] = []
        root.mkdir(parents=True, exist_ok=True)

    def open(self, name: str):
        self.paths.append(name)
        return open(self.root / name, "w", newline="")


def _write_study(outs: _Outputs, stem: str, result: StudyResult, metrics=None) -> None:
    with outs.open(f"{stem}_raw.csv") as f:
        write_raw(result, f, outs.meta)
    with outs.open(f"{stem}.csv") as f:
        write_aggregate(result, f, outs.meta)
    with outs.open(f"{stem}_long.csv") as f:
        if metrics:
            write_long(result, f, outs.meta, metrics)
        else:
            write_long(result, f, outs.meta)


def _header(f, meta):
    for k, v in meta.items():
        f.write(f"# {k}: {v}\n")


def cmd_solve(cfg: ScenarioConfig, outs: _Outputs) -> None:
    tau, cp = cfg.horizons_h[0], cfg.cp_values[0]
    inst = generate_instance(cfg.seed, cfg).with_cp(cp)
    method = cfg.depot_methods[0]
    cands = ([barycentre_location(inst.sites, tau)] if method == "barycentre"
             else near_site_candidates(inst.sites))
    d = optimize_design(inst.sites, cfg.capacities, cands, tau, cfg.convergence,
                        cd=cfg.cd, ct=cfg.ct, speed=cfg.speed_kmh)
    res = d.result
    with outs.open("sites.csv") as f:
        _header(f, outs.meta)
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["site", "x_km", "y_km", "eta_h", "beta", "mttr_h", "cr", "cp"])
        for s in inst.sites:
            w.writerow([s.id, fmt(s.x), fmt(s.y), fmt(s.model.eta), fmt(s.model.beta),
                        fmt(s.mttr), fmt(s.cr), fmt(s.cp)])
    with outs.open("plan.csv") as f:
        _header(f, outs.meta)
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["site", "nop", "op", "planned_h", "earliest_h", "latest_h", "start_h",
                    "ttd_h", "failure_prob", "availability"])
        starts = realized_starts(res.schedule, res.plan)
        for i, (s, sp) in enumerate(zip(inst.sites, res.plan.site_plans)):
            for o in range(sp.nop):
                e = res.ttd[i][o]
                w.writerow([s.id, sp.nop, o, fmt(sp.starts[o]), fmt(sp.windows[o][0]), fmt(sp.windows[o][1]),
                            fmt(starts[i][o]), fmt(e.ttd), fmt(e.failure_prob), fmt(res.availability[i])])
    with outs.open("costs.csv") as f:
        _header(f, outs.meta)
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["depot_x_km", "depot_y_km", "capacity", "horizon_months", "transport", "operations",
                    "downtime", "total", "annual_km", "iterations"])
        c = res.costs
        w.writerow([fmt(d.depot[0]), fmt(d.depot[1]), d.capacity, fmt(tau / HOURS_PER_MONTH),
                    fmt(c.transport), fmt(c.operations), fmt(c.downtime), fmt(c.total),
                    fmt(res.annual_distance), res.iterations])
    with outs.open("candidates.csv") as f:
        _header(f, outs.meta)
        write_candidates(d, f)
    with outs.open("trace.csv") as f:
        _header(f, outs.meta)
        write_trace(res, f)
    problem = build_operation_graph(res.plan, inst.sites, d.depot, cfg.vehicle(d.capacity))
    comments = [f"{k}: {v}" for k, v in outs.meta.items()]
    with outs.open("problem.txt") as f:
        dump_problem(problem, f, comments)
    with outs.open("solution.txt") as f:
        dump_solution(res.schedule, f, comments)
    c = res.costs
    print(f"depot ({d.depot[0]:.3f}, {d.depot[1]:.3f}) km, Q = {d.capacity}, "
          f"total {c.total:.2f} $/h (transport {c.transport:.2f}, operations {c.operations:.2f}, "
          f"downtime {c.downtime:.2f})")


def cmd_depot_study(cfg: ScenarioConfig, outs: _Outputs) -> None:
    result = extension_study(cfg)
    _write_study(outs, "depot_study_detail", result, ("annual_km", "total"))
    means = {(r["depot_method"], r["n_sites"]): r["annual_km"] for r in result.aggregate}
    methods = list(cfg.depot_methods)
    adv = depot_advantage(result)
    with outs.open("depot_study.csv") as f:
        _header(f, outs.meta)
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["n_sites", *(f"{m}_annual_km_{s}" for m in methods for s in ("mean", "half_width")),
                    "advantage_km"])
        for n in sorted({n for _, n in means}):
            row = [n]
            for m in methods:
                st = means.get((m, n))
                row += ["", ""] if st is None else [fmt(st.mean), fmt(st.half_width)]
            w.writerow(row + [fmt(adv[n]) if n in adv else ""])
    for n, a in sorted(adv.items()):
        print(f"N = {n}: barycentre saves {a:.1f} km/year over the near-site depot")


def run_command(args) -> int:
    if args.command == "validate":
        problem = load_problem(args.problem.read_text())
        solution = load_solution(args.solution.read_text())
        report = validate_solution(problem, solution)
        for line in report.lines():
            print(line)
        if not report.ok:
            raise ValidationFailed("constraints violated: " + ", ".join(report.failed))
        return EXIT_OK

    cfg = resolve_config(args)
    digest = config_digest(cfg, args.command)
    outs = _Outputs(args.out, args.command, digest, cfg.seed)
    if args.command == "solve":
        cmd_solve(cfg, outs)
    elif args.command == "horizon-sweep":
        result = run_scenario(cfg)
        _write_study(outs, "horizon_sweep", result)
        for rec in result.aggregate:
            print(f"tau {rec['tau_months']:g} months, cp {rec['cp']:g}: total {rec['total'].mean:.2f} "
                  f"+- {rec['total'].half_width:.2f} $/h, availability {rec['availability'].mean:.3f}")
    elif args.command == "depot-study":
        cmd_depot_study(cfg, outs)
    elif args.command == "capacity-study":
        result = capacity_study(cfg)
        _write_study(outs, "capacity_study", result, ("annual_km", "transport", "total"))
    elif args.command == "extension-study":
        result = extension_study(cfg)
        _write_study(outs, "extension_study", result)
    manifest = RunManifest(args.command, digest, cfg.seed, __version__, sorted(outs.paths))
    (args.out / "manifest.json").write_text(manifest.to_json())
    return EXIT_OK


def _fail(code: int, exc: BaseException, command: Optional[str]) -> int:
    record = {"status": code, "error": type(exc).__name__, "message": str(exc), "command": command}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    command = None
    try:
        args = parser.parse_args(argv)
        command = args.command
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return run_command(args)
    except (UsageError, ConfigError, UnitError, InvalidConfig) as exc:
        return _fail(EXIT_USAGE, exc, command)
    except (RoutingInfeasible, OmcrError, DesignInfeasible, ExperimentError, ValidationFailed) as exc:
        return _fail(EXIT_INFEASIBLE, exc, command)
    except (OSError, ValueError) as exc:
        # unreadable or malformed input files
        return _fail(EXIT_USAGE, exc, command)
    except Exception as exc:  # pragma: no cover - last resort
        log.debug("internal error", exc_info=True)
        return _fail(EXIT_INTERNAL, exc, command)


if __name__ == "__main__":
    sys.exit(main())
