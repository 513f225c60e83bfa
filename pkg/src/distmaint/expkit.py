"""Experiment harness: random instances, scenario sweeps and replication statistics.

Sites are spread uniformly over a disc.  Every replication draws its own
instance from a seed derived from ``(config.seed, replication)``, so results
do not depend on the order in which replications finish.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence, TextIO

import numpy as np
from scipy import stats

from .design import barycentre_location, near_site_candidates, optimize_design
from .lhsa import VehicleSpec, euclidean_matrix
from .mpa import DEFAULT_WINDOW_FRACTION, Site
from .omcr import ConvergenceConfig, OmcrResult, run_omcr
from .reliability import FailureModel
from .units import HOURS_PER_MONTH, HOURS_PER_YEAR

log = logging.getLogger(__name__)

DEPOT_METHODS = ("barycentre", "near-site")
CAPACITY_MODES = ("optimize", "sweep")
MAX_FAILURE_SHARE = 0.2
METRICS = ("total", "transport", "operations", "downtime", "availability", "annual_km", "nop_mean")


class ExperimentError(RuntimeError):
    pass


class InvalidConfig(ValueError):
    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{name} {msg}" for name, msg in problems))


@dataclass(frozen=True)
class ScenarioConfig:
    """Inputs of a study; durations in hours, money in $, lengths in km."""

    n_sites: int = 10
    radius_km: float = 50.0
    eta_h: float = HOURS_PER_YEAR
    betas: tuple[float, float] = (2.0, 3.0)
    mttr_h: float = 3.0
    cr: float = 100000.0
    cp_values: tuple[float, ...] = (10.0, 100.0, 1000.0)
    horizons_h: tuple[float, ...] = tuple(m * HOURS_PER_MONTH for m in (2, 4, 6, 8, 12, 18, 24))
    capacities: tuple[int, ...] = (4, 6, 8)
    cd: float = 2.0
    ct: float = 30.0
    speed_kmh: float = 80.0
    depot_methods: tuple[str, ...] = ("barycentre",)
    capacity_mode: str = "optimize"
    study_horizon_h: float = 6 * HOURS_PER_MONTH
    study_cp: float = 100.0
    extension_added: int = 30
    extension_step: int = 10
    replications: int = 10
    seed: int = 1
    workers: int = 1
    rel_tol: float = 0.01
    max_iter: int = 20
    window_fraction: float = DEFAULT_WINDOW_FRACTION

    def __post_init__(self):
        problems: list[tuple[str, str]] = []

        def check(ok, name, msg):
            if not ok:
                problems.append((name, msg))

        check(self.n_sites >= 1, "n_sites", "must be at least 1")
        check(self.radius_km > 0, "radius_km", "must be positive")
        check(self.eta_h > 0, "eta_h", "must be positive")
        check(len(self.betas) == 2 and min(self.betas) >= 1, "betas", "need two shapes, each >= 1")
        check(self.mttr_h > 0, "mttr_h", "must be positive")
        check(self.cr >= 0, "cr", "must be non-negative")
        check(bool(self.cp_values) and all(c >= 0 for c in self.cp_values), "cp_values",
              "need at least one non-negative value")
        check(self.study_cp >= 0, "study_cp", "must be non-negative")
        check(bool(self.horizons_h) and all(0 < h <= 2 * HOURS_PER_YEAR for h in self.horizons_h),
              "horizons_h", "values must lie in (0, 2] years")
        check(0 < self.study_horizon_h <= 2 * HOURS_PER_YEAR, "study_horizon_h", "must lie in (0, 2] years")
        check(bool(self.capacities) and all(int(q) == q and q >= 1 for q in self.capacities),
              "capacities", "must be integers >= 1")
        check(self.speed_kmh > 0, "speed_kmh", "must be positive")
        check(self.cd >= 0, "cd", "must be non-negative")
        check(self.ct >= 0, "ct", "must be non-negative")
        check(bool(self.depot_methods) and all(m in DEPOT_METHODS for m in self.depot_methods),
              "depot_methods", f"must be drawn from {DEPOT_METHODS}")
        check(self.capacity_mode in CAPACITY_MODES, "capacity_mode", f"must be one of {CAPACITY_MODES}")
        check(self.replications >= 1, "replications", "must be at least 1")
        check(self.extension_added >= 0, "extension_added", "must be non-negative")
        check(self.extension_step >= 1, "extension_step", "must be at least 1")
        check(self.workers >= 1, "workers", "must be at least 1")
        check(self.rel_tol > 0, "rel_tol", "must be positive")
        check(self.max_iter >= 1, "max_iter", "must be at least 1")
        check(0 <= self.window_fraction <= 0.5, "window_fraction", "must lie in [0, 0.5]")
        if problems:
            raise InvalidConfig(problems)

    @property
    def convergence(self) -> ConvergenceConfig:
        return ConvergenceConfig(self.rel_tol, self.max_iter, self.window_fraction)

    def vehicle(self, capacity: int) -> VehicleSpec:
        return VehicleSpec(capacity=int(capacity), cd=self.cd, ct=self.ct, speed=self.speed_kmh)


@dataclass
class Instance:
    seed: int
    sites: list[Site]

    @property
    def points(self) -> np.ndarray:
        return np.array([(s.x, s.y) for s in self.sites], dtype=float)

    @property
    def dist(self) -> np.ndarray:
        return euclidean_matrix(self.points)

    def with_cp(self, cp: float) -> "Instance":
        return Instance(self.seed, [replace(s, cp=float(cp)) for s in self.sites])

    def head(self, n: int) -> "Instance":
        return Instance(self.seed, self.sites[:n])


def replication_seed(seed: int, replication: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(replication)]).generate_state(1)[0])


def generate_instance(seed: int, config: ScenarioConfig, n_sites: Optional[int] = None) -> Instance:
    """Sites uniform over the disc of radius ``config.radius_km``.

    Shapes alternate starting with ``betas[0]``, so any prefix of the site
    list is split in half and an odd count gives the first shape the extra
    site.  Drawing more sites from the same seed extends the list without
    moving the existing ones.
    """
    n = config.n_sites if n_sites is None else int(n_sites)
    rng = np.random.default_rng(seed)
    sites = []
    for i in range(n):
        u, v = rng.random(2)
        r = config.radius_km * math.sqrt(u)
        a = 2.0 * math.pi * v
        beta = config.betas[i % 2]
        sites.append(Site(
            id=f"s{i:02d}", x=r * math.cos(a), y=r * math.sin(a),
            mttr=config.mttr_h, cr=config.cr, cp=config.cp_values[0],
            model=FailureModel(config.eta_h, beta),
        ))
    return Instance(int(seed), sites)


@dataclass(frozen=True)
class ReplicatedStat:
    mean: float
    half_width: float
    n: int

    @property
    def low_confidence(self) -> bool:
        return self.n < 2


def replicated_stat(values: Iterable[float], confidence: float = 0.95) -> ReplicatedStat:
    """Mean and confidence half-width; t quantile below 30 samples, normal above."""
    x = np.asarray(list(values), dtype=float)
    if x.size == 0:
        raise ValueError("no values")
    mean = float(math.fsum(x) / x.size)
    if x.size == 1:
        return ReplicatedStat(mean, 0.0, 1)
    sd = float(np.std(x, ddof=1))
    q = 0.5 + confidence / 2
    crit = stats.t.ppf(q, x.size - 1) if x.size < 30 else stats.norm.ppf(q)
    return ReplicatedStat(mean, float(crit * sd / math.sqrt(x.size)), int(x.size))


def _metrics(res: OmcrResult) -> dict:
    c = res.costs
    return {
        "total": c.total,
        "transport": c.transport,
        "operations": c.operations,
        "downtime": c.downtime,
        "availability": float(np.mean(res.availability)),
        "annual_km": res.annual_distance,
        "nop_mean": float(np.mean(res.plan.nops)),
        "iterations": res.iterations,
    }


def _candidates(method: str, sites: Sequence[Site], horizon: float) -> list[tuple[float, float]]:
    if method == "barycentre":
        return [barycentre_location(sites, horizon)]
    return near_site_candidates(sites)


# one replication of each study; module level so worker processes can pickle them


def _scenario_replication(config: ScenarioConfig, r: int) -> list[dict]:
    seed = replication_seed(config.seed, r)
    base = generate_instance(seed, config)
    rows = []
    for cp in config.cp_values:
        sites = base.with_cp(cp).sites
        for tau in config.horizons_h:
            for method in config.depot_methods:
                cands = _candidates(method, sites, tau)
                groups = ([config.capacities] if config.capacity_mode == "optimize"
                          else [(q,) for q in config.capacities])
                for qs in groups:
                    d = optimize_design(sites, qs, cands, tau, config.convergence,
                                        cd=config.cd, ct=config.ct, speed=config.speed_kmh)
                    rows.append({
                        "replication": r, "seed": seed,
                        "tau_months": tau / HOURS_PER_MONTH, "cp": cp, "depot_method": method,
                        "capacity": "best" if config.capacity_mode == "optimize" else qs[0],
                        "n_sites": len(sites), "chosen_q": d.capacity,
                        "depot_x": d.depot[0], "depot_y": d.depot[1], **_metrics(d.result),
                    })
    return rows


def _site_counts(initial_n: int, added: int, step: int) -> list[int]:
    counts = list(range(initial_n, initial_n + added + 1, step))
    if counts[-1] != initial_n + added:
        counts.append(initial_n + added)
    return counts


def _extension_replication(config: ScenarioConfig, r: int, initial_n: int, added: int) -> list[dict]:
    seed = replication_seed(config.seed, r)
    tau, cp = config.study_horizon_h, config.study_cp
    full = generate_instance(seed, config, initial_n + added).with_cp(cp)
    rows = []
    for method in config.depot_methods:
        first = full.head(initial_n).sites
        d = optimize_design(first, config.capacities, _candidates(method, first, tau), tau,
                            config.convergence, cd=config.cd, ct=config.ct, speed=config.speed_kmh)
        for n in _site_counts(initial_n, added, config.extension_step):
            res = d.result if n == initial_n else run_omcr(
                full.head(n).sites, d.depot, config.vehicle(d.capacity), tau, config.convergence)
            rows.append({
                "replication": r, "seed": seed, "tau_months": tau / HOURS_PER_MONTH, "cp": cp,
                "depot_method": method, "capacity": "best", "n_sites": n,
                "chosen_q": d.capacity, "depot_x": d.depot[0], "depot_y": d.depot[1],
                **_metrics(res),
            })
    return rows


def _capacity_replication(config: ScenarioConfig, r: int, initial_n: int, added: int) -> list[dict]:
    seed = replication_seed(config.seed, r)
    tau, cp = config.study_horizon_h, config.study_cp
    full = generate_instance(seed, config, initial_n + added).with_cp(cp)
    depot = barycentre_location(full.head(initial_n).sites, tau)
    rows = []
    for q in sorted(config.capacities):
        for n in _site_counts(initial_n, added, config.extension_step):
            res = run_omcr(full.head(n).sites, depot, config.vehicle(q), tau, config.convergence)
            rows.append({
                "replication": r, "seed": seed, "tau_months": tau / HOURS_PER_MONTH, "cp": cp,
                "depot_method": "barycentre", "capacity": q, "n_sites": n, "chosen_q": q,
                "depot_x": depot[0], "depot_y": depot[1], **_metrics(res),
            })
    return rows


@dataclass
class StudyResult:
    raw: list[dict]
    aggregate: list[dict]
    failures: list[tuple[int, str]] = field(default_factory=list)
    replications: int = 0


AXES = ("tau_months", "cp", "depot_method", "capacity", "n_sites")


def aggregate_rows(raw: Sequence[dict], metrics: Sequence[str] = METRICS) -> list[dict]:
    """Group replicate rows by the sweep axes and reduce each metric."""
    groups: dict[tuple, list[dict]] = {}
    for row in raw:
        groups.setdefault(tuple(row[a] for a in AXES), []).append(row)
    out = []
    for key in sorted(groups, key=lambda k: tuple((str(type(v)), v) for v in k)):
        rows = sorted(groups[key], key=lambda r: r["replication"])
        rec = dict(zip(AXES, key))
        for m in metrics:
            rec[m] = replicated_stat(r[m] for r in rows)
        rec["n"] = len(rows)
        out.append(rec)
    return out


def _run_replications(config: ScenarioConfig, job: Callable, *args) -> StudyResult:
    reps = range(config.replications)
    outcomes: list = []
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_guarded, job, config, r, *args) for r in reps]
            outcomes = [f.result() for f in futures]
    else:
        outcomes = [_guarded(job, config, r, *args) for r in reps]
    raw, failures = [], []
    for r, (rows, err) in zip(reps, outcomes):
        if err is None:
            raw.extend(rows)
        else:
            log.warning("replication %d failed: %s", r, err)
            failures.append((r, err))
    if len(failures) > MAX_FAILURE_SHARE * config.replications:
        raise ExperimentError(
            f"{len(failures)} of {config.replications} replications failed: {failures[0][1]}"
        )
    return StudyResult(raw, aggregate_rows(raw), failures, config.replications)


def _guarded(job, config, r, *args):
    try:
        return job(config, r, *args), None
    except Exception as exc:  # counted by the caller
        return [], f"{type(exc).__name__}: {exc}"


def run_scenario(config: ScenarioConfig) -> StudyResult:
    """Every replication over cp x horizon x depot method x capacity."""
    return _run_replications(config, _scenario_replication)


def extension_study(config: ScenarioConfig, initial_n: Optional[int] = None,
                    added: Optional[int] = None) -> StudyResult:
    """Depot and capacity fixed on the first ``initial_n`` sites, then sites are appended."""
    initial_n = config.n_sites if initial_n is None else initial_n
    added = config.extension_added if added is None else added
    if added < 0 or initial_n < 1:
        raise ValueError("need initial_n >= 1 and added >= 0")
    return _run_replications(config, _extension_replication, initial_n, added)


def capacity_study(config: ScenarioConfig, initial_n: Optional[int] = None,
                   added: Optional[int] = None) -> StudyResult:
    """Each capacity on the same instances and barycentre depot, across site counts."""
    initial_n = config.n_sites if initial_n is None else initial_n
    added = config.extension_added if added is None else added
    if added < 0 or initial_n < 1:
        raise ValueError("need initial_n >= 1 and added >= 0")
    return _run_replications(config, _capacity_replication, initial_n, added)


def depot_advantage(result: StudyResult) -> dict[int, float]:
    """Near-site minus barycentre mean annual km per site count."""
    means = {(r["depot_method"], r["n_sites"]): r["annual_km"].mean for r in result.aggregate}
    counts = sorted({n for _, n in means})
    return {n: means[("near-site", n)] - means[("barycentre", n)] for n in counts
            if ("near-site", n) in means and ("barycentre", n) in means}


# CSV output


def fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".10g")
    return str(v)


def _header(out: TextIO, meta: dict) -> None:
    for k, v in meta.items():
        out.write(f"# {k}: {v}\n")


def write_raw(result: StudyResult, out: TextIO, meta: Optional[dict] = None) -> None:
    _header(out, meta or {})
    cols = ["replication", "seed", *AXES, "chosen_q", "depot_x", "depot_y", *METRICS, "iterations"]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(cols)
    for row in sorted(result.raw, key=lambda r: (r["replication"], *(str(r[a]) for a in AXES))):
        w.writerow([fmt(row[c]) for c in cols])


def write_aggregate(result: StudyResult, out: TextIO, meta: Optional[dict] = None) -> None:
    """Axes columns, then one mean/half-width pair per metric, then n."""
    info = dict(meta or {})
    info["failed_replications"] = len(result.failures)
    _header(out, info)
    w = csv.writer(out, lineterminator="\n")
    w.writerow([*AXES, *(f"{m}_{s}" for m in METRICS for s in ("mean", "half_width")), "n"])
    for rec in result.aggregate:
        row = [fmt(rec[a]) for a in AXES]
        for m in METRICS:
            row += [fmt(rec[m].mean), fmt(rec[m].half_width)]
        w.writerow(row + [rec["n"]])


def write_long(result: StudyResult, out: TextIO, meta: Optional[dict] = None,
               metrics: Sequence[str] = METRICS) -> None:
    """One observation per row, for plotting."""
    _header(out, meta or {})
    w = csv.writer(out, lineterminator="\n")
    w.writerow([*AXES, "metric", "mean", "half_width", "n"])
    for rec in result.aggregate:
        for m in metrics:
            s = rec[m]
            w.writerow([*(fmt(rec[a]) for a in AXES), m, fmt(s.mean), fmt(s.half_width), s.n])
