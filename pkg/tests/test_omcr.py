import io

import pytest

from distmaint.lhsa import VehicleSpec, solution_from_routes
from distmaint.lhsa.graph import build_operation_graph
from distmaint.mpa import MaintenancePlan, Site, SitePlan, maintenance_cost
from distmaint.omcr import (
    ConvergenceConfig, CostBreakdown, compute_ttd_matrix, realized_starts, run_omcr, write_trace,
)
from distmaint.reliability import FailureModel, site_availability
from distmaint.units import HOURS_PER_YEAR, months

from oracles import quad_downtime

ETA = HOURS_PER_YEAR


def ring(n, cp, radius=30.0):
    import math
    return [
        Site(f"s{i}", radius * math.cos(2 * math.pi * i / n), radius * math.sin(2 * math.pi * i / n),
             3.0, 1e5, cp, FailureModel(ETA, 2.0 if i % 2 == 0 else 3.0))
        for i in range(n)
    ]


def schedule_for(plan, sites, depot=(0.0, 0.0)):
    problem = build_operation_graph(plan, sites, depot, VehicleSpec())
    return problem, solution_from_routes(problem, [[k] for k in range(1, problem.n + 1)])


def test_breakdown_identity():
    c = CostBreakdown.from_parts(0.1, 0.2, 0.3)
    assert c.total == 0.1 + 0.2 + 0.3


def test_zero_failure_mass_gives_zero_downtime():
    site = Site("a", 1.0, 0.0, 3.0, 1e5, 100.0, FailureModel(1e9, 3.0))
    plan = MaintenancePlan((SitePlan(2, (100.0, 300.0), ((90.0, 110.0), (290.0, 310.0))),), 400.0)
    _, sched = schedule_for(plan, [site])
    ttd = compute_ttd_matrix(sched, plan, [site])
    assert all(e.ttd == 0.0 and e.failure_prob == 0.0 for e in ttd[0])


def test_single_operation_at_eta_matches_quadrature():
    site = Site("a", 1.0, 0.0, 3.0, 1e5, 100.0, FailureModel(ETA, 2.0))
    plan = MaintenancePlan((SitePlan(1, (ETA,), ((ETA, ETA),)),), ETA)
    _, sched = schedule_for(plan, [site])
    est = compute_ttd_matrix(sched, plan, [site])[0][0]
    ttd, prob = quad_downtime(site.model, ETA)
    assert est.ttd == pytest.approx(ttd, rel=1e-9)
    assert est.failure_prob == pytest.approx(prob, abs=1e-15)


def test_delay_raises_failure_probability():
    site = Site("a", 1.0, 0.0, 3.0, 1e5, 100.0, FailureModel(ETA, 2.0))
    tau = months(6)
    plan = MaintenancePlan((SitePlan(2, (1000.0, 3000.0), ((800.0, 1200.0), (2800.0, 3200.0))),), tau)
    _, sched = schedule_for(plan, [site])
    base = compute_ttd_matrix(sched, plan, [site])[0]
    for node in (1, 2):
        late = sched.copy()
        late.times[node] += 50.0
        moved = compute_ttd_matrix(late, plan, [site])[0]
        assert moved[node - 1].failure_prob > base[node - 1].failure_prob


def test_missing_operation_is_structural_error():
    site = Site("a", 1.0, 0.0, 3.0, 1e5, 100.0, FailureModel(ETA, 2.0))
    plan = MaintenancePlan((SitePlan(2, (10.0, 30.0), ((5.0, 15.0), (25.0, 35.0))),), 40.0)
    _, sched = schedule_for(plan, [site])
    del sched.node_ops[2]
    with pytest.raises(ValueError):
        realized_starts(sched, plan)


def test_free_downtime_converges_in_two_iterations():
    res = run_omcr(ring(4, 0.0), (0.0, 0.0), VehicleSpec(), months(6))
    assert res.iterations == 2
    assert res.plan.nops == (1, 1, 1, 1)
    assert res.costs.downtime == 0.0
    assert all(b <= a for a, b in zip(res.cost_trace[1:], res.cost_trace[2:]))


@pytest.mark.parametrize("cp, months_", [(10.0, 24), (100.0, 6), (1000.0, 12), (1000.0, 2)])
def test_loop_invariants(cp, months_):
    sites = ring(6, cp)
    tau = months(months_)
    res = run_omcr(sites, (1.0, -2.0), VehicleSpec(capacity=4), tau)
    assert res.trace[0].nops == (1,) * len(sites)
    assert 1 <= res.iterations == len(res.cost_trace) <= 20
    assert res.costs.total <= min(res.cost_trace)
    c = res.costs
    assert c.total == c.transport + c.operations + c.downtime
    assert min(c.transport, c.operations, c.downtime) >= 0
    # recompute everything from the returned plan and schedule
    ttd = compute_ttd_matrix(res.schedule, res.plan, sites)
    ops, down = maintenance_cost(res.plan, sites, ttd)
    assert ops == c.operations and down == c.downtime
    assert res.schedule.transport_cost == c.transport
    starts = realized_starts(res.schedule, res.plan)
    for i, row in enumerate(ttd):
        a = site_availability(starts[i], [e.ttd for e in row], [e.failure_prob for e in row], tau)
        assert abs(a - res.availability[i]) <= 1e-12
        assert 0.0 <= res.availability[i] <= 1.0
    assert res.annual_distance == pytest.approx(res.schedule.distance_km * HOURS_PER_YEAR / tau)


def test_deterministic():
    sites = ring(5, 100.0)
    a = run_omcr(sites, (0.0, 0.0), VehicleSpec(), months(8))
    b = run_omcr(sites, (0.0, 0.0), VehicleSpec(), months(8))
    assert a.cost_trace == b.cost_trace and a.schedule == b.schedule


def test_max_iter_and_validation():
    sites = ring(3, 1000.0)
    res = run_omcr(sites, (0.0, 0.0), VehicleSpec(), months(12), ConvergenceConfig(max_iter=1))
    assert res.iterations == 1
    with pytest.raises(ValueError):
        run_omcr(sites, (0.0, 0.0), VehicleSpec(), 0.0)


def test_trace_csv():
    res = run_omcr(ring(3, 100.0), (0.0, 0.0), VehicleSpec(), months(6))
    buf = io.StringIO()
    write_trace(res, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "iteration,nops,transport,operations,downtime,total"
    assert len(lines) == res.iterations + 1
