"""
Planning and routing one maintenance instance
=============================================

Ten sites on a 50 km disc share one depot and one vehicle type.  We pick a
six month horizon, let the iterative planner choose how often to visit each
site, and look at the resulting routes and costs.
"""

import numpy as np

from distmaint.config import default_config
from distmaint.design import barycentre_location
from distmaint.expkit import generate_instance
from distmaint.omcr import run_omcr
from distmaint.units import HOURS_PER_MONTH

config = default_config()
instance = generate_instance(seed=7, config=config).with_cp(100.0)
horizon = 6 * HOURS_PER_MONTH

# The depot sits at the failure-weighted barycentre of the sites.
depot = barycentre_location(instance.sites, horizon)
print("depot at (%.1f, %.1f) km" % depot)

result = run_omcr(instance.sites, depot, config.vehicle(4), horizon, config.convergence)

# Operations per site and their planned start times in months.
for site, sp in zip(instance.sites, result.plan.site_plans):
    months = np.round(np.asarray(sp.starts) / HOURS_PER_MONTH, 2)
    print(f"{site.id} beta={site.model.beta:g} nop={sp.nop} starts={months}")

# Costs are hourly rates over the horizon.
c = result.costs
print(f"transport {c.transport:.1f}  operations {c.operations:.1f}  downtime {c.downtime:.1f}  total {c.total:.1f} $/h")
print(f"availability min {min(result.availability):.3f}, mean {np.mean(result.availability):.3f}")
print(f"{result.iterations} iterations, cost trace {np.round(result.cost_trace, 1)}")
print(f"{result.schedule.fleet} routes, {result.annual_distance:.0f} km per year")
