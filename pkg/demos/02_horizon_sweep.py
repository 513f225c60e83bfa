"""
How long should the planning horizon be?
========================================

Longer horizons spread the fixed cost of an operation but let more failures
accumulate in between.  We sweep the horizon for three downtime penalties
and print the mean total cost with its 95% half-width.
"""

from dataclasses import replace

from distmaint.config import default_config
from distmaint.expkit import run_scenario
from distmaint.units import HOURS_PER_MONTH

# Three replications keep the demo quick; the default is ten.
config = replace(default_config(), replications=3)
study = run_scenario(config)

for cp in config.cp_values:
    print(f"\nCP = {cp:g} $/h")
    rows = [r for r in study.aggregate if r["cp"] == cp]
    for r in sorted(rows, key=lambda r: r["tau_months"]):
        total = r["total"]
        print(f"  {r['tau_months']:5.1f} months  total {total.mean:8.1f} +/- {total.half_width:6.1f}"
              f"  availability {r['availability'].mean:.3f}")

best = min((r for r in study.aggregate if r["cp"] == 100.0), key=lambda r: r["total"].mean)
print(f"\ncheapest horizon at CP=100: {best['tau_months']:.0f} months")
print(f"failed replications: {len(study.failures)}")
print(f"(one month = {HOURS_PER_MONTH:g} h)")
