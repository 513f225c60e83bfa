"""
Where to put the depot, and how big a vehicle to use
====================================================

The design is fixed on ten sites and the network then grows to forty.  A
depot at the failure-weighted barycentre stays central as sites are added,
while a depot at one of the original sites drifts off-centre.  Larger
vehicles need fewer trips, so they drive fewer kilometres a year.
"""

from dataclasses import replace

from distmaint.config import default_config
from distmaint.expkit import capacity_study, depot_advantage, extension_study

config = replace(default_config(), replications=5)

ext = extension_study(replace(config, depot_methods=("barycentre", "near-site")))
print("near-site minus barycentre annual km, by number of sites")
for n, gap in sorted(depot_advantage(ext).items()):
    print(f"  N={n:2d}  {gap:+8.1f} km")

cap = capacity_study(replace(config, capacities=(4, 8)))
print("\nannual km by vehicle capacity")
for r in sorted(cap.aggregate, key=lambda r: (r["capacity"], r["n_sites"])):
    km = r["annual_km"]
    print(f"  Q={r['capacity']}  N={r['n_sites']:2d}  {km.mean:7.0f} +/- {km.half_width:5.0f} km")
