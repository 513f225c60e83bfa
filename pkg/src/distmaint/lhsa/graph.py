from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..mpa import MaintenancePlan, Site


@dataclass(frozen=True)
class VehicleSpec:
    """One vehicle type of a homogeneous fleet.

    ``cd`` is charged per km *and* per unit of capacity, so a heavier vehicle
    costs more per km travelled.
    """

    capacity: int = 4
    cd: float = 2.0
    ct: float = 30.0
    speed: float = 80.0

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be at least 1")
        if not self.speed > 0:
            raise ValueError("speed must be positive")
        if self.cd < 0 or self.ct < 0:
            raise ValueError("unit transport costs must be non-negative")


@dataclass(frozen=True)
class OperationNode:
    site_index: int
    site_id: str
    op_index: int
    x: float
    y: float
    service: float
    earliest: float
    latest: float
    planned: float
    demand: int = 1

    @property
    def center(self) -> float:
        return 0.5 * (self.earliest + self.latest)


@dataclass
class RoutingProblem:
    """Aggregate operation graph; node 0 is the depot, node k is ``operations[k-1]``."""

    depot: tuple[float, float]
    operations: list[OperationNode]
    dist: np.ndarray
    time: np.ndarray
    vehicle: VehicleSpec
    horizon: float
    fleet: Optional[int] = None
    _weights: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        size = len(self.operations) + 1
        for name in ("dist", "time"):
            mat = np.asarray(getattr(self, name), dtype=float)
            if mat.shape != (size, size):
                raise ValueError(f"{name} must be {size}x{size}, got {mat.shape}")
            if not np.allclose(mat, mat.T) or np.any(mat < 0) or np.any(np.diag(mat) != 0):
                raise ValueError(f"{name} must be symmetric, non-negative with a zero diagonal")
            setattr(self, name, mat)
        for op in self.operations:
            if not 0 <= op.earliest <= op.latest <= self.horizon:
                raise ValueError(f"operation {op.site_id}/{op.op_index}: bad window")

    @property
    def n(self) -> int:
        return len(self.operations)

    @property
    def capacity(self) -> int:
        return self.vehicle.capacity

    @property
    def min_fleet(self) -> int:
        return max(1, math.ceil(self.n / self.capacity))

    @property
    def weights(self) -> np.ndarray:
        """Per-arc transport cost in $ (before dividing by the horizon)."""
        if self._weights is None:
            v = self.vehicle
            self._weights = v.capacity * v.cd * self.dist + v.ct * self.time
        return self._weights

    def subproblem(self, nodes: Sequence[int], fleet: Optional[int] = None) -> "RoutingProblem":
        """Restrict to the given operation node ids (1-based); the depot is kept."""
        idx = [0, *nodes]
        return RoutingProblem(
            depot=self.depot,
            operations=[self.operations[k - 1] for k in nodes],
            dist=self.dist[np.ix_(idx, idx)],
            time=self.time[np.ix_(idx, idx)],
            vehicle=self.vehicle,
            horizon=self.horizon,
            fleet=fleet,
        )


def euclidean_matrix(points: Sequence[tuple[float, float]]) -> np.ndarray:
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    diff = p[:, None, :] - p[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def build_operation_graph(
    plan: MaintenancePlan,
    sites: Sequence[Site],
    depot: tuple[float, float],
    vehicle: VehicleSpec,
) -> RoutingProblem:
    """One node per (site, operation), ordered by site then operation."""
    if plan.n == 0:
        raise ValueError("plan has no operations")
    ops = []
    for i, (site, sp) in enumerate(zip(sites, plan.site_plans)):
        for o, (s, (e, l)) in enumerate(zip(sp.starts, sp.windows)):
            ops.append(OperationNode(i, site.id, o, site.x, site.y, site.mttr, e, l, s))
    points = [depot] + [(op.x, op.y) for op in ops]
    dist = euclidean_matrix(points)
    return RoutingProblem(
        depot=tuple(depot),
        operations=ops,
        dist=dist,
        time=dist / vehicle.speed,
        vehicle=vehicle,
        horizon=plan.horizon,
    )
