"""Evacuation assignment: scenario, optimal flow matrix, constraint checker.

Every blocked station must ship its whole in-window demand to unblocked
stations, each of which can absorb ``(X_j - 1) * Y_j`` extra passengers.
Because the total shipped volume is fixed by the conservation constraint,
minimising the average cost per passenger is the same as minimising total
cost, so the problem is solved exactly as a transportation problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .costmatrix import CostMatrix
from .errors import ContractError, InfeasibleError, IsolationError
from .network import NetworkModel

EPSILON = 1e-6
DEFAULT_CAPACITY_RATIO = 1.5
DEFAULT_OPERATING_MINUTES = 1080.0

REL_TOL = 1e-6
ABS_TOL = 1e-9


@dataclass(frozen=True)
class Scenario:
    blocked: np.ndarray
    demand: np.ndarray
    capacity_ratio: np.ndarray | float = DEFAULT_CAPACITY_RATIO
    horizon_T_lm: float = 30.0
    station_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        blocked = np.asarray(self.blocked).astype(bool)
        demand = np.asarray(self.demand, dtype=float)
        n = blocked.shape[0]
        if blocked.ndim != 1 or demand.shape != (n,):
            raise ContractError(f"blocked/demand shapes disagree: {blocked.shape} vs {demand.shape}")
        ratio = np.broadcast_to(np.asarray(self.capacity_ratio, dtype=float), (n,)).copy()
        if not blocked.any():
            raise ContractError("scenario needs at least one blocked station")
        if not np.all(np.isfinite(demand)) or (demand < 0).any():
            raise ContractError("demand must be finite and non-negative")
        if not (ratio >= 1.0).all():
            raise ContractError("capacity_ratio must be >= 1 everywhere")
        if not self.horizon_T_lm > 0:
            raise ContractError("horizon_T_lm must be > 0")
        if self.station_ids is not None and len(self.station_ids) != n:
            raise ContractError("station_ids length differs from scenario size")
        for a in (blocked, demand, ratio):
            a.setflags(write=False)
        object.__setattr__(self, "blocked", blocked)
        object.__setattr__(self, "demand", demand)
        object.__setattr__(self, "capacity_ratio", ratio)

    @property
    def n(self) -> int:
        return self.blocked.shape[0]

    @property
    def spare_capacity(self) -> np.ndarray:
        """Extra passengers each unblocked station can take; 0 at blocked ones."""
        return np.where(self.blocked, 0.0, (self.capacity_ratio - 1.0) * self.demand)

    def label(self, i: int) -> str:
        return repr(self.station_ids[i]) if self.station_ids is not None else f"#{i}"

    def sub(self, idx) -> "Scenario":
        idx = np.asarray(idx, dtype=np.intp)
        ids = None if self.station_ids is None else tuple(self.station_ids[i] for i in idx)
        return Scenario(self.blocked[idx], self.demand[idx], self.capacity_ratio[idx],
                        self.horizon_T_lm, ids)


@dataclass
class EvacuationPlan:
    flow: np.ndarray
    objective_att: float
    total_epf: float
    per_station_inflow: np.ndarray
    feasible: bool = True
    diagnostic: str = ""
    shortfall: float = 0.0
    solve_seconds: float = field(default=0.0, compare=False)

    def nonzero_flows(self, tol: float = ABS_TOL) -> list[tuple[int, int, float]]:
        ii, jj = np.nonzero(self.flow > tol)
        return [(int(i), int(j), float(self.flow[i, j])) for i, j in zip(ii, jj)]


def average_cost(cost: np.ndarray, flow: np.ndarray, eps: float = EPSILON) -> float:
    """Flow-weighted mean cost ``sum(cost*K) / (sum(K) + eps)``; inf*0 counts as 0."""
    used = flow != 0
    total = float(np.sum(cost[used] * flow[used]))
    return total / (float(flow.sum()) + eps)


def sample_demand(net: NetworkModel, window_minutes: float = 30.0,
                  operating_minutes_per_day: float = DEFAULT_OPERATING_MINUTES,
                  override=None) -> np.ndarray:
    """In-window passenger counts.

    Returns ``override`` unchanged when given; otherwise scales each
    station's daily count by ``window_minutes / operating_minutes_per_day``.
    """
    if not window_minutes > 0:
        raise ContractError(f"window_minutes must be > 0, got {window_minutes}")
    if not operating_minutes_per_day > 0:
        raise ContractError(f"operating_minutes_per_day must be > 0, got {operating_minutes_per_day}")
    if override is not None:
        override = np.asarray(override, dtype=float)
        if override.shape != (net.n,):
            raise ContractError(f"demand override has shape {override.shape}, expected ({net.n},)")
        return override
    return net.daily_passengers() * (window_minutes / operating_minutes_per_day)


def _cost_values(cost) -> np.ndarray:
    return np.asarray(getattr(cost, "values", cost), dtype=float)


def solve(cost: CostMatrix | np.ndarray, scenario: Scenario, backend: str | None = None) -> EvacuationPlan:
    """Optimal evacuation flow for ``scenario`` under ``cost``.

    Raises :class:`IsolationError` if a blocked station has no finite-cost
    unblocked station and :class:`InfeasibleError` (with ``shortfall`` in
    persons) if demand cannot be placed.
    """
    c = _cost_values(cost)
    n = scenario.n
    if c.shape != (n, n):
        raise ContractError(f"cost matrix shape {c.shape} does not match scenario size {n}")
    b_idx = np.flatnonzero(scenario.blocked)
    u_idx = np.flatnonzero(~scenario.blocked)
    sub = c[np.ix_(b_idx, u_idx)]
    supply = scenario.demand[b_idx]
    finite = np.isfinite(sub)

    for r in np.flatnonzero(~finite.any(axis=1)):
        raise IsolationError(scenario.label(int(b_idx[r])), float(supply[r]))

    spare = scenario.spare_capacity[u_idx]
    keep = finite.any(axis=0) & (spare > 0)
    total = float(supply.sum())
    reachable = float(spare[keep].sum())
    scale = max(1.0, total)
    if total - reachable > REL_TOL * scale:
        raise InfeasibleError(
            f"blocked demand {total:.3f} exceeds reachable spare capacity {reachable:.3f} "
            f"(shortfall {total - reachable:.3f} persons)",
            shortfall=total - reachable,
        )

    cols = u_idx[keep]
    local, unshipped = kernels.transport_ssp(sub[:, keep], supply, spare[keep], ABS_TOL * scale,
                                             backend=backend)
    if unshipped > REL_TOL * scale:
        raise InfeasibleError(
            f"{unshipped:.3f} persons cannot reach any station with spare capacity",
            shortfall=unshipped,
        )
    flow = np.zeros((n, n))
    flow[np.ix_(b_idx, cols)] = local
    return EvacuationPlan(
        flow=flow,
        objective_att=average_cost(c, flow),
        total_epf=float(flow.sum()),
        per_station_inflow=flow.sum(axis=0),
        feasible=True,
        diagnostic="optimal",
    )


@dataclass(frozen=True)
class Violation:
    constraint: str
    indices: tuple[int, ...]
    magnitude: float
    message: str

    def __str__(self):
        return f"[{self.constraint}] {self.message}"


def _tol(ref: float) -> float:
    return max(REL_TOL * abs(ref), ABS_TOL)


def validate_plan(cost: CostMatrix | np.ndarray, scenario: Scenario, plan: EvacuationPlan) -> list[Violation]:
    """Independent check of every plan invariant; empty list means valid."""
    c = _cost_values(cost)
    k = np.asarray(plan.flow, dtype=float)
    n = scenario.n
    out: list[Violation] = []
    if k.shape != (n, n) or c.shape != (n, n):
        return [Violation("shape", (), float("nan"), f"flow {k.shape} / cost {c.shape} vs n={n}")]
    blocked = scenario.blocked
    y = scenario.demand

    for i in range(n):
        if abs(k[i, i]) > ABS_TOL:
            out.append(Violation("C3-diagonal", (i,), float(k[i, i]),
                                 f"self-flow {k[i, i]:.6g} at station {scenario.label(i)}"))
    off = ~np.eye(n, dtype=bool)
    for i, j in zip(*np.nonzero((k < -ABS_TOL) & off)):
        out.append(Violation("C4-nonnegative", (int(i), int(j)), float(k[i, j]),
                             f"negative flow {k[i, j]:.6g} from {scenario.label(i)} to {scenario.label(j)}"))
    bad_out = (np.abs(k) > ABS_TOL) & off & ~blocked[:, None]
    for i, j in zip(*np.nonzero(bad_out)):
        out.append(Violation("C4-outflow", (int(i), int(j)), float(k[i, j]),
                             f"outflow {k[i, j]:.6g} from unblocked {scenario.label(i)}"))
    bad_in = (np.abs(k) > ABS_TOL) & off & blocked[None, :]
    for i, j in zip(*np.nonzero(bad_in)):
        out.append(Violation("C4-inflow", (int(i), int(j)), float(k[i, j]),
                             f"inflow {k[i, j]:.6g} into blocked {scenario.label(j)}"))
    bad_sup = (np.abs(k) > ABS_TOL) & off & ~np.isfinite(c)
    for i, j in zip(*np.nonzero(bad_sup)):
        out.append(Violation("support", (int(i), int(j)), float(k[i, j]),
                             f"flow {k[i, j]:.6g} on infinite-cost leg {scenario.label(i)}->{scenario.label(j)}"))

    rows = k.sum(axis=1)
    for i in np.flatnonzero(blocked):
        gap = rows[i] - y[i]
        if abs(gap) > _tol(max(1.0, y[i])):
            out.append(Violation("C1-conservation", (int(i),), float(gap),
                                 f"station {scenario.label(i)} ships {rows[i]:.6g} of demand {y[i]:.6g}"))
    inflow = k.sum(axis=0)
    limit = scenario.spare_capacity
    for j in np.flatnonzero(~blocked):
        excess = inflow[j] - limit[j]
        if excess > _tol(max(1.0, y[j])):
            out.append(Violation("C2-capacity", (int(j),), float(excess),
                                 f"station {scenario.label(j)} over capacity by {excess:.6g}"))
    return out
