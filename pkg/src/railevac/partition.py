"""k-nearest candidate subproblem for large networks."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .costmatrix import CostMatrix
from .errors import ContractError, IsolationError
from .solver import EvacuationPlan, Scenario, average_cost, solve

DEFAULT_K = 30


class PartitionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Subproblem:
    """A reduced problem; ``selected[l]`` is the full index of local index ``l``."""

    selected: np.ndarray
    local_cost: CostMatrix
    local_demand: np.ndarray
    local_blocked: np.ndarray
    n_full: int

    @property
    def size(self) -> int:
        return len(self.selected)

    def local_scenario(self, scenario: Scenario) -> Scenario:
        return scenario.sub(self.selected)

    def embed(self, local_flow: np.ndarray) -> np.ndarray:
        full = np.zeros((self.n_full, self.n_full))
        full[np.ix_(self.selected, self.selected)] = local_flow
        return full


def k_nearest_subproblem(cost, demand, blocked, k: int = DEFAULT_K, station_ids=None) -> Subproblem:
    """Union of each blocked station's ``k`` cheapest unblocked targets.

    Candidates with infinite cost are never taken; ties go to the lower
    index. Blocked stations come first in ``selected``, then candidates in
    index order.
    """
    cm = cost if isinstance(cost, CostMatrix) else CostMatrix(cost)
    c = cm.values
    n = cm.n
    blocked = np.asarray(blocked).astype(bool)
    demand = np.asarray(demand, dtype=float)
    if blocked.shape != (n,) or demand.shape != (n,):
        raise ContractError("cost, demand and blocked must share indexing")
    if int(k) < 1:
        raise ContractError(f"k must be >= 1, got {k}")
    b_idx = np.flatnonzero(blocked)
    if b_idx.size == 0:
        raise ContractError("at least one blocked station is required")

    open_cols = ~blocked
    chosen = np.zeros(n, dtype=bool)
    short = []
    for b in b_idx:
        row = np.where(open_cols, c[b], np.inf)
        row[b] = np.inf
        avail = int(np.isfinite(row).sum())
        if avail == 0:
            name = repr(station_ids[b]) if station_ids is not None else f"#{b}"
            raise IsolationError(name, float(demand[b]))
        take = min(int(k), avail)
        if take < k:
            short.append((int(b), avail))
        if take < avail:
            # argpartition is not stable; resolve the k-th rank tie by index
            part = np.argpartition(row, take - 1)[:take]
            kth = row[part].max()
            strict = np.flatnonzero(row < kth)
            ties = np.flatnonzero(row == kth)[: take - strict.size]
            chosen[strict] = True
            chosen[ties] = True
        else:
            chosen[np.isfinite(row)] = True
    if short:
        first = repr(station_ids[short[0][0]]) if station_ids is not None else f"#{short[0][0]}"
        warnings.warn(
            f"k={k} exceeds finite-cost candidates for {len(short)} blocked station(s) "
            f"(e.g. {first} has {short[0][1]}); using all available",
            PartitionWarning,
            stacklevel=2,
        )
    selected = np.concatenate([b_idx, np.flatnonzero(chosen)]).astype(np.intp)
    return Subproblem(
        selected=selected,
        local_cost=cm.sub(selected),
        local_demand=demand[selected],
        local_blocked=blocked[selected],
        n_full=n,
    )


def solve_subproblem(sub: Subproblem, scenario: Scenario, backend: str | None = None) -> EvacuationPlan:
    """Solve on the reduced index set only (no embedding)."""
    return solve(sub.local_cost, sub.local_scenario(scenario), backend=backend)


def solve_partitioned(cost, scenario: Scenario, k: int = DEFAULT_K,
                      backend: str | None = None) -> tuple[EvacuationPlan, Subproblem]:
    """Partition, solve locally and return the plan in the full n x n frame."""
    sub = k_nearest_subproblem(cost, scenario.demand, scenario.blocked, k, scenario.station_ids)
    local = solve_subproblem(sub, scenario, backend=backend)
    flow = sub.embed(local.flow)
    c = np.asarray(getattr(cost, "values", cost), dtype=float)
    plan = EvacuationPlan(
        flow=flow,
        objective_att=average_cost(c, flow),
        total_epf=float(flow.sum()),
        per_station_inflow=flow.sum(axis=0),
        feasible=True,
        diagnostic=f"optimal on {sub.size}-station subproblem (k={k})",
    )
    return plan, sub
