"""EPF/ATT reporting and plot-ready summaries."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .solver import EvacuationPlan, Scenario


@dataclass(frozen=True)
class BoxStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def as_tuple(self):
        return (self.min, self.q1, self.median, self.q3, self.max)

    def as_dict(self):
        return {"min": self.min, "q1": self.q1, "median": self.median, "q3": self.q3, "max": self.max}


def box_stats(values) -> BoxStats:
    """Five-number summary with linearly interpolated quartiles."""
    v = np.asarray(list(values), dtype=float)
    if v.size == 0:
        raise ContractError("box_stats needs at least one value")
    q = np.percentile(v, [0, 25, 50, 75, 100], method="linear")
    return BoxStats(*(float(x) for x in q))


@dataclass
class MetricsReport:
    epf_total: float
    epf_per_pair: list[tuple[int, int, float]]
    att_minutes: float | None
    per_station_utilization: dict[int, float | None]
    distribution_stats: BoxStats | None
    group_by: str = "destination"

    def station_epf(self) -> dict[int, float]:
        key = 1 if self.group_by == "destination" else 0
        out: dict[int, float] = {}
        for pair in self.epf_per_pair:
            out[pair[key]] = out.get(pair[key], 0.0) + pair[2]
        return dict(sorted(out.items()))


def compute_metrics(cost, plan: EvacuationPlan, scenario: Scenario, by: str = "destination") -> MetricsReport:
    """EPF, ATT (no epsilon) and per-station utilisation of spare capacity.

    ``by`` selects whether the box summary groups EPF per destination or per
    origin. ATT is ``None`` for an empty plan.
    """
    if by not in ("destination", "origin"):
        raise ContractError(f"by must be 'destination' or 'origin', got {by!r}")
    c = np.asarray(getattr(cost, "values", cost), dtype=float)
    k = np.asarray(plan.flow, dtype=float)
    if c.shape != k.shape or k.shape != (scenario.n, scenario.n):
        raise ContractError("cost, plan and scenario must share indexing")
    ii, jj = np.nonzero(k)
    pairs = [(int(i), int(j), float(k[i, j])) for i, j in zip(ii, jj)]
    total = float(sum(p[2] for p in pairs))
    att = None
    if total > 0:
        att = float(sum(c[i, j] * f for i, j, f in pairs)) / total

    inflow = k.sum(axis=0)
    spare = scenario.spare_capacity
    util: dict[int, float | None] = {}
    for j in np.flatnonzero(~scenario.blocked):
        util[int(j)] = float(inflow[j] / spare[j]) if spare[j] > 0 else None

    report = MetricsReport(total, pairs, att, util, None, by)
    per_station = report.station_epf()
    if per_station:
        report.distribution_stats = box_stats(per_station.values())
    return report
