"""End-to-end scenario pipeline and the k-scaling benchmark."""
from __future__ import annotations

import configparser
import gc
import csv
import json
import logging
import statistics
import time
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import kernels
from .costmatrix import CostMatrix, CostParams, fuse_cost
from .errors import ContractError, InfeasibleError, InputError, ParseError, UnknownStationError
from .metrics import MetricsReport, compute_metrics
from .network import NetworkModel, connectivity_matrix, distance_matrix
from .partition import DEFAULT_K, PartitionWarning, k_nearest_subproblem, solve_partitioned, solve_subproblem
from .solver import (DEFAULT_CAPACITY_RATIO, DEFAULT_OPERATING_MINUTES, EPSILON, EvacuationPlan,
                     Scenario, sample_demand)
from .travel import TrainTimeMatrix, TravelParams, train_time_matrix, write_matrix

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2


@dataclass
class ScenarioConfig:
    blocked_station_ids: list[str] = field(default_factory=list)
    blocked_line_ids: list[str] = field(default_factory=list)
    t_lm_minutes: float = 30.0
    capacity_ratio: float = DEFAULT_CAPACITY_RATIO
    k: int = DEFAULT_K
    train_speed: float = 800.0
    stop_time: float = 1.0
    transfer_time: float = 7.5
    penalty_aware: bool = False
    walking_speed: float = 5.0
    demand_override: str | None = None
    window_minutes: float | None = None  # defaults to t_lm_minutes
    operating_minutes_per_day: float = DEFAULT_OPERATING_MINUTES
    epf_by: str = "destination"
    bench_repeats: int = 5

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        """Parse ``key = value`` lines (``#`` comments, comma-separated lists)."""
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
        try:
            parser.read_string("[scenario]\n" + text, source=str(path))
        except configparser.Error as exc:
            raise ParseError(str(path), getattr(exc, "lineno", 0) or 0, str(exc)) from None
        values = dict(parser["scenario"])
        cfg = cls.from_mapping(values, source=str(path))
        if cfg.demand_override and not Path(cfg.demand_override).is_absolute():
            cfg.demand_override = str(path.parent / cfg.demand_override)
        return cfg

    @classmethod
    def from_mapping(cls, values: dict, source: str = "<config>") -> "ScenarioConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise InputError(f"{source}: unknown config key {key!r}")
            kwargs[key] = _coerce(key, raw, cls.__dataclass_fields__[key].default, source)
        return cls(**kwargs)

    def validate(self) -> None:
        if not (self.blocked_station_ids or self.blocked_line_ids):
            raise InputError("scenario blocks nothing: set blocked_station_ids or blocked_line_ids")
        if int(self.k) < 1:
            raise InputError(f"k must be >= 1, got {self.k}")
        if self.epf_by not in ("destination", "origin"):
            raise InputError(f"epf_by must be destination or origin, got {self.epf_by!r}")
        if int(self.bench_repeats) < 5:
            raise InputError("bench_repeats must be at least 5")

    def travel_params(self) -> TravelParams:
        return TravelParams(self.train_speed, self.stop_time, self.transfer_time, self.penalty_aware)

    def cost_params(self) -> CostParams:
        return CostParams(self.walking_speed, self.t_lm_minutes)

    def resolved(self) -> dict:
        d = asdict(self)
        d["window_minutes"] = self.window
        d["epsilon"] = EPSILON
        return d

    @property
    def window(self) -> float:
        return self.t_lm_minutes if self.window_minutes is None else self.window_minutes


_LIST_KEYS = {"blocked_station_ids", "blocked_line_ids"}


def _coerce(key, raw, default, source):
    raw = raw.strip()
    if key in _LIST_KEYS:
        return [x.strip() for x in raw.split(",") if x.strip()]
    try:
        if key == "penalty_aware":
            return raw.lower() in ("1", "true", "yes", "on")
        if key in ("k", "bench_repeats"):
            return int(raw)
        if key == "demand_override":
            return raw or None
        if key == "epf_by":
            return raw
        return float(raw)
    except ValueError:
        raise InputError(f"{source}: bad value for {key}: {raw!r}") from None


def resolve_blocked(net: NetworkModel, cfg: ScenarioConfig) -> np.ndarray:
    blocked = np.zeros(net.n, dtype=bool)
    for sid in cfg.blocked_station_ids:
        blocked[net.index_of(sid)] = True
    known_lines = {s.line_id for s in net.stations}
    for lid in cfg.blocked_line_ids:
        if lid not in known_lines:
            raise InputError(f"unknown line id {lid!r}")
        blocked[net.stations_on_line(lid)] = True
    return blocked


def read_demand_override(path, net: NetworkModel, base: np.ndarray) -> np.ndarray:
    """Apply ``id,passengers_in_window`` rows on top of ``base``."""
    out = np.array(base, dtype=float)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header != ["id", "passengers_in_window"]:
            raise ParseError(str(path), 1, "expected header id,passengers_in_window")
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ParseError(str(path), reader.line_num, f"expected 2 fields, got {len(row)}")
            try:
                value = float(row[1])
            except ValueError:
                raise ParseError(str(path), reader.line_num, f"non-numeric count {row[1]!r}") from None
            if not value >= 0:
                raise ParseError(str(path), reader.line_num, "negative passenger count")
            try:
                out[net.index_of(row[0].strip())] = value
            except UnknownStationError as exc:
                raise UnknownStationError(exc.station_id, f"{path}:{reader.line_num}") from None
    return out


@dataclass
class Prepared:
    net: NetworkModel
    t_train: TrainTimeMatrix
    cost: CostMatrix
    scenario: Scenario
    timings: dict


def prepare(net: NetworkModel, cfg: ScenarioConfig, backend: str | None = None) -> Prepared:
    """Build matrices, demand and scenario for ``cfg`` on ``net``."""
    cfg.validate()
    timings = {}
    blocked = resolve_blocked(net, cfg)
    t0 = time.perf_counter()
    a_con = connectivity_matrix(net)
    a_dis = distance_matrix(net)
    timings["geometry_s"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    t_train = train_time_matrix(net, cfg.travel_params(), backend=backend)
    timings["train_time_s"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    cost = fuse_cost(a_con, a_dis, t_train, cfg.cost_params())
    timings["cost_fusion_s"] = time.perf_counter() - t0
    demand = sample_demand(net, cfg.window, cfg.operating_minutes_per_day)
    if cfg.demand_override:
        demand = read_demand_override(cfg.demand_override, net, demand)
    scenario = Scenario(blocked, demand, cfg.capacity_ratio, cfg.t_lm_minutes, tuple(net.ids))
    return Prepared(net, t_train, cost, scenario, timings)


def _write_plan_csv(path: Path, net: NetworkModel, cost: CostMatrix, plan: EvacuationPlan) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["origin_id", "destination_id", "passengers", "cost_minutes"])
        for i, j, f in plan.nonzero_flows():
            w.writerow([net.stations[i].id, net.stations[j].id, f"{f:.6f}", f"{cost.values[i, j]:.6f}"])


def _dump_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def plan_summary(net: NetworkModel, plan: EvacuationPlan | None, scenario: Scenario,
                 error: InfeasibleError | None = None) -> dict:
    if plan is None:
        return {"total_epf": 0.0, "att_minutes": None, "feasible": False,
                "shortfall": error.shortfall if error else None, "message": str(error) if error else ""}
    spare = scenario.spare_capacity
    per_station = []
    for j in np.flatnonzero(plan.per_station_inflow > 0):
        frac = float(plan.per_station_inflow[j] / spare[j]) if spare[j] > 0 else None
        per_station.append({"id": net.stations[j].id, "inflow": float(plan.per_station_inflow[j]),
                            "capacity_used_fraction": frac})
    return {"total_epf": plan.total_epf, "att_minutes": plan.objective_att, "feasible": plan.feasible,
            "per_station": per_station}


def metrics_payload(net: NetworkModel, report: MetricsReport) -> dict:
    return {
        "epf_total": report.epf_total,
        "att_minutes": report.att_minutes,
        "utilization": [{"id": net.stations[j].id, "fraction": u}
                        for j, u in report.per_station_utilization.items()],
        "box": report.distribution_stats.as_dict() if report.distribution_stats else None,
    }


def _write_box_csv(path: Path, net: NetworkModel, report: MetricsReport) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"{report.group_by}_id", "epf"])
        for idx, epf in report.station_epf().items():
            w.writerow([net.stations[idx].id, f"{epf:.6f}"])


def run_scenario(cfg: ScenarioConfig, net: NetworkModel, out_dir, backend: str | None = None,
                 dump_matrices: bool = False, network_source: dict | None = None) -> int:
    """Run one scenario and write its artifacts; returns the process exit code.

    Writes ``plan.csv``, ``summary.json``, ``metrics.json``, ``epf_box.csv``
    and ``manifest.json`` into ``out_dir``. Input errors propagate.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prep = prepare(net, cfg, backend)
    if dump_matrices:
        write_matrix(prep.t_train, out / "t_train.csv")
        write_matrix(prep.cost, out / "cost.csv")

    manifest = {
        "parameters": cfg.resolved(),
        "network": {"stations": net.n, "edges": len(net.adjacency), **(network_source or {})},
        "blocked": [net.stations[i].id for i in np.flatnonzero(prep.scenario.blocked)],
        "kernel_backend": backend or kernels.BACKEND,
        "timings": prep.timings,
    }
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", PartitionWarning)
            plan, sub = solve_partitioned(prep.cost, prep.scenario, cfg.k, backend=backend)
        for wmsg in caught:
            log.warning("%s", wmsg.message)
        manifest["warnings"] = [str(wm.message) for wm in caught]
    except InfeasibleError as exc:
        manifest["timings"]["partition_solve_s"] = time.perf_counter() - t0
        manifest["exit_status"] = EXIT_INFEASIBLE
        manifest["error"] = str(exc)
        _dump_json(out / "summary.json", plan_summary(net, None, prep.scenario, exc))
        _dump_json(out / "manifest.json", manifest)
        log.error("infeasible: %s", exc)
        return EXIT_INFEASIBLE
    manifest["timings"]["partition_solve_s"] = time.perf_counter() - t0
    manifest["subproblem_size"] = int(sub.size)

    report = compute_metrics(prep.cost, plan, prep.scenario, by=cfg.epf_by)
    _write_plan_csv(out / "plan.csv", net, prep.cost, plan)
    _dump_json(out / "summary.json", plan_summary(net, plan, prep.scenario))
    _dump_json(out / "metrics.json", metrics_payload(net, report))
    _write_box_csv(out / "epf_box.csv", net, report)
    manifest["exit_status"] = EXIT_OK
    _dump_json(out / "manifest.json", manifest)
    return EXIT_OK


@dataclass
class BenchRow:
    k: int
    median_wall_ms: float
    objective: float | None  # None marks an infeasible k

    def csv_row(self):
        obj = "infeasible" if self.objective is None else f"{self.objective:.6f}"
        return [self.k, f"{self.median_wall_ms:.3f}", obj]


def bench_k(cost: CostMatrix, scenario: Scenario, k_values, repeats: int = 5,
            backend: str | None = None) -> list[BenchRow]:
    """Median partition + local-solve wall time for each ``k``.

    One untimed warm-up call precedes the timed repetitions; the garbage
    collector is paused while timing, as :mod:`timeit` does.
    """
    if repeats < 5:
        raise ContractError("bench_k needs at least 5 repetitions per k")

    def once(k):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PartitionWarning)
            sub = k_nearest_subproblem(cost, scenario.demand, scenario.blocked, k, scenario.station_ids)
        return solve_subproblem(sub, scenario, backend=backend)

    k_values = [int(k) for k in k_values]
    times: dict[int, list[float]] = {k: [] for k in k_values}
    objective: dict[int, float | None] = {}
    for k in k_values:
        try:
            once(k)
        except InfeasibleError:
            pass
    gc_was_on = gc.isenabled()
    gc.disable()
    try:
        # round-robin over k so slow drift in machine load hits every k alike
        for _ in range(repeats):
            for k in k_values:
                t0 = time.perf_counter()
                try:
                    objective[k] = once(k).objective_att
                except InfeasibleError:
                    objective[k] = None
                times[k].append((time.perf_counter() - t0) * 1e3)
    finally:
        if gc_was_on:
            gc.enable()
    return [BenchRow(k, statistics.median(times[k]), objective[k]) for k in k_values]


def write_bench_csv(rows: list[BenchRow], target) -> None:
    with open(target, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "median_wall_ms", "objective"])
        for r in rows:
            w.writerow(r.csv_row())
