import math

import numpy as np
import pytest

from railevac.errors import ContractError
from railevac.metrics import box_stats, compute_metrics
from railevac.solver import EPSILON, EvacuationPlan, Scenario, solve

INF = math.inf


def plan_of(flow):
    flow = np.asarray(flow, dtype=float)
    return EvacuationPlan(flow, 0.0, float(flow.sum()), flow.sum(axis=0))


def test_single_flow():
    cost = np.array([[0, 5.0], [5.0, 0]])
    sc = Scenario([1, 0], [100.0, 400.0], 1.5, 30.0)
    r = compute_metrics(cost, plan_of([[0, 100.0], [0, 0]]), sc)
    assert r.att_minutes == 5.0 and r.epf_total == 100.0
    assert r.epf_per_pair == [(0, 1, 100.0)]
    assert r.per_station_utilization == {1: pytest.approx(0.5)}


def test_two_flows_att():
    cost = np.array([[0, 3.0, 6.0], [3.0, 0, 1], [6.0, 1, 0]])
    sc = Scenario([1, 0, 0], [120.0, 50.0, 100.0], 2.0, 30.0)
    r = compute_metrics(cost, plan_of([[0, 50.0, 70.0], [0, 0, 0], [0, 0, 0]]), sc)
    assert r.att_minutes == pytest.approx(4.75, abs=1e-12)
    assert r.distribution_stats.as_tuple() == (50.0, 55.0, 60.0, 65.0, 70.0)
    assert r.per_station_utilization[1] == pytest.approx(1.0)
    assert r.per_station_utilization[2] == pytest.approx(0.7)


def test_empty_plan():
    cost = np.array([[0, 5.0], [5.0, 0]])
    sc = Scenario([1, 0], [0.0, 400.0], 1.5, 30.0)
    r = compute_metrics(cost, plan_of(np.zeros((2, 2))), sc)
    assert r.epf_total == 0 and r.att_minutes is None and r.distribution_stats is None


def test_utilization_not_applicable_for_zero_demand():
    cost = np.array([[0, 5.0], [5.0, 0]])
    sc = Scenario([1, 0], [0.0, 0.0], 1.5, 30.0)
    r = compute_metrics(cost, plan_of(np.zeros((2, 2))), sc)
    assert r.per_station_utilization == {1: None}


def test_per_origin_grouping():
    cost = np.ones((3, 3))
    sc = Scenario([1, 1, 0], [10.0, 30.0, 200.0], 1.5, 30.0)
    r = compute_metrics(cost, plan_of([[0, 0, 10.0], [0, 0, 30.0], [0, 0, 0]]), sc, by="origin")
    assert r.station_epf() == {0: 10.0, 1: 30.0}
    with pytest.raises(ContractError):
        compute_metrics(cost, plan_of(np.zeros((3, 3))), sc, by="line")


@pytest.mark.parametrize("values,expected", [
    ([1, 2, 3, 4, 5], (1, 2, 3, 4, 5)),
    ([7], (7, 7, 7, 7, 7)),
    ([1, 2, 3, 4], (1, 1.75, 2.5, 3.25, 4)),
    ([4, 1, 3, 2], (1, 1.75, 2.5, 3.25, 4)),
])
def test_box_stats(values, expected):
    assert box_stats(values).as_tuple() == pytest.approx(expected, abs=1e-12)


def hand_quartile(values, q):
    """Linear interpolation between closest ranks, rank h = (n - 1) q."""
    v = sorted(values)
    h = (len(v) - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, len(v) - 1)
    return v[lo] + (h - lo) * (v[hi] - v[lo])


def test_box_stats_against_hand_rule():
    rng = np.random.default_rng(2)
    for _ in range(50):
        vals = rng.random(int(rng.integers(1, 20))).tolist()
        got = box_stats(vals).as_tuple()
        want = tuple(hand_quartile(vals, q) for q in (0, 0.25, 0.5, 0.75, 1.0))
        assert got == pytest.approx(want, abs=1e-12)


def test_box_stats_empty():
    with pytest.raises(ContractError):
        box_stats([])


def test_consistency_with_solver():
    rng = np.random.default_rng(8)
    from conftest import random_instance
    for _ in range(20):
        cost, blocked, demand, ratio = random_instance(rng)
        sc = Scenario(blocked, demand, ratio, 30.0)
        plan = solve(cost, sc)
        r = compute_metrics(cost, plan, sc)
        total = demand[blocked].sum()
        assert r.epf_total == pytest.approx(total, rel=1e-6, abs=1e-9)
        assert r.epf_total == pytest.approx(sum(p[2] for p in r.epf_per_pair))
        if total > 0:
            # objective carries the epsilon in its denominator
            assert abs(r.att_minutes * total / (total + EPSILON) - plan.objective_att) <= 1e-9
        for u in r.per_station_utilization.values():
            assert u is None or 0 <= u <= 1 + 1e-6
