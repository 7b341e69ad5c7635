import numpy as np
import pytest

from railevac import kernels
from railevac.network import network_from_strings

TOY_STATIONS = """id,name,lat,lon,line_id,operator_id,daily_passengers
A,Alpha,35.0,139.0,L1,OP1,1000
B,Bravo,35.01,139.0,L1,OP1,2000
C,Charlie,35.02,139.0,L1,OP1,3000
"""
TOY_EDGES = """from_id,to_id
A,B
B,C
"""


@pytest.fixture
def toy_net():
    return network_from_strings(TOY_STATIONS, TOY_EDGES)


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return request.param


def random_instance(rng, n_max=8, blocked_max=3, feasible=True):
    """Random cost matrix + scenario pieces with integer demands/capacities.

    Spare capacities are integers because demand is even and X = 1.5 or 2.
    """
    while True:
        n = int(rng.integers(4, n_max + 1))
        nb = int(rng.integers(1, min(blocked_max, n - 1) + 1))
        blocked = np.zeros(n, dtype=bool)
        blocked[rng.choice(n, nb, replace=False)] = True
        cost = rng.integers(1, 30, size=(n, n)).astype(float)
        cost[rng.random((n, n)) < 0.25] = np.inf
        np.fill_diagonal(cost, 0.0)
        demand = 2.0 * rng.integers(0, 60, size=n)
        ratio = rng.choice([1.5, 2.0], size=n)
        if not feasible:
            return cost, blocked, demand, ratio
        sub = cost[np.ix_(blocked, ~blocked)]
        if not np.isfinite(sub).any(axis=1).all():
            continue
        spare = ((ratio - 1) * demand)[~blocked]
        from oracles import lp_transport
        if lp_transport(sub, demand[blocked], spare) is None:
            continue
        return cost, blocked, demand, ratio


ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record a named acceptance criterion result and assert it."""

    def check(name: str, ok: bool, detail: str = ""):
        prev = ACCEPTANCE_RESULTS.get(name)
        ok_all = ok and (prev is None or prev[0])
        ACCEPTANCE_RESULTS[name] = (ok_all, detail if not ok or prev is None else prev[1])
        assert ok, f"{name}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda s: (int(s.split()[0].rstrip("abc")), s)):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
