import csv
import json

import numpy as np
import pytest

from railevac.cli import main
from railevac.errors import InputError
from railevac.network import load_network, network_from_strings
from railevac.runner import ScenarioConfig, bench_k, prepare, resolve_blocked, write_bench_csv
from railevac.synthetic import grid_network

STATIONS = """id,name,lat,lon,line_id,operator_id,daily_passengers
A,Alpha,35.0,139.0,L1,OP1,1200
B,Bravo,35.01,139.0,L1,OP1,1000
C,Charlie,35.02,139.0,L1,OP1,3000
Z,Zulu,36.0,139.0,L2,OP2,5000
Y,Yankee,36.01,139.0,L2,OP2,5000
"""
EDGES = "from_id,to_id\nA,B\nB,C\nZ,Y\n"


@pytest.fixture
def files(tmp_path):
    s, e = tmp_path / "stations.csv", tmp_path / "edges.csv"
    s.write_text(STATIONS)
    e.write_text(EDGES)
    return s, e


def run(files, out, *extra):
    s, e = files
    return main(["run", "--stations", str(s), "--edges", str(e), "--out-dir", str(out), *extra])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_block_middle_station(files, tmp_path):
    out = tmp_path / "out"
    assert run(files, out, "--block-stations", "B") == 0
    rows = read_csv(out / "plan.csv")
    assert {r["destination_id"] for r in rows} == {"A", "C"}
    assert all(r["origin_id"] == "B" for r in rows)
    assert sum(float(r["passengers"]) for r in rows) == pytest.approx(1000 * 30 / 1080, abs=1e-5)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["feasible"] is True
    assert set(summary) >= {"total_epf", "att_minutes", "feasible", "per_station"}
    assert {p["id"] for p in summary["per_station"]} == {"A", "C"}
    metrics = json.loads((out / "metrics.json").read_text())
    assert set(metrics) == {"epf_total", "att_minutes", "utilization", "box"}
    assert set(metrics["box"]) == {"min", "q1", "median", "q3", "max"}
    box = read_csv(out / "epf_box.csv")
    assert [r["destination_id"] for r in box] == ["A", "C"]


def test_block_isolated_line_is_infeasible(files, tmp_path):
    out = tmp_path / "out"
    assert run(files, out, "--block-lines", "L2") == 2
    summary = json.loads((out / "summary.json").read_text())
    assert summary["feasible"] is False
    assert json.loads((out / "manifest.json").read_text())["exit_status"] == 2


def test_capacity_shortfall_is_exit_2(files, tmp_path):
    assert run(files, tmp_path / "o", "--block-stations", "A,C") == 2


def test_unknown_station_exit_1(files, tmp_path, capsys):
    assert run(files, tmp_path / "o", "--block-stations", "NOPE") == 1
    assert "NOPE" in capsys.readouterr().err


def test_nothing_blocked_exit_1(files, tmp_path):
    assert run(files, tmp_path / "o") == 1


def test_bad_file_exit_1(tmp_path):
    (tmp_path / "s.csv").write_text("id,name,lat,lon,line_id,operator_id,daily_passengers\nA,a,x,1,L,O,1\n")
    (tmp_path / "e.csv").write_text("from_id,to_id\n")
    code = main(["run", "--stations", str(tmp_path / "s.csv"), "--edges", str(tmp_path / "e.csv"),
                 "--block-stations", "A", "--out-dir", str(tmp_path / "o")])
    assert code == 1


def test_scenario_file_and_overrides(files, tmp_path):
    cfg = tmp_path / "scenario.cfg"
    (tmp_path / "demand.csv").write_text("id,passengers_in_window\nB,12\nA,100\n")
    cfg.write_text(
        "# toy scenario\n"
        "blocked_station_ids = B\n"
        "t_lm_minutes = 45   # longer outage\n"
        "capacity_ratio = 2.0\n"
        "k = 5\n"
        "demand_override = demand.csv\n"
    )
    out = tmp_path / "out"
    assert run(files, out, "--scenario", str(cfg), "--k", "4") == 0
    man = json.loads((out / "manifest.json").read_text())
    p = man["parameters"]
    assert (p["t_lm_minutes"], p["capacity_ratio"], p["k"]) == (45.0, 2.0, 4)
    total = sum(float(r["passengers"]) for r in read_csv(out / "plan.csv"))
    assert total == pytest.approx(12.0)


def test_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("blocked_station_ids = A\nspeed_of_light = 3\n")
    with pytest.raises(InputError):
        ScenarioConfig.from_file(cfg)


def test_demand_override_unknown_id(files, tmp_path):
    (tmp_path / "d.csv").write_text("id,passengers_in_window\nQ,1\n")
    assert run(files, tmp_path / "o", "--block-stations", "B", "--demand-override", str(tmp_path / "d.csv")) == 1


def test_deterministic_outputs(files, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(files, a, "--block-stations", "B") == 0
    assert run(files, b, "--block-stations", "B") == 0
    for name in ("plan.csv", "metrics.json", "summary.json", "epf_box.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_deterministic_synthetic(tmp_path):
    args = ["run", "--seed", "1", "--block-lines", "V03", "--k", "10"]
    assert main(args + ["--out-dir", str(tmp_path / "a")]) == 0
    assert main(args + ["--out-dir", str(tmp_path / "b")]) == 0
    for name in ("plan.csv", "metrics.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_line_expansion_matches_file(files):
    net = load_network(*files)
    cfg = ScenarioConfig(blocked_line_ids=["L1"])
    blocked = resolve_blocked(net, cfg)
    with open(files[0], newline="") as fh:
        want = [r["line_id"] == "L1" for r in csv.DictReader(fh)]
    assert blocked.tolist() == want
    with pytest.raises(InputError):
        resolve_blocked(net, ScenarioConfig(blocked_line_ids=["L9"]))


def test_dump_matrices(files, tmp_path):
    out = tmp_path / "o"
    assert run(files, out, "--block-stations", "B", "--dump-matrices") == 0
    lines = (out / "cost.csv").read_text().splitlines()
    assert len(lines) == 5 and "inf" in lines[0]


def test_bench_rows(files, tmp_path):
    net = load_network(*files)
    prep = prepare(net, ScenarioConfig(blocked_station_ids=["B"]))
    rows = bench_k(prep.cost, prep.scenario, [30], repeats=5)
    assert len(rows) == 1 and rows[0].k == 30 and rows[0].objective is not None
    write_bench_csv(bench_k(prep.cost, prep.scenario, [], repeats=5), tmp_path / "empty.csv")
    assert (tmp_path / "empty.csv").read_text() == "k,median_wall_ms,objective\n"


def test_bench_marks_infeasible_rows(files, tmp_path):
    net = load_network(*files)
    prep = prepare(net, ScenarioConfig(blocked_station_ids=["A", "C"]))
    rows = bench_k(prep.cost, prep.scenario, [1, 2], repeats=5)
    assert [r.objective for r in rows] == [None, None]
    write_bench_csv(rows, tmp_path / "b.csv")
    assert read_csv(tmp_path / "b.csv")[0]["objective"] == "infeasible"


def test_cli_bench_flag(files, tmp_path):
    out = tmp_path / "o"
    assert run(files, out, "--block-stations", "B", "--bench-k", "1,2") == 0
    assert [r["k"] for r in read_csv(out / "bench_k.csv")] == ["1", "2"]


def test_synth_command(tmp_path):
    assert main(["synth", "--seed", "4", "--out-dir", str(tmp_path)]) == 0
    net = load_network(tmp_path / "stations.csv", tmp_path / "edges.csv")
    assert net == grid_network(seed=4)
    assert net.n == 1000
