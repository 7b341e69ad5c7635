"""Command-line entry point: ``railevac run`` and ``railevac synth``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import InfeasibleError, InputError
from .network import load_network, write_network
from .runner import (EXIT_INFEASIBLE, EXIT_INPUT, ScenarioConfig, bench_k, prepare, run_scenario,
                     write_bench_csv)
from .synthetic import grid_network

log = logging.getLogger("railevac")


def _k_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="railevac", description="Railway disruption evacuation simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one disruption scenario")
    run.add_argument("--stations", type=Path, help="stations CSV")
    run.add_argument("--edges", type=Path, help="edges CSV")
    run.add_argument("--seed", type=int, help="use the synthetic grid network with this seed "
                     "instead of --stations/--edges")
    run.add_argument("--scenario", type=Path, help="key = value scenario file")
    run.add_argument("--block-stations", help="comma-separated station ids (adds to the scenario file)")
    run.add_argument("--block-lines", help="comma-separated line ids (adds to the scenario file)")
    run.add_argument("--out-dir", type=Path, required=True)
    run.add_argument("--k", type=int)
    run.add_argument("--t-lm", type=float, dest="t_lm")
    run.add_argument("--capacity-ratio", type=float)
    run.add_argument("--demand-override", type=Path)
    run.add_argument("--bench-k", type=_k_list, help="e.g. 10,20,30,50,100; writes bench_k.csv")
    run.add_argument("--bench-repeats", type=int)
    run.add_argument("--dump-matrices", action="store_true", help="also write t_train.csv and cost.csv")
    run.add_argument("--backend", choices=["cython", "python"], help="kernel backend override")

    syn = sub.add_parser("synth", help="write the synthetic grid network as CSV")
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--out-dir", type=Path, required=True)
    return p


def _config(args) -> ScenarioConfig:
    cfg = ScenarioConfig.from_file(args.scenario) if args.scenario else ScenarioConfig()
    if args.block_stations:
        cfg.blocked_station_ids += [x.strip() for x in args.block_stations.split(",") if x.strip()]
    if args.block_lines:
        cfg.blocked_line_ids += [x.strip() for x in args.block_lines.split(",") if x.strip()]
    if args.k is not None:
        cfg.k = args.k
    if args.t_lm is not None:
        cfg.t_lm_minutes = args.t_lm
    if args.capacity_ratio is not None:
        cfg.capacity_ratio = args.capacity_ratio
    if args.demand_override is not None:
        cfg.demand_override = str(args.demand_override)
    if args.bench_repeats is not None:
        cfg.bench_repeats = args.bench_repeats
    return cfg


def _cmd_run(args) -> int:
    if args.stations and args.edges:
        net = load_network(args.stations, args.edges)
        source = {"stations_file": str(args.stations), "edges_file": str(args.edges)}
    elif args.seed is not None and not (args.stations or args.edges):
        net = grid_network(seed=args.seed)
        source = {"synthetic_seed": args.seed}
    else:
        raise InputError("give --stations and --edges, or --seed for the synthetic network")
    cfg = _config(args)
    status = run_scenario(cfg, net, args.out_dir, backend=args.backend,
                          dump_matrices=args.dump_matrices, network_source=source)
    if args.bench_k is not None:
        prep = prepare(net, cfg, args.backend)
        rows = bench_k(prep.cost, prep.scenario, args.bench_k, cfg.bench_repeats, args.backend)
        write_bench_csv(rows, args.out_dir / "bench_k.csv")
    return status


def _cmd_synth(args) -> int:
    net = grid_network(seed=args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_network(net, args.out_dir / "stations.csv", args.out_dir / "edges.csv")
    print(f"wrote {net.n} stations, {len(net.adjacency)} edges to {args.out_dir}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return {"run": _cmd_run, "synth": _cmd_synth}[args.command](args)
    except InfeasibleError as exc:
        print(f"railevac: solver: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputError, OSError) as exc:
        print(f"railevac: input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
