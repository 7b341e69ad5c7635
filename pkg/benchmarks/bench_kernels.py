"""Compare the compiled and pure-Python kernels on the synthetic network.

    python benchmarks/bench_kernels.py [--seed 0] [--repeats 3] [--line H10]

Prints wall time per kernel and backend and checks that both backends
produce the same train-time matrix and the same optimal objective.
"""
import argparse
import statistics
import time
import warnings

import numpy as np

from railevac import kernels
from railevac.costmatrix import fuse_cost
from railevac.network import connectivity_matrix, distance_matrix
from railevac.partition import PartitionWarning, k_nearest_subproblem, solve_subproblem
from railevac.runner import ScenarioConfig, prepare
from railevac.synthetic import grid_network
from railevac.travel import train_time_matrix


def timed(fn, repeats):
    out, ts = None, []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        ts.append(time.perf_counter() - t0)
    return out, statistics.median(ts)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--line", default="H10")
    ap.add_argument("--k", type=int, default=100)
    args = ap.parse_args()

    net = grid_network(seed=args.seed)
    prep = prepare(net, ScenarioConfig(blocked_line_ids=[args.line]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PartitionWarning)
        sub = k_nearest_subproblem(prep.cost, prep.scenario.demand, prep.scenario.blocked, args.k)

    print(f"network: {net.n} stations, {len(net.adjacency)} edges; subproblem k={args.k}: {sub.size} stations")
    print(f"{'kernel':<24}{'backend':<10}{'median s':>12}")
    results = {}
    for name in sorted(kernels.BACKENDS):
        t_train, s1 = timed(lambda: train_time_matrix(net, backend=name), args.repeats)
        plan, s2 = timed(lambda: solve_subproblem(sub, prep.scenario, backend=name), max(args.repeats, 5))
        results[name] = (t_train.values, plan.objective_att, s1, s2)
        print(f"{'all-pairs train time':<24}{name:<10}{s1:>12.4f}")
        print(f"{'transport (local solve)':<24}{name:<10}{s2:>12.4f}")
    if len(results) == 2:
        (ta, oa, a1, a2), (tb, ob, b1, b2) = results["cython"], results["python"]
        print(f"speed-up: train time x{b1 / a1:.1f}, transport x{b2 / a2:.1f}")
        print(f"train-time matrices identical: {np.array_equal(ta, tb)}; "
              f"objective diff {abs(oa - ob):.2e}")
    else:
        print("compiled extension not built; only the Python backend was timed")


if __name__ == "__main__":
    main()
