"""Benchmark the compiled kernel against the NumPy fallback.

Times the two hot operations over randomized hard-threshold maps:
single-init trajectories (the run/extract path) and full transition
tables (the basin enumeration path). Run from the repo root:

    python3 benchmarks/bench_kernels.py [--nodes 14] [--repeat 5]
"""

import argparse
import time

import numpy as np

from fcmkit.kernels import available_kernels

WEIGHT_LEVELS = (-1.0, -0.5, 0.0, 0.5, 1.0)


def random_system(rng, n):
    weights = rng.choice(WEIGHT_LEVELS, size=(n, n))
    init = rng.integers(0, 2, size=n).astype(np.float64)
    return np.ascontiguousarray(weights, dtype=np.float64), init


def best_of(repeat, fn):
    timings = []
    for _ in range(repeat):
        started = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - started)
    return min(timings)


def bench_trajectories(kernel, systems, max_steps):
    def run():
        for weights, init in systems:
            kernel.trajectory_threshold(weights, init, 0.0, max_steps)

    return run


def bench_tables(kernel, systems):
    def run():
        for weights, _ in systems:
            kernel.transition_table(weights, 0.0)

    return run


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=14,
                        help="map size for the transition-table benchmark")
    parser.add_argument("--trajectories", type=int, default=2000,
                        help="number of single-init trajectory runs")
    parser.add_argument("--tables", type=int, default=5,
                        help="number of full transition tables")
    parser.add_argument("--repeat", type=int, default=5,
                        help="repetitions per measurement (best is reported)")
    args = parser.parse_args()

    kernels = available_kernels()
    if "compiled" not in kernels:
        print("compiled kernel not built; benchmarking the fallback alone")

    rng = np.random.default_rng(7)
    trajectory_systems = [random_system(rng, 10) for _ in range(args.trajectories)]
    table_systems = [random_system(rng, args.nodes) for _ in range(args.tables)]
    max_steps = (1 << 10) + 1

    print(f"{args.trajectories} trajectories on 10-node maps, "
          f"{args.tables} transition tables on {args.nodes}-node maps "
          f"(best of {args.repeat})\n")
    print(f"{'kernel':<10} {'trajectories':>14} {'tables':>14}")

    results = {}
    for name, kernel in sorted(kernels.items()):
        t_runs = best_of(args.repeat, bench_trajectories(kernel, trajectory_systems, max_steps))
        t_tables = best_of(args.repeat, bench_tables(kernel, table_systems))
        results[name] = (t_runs, t_tables)
        print(f"{name:<10} {t_runs * 1e3:>12.1f}ms {t_tables * 1e3:>12.1f}ms")

    if "compiled" in results and "python" in results:
        run_speedup = results["python"][0] / results["compiled"][0]
        table_speedup = results["python"][1] / results["compiled"][1]
        print(f"\ncompiled speedup: {run_speedup:.1f}x on trajectories, "
              f"{table_speedup:.1f}x on transition tables")


if __name__ == "__main__":
    main()
