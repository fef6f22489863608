#!/usr/bin/env python3
"""Compare the compiled shortest-path kernel with the pure-Python fallback.

Times both the raw kernel (single-source searches on a frozen network) and
the full flow solve, on random connected multigraphs of growing size.

Usage: python3 benchmarks/bench_kernel.py [--sizes 200,500,1000] [--repeats 3]
"""

import argparse
import random
import time

import factflow.flow as flow
from factflow import _spath_py

try:
    from factflow import _spath
except ImportError:
    _spath = None


def random_network(rng, num_nodes, num_edges):
    net = flow.ArcNetwork(num_nodes)
    for v in range(1, num_nodes):
        u = rng.randrange(v)
        net.add_arc(u, v, rng.uniform(0, 1), rng.uniform(0, 3))
        net.add_arc(v, u, rng.uniform(0, 1), rng.uniform(0, 3))
    for _ in range(num_edges - num_nodes + 1):
        u, v = rng.sample(range(num_nodes), 2)
        net.add_arc(u, v, rng.uniform(0, 1), rng.uniform(0, 3))
        net.add_arc(v, u, rng.uniform(0, 1), rng.uniform(0, 3))
    net.freeze()
    return net


def time_kernel(impl, net, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        impl.dijkstra_residual(
            net.indptr,
            net.csr_arcs,
            net.head,
            net.cost,
            net.residual,
            net.potential,
            0,
            1e-12,
        )
        best = min(best, time.perf_counter() - start)
    return best


def time_solve(impl, seed, num_nodes, num_edges, repeats):
    saved = flow.dijkstra_residual
    flow.dijkstra_residual = impl.dijkstra_residual
    try:
        best, gamma = float("inf"), None
        for _ in range(repeats):
            net = random_network(random.Random(seed), num_nodes, num_edges)
            start = time.perf_counter()
            res = flow.solve_min_cost_max_flow(net, 0, num_nodes - 1)
            best = min(best, time.perf_counter() - start)
            gamma = res.gamma
        return best, gamma
    finally:
        flow.dijkstra_residual = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,500,1000,2000")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _spath is None:
        print("compiled kernel not built; run `python3 setup.py build_ext --inplace`")
        print("timing the pure-Python kernel only\n")

    sizes = [int(s) for s in args.sizes.split(",")]
    header = f"{'nodes':>7} {'edges':>7} | {'dijkstra py':>12} {'dijkstra c':>12} {'speedup':>8} | {'solve py':>10} {'solve c':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        m = 5 * n
        rng = random.Random(args.seed)
        net = random_network(rng, n, m)
        t_py = time_kernel(_spath_py, net, args.repeats)
        s_py, gamma_py = time_solve(_spath_py, args.seed, n, m, 1)
        if _spath is not None:
            t_c = time_kernel(_spath, net, args.repeats)
            s_c, gamma_c = time_solve(_spath, args.seed, n, m, 1)
            assert abs(gamma_py - gamma_c) < 1e-9, "kernels disagree"
            print(
                f"{n:>7} {m:>7} | {t_py * 1e3:>10.2f}ms {t_c * 1e3:>10.2f}ms"
                f" {t_py / t_c:>7.1f}x | {s_py:>9.3f}s {s_c:>9.3f}s {s_py / s_c:>7.1f}x"
            )
        else:
            print(f"{n:>7} {m:>7} | {t_py * 1e3:>10.2f}ms {'-':>12} {'-':>8} | {s_py:>9.3f}s {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
