#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the four hot paths on matched inputs and prints one row per kernel
per backend with the speedup.  Usage:

    python benchmarks/bench_kernels.py            # quick sizes
    python benchmarks/bench_kernels.py --heavy    # larger sweeps
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pricelab.dicut import build_graph
from pricelab.instances import gen_random
from pricelab.kernels import available_backends


def timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def build_cases(heavy: bool):
    m_table = 18 if heavy else 14
    m_resp = 14 if heavy else 12
    profiles = 4096 if heavy else 1024
    m_cut = 22 if heavy else 18
    fire_edges = 20 if heavy else 16

    table_inst = gen_random(m_table, 2, supports=2, edge_density=0.1,
                            boost_scale=1.0, seed=1, max_source_size=2)
    resp_inst = gen_random(m_resp, 1, supports=2, edge_density=0.3, seed=2)
    cut_inst = gen_random(m_cut, 1, supports=2, edge_density=0.02, seed=3,
                          max_source_size=2)
    fire_inst = None
    for seed in range(100):
        cand = gen_random(6, 1, supports=2, edge_density=0.25, seed=seed,
                          max_source_size=2)
        if len(cand.boosts.edges) == fire_edges:
            fire_inst = cand
            break
    assert fire_inst is not None

    rng = np.random.default_rng(0)
    resp_prices = rng.uniform(0, 4, size=m_resp)
    resp_prices[rng.random(m_resp) < 0.3] = 0.0
    resp_values = rng.choice([0.0, 1.0, 2.0, 4.0], size=(profiles, m_resp))
    cut_graph = build_graph(cut_inst)
    fire_graph = build_graph(fire_inst)

    def case_boost_table(backend):
        ea = table_inst.boosts.edge_arrays()
        return lambda: backend.boost_table(table_inst.num_items,
                                           table_inst.num_layers, *ea)

    def case_best_responses(backend):
        ea = resp_inst.boosts.edge_arrays()
        table = backend.boost_table(resp_inst.num_items, resp_inst.num_layers, *ea)
        return lambda: backend.best_responses(table, resp_prices, resp_values)

    def case_max_dicut(backend):
        g = cut_graph
        targets = np.asarray(g.edge_targets, dtype=np.int64)
        return lambda: backend.max_dicut(g.num_items, g.source_weights,
                                         g.edge_masks, targets, g.edge_weights)

    def case_fire(backend):
        g = fire_graph
        targets = np.asarray(g.edge_targets, dtype=np.int64)
        return lambda: backend.degree_fire_expectation(
            g.num_items, g.source_weights, g.edge_masks, targets,
            g.edge_weights, 0.125)

    return [
        (f"boost_table (m={m_table}, K=2)", case_boost_table),
        (f"best_responses ({profiles} profiles, m={m_resp})", case_best_responses),
        (f"max_dicut (m={m_cut})", case_max_dicut),
        (f"degree_fire_expectation ({fire_edges} edges)", case_fire),
    ]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--heavy", action="store_true", help="larger sweeps")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernels not built; showing the NumPy fallback only")
    cases = build_cases(args.heavy)
    width = max(len(name) for name, _ in cases)
    header = f"{'kernel':<{width}}  " + "".join(f"{n:>12}" for n in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, make in cases:
        times = {}
        for bname, backend in backends.items():
            fn = make(backend)
            fn()  # warm up (and first-call caches)
            times[bname] = timeit(fn, args.repeats)
        row = f"{name:<{width}}  " + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in backends)
        if "compiled" in times and "numpy" in times:
            row += f"{times['numpy'] / times['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
