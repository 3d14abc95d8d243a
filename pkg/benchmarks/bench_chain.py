"""Benchmark the jump-chain kernels: compiled extension vs pure Python.

Runs the same seeded simulation through every available backend, verifies
the outputs are bit-identical, and reports steps/second.

    python3 benchmarks/bench_chain.py --steps 2000000
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from matchq import build_graph, enumerate_independent_sets
from matchq._chain import available_backends
from matchq.rates import RateVector
from matchq.simulator import N_BATCHES, _cumulative

FIXTURES = {
    "triangle": (build_graph(3, [(0, 1), (1, 2), (0, 2)]), [1, 1, 1]),
    "fig1": (
        build_graph(4, [(0, 1), (0, 2), (1, 2), (2, 3)]),
        [0.25, 0.25, 0.375, 0.125],
    ),
    "c9": (
        build_graph(9, [(i, (i + 1) % 9) for i in range(9)]),
        [1] * 9,
    ),
}


def run(name: str, steps: int, seed: int) -> None:
    g, raw = FIXTURES[name]
    rates = RateVector.normalized(raw)
    index = enumerate_independent_sets(g)
    cum = _cumulative(rates)
    warmup = steps // 10
    batch_size = (steps - warmup) // N_BATCHES

    print(f"== {name}: {steps:,} steps ==")
    outputs = {}
    timings = {}
    for backend, kernel in available_backends().items():
        t0 = time.perf_counter()
        outputs[backend] = kernel(
            g.adj, cum, warmup, N_BATCHES, batch_size, seed, index.position, len(index.sets)
        )
        timings[backend] = time.perf_counter() - t0
        rate = steps / timings[backend]
        print(f"  {backend:<8} {timings[backend]:8.3f} s   {rate / 1e6:8.2f} M steps/s")
    if len(outputs) == 2:
        py, cy = outputs["python"], outputs["cython"]
        identical = all(np.array_equal(a, b) for a, b in zip(py[:4], cy[:4])) and py[4] == cy[4]
        speedup = timings["python"] / timings["cython"]
        print(f"  identical output: {identical}   speedup: {speedup:.1f}x")
    else:
        print("  (compiled backend unavailable; nothing to compare)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=2_000_000)
    parser.add_argument("--seed", type=int, default=12345)
    parser.add_argument(
        "--fixture", choices=sorted(FIXTURES), action="append", default=None
    )
    args = parser.parse_args()
    for name in args.fixture or sorted(FIXTURES):
        run(name, args.steps, args.seed)


if __name__ == "__main__":
    main()
