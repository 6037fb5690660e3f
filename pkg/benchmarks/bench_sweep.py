"""Benchmark the numba kernels against the pure-Python fallback.

Runs the Metropolis sweep kernel and the partition sampler in both flavours
on identical inputs, reports throughput and the speedup, and checks that the
outputs are bit-identical.

Usage: python3 benchmarks/bench_sweep.py [--n 64] [--sweeps 50] [--pn 2000]
"""

import argparse
import time

import numpy as np

from sosfacet import _kernels


def bench_sweeps(n: int, sweeps: int) -> None:
    def make_inputs():
        rng = np.random.Generator(np.random.PCG64(0))
        heights = np.full((n, n), n // 2, dtype=np.int64)
        signs = rng.integers(0, 2, size=(sweeps, n * n), dtype=np.uint8)
        uniforms = rng.random((sweeps, n * n))
        exp_table = np.exp(-3.0 * np.arange(5, dtype=np.float64))
        emit = np.empty(0, dtype=np.int64)
        out = np.empty((0, n, n), dtype=np.int64)
        return heights, signs, uniforms, exp_table, emit, out

    results = {}
    timings = {}
    for name, fn in (("numba", _kernels.jit_run_sweeps),
                     ("numpy", _kernels.py_run_sweeps)):
        if fn is None:
            print(f"  {name}: unavailable")
            continue
        heights, signs, uniforms, exp_table, emit, out = make_inputs()
        vol = int(heights.sum())
        fn(heights[:1, :1].copy(), 0, signs[:1, :1], uniforms[:1, :1],
           exp_table, -10, -10, 10, 0, emit, out)  # warm up / compile
        heights, signs, uniforms, exp_table, emit, out = make_inputs()
        t0 = time.perf_counter()
        fn(heights, 0, signs, uniforms, exp_table, 0, -8, n, vol, emit, out)
        dt = time.perf_counter() - t0
        rate = sweeps * n * n / dt
        print(f"  {name:6s}: {dt:8.3f} s  ({rate:12.0f} proposals/s)")
        results[name] = heights
        timings[name] = dt
    if len(results) == 2:
        assert (results["numba"] == results["numpy"]).all(), "backends differ"
        print(f"  identical output; speedup x{timings['numpy']/timings['numba']:.0f}")


def bench_partitions(n: int, count: int) -> None:
    results = {}
    timings = {}
    for name, fn in (("numba", _kernels.jit_sample_partitions_kernel),
                     ("numpy", _kernels.py_sample_partitions_kernel)):
        if fn is None:
            print(f"  {name}: unavailable")
            continue
        out = np.zeros((count, n), dtype=np.int64)
        fn(n, 1, 0, np.zeros((1, n), dtype=np.int64))  # warm up / compile
        t0 = time.perf_counter()
        fn(n, count, 1, out)
        dt = time.perf_counter() - t0
        print(f"  {name:6s}: {dt:8.3f} s  ({count / dt:10.0f} partitions/s)")
        results[name] = out
        timings[name] = dt
    if len(results) == 2:
        # outputs may differ bit-wise (libm rounding inside the loop);
        # both are exact uniform samplers, so only speed is compared here
        print(f"  speedup x{timings['numpy']/timings['numba']:.0f}")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=64, help="box side for sweeps")
    ap.add_argument("--sweeps", type=int, default=50)
    ap.add_argument("--pn", type=int, default=2000, help="partition size")
    ap.add_argument("--pcount", type=int, default=200)
    args = ap.parse_args()

    print(f"Metropolis sweeps: n={args.n}, sweeps={args.sweeps}")
    bench_sweeps(args.n, args.sweeps)
    print(f"Partition sampler: n={args.pn}, count={args.pcount}")
    bench_partitions(args.pn, args.pcount)


if __name__ == "__main__":
    main()
