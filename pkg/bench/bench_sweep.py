"""Compare the compiled and pure-Python pairing-sweep kernels.

Runs both backends over the same index slice of the 4x4 pairing order,
checks they agree, and reports throughput.

    python3 bench/bench_sweep.py [--slice 200000] [--full]
"""

import argparse
import time

from rtwl import kernel
from rtwl.kernel import _sweep_py


def run(label, fn, k0, k1, start, stop):
    t0 = time.perf_counter()
    out = fn(k0, k1, start, stop)
    dt = time.perf_counter() - t0
    rate = (stop - start) / dt if dt else float("inf")
    print(f"{label:>10}: {stop - start:>9} pairings in {dt:8.3f} s  ({rate:,.0f}/s)")
    return out, dt


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--slice", type=int, default=200_000)
    parser.add_argument("--full", action="store_true", help="sweep all 2,027,025")
    args = parser.parse_args()

    total = kernel.pairing_count(16)
    stop = total if args.full else min(args.slice, total)
    print(f"grid 4x4, {total} pairings total, sweeping [0, {stop})")
    print(f"installed backend: {kernel.BACKEND}")

    pure, t_pure = run("pure", _sweep_py.sweep_pairings_py, 4, 4, 0, stop)
    if kernel.BACKEND == "cython":
        fast, t_fast = run("cython", kernel.sweep_pairings, 4, 4, 0, stop)
        assert fast == pure, "backends disagree"
        print(f"  speedup: {t_pure / t_fast:.1f}x, results identical")
    else:
        print("  compiled backend not available; nothing to compare")


if __name__ == "__main__":
    main()
