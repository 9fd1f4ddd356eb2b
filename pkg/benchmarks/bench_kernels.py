#!/usr/bin/env python3
"""Benchmark the compiled recovery kernels against the pure-Python twin.

Usage: python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

from longwire import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return result, min(times)


CASES = [
    ("sweep_single(14, 5)", lambda impl: impl.sweep_single(14, 5)),
    ("sweep_single(14, 7)", lambda impl: impl.sweep_single(14, 7)),
    ("sweep_multi(12, 4)", lambda impl: impl.sweep_multi(12, 4)),
    ("mc_single(64, 10, 100k)", lambda impl: impl.mc_single(64, 10, 100_000, 42)),
    ("recover_multi x20k", lambda impl: [
        impl.recover_multi_masks(impl.trial_key(1, t, 64), 64, 10) for t in range(20_000)
    ][-1]),
]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"available backends: {', '.join(sorted(backends))} (active: {kernels.BACKEND})")
    header = f"{'case':28s}" + "".join(f"{name:>12s}" for name in sorted(backends)) + f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))
    for label, fn in CASES:
        timings = {}
        results = {}
        for name, impl in sorted(backends.items()):
            results[name], timings[name] = best_of(lambda: fn(impl), args.repeat)
        if len(set(map(str, results.values()))) != 1:
            raise SystemExit(f"backends disagree on {label}: {results}")
        row = f"{label:28s}" + "".join(f"{timings[name]*1e3:10.1f}ms" for name in sorted(backends))
        if "c" in timings and "python" in timings:
            row += f"{timings['python'] / timings['c']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
