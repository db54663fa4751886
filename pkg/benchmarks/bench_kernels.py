"""Compiled vs pure-Python membership kernels.

    python benchmarks/bench_kernels.py [--queries 530] [--train 2111] [--k 23] [--repeat 5]

Defaults are one fold of the largest task set (fear: 2641 instances, 5 folds).
Reports the best-of-N wall time per backend and the maximum difference
between their outputs.
"""
import argparse
import time

import numpy as np

from frnn_emotion import kernels
from frnn_emotion.frnn import FrnnConfig, weight_tables


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--queries", type=int, default=530)
    ap.add_argument("--train", type=int, default=2111)
    ap.add_argument("--k", type=int, default=23)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    sim = rng.uniform(size=(args.queries, args.train))
    labels = rng.integers(0, 4, args.train).astype(np.int64)
    upper_w, lower_w = weight_tables(FrnnConfig(args.k))

    print(f"similarity block {args.queries} x {args.train}, k={args.k}, best of {args.repeat}")
    results = {}
    for name in sorted(kernels.BACKENDS):
        fn = kernels.BACKENDS[name]
        t, out = best_time(lambda: fn(sim, labels, 4, args.k, upper_w, lower_w), args.repeat)
        results[name] = (t, out)
        print(f"  {name:<9} {t * 1e3:9.2f} ms")
    if len(results) == 2:
        (tc, (lc, uc)), (tp, (lp, up)) = results["compiled"], results["python"]
        diff = max(np.abs(lc - lp).max(), np.abs(uc - up).max())
        print(f"  speed-up  {tp / tc:9.1f}x   max |difference| {diff:.1e}")
    else:
        print("  compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
