"""Time the compiled LOF kernel against the numpy fallback.

    python benchmarks/bench_lof.py [--sizes 250,500,1000,2000] [--dims 2] [--k 10]
"""

import argparse
import time

import numpy as np

from ousm import lof


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--sizes", default="250,500,1000,2000")
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--repeats", type=int, default=3)
    args = p.parse_args()

    backends = ["python"] + (["compiled"] if lof.BACKEND == "compiled" else [])
    if len(backends) == 1:
        print("compiled kernel not built; timing the numpy fallback only")
    print(f"{'n':>6} " + " ".join(f"{b:>12}" for b in backends) + "   speedup  max|diff|")
    rng = np.random.default_rng(0)
    for n in (int(s) for s in args.sizes.split(",")):
        X = rng.normal(size=(n, args.dims))
        t = {b: best_of(lambda b=b: lof.lof_scores(X, args.k, backend=b), args.repeats)
             for b in backends}
        line = f"{n:>6} " + " ".join(f"{t[b] * 1e3:10.1f}ms" for b in backends)
        if "compiled" in t:
            diff = np.abs(lof.lof_scores(X, args.k, backend="compiled")
                          - lof.lof_scores(X, args.k, backend="python")).max()
            line += f"   {t['python'] / t['compiled']:6.2f}x  {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
