"""Compare the compiled and pure-numpy kernel backends on the hot paths.

Each backend runs in its own subprocess because the backend is fixed at
import time from ``SUBSTAB_BACKEND``.  Three workloads are timed: the
best-subset subsampling sweep, the lasso-path subsampling sweep, and the
maximal-stable-set walk search.  The first-call column includes one-off
compilation for the compiled backend; the steady column is the best of
the repeated runs.

Usage::

    python3 benchmarks/bench_backends.py [--subsamples 40] [--repeats 3]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _workloads(subsamples: int):
    from substab.baseproc import BaseProcedureConfig
    from substab.fsss import fsss
    from substab.subsampling import make_plan, run_subsampling
    from substab.synthetic import gen_benchmark_data

    X, y, _ = gen_benchmark_data(seed=0)
    plan = make_plan(X.n, subsamples, seed=0)

    def best_subset_sweep():
        run_subsampling(X, y, plan, BaseProcedureConfig(kind="l0", s0=20))

    def lasso_sweep():
        run_subsampling(X, y, plan, BaseProcedureConfig(kind="lasso", s0=20))

    def walk_search():
        _, P = run_subsampling(X, y, plan, BaseProcedureConfig(kind="l0", s0=20))
        fsss(X, P, alpha=0.7, K=10, seed=0)

    return {
        "best-subset subsampling": best_subset_sweep,
        "lasso-path subsampling": lasso_sweep,
        "maximal-set walk search": walk_search,
    }


def run_inner(subsamples: int, repeats: int) -> None:
    results = {}
    for name, fn in _workloads(subsamples).items():
        t0 = time.perf_counter()
        fn()
        first = time.perf_counter() - t0
        steady = first
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            steady = min(steady, time.perf_counter() - t0)
        results[name] = {"first_s": first, "steady_s": steady}
    json.dump(results, sys.stdout)


def run_outer(subsamples: int, repeats: int) -> int:
    timings = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, SUBSTAB_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--inner",
             "--subsamples", str(subsamples), "--repeats", str(repeats)],
            env=env, capture_output=True, text=True,
        )
        if proc.returncode != 0:
            sys.stderr.write(proc.stderr)
            print(f"backend {backend!r} failed; is it installed?", file=sys.stderr)
            return 1
        timings[backend] = json.loads(proc.stdout)

    width = max(len(name) for name in timings["numba"])
    header = (f"{'workload':<{width}}  {'numba first':>11}  {'numba steady':>12}  "
              f"{'numpy steady':>12}  {'speedup':>7}")
    print(header)
    print("-" * len(header))
    for name in timings["numba"]:
        nb, np_ = timings["numba"][name], timings["numpy"][name]
        speedup = np_["steady_s"] / nb["steady_s"] if nb["steady_s"] > 0 else float("inf")
        print(f"{name:<{width}}  {nb['first_s']:>10.2f}s  {nb['steady_s']:>11.2f}s  "
              f"{np_['steady_s']:>11.2f}s  {speedup:>6.1f}x")
    return 0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--subsamples", type=int, default=40,
                        help="number of half-sample fits per sweep (default 40)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repetitions after the first call (default 3)")
    parser.add_argument("--inner", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.inner:
        run_inner(args.subsamples, args.repeats)
        return 0
    return run_outer(args.subsamples, args.repeats)


if __name__ == "__main__":
    raise SystemExit(main())
