#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the numpy fallback.

Times full solves (threshold search, pinning loop, silencing attempts)
over batches of random instances at several system sizes.  By default
the script re-launches itself twice, once per backend, so the comparison
comes from the same workload:

    python3 benchmarks/bench_kernels.py             # both backends
    SWIPTGRID_PURE=1 python3 benchmarks/bench_kernels.py --single
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np


def make_instances(n, count, seed):
    from swiptgrid import Instance, effective_gains, generate_realization

    out = []
    for trial in range(count):
        rng = np.random.default_rng(np.random.SeedSequence([seed, n, trial]))
        real = generate_realization(n, 4, 10.0, 50.0, 2.0, rng)
        eg = effective_gains(real)
        harvest = rng.uniform(1.0, 8.0, size=n)[eg.order]
        out.append(Instance(gains=eg.gains, harvest=harvest, p_max=5.0, eta=0.8))
    return out


def run_single(sizes, count, seed):
    from swiptgrid import BACKEND, optimal_allocation

    print(f"backend={BACKEND}")
    for n in sizes:
        instances = make_instances(n, count, seed)
        start = time.perf_counter()
        acc = 0.0
        for inst in instances:
            acc += optimal_allocation(inst).objective
        elapsed = time.perf_counter() - start
        per = elapsed / count * 1e6
        print(f"  n={n:3d}  {count} solves in {elapsed:8.3f} s  ({per:9.1f} us/solve)  checksum={acc:.6f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[4, 16, 64])
    parser.add_argument("--count", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--single",
        action="store_true",
        help="benchmark only the backend selected by the current environment",
    )
    args = parser.parse_args()
    if args.single:
        run_single(args.sizes, args.count, args.seed)
        return
    base = [sys.executable, os.path.abspath(__file__), "--single",
            "--count", str(args.count), "--seed", str(args.seed), "--sizes"]
    base += [str(s) for s in args.sizes]
    for pure in ("", "1"):
        env = dict(os.environ)
        if pure:
            env["SWIPTGRID_PURE"] = pure
        else:
            env.pop("SWIPTGRID_PURE", None)
        subprocess.run(base, env=env, check=True)


if __name__ == "__main__":
    main()
