"""Compare the compiled and pure-Python Jacobi backends.

Usage::

    python benchmarks/bench_kernels.py [--sizes 4,8,16,32,64] [--repeat 5]

Reports the median wall time per call for a full eigen-decomposition, for
the scaled minimum-eigenvalue kernel used inside the multistart search, and
for one end-to-end ``worst_eigen`` allocation.
"""
import argparse
import statistics
import time

import numpy as np

from fimalloc import kernels
from fimalloc.allocators import allocate_worst_eigen
from fimalloc.experiments import build_scenario
from fimalloc.model import build_fim_bundle
from fimalloc.optimizer import MultistartOptions


def median_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def random_spd(rng, k):
    q, _ = np.linalg.qr(rng.standard_normal((k, k)))
    return (q * rng.uniform(0.1, 10.0, k)) @ q.T


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="4,8,16,32,64")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--alloc-k", type=int, default=8, help="dimension of the worst_eigen allocation (scenario F2)")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the python backend is timed")
    rng = np.random.default_rng(0)
    mats = {k: random_spd(rng, k) for k in sizes}

    print(f"{'kernel':<22}{'k':>4}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    for label, call in (("jacobi_eigh", lambda m: kernels.jacobi_eigh(m)),
                        ("min_eig_scaled", lambda m: kernels.min_eig_scaled(m, np.full(m.shape[0], 0.5)))):
        for k in sizes:
            row = {}
            for b in backends:
                prev = kernels.use_backend(b)
                try:
                    row[b] = median_time(lambda: call(mats[k]), args.repeat)
                finally:
                    kernels.use_backend(prev)
            speed = row["python"] / row["compiled"] if "compiled" in row else float("nan")
            print(f"{label:<22}{k:>4}" + "".join(f"{row[b] * 1e3:>12.3f}ms" for b in backends) + f"{speed:>9.1f}x")

    bundle = build_fim_bundle(build_scenario("F2", args.alloc_k))
    opts = MultistartOptions(restarts=16)
    row = {}
    for b in backends:
        prev = kernels.use_backend(b)
        try:
            row[b] = median_time(lambda: allocate_worst_eigen(bundle, 1.0, opts), 1)
        finally:
            kernels.use_backend(prev)
    speed = row["python"] / row["compiled"] if "compiled" in row else float("nan")
    print(f"{'worst_eigen (F2)':<22}{args.alloc_k:>4}" + "".join(f"{row[b]:>13.3f}s" for b in backends)
          + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
