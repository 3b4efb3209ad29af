"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--size 20000] [--repeat 5]
"""
import argparse
import math
import timeit

import numpy as np

from tfqkd.kernels import available_backends


def workloads(size):
    rng = np.random.default_rng(0)
    # counts below -6 ln(eps), where the exact equation must be solved
    counts = np.ascontiguousarray(rng.uniform(1.0, 138.0, size))
    xs = rng.uniform(0.0, 40.0, size).tolist()
    log_eps = math.log(1e-10)
    return {
        "solve_delta_many (upper)":
            lambda k: k.solve_delta_many(counts, log_eps, True, 1e-12, 1.0 - 1e-12, 1e-12),
        "solve_delta_many (lower)":
            lambda k: k.solve_delta_many(counts, log_eps, False, 1e-12, 1e3, 1e-12),
        "bessel_i0 loop":
            lambda k: [k.bessel_i0(x) for x in xs],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=20_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing the Python backend only")
    print(f"{'kernel':<28}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for label, job in workloads(args.size).items():
        best = {name: min(timeit.repeat(lambda: job(mod), number=1, repeat=args.repeat))
                for name, mod in backends.items()}
        speedup = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{label:<28}" + "".join(f"{best[n] * 1e3:>11.2f} ms" for n in backends)
              + f"{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
