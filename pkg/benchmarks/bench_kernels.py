"""Time the compiled kernels against the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]

Prints one line per kernel with the best-of-N wall time for each backend
and the speedup.  Without a built extension only the Python column is shown.
"""
import argparse
import timeit

import numpy as np

import polplace._kernels as kernels
import polplace._pykernels as py


def cases(rng):
    a8 = rng.normal(size=(8, 8))
    a30 = rng.normal(size=(30, 30))
    b30 = rng.normal(size=(30, 4))
    lu30 = py.lu_factor(a30, 1e-14)
    coeffs = np.poly(-rng.uniform(0.5, 4.0, 8))[::-1].copy()
    f = np.block([[np.zeros((4, 4)), np.eye(4)], [-np.eye(4), -0.5 * np.eye(4)]])
    w0 = rng.normal(size=8)
    return [
        ("lu_factor 30x30", "lu_factor", (a30, 1e-14)),
        ("lu_solve 30x30, 4 rhs", "lu_solve", (lu30[0], lu30[1], b30)),
        ("hessenberg 30x30", "hessenberg", (a30,)),
        ("hessenberg_charpoly 8x8", "hessenberg_charpoly", (a8,)),
        ("faddeev_leverrier 8x8", "faddeev_leverrier", (a8,)),
        ("durand_kerner degree 8", "durand_kerner", (coeffs, 500, 1e-12)),
        ("rk4_linear 8 states, 10k steps", "rk4_linear", (f, w0, 1e-3, 10_000, 1e12)),
    ]


def best_time(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    compiled = kernels.compiled_backend
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'kernel':34s} {'python':>12s} {'cython':>12s} {'speedup':>9s}")
    for label, name, call_args in cases(np.random.default_rng(0)):
        t_py = best_time(getattr(py, name), call_args, args.repeat)
        if compiled is None:
            print(f"{label:34s} {t_py * 1e6:10.1f}us {'-':>12s} {'-':>9s}")
            continue
        t_c = best_time(getattr(compiled, name), call_args, args.repeat)
        print(f"{label:34s} {t_py * 1e6:10.1f}us {t_c * 1e6:10.1f}us {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
