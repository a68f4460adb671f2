"""Timing comparison of the two kernel backends.

Run as: python3 benchmarks/bench_kernels.py

Both backends produce bit-identical output (enforced by the parity tests),
so this only measures speed: profile integrations across the families and
Sturm pivot counts on large pencils.
"""

import math
import time

import numpy as np

from schwarzmin import _kernels


def _best_of(fn, repeats=5):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _profile_args(n, kind, p1, p2, t0):
    x0 = math.sqrt(1.0 - t0 * t0)
    return (n, kind, p1, p2, t0, x0, x0 / t0, 1e3, math.log(1e9), 1e3,
            1e-10, 1e-12, math.inf, 0.25, 2000000)


def main():
    backends = [("python", _kernels.get_backend("python"))]
    if _kernels.compiled_available():
        backends.append(("compiled", _kernels.get_backend("compiled")))
    else:
        print("compiled kernel not built; timing the Python twin only")

    print(f"{'case':<38}" + "".join(f"{name:>12}" for name, _ in backends)
          + f"{'speedup':>10}")

    profile_cases = [
        ("profile n=3 schwarzschild t0=0.5", _profile_args(3, 1, 2.0, 1.5, 0.5)),
        ("profile n=4 schwarzschild t0=0.5", _profile_args(4, 1, 2.0, 2.0, 0.5)),
        ("profile n=3 k=1.2 t0=0.9", _profile_args(3, 1, 2.0, 1.25, 0.9)),
        ("profile n=3 beta=0.7 t0=0.6", _profile_args(3, 3, 0.7, 0.0, 0.6)),
    ]
    for label, args in profile_cases:
        times = [_best_of(lambda mod=mod: mod.solve_profile_raw(*args))
                 for _, mod in backends]
        row = f"{label:<38}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    rng = np.random.default_rng(0)
    for nn in (2048, 16384):
        d = rng.normal(size=nn) * 3.0
        e = rng.normal(size=nn - 1)
        b = rng.uniform(0.5, 2.0, size=nn)
        shifts = np.linspace(-4.0, 4.0, 64)

        def run(mod):
            for s in shifts:
                mod.sturm_negative_count(d, e, b, s)

        label = f"sturm count n={nn}, 64 shifts"
        times = [_best_of(lambda mod=mod: run(mod)) for _, mod in backends]
        row = f"{label:<38}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
