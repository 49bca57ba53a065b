"""Timing comparison of the compiled numeric core against the numpy fallback.

Usage: python3 benchmarks/bench_backends.py [--points N] [--repeats R]

Imports both implementations directly, so one process measures the pair on
identical inputs. Exits nonzero if the compiled extension is not built.
"""

import argparse
import statistics
import sys
import time

import numpy as np

from dppquad import _purecore
from dppquad import spectral as sp

try:
    from dppquad import _fastcore
except ImportError:
    _fastcore = None


def timed(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=1500)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _fastcore is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1

    gen = np.random.default_rng(0)
    n = args.points
    Xu = gen.random((n, 2))
    Yu = gen.random((n, 2))
    Xg = gen.normal(size=(n, 1))
    Yg = gen.normal(size=(n, 1))
    xs = gen.random(20 * n)
    zs = gen.normal(size=20 * n)

    sob = sp.sobolev_spec(3)
    coeffs, cfac = sp._periodic_closed_form(sob.s)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    a, b, c, A, B, kappa = sp.gaussian_constants(0.5, 1.0)
    sqrt2c = np.sqrt(2.0 * c)

    cases = [
        (
            f"periodic kernel matrix {n}x{n} (d=2, s=3)",
            lambda impl: impl.periodic_kernel_matrix(Xu, Yu, coeffs, cfac),
        ),
        (
            f"gaussian kernel matrix {n}x{n}",
            lambda impl: impl.gaussian_kernel_matrix(Xg, Yg, 0.5),
        ),
        (
            f"fourier features, {20 * n} points x 65 modes",
            lambda impl: impl.periodic_features_1d(xs, 64),
        ),
        (
            f"hermite features, {20 * n} points x 65 modes",
            lambda impl: impl.hermite_features_1d(zs, 64, sqrt2c, c - a, kappa),
        ),
    ]

    print(f"{'case':<45} {'compiled':>10} {'fallback':>10} {'speedup':>8}")
    for label, make in cases:
        fast_out = make(_fastcore)
        pure_out = make(_purecore)
        drift = float(np.max(np.abs(np.asarray(fast_out) - np.asarray(pure_out))))
        if drift > 1e-12:
            print(f"{label}: backends disagree by {drift:.2e}", file=sys.stderr)
            return 1
        t_fast = timed(lambda: make(_fastcore), args.repeats)
        t_pure = timed(lambda: make(_purecore), args.repeats)
        print(f"{label:<45} {t_fast * 1e3:>8.1f}ms {t_pure * 1e3:>8.1f}ms {t_pure / t_fast:>7.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
