"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--sizes 4 8 16 32 64] [--repeat 5]

Each row reports the best-of-``repeat`` time per call and the speedup.
"""

import argparse
import timeit

import numpy as np

from kframe.kernels import backend_module


def upper(rng, n):
    U = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    U[np.diag_indices(n)] = rng.uniform(0.5, 2.0, n)
    return U


def best(fn, repeat):
    number, _ = timeit.Timer(fn).autorange()
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    py = backend_module("python")
    try:
        cy = backend_module("cython")
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':<18}{'size':>6}{'python [us]':>14}{'cython [us]':>14}{'speedup':>10}")
    for n in args.sizes:
        U = upper(rng, n)
        assert np.allclose(py.sqrtm_upper(U), cy.sqrtm_upper(U))
        tp = best(lambda: py.sqrtm_upper(U), args.repeat)
        tc = best(lambda: cy.sqrtm_upper(U), args.repeat)
        print(f"{'sqrtm_upper':<18}{n:>6}{tp * 1e6:>14.1f}{tc * 1e6:>14.1f}{tp / tc:>10.1f}")
    for n in args.sizes:
        dim, count = max(2, n // 4), 4 * n
        A = rng.standard_normal((dim, count)) + 1j * rng.standard_normal((dim, count))
        sigma = rng.choice([-1.0, 1.0], count)
        sig = rng.choice([-1.0, 1.0], dim)
        f = rng.standard_normal(dim) + 0j
        call = (A, A, sigma, sig, f)
        assert np.allclose(py.signed_cross_sum(*call), cy.signed_cross_sum(*call))
        tp = best(lambda: py.signed_cross_sum(*call), args.repeat)
        tc = best(lambda: cy.signed_cross_sum(*call), args.repeat)
        label = f"{dim}x{count}"
        print(f"{'signed_cross_sum':<18}{label:>6}{tp * 1e6:>14.1f}{tc * 1e6:>14.1f}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
