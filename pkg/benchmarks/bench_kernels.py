#!/usr/bin/env python3
"""Benchmark the compiled inner-loop kernels against the numpy fallback.

Times the banded circulant matvec, the fused box-scheme rhs kernel and
the finite-difference rhs across grid sizes, plus one full box-scheme
rhs evaluation (Gram solve included) through each backend.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from ifdsim import _kernels_py
from ifdsim.domain import PeriodicDomain
from ifdsim.prior import CorrelationKernel, assemble_operators, solve_gram

try:
    from ifdsim import _kernels as _compiled
except ImportError:
    _compiled = None


def best_of(fn, repeats=5, min_time=0.05):
    """Best amortized seconds/call over a few timed batches."""
    calls = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(calls):
            fn()
        elapsed = time.perf_counter() - t0
        if elapsed >= min_time:
            break
        calls *= 4
    best = elapsed / calls
    for _ in range(repeats - 1):
        t0 = time.perf_counter()
        for _ in range(calls):
            fn()
        best = min(best, (time.perf_counter() - t0) / calls)
    return best


def bench_row(name, fn_py, fn_c):
    t_py = best_of(fn_py)
    if fn_c is None:
        print(f"{name:<34} {t_py * 1e6:>10.1f}        (not built)")
        return
    t_c = best_of(fn_c)
    print(f"{name:<34} {t_py * 1e6:>10.1f} {t_c * 1e6:>10.1f} {t_py / t_c:>8.1f}x")


def main():
    rng = np.random.default_rng(7)
    print(f"{'kernel':<34} {'python us':>10} {'compiled us':>11} {'speedup':>8}")
    for n in (64, 256, 1024, 4096):
        half = 6
        offsets = np.arange(-half, half + 1, dtype=np.int64)
        lapw = rng.standard_normal(len(offsets))
        edgew = rng.standard_normal(len(offsets))
        x = rng.standard_normal(n)

        bench_row(
            f"banded matvec          n={n:<5}",
            lambda: _kernels_py.circulant_band_matvec(offsets, lapw, x),
            (lambda: _compiled.circulant_band_matvec(offsets, lapw, x))
            if _compiled else None)
        bench_row(
            f"box rhs kernel         n={n:<5}",
            lambda: _kernels_py.box_rhs_kernel(offsets, lapw, offsets, edgew, x, 5.0),
            (lambda: _compiled.box_rhs_kernel(offsets, lapw, offsets, edgew, x, 5.0))
            if _compiled else None)
        bench_row(
            f"fd rhs kernel          n={n:<5}",
            lambda: _kernels_py.fd_rhs_kernel(x, 0.5, 5.0, True),
            (lambda: _compiled.fd_rhs_kernel(x, 0.5, 5.0, True))
            if _compiled else None)

    # end to end: one box-scheme rhs evaluation including the Gram solve;
    # kernel width scales with the cell so the band stays fixed
    for n in (64, 256, 1024):
        dom = PeriodicDomain(64.0, n, 4)
        kern = CorrelationKernel(((1.0, 0.5 * dom.cell_width),), dom)
        ops = assemble_operators(kern, dom)
        d = rng.standard_normal(n)

        def full(impl):
            dp = solve_gram(ops, d)
            return impl.box_rhs_kernel(ops.offsets, ops.laplace_weights,
                                       ops.offsets, ops.edge_weights, dp, 5.0)

        bench_row(
            f"full box rhs (w/ solve) n={n:<4}",
            lambda: full(_kernels_py),
            (lambda: full(_compiled)) if _compiled else None)


if __name__ == "__main__":
    main()
