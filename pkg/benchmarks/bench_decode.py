#!/usr/bin/env python3
"""Benchmark the compiled decode kernel against the numpy fallback.

Run after `pip install -e . --no-build-isolation`:

    python benchmarks/bench_decode.py [trials]
"""

import sys
import time

import numpy as np

from uavnoma import _decode_np
from uavnoma.montecarlo import sample_trial_arrays
from uavnoma.protocol import derive_thresholds
from uavnoma.scenario import Scenario

try:
    from uavnoma import _decode_cy
except ImportError:
    _decode_cy = None


def bench(fn, args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
    sc = Scenario()
    powers = sc.powers()
    th = derive_thresholds(sc, powers)
    arrs = sample_trial_arrays(sc, np.random.default_rng(0), n)
    args = (
        arrs["phi_cu"],
        arrs["phi_eu"],
        arrs["phi_uf"],
        arrs["phi_cf"],
        arrs["res_cu"],
        arrs["res_cf"],
        arrs["res_uf"],
        powers.p_c1,
        powers.p_e,
        powers.p_c2,
        powers.p_u,
        sc.sigma2_u_w,
        sc.sigma2_f_w,
        th.tau_c,
        th.tau_e,
        0,
        0,
    )

    t_np = bench(_decode_np.decode_trials, args)
    print(f"{n} trials, adaptive order")
    print(f"  numpy fallback : {t_np * 1e3:8.2f} ms  ({n / t_np / 1e6:6.1f} M trials/s)")
    if _decode_cy is None:
        print("  compiled kernel: not built")
        return
    t_cy = bench(_decode_cy.decode_trials, args)
    print(f"  compiled kernel: {t_cy * 1e3:8.2f} ms  ({n / t_cy / 1e6:6.1f} M trials/s)")
    print(f"  speedup        : {t_np / t_cy:5.2f}x")

    out_np = _decode_np.decode_trials(*args)
    out_cy = _decode_cy.decode_trials(*args)
    same = all(np.array_equal(a, b) for a, b in zip(out_np, out_cy))
    print(f"  outputs identical: {same}")


if __name__ == "__main__":
    main()
