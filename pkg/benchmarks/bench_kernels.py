#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Both backends return identical results (asserted here); the table reports
wall time per call and the native speedup on workloads shaped like the
acceptance suite.
"""

import argparse
import time

import numpy as np

from cuberec._kernels import available_backends, get_backend


def _workloads():
    rng = np.random.default_rng(7)

    def instance(n, m, denom=4):
        vmat = rng.integers(0, 2, (m, n)).astype(np.int8)
        tgt = rng.integers(0, n * denom + 1, m).astype(np.int64)
        return vmat, tgt, denom

    vb, tb, db = instance(16, 30)
    yield ("brute force binary  n=16 m=30",
           lambda k: k.brute_force_binary(vb, tb, db))

    vt, tt, dt = instance(9, 20)
    yield ("brute force ternary n=9  m=20",
           lambda k: k.brute_force_ternary(vt, tt, dt))

    vl, tl, dl = instance(700, 500, denom=1)
    x0 = rng.integers(0, 2, 700).astype(np.uint8)
    yield ("descent             n=700 m=500 (30k evals)",
           lambda k: k.descend_binary(vl, tl, dl, x0.copy(), 30_000, -1.0))
    yield ("tabu walk           n=700 m=500 (200 moves)",
           lambda k: k.tabu_binary(vl, tl, dl, x0.copy(), 200 * 700, -1.0,
                                   35, 10 ** 9))

    vn, tn, dn = instance(12, 25)
    orders = np.zeros((12, 2), dtype=np.int8)
    orders[:, 1] = 1
    inc = np.ones(12, dtype=np.uint8)
    inc_val = int(sum(abs(dn * int((vn[i] != 1).sum()) - int(tn[i]))
                      for i in range(25)))
    yield ("branch and bound    n=12 m=25 (full tree)",
           lambda k: k.bnb_binary(vn, tn, dn, orders, inc, inc_val,
                                  1 << 50, -1.0))


def _time(fn, backend, repeat):
    fn(backend)  # warm up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = available_backends()
    if "native" not in backends:
        print("native kernels not built; showing the fallback only")
    py = get_backend("python")
    nat = get_backend("native") if "native" in backends else None
    header = f"{'workload':<44} {'python':>10} {'native':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, fn in _workloads():
        t_py, out_py = _time(fn, py, args.repeat)
        if nat is None:
            print(f"{name:<44} {t_py * 1e3:>8.2f}ms {'-':>10} {'-':>8}")
            continue
        t_nat, out_nat = _time(fn, nat, args.repeat)
        flat_py = np.asarray(out_py[0]).ravel()
        flat_nat = np.asarray(out_nat[0]).ravel()
        assert (flat_py == flat_nat).all() and out_py[1] == out_nat[1], name
        print(f"{name:<44} {t_py * 1e3:>8.2f}ms {t_nat * 1e3:>8.2f}ms "
              f"{t_py / t_nat:>7.1f}x")


if __name__ == "__main__":
    main()
