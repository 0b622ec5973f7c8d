"""Compare the numba kernels with the pure-numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 3]

Each row reports the best wall time of both paths and checks that their
outputs agree. The first JIT call is excluded (compilation is cached).
"""

import argparse
import time

import numpy as np

from twistcalc import _accel, engine, oracle
from twistcalc.automorphism import NormalFormAuto
from twistcalc.rings import Z, gaussian


def best(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, min(times)


def cases():
    rng = np.random.default_rng(0)
    A = rng.integers(-3, 4, size=(200_000, 4, 4), dtype=np.int64)
    yield "batch_det 200k x 4x4", lambda jit: _accel.batch_det(A, jit=jit), np.array_equal

    yield "ut_mul_table UT_4(Z/3)", lambda jit: _accel.ut_mul_table(4, 3, jit=jit), np.array_equal

    G, f = oracle.ut_mod(3, 18, NormalFormAuto(Z, (Z(1), Z(-1), Z(1))))
    yield ("twisted_labels UT_3(Z/18)",
           lambda jit: oracle.twisted_classes(G, f, jit=jit).labels, np.array_equal)

    Gi = gaussian()
    yield ("sweep Z[i] n=8",
           lambda jit: [c.layers for c in engine.r_infinity_sweep(Gi, 8, jit=jit).cases],
           lambda a, b: a == b)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _accel.numba is None:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':28s} {'jit':>9s} {'numpy':>9s} {'speedup':>8s}")
    for name, fn, same in cases():
        fn(True)  # warm up
        a, tj = best(lambda: fn(True), args.repeat)
        b, tn = best(lambda: fn(False), args.repeat)
        assert same(a, b), name
        print(f"{name:28s} {tj:8.3f}s {tn:8.3f}s {tn / tj:7.1f}x")


if __name__ == "__main__":
    main()
