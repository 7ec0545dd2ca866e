"""Compare the compiled and pure-Python enumeration kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import time
from fractions import Fraction

from gsmalleable import kernels
from gsmalleable.gen import generate


def _timed(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def assignment_case(seed, m, n):
    """First instance from ``seed`` whose scaled costs fit the compiled kernel."""
    while True:
        inst = generate(seed, "mixed", m, n)
        costs = []
        for fn in inst.speeds:
            row = [None]
            for S in range(1, 1 << m):
                g = fn(S)
                row.append(1 / g if g > 0 else None)
            costs.append(row)
        ints, _ = kernels.scale_to_int([c for row in costs for c in row if c is not None])
        if (max(ints) + 1) * n < kernels._I64_SAFE:
            return costs
        seed += 1000


def exchange_case(seed, n):
    # a linear function is M-natural concave, so the check scans every triple
    rng = random.Random(seed)
    w = [Fraction(rng.randint(1, 50), rng.choice((1, 2, 4))) for _ in range(n)]
    return [sum((w[i] for i in range(n) if S >> i & 1), Fraction(0)) for S in range(1 << n)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.BACKEND != "cython":
        print("compiled extension not available; only the Python backend can run")
        return
    rows = []
    for m, n in ((3, 4), (4, 4), (5, 3), (5, 4)):
        costs = assignment_case(m * 10 + n, m, n)
        tp, rp = _timed(lambda: kernels.min_load_assignment(costs, m, backend="python"), args.repeat)
        tc, rc = _timed(lambda: kernels.min_load_assignment(costs, m, backend="cython"), args.repeat)
        assert rp == rc, (rp, rc)
        rows.append((f"min_load_assignment m={m} n={n}", tp, tc))
    for n in (6, 7, 8):
        vals = exchange_case(n, n)
        tp, rp = _timed(lambda: kernels.exchange_violation(vals, n, backend="python"), args.repeat)
        tc, rc = _timed(lambda: kernels.exchange_violation(vals, n, backend="cython"), args.repeat)
        assert rp == rc
        rows.append((f"exchange_violation n={n}", tp, tc))
    print(f"{'kernel':36} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, tp, tc in rows:
        print(f"{name:36} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
