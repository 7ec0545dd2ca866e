"""Backend selection for the enumeration kernels.

The compiled extension is used when it imports and the scaled integers fit in
64 bits; otherwise the pure-Python twin runs with arbitrary-precision ints.
Set ``GSMALLEABLE_PURE=1`` to force the Python backend.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Sequence

from . import _kernels_py

_ext = None
if not os.environ.get("GSMALLEABLE_PURE"):
    try:
        from . import _kernels as _ext
    except ImportError:
        _ext = None

BACKEND = "cython" if _ext is not None else "python"
_I64_SAFE = 1 << 61


def _impl(backend: str | None, fits: bool):
    if backend == "python" or _ext is None or not fits:
        if backend == "cython" and (_ext is None or not fits):
            raise RuntimeError("compiled kernel unavailable or values exceed int64")
        return _kernels_py
    return _ext


def scale_to_int(values: Sequence[Fraction]) -> tuple[list[int], int]:
    """Multiply by the lcm of denominators; returns ``(ints, lcm)``."""
    den = 1
    for v in values:
        den = math.lcm(den, Fraction(v).denominator)
    return [int(Fraction(v) * den) for v in values], den


def min_load_assignment(costs: Sequence[Sequence[Fraction | None]], m: int, backend: str | None = None):
    """Exhaustive min-load assignment; ``costs[j][S]`` is a time or None if unusable.

    Returns ``(load, masks)`` with an exact rational load, or None.
    """
    flat = [c for row in costs for c in row if c is not None]
    ints, den = scale_to_int(flat)
    it = iter(ints)
    icosts = [[-1 if c is None else next(it) for c in row] for row in costs]
    fits = (max(ints, default=0) + 1) * max(len(costs), 1) < _I64_SAFE
    res = _impl(backend, fits).min_load_assignment(icosts, m)
    if res is None:
        return None
    best, masks = res
    return Fraction(best, den), tuple(int(s) for s in masks)


def exchange_violation(values: Sequence[Fraction], n: int, backend: str | None = None):
    ints, _ = scale_to_int(values)
    fits = 4 * max((abs(x) for x in ints), default=0) < _I64_SAFE
    res = _impl(backend, fits).exchange_violation(ints, n)
    return None if res is None else tuple(int(x) for x in res)
