"""Brute-force ground truth for small instances.

Nothing in the solving pipeline calls into this module; it exists for tests
and the ``verify`` command.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import kernels
from .core import Assignment, Instance, ValidationError, bits

ASSIGNMENT_GUARD = 10 ** 7
DEMAND_GUARD = 16
MMFA_GUARD = 10 ** 6


def exact_assignment(inst: Instance, backend: str | None = None) -> tuple[Fraction, Assignment]:
    """Minimum load over all maps job -> nonempty machine set (first optimum in lexicographic order)."""
    size = (2 ** inst.m - 1) ** inst.n
    if size > ASSIGNMENT_GUARD:
        raise ValidationError(f"exact assignment would enumerate {size} maps (guard {ASSIGNMENT_GUARD})")
    costs = []
    for fn in inst.speeds:
        row = [None]
        for S in range(1, 1 << inst.m):
            g = fn(S)
            row.append(1 / g if g > 0 else None)
        costs.append(row)
    res = kernels.min_load_assignment(costs, inst.m, backend=backend)
    if res is None:
        raise ValidationError("some job has no machine set of positive speed")
    best, masks = res
    return best, Assignment(masks)


def exact_demand(fn, prices, n: int | None = None) -> tuple[Fraction, int]:
    """``(max value, lowest maximizing mask)`` of ``fn(S) - prices(S)`` by enumeration."""
    n = len(prices) if n is None else n
    if n > DEMAND_GUARD:
        raise ValidationError(f"exact demand limited to {DEMAND_GUARD} elements")
    best, arg = None, 0
    for S in range(1 << n):
        v = fn(S) - sum((prices[i] for i in bits(S)), Fraction(0))
        if best is None or v > best:
            best, arg = v, S
    return best, arg


def exact_maximizers(fn, n: int) -> tuple[Fraction, list[int]]:
    """All maximizers of ``fn`` over subsets of ``range(n)``."""
    if n > DEMAND_GUARD:
        raise ValidationError(f"exact maximizers limited to {DEMAND_GUARD} elements")
    vals = [fn(S) for S in range(1 << n)]
    best = max(vals)
    return best, [S for S, v in enumerate(vals) if v == best]


def exact_mmfa(utilities, n_items: int) -> tuple[Fraction, tuple]:
    """Best minimum utility over allocations giving each item to at most one agent.

    Returns ``(V*, bundles)``; unallocated items are allowed.
    """
    k = len(utilities)
    size = (k + 1) ** n_items
    if size > MMFA_GUARD:
        raise ValidationError(f"exact MMFA would enumerate {size} allocations (guard {MMFA_GUARD})")
    best, arg = None, None
    for owner in itertools.product(range(k + 1), repeat=n_items):
        bundles = [0] * k
        for item, a in enumerate(owner):
            if a < k:
                bundles[a] |= 1 << item
        v = min(u(b) for u, b in zip(utilities, bundles))
        if best is None or v > best:
            best, arg = v, tuple(bundles)
    return best, arg
