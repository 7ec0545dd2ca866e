"""M-natural-concave toolkit: greedy demand, exchange certification, reduced
speed functions and the matroid they induce.
"""

from __future__ import annotations

import heapq
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import kernels
from .core import SpeedFn, ValidationError, bits, popcount

#: exhaustive exchange checks are refused above this many elements
MNAT_CHECK_MAX = 10


def _lazy_greedy(fn, n: int, gain_of, accept) -> int:
    """Greedy over ``range(n)`` with lazily refreshed marginal keys.

    ``gain_of(i, cur, fcur)`` returns the comparison key of adding ``i``;
    keys must be nonincreasing as ``cur`` grows, which holds for submodular
    ``fn`` (in particular every M-natural-concave function).  Ties resolve to
    the lowest index, so the result equals the plain greedy's.
    """
    cur, fcur = 0, fn(0)
    heap = [(_neg(gain_of(i, cur, fcur)), i, cur) for i in range(n)]
    heapq.heapify(heap)
    while heap:
        key, i, at = heapq.heappop(heap)
        if at != cur:
            heapq.heappush(heap, (_neg(gain_of(i, cur, fcur)), i, cur))
            continue
        if not accept(_neg(key)):
            return cur
        cur |= 1 << i
        fcur = fn(cur)
    return cur


def _neg(key):
    return tuple(-k for k in key) if isinstance(key, tuple) else -key


def demand(fn: Callable[[int], Fraction], prices: Sequence[Fraction], n: int | None = None) -> int:
    """A maximizer of ``fn(S) - prices(S)`` found greedily.

    Starting from the empty set, repeatedly add the element of largest
    strictly positive marginal gain (lowest index on ties).  Exact for
    M-natural-concave ``fn``.
    """
    n = len(prices) if n is None else n
    return _lazy_greedy(fn, n, lambda i, cur, fcur: fn(cur | 1 << i) - fcur - prices[i], lambda k: k > 0)


def demand_eager(fn: Callable[[int], Fraction], prices: Sequence[Fraction], n: int | None = None) -> int:
    """Same as :func:`demand` but recomputing every marginal in every round."""
    n = len(prices) if n is None else n
    cur, val = 0, fn(0)
    while True:
        best_gain, best_i = Fraction(0), -1
        for i in range(n):
            if cur >> i & 1:
                continue
            gain = fn(cur | 1 << i) - val - prices[i]
            if gain > best_gain:
                best_gain, best_i = gain, i
        if best_i < 0:
            return cur
        cur |= 1 << best_i
        val = fn(cur)


def check_mnat(fn: Callable[[int], Fraction], n: int, backend: str | None = None):
    """Exhaustive local-exchange check; returns None or a witness ``(S, T, i)``."""
    if n > MNAT_CHECK_MAX:
        raise ValidationError(f"exchange check limited to {MNAT_CHECK_MAX} elements, got {n}")
    values = [fn(S) for S in range(1 << n)]
    return kernels.exchange_violation(values, n, backend=backend)


@dataclass(frozen=True, eq=False)
class ReducedSpeedFn:
    """``2 g(S) - sum_{i in S} mu_i / lam`` for an optimal dual pair."""

    base: SpeedFn
    lam: Fraction
    mu: tuple[Fraction, ...]

    def __post_init__(self):
        if self.lam <= 0:
            raise ValidationError("reduced speed function needs lambda > 0")
        object.__setattr__(self, "ratios", tuple(m / self.lam for m in self.mu))
        object.__setattr__(self, "_cache", {})

    @property
    def n(self) -> int:
        return self.base.n

    def __call__(self, mask: int) -> Fraction:
        v = self._cache.get(mask)
        if v is None:
            r = self.ratios
            v = self._cache[mask] = 2 * self.base(mask) - sum((r[i] for i in bits(mask)), Fraction(0))
        return v

    def price_sum(self, mask: int) -> Fraction:
        r = self.ratios
        return sum((r[i] for i in bits(mask)), Fraction(0))


class RankOracle:
    """Rank function of the matroid generated by the maximizers of a reduced function.

    ``rank(U)`` is the largest ``|T & U|`` over maximizers ``T``.  It is computed
    by the demand greedy on ``reduced + eps * |T & U|`` with ``eps``
    infinitesimal, i.e. marginal gains are compared lexicographically on
    ``(reduced gain, membership in U)``.
    """

    def __init__(self, reduced: ReducedSpeedFn):
        self.reduced = reduced
        self.n = reduced.n
        self._memo: dict[int, int] = {}
        self._lock = threading.Lock()

    def maximizer(self, U: int = 0) -> int:
        g = self.reduced.base
        r = self.reduced.ratios

        def key(i, cur, gcur):
            return (2 * (g(cur | 1 << i) - gcur) - r[i], 1 if U >> i & 1 else 0)

        return _lazy_greedy(g, self.n, key, lambda k: k > (0, 0))

    def rank(self, U: int) -> int:
        with self._lock:
            v = self._memo.get(U)
        if v is None:
            v = popcount(self.maximizer(U) & U) if U else 0
            with self._lock:
                self._memo[U] = v
        return v

    def is_independent(self, S: int) -> bool:
        return self.rank(S) == popcount(S)


def rank(oracle: RankOracle, U: int) -> int:
    return oracle.rank(U)


def is_independent(oracle: RankOracle, S: int) -> bool:
    return oracle.is_independent(S)


def matroid_greedy_top(oracle: RankOracle, S: int, weights: Sequence[Fraction]) -> int:
    """Max-weight independent subset of ``S``: scan by nonincreasing weight, keep if independent."""
    T = 0
    for i in sorted(bits(S), key=lambda i: (-weights[i], i)):
        if oracle.is_independent(T | 1 << i):
            T |= 1 << i
    return T
