"""Max-min fair allocation through the scheduling pipeline.

For a target utility ``V`` every agent becomes a job and every item a
machine.  The job's speed is its utility minus, per item, the excess of the
single-item utility over ``V``; the pipeline then runs at ``C = 1/V``.  A
success yields bundles with utility at least ``V/193`` in which every item is
shared by at most 78 agents (32 + 20 + 26 from the three rounding steps).  A
failure proves that no allocation reaches ``V``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .configlp import build_and_solve
from .core import (CONSTANTS, ExplicitTable, Instance, LinearSpeed, LinearShift, SpeedFn, ValidationError,
                   bits, ensure, validate_speed)
from .mnat import MNAT_CHECK_MAX, check_mnat
from .rounding import choose_mode, round_solution

logger = logging.getLogger(__name__)

K = CONSTANTS
#: how the shift of the reduction is read; recorded in every allocation
SHIFT_READING = "p_ij = max(u_j({i}) - V, 0)"


@dataclass(frozen=True)
class MmfaInstance:
    agents: tuple[str, ...]
    items: tuple[str, ...]
    utilities: tuple[SpeedFn, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def build(cls, items, agents) -> "MmfaInstance":
        """``agents`` is a sequence of ``(id, SpeedFn)`` over ``items``."""
        items = tuple(items)
        agents = list(agents)
        if not items:
            raise ValidationError("MMFA instance needs at least one item")
        if not agents:
            raise ValidationError("MMFA instance needs at least one agent")
        if len(set(items)) != len(items):
            raise ValidationError("item identifiers must be unique")
        ids = tuple(a for a, _ in agents)
        if len(set(ids)) != len(ids):
            raise ValidationError("agent identifiers must be unique")
        warnings = []
        for aid, u in agents:
            warnings += [f"agent {aid}: {w}" for w in validate_speed(u, len(items))]
        return cls(ids, items, tuple(u for _, u in agents), tuple(warnings))

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def full(self) -> int:
        return (1 << self.n_items) - 1


def shifts(u: SpeedFn, V: Fraction, n: int) -> tuple[Fraction, ...]:
    return tuple(max(u(1 << i) - V, Fraction(0)) for i in range(n))


def reduce(mmfa: MmfaInstance, V) -> Instance:
    """Scheduling instance whose load-``1/V`` assignments encode utility-``V`` allocations."""
    V = Fraction(V)
    if V <= 0:
        raise ValidationError("target utility V must be positive")
    jobs = [(a, LinearShift(u, shifts(u, V, mmfa.n_items))) for a, u in zip(mmfa.agents, mmfa.utilities)]
    return Instance.build(mmfa.items, jobs)


@dataclass
class Allocation:
    bundles: tuple                   # item mask per agent
    V: Fraction
    utilities: tuple
    min_utility: Fraction
    multiplicity: tuple              # agents per item
    step_multiplicity: tuple         # per item: (step1, step2, step3)
    status: str = "ok"               # ok | degenerate
    eps: Fraction | None = None
    probes: list = field(default_factory=list)
    notes: list = field(default_factory=list)


@dataclass
class Probe:
    V: Fraction
    lp_feasible: bool
    load: Fraction | None
    alpha_test: bool                 # load <= 193 / V
    certified: bool                  # pipeline ran with every bound asserted


def probe(mmfa: MmfaInstance, V: Fraction, mode: str = "auto", speed_builder=None):
    """Run the pipeline at ``C = 1/V``; returns ``(Probe, allocation or None)``."""
    inst = speed_builder(mmfa, V) if speed_builder else reduce(mmfa, V)
    C = 1 / V
    sol = build_and_solve(inst, C, choose_mode(inst, mode))
    if sol is None:
        return Probe(V, False, None, False, False), None
    part, steps, split, classes, a, total = round_solution(inst, sol)
    ok = total <= K.total * C
    if not ok:
        return Probe(V, True, total, False, True), None
    return Probe(V, True, total, True, True), _allocation(mmfa, V, a.sets, steps)


def _allocation(mmfa: MmfaInstance, V: Fraction, sets, steps) -> Allocation:
    n = mmfa.n_items
    per_step = [[0, 0, 0] for _ in range(n)]
    for pa in steps:
        for j, S in pa.sets.items():
            for i in bits(S):
                per_step[i][pa.step - 1] += 1
    mult = tuple(sum(p) for p in per_step)
    utils = tuple(u(S) for u, S in zip(mmfa.utilities, sets))
    alloc = Allocation(tuple(sets), V, utils, min(utils), mult, tuple(tuple(p) for p in per_step))
    certify(alloc)
    return alloc


def certify(alloc: Allocation) -> None:
    caps = (K.step1_mult, K.welfare_cap, K.split_cap)
    for i, p in enumerate(alloc.step_multiplicity):
        for s, (c, cap) in enumerate(zip(p, caps)):
            ensure(c <= cap, f"item {i} is shared by {c} agents from step {s + 1} (cap {cap})")
        ensure(sum(p) <= K.mmfa_mult, f"item {i} shared by {sum(p)} agents (cap 78)")
    ensure(alloc.min_utility >= alloc.V / K.total, f"minimum utility {alloc.min_utility} below V/193")


def _degenerate(mmfa: MmfaInstance, note: str, eps) -> Allocation:
    n = mmfa.n_items
    sets = tuple(mmfa.full if k == 0 else 0 for k in range(len(mmfa.agents)))
    utils = tuple(u(S) for u, S in zip(mmfa.utilities, sets))
    mult = tuple(1 for _ in range(n))
    return Allocation(sets, Fraction(0), utils, min(utils), mult, tuple((0, 0, 0) for _ in range(n)),
                      status="degenerate", eps=eps, notes=[note])


def search_bounds(mmfa: MmfaInstance) -> tuple[Fraction, Fraction]:
    """``(lo, hi)`` with ``V* <= hi`` and, whenever ``V* > 0``, ``lo <= V*``.

    ``hi`` is the smallest utility of the grand bundle.  ``lo`` also stays
    below every positive single-item utility: when ``V* > 0``, each agent can
    be given one item it values positively, so ``V*`` is at least the
    smallest such value.
    """
    n = mmfa.n_items
    hi = min(u(mmfa.full) for u in mmfa.utilities)
    singles = [u(1 << i) for u in mmfa.utilities for i in range(n) if u(1 << i) > 0]
    lo = hi / (len(mmfa.agents) * 2 ** n)
    if singles:
        lo = min(lo, min(singles))
    return lo, hi


def solve_mmfa(mmfa: MmfaInstance, rel_eps=Fraction(1, 100), mode: str = "auto", speed_builder=None) -> Allocation:
    """Bisect on ``V``: the lower end always succeeds, the upper end always fails.

    The returned ``V`` satisfies ``V >= V*/(1 + rel_eps)`` with ``V*`` the best
    unaugmented minimum utility.
    """
    rel_eps = Fraction(rel_eps)
    if rel_eps <= 0:
        raise ValidationError("rel_eps must be positive")
    lo, hi = search_bounds(mmfa)
    if hi == 0:
        return _degenerate(mmfa, "some agent values the grand bundle at 0, so the optimum is 0", rel_eps)
    probes = []
    p, best = probe(mmfa, hi, mode, speed_builder)
    probes.append(p)
    if best is None:
        p, best = probe(mmfa, lo, mode, speed_builder)
        probes.append(p)
        if best is None:
            alloc = _degenerate(mmfa, f"pipeline fails at V = {lo}, which proves the optimum is 0", rel_eps)
            alloc.probes = probes
            return alloc
        while hi > lo * (1 + rel_eps):
            mid = (lo + hi) / 2
            p, alloc = probe(mmfa, mid, mode, speed_builder)
            probes.append(p)
            if alloc is None:
                hi = mid
            else:
                lo, best = mid, alloc
    best.eps = rel_eps
    best.probes = probes
    best.notes.append(f"shift read as {SHIFT_READING}")
    return best


# ---------------------------------------------------------------------------
# generic driver with a truncation callback


def truncate_table(u: SpeedFn, V: Fraction, n: int) -> ExplicitTable:
    """``min(u, V)`` as an explicit table, accepted only if it stays M-natural concave."""
    if n > MNAT_CHECK_MAX:
        raise ValidationError(f"truncation check limited to {MNAT_CHECK_MAX} items")
    t = ExplicitTable(tuple(min(u(S), V) for S in range(1 << n)))
    w = check_mnat(t, n)
    if w is not None:
        raise ValidationError(f"truncated utility is not M-natural concave (witness {w})")
    return t


def truncation_builder(truncate=truncate_table):
    """Speed builder for :func:`solve_mmfa` using ``truncate(u, V, n)`` in place of the shift."""
    def build(mmfa: MmfaInstance, V: Fraction) -> Instance:
        jobs = [(a, truncate(u, V, mmfa.n_items)) for a, u in zip(mmfa.agents, mmfa.utilities)]
        return Instance.build(mmfa.items, jobs)
    return build


def santa_instance(items, weights: dict) -> MmfaInstance:
    """Linear-utility instance; ``weights`` maps agent id to per-item values."""
    return MmfaInstance.build(items, [(a, LinearSpeed(tuple(Fraction(x) for x in w))) for a, w in weights.items()])
