"""Configuration LP over (machine set, job) columns and its dual prices.

Primal, for a target load ``C``::

    max   sum_i s_i
    s.t.  sum_S (2 - 1/(C g_j(S))) x(S,j) >= 1          for every job j
          sum_j sum_{S ni i} x(S,j) / g_j(S) + s_i <= C    for every machine i

Its dual variables are ``lambda_j >= 0`` (job rows) and ``mu_i >= 1`` (machine
rows).  Columns with ``g_j(S) <= 0`` are left out: their dual constraint holds
trivially and they can never carry weight.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from . import lp as lpmod
from .core import Instance, InvariantViolation, ValidationError, bits, ensure
from .mnat import ReducedSpeedFn, demand

logger = logging.getLogger(__name__)

EXPLICIT_MAX_MACHINES = 14
COLGEN_MAX_ROUNDS = 10_000


@dataclass
class ConfigLpSolution:
    C: Fraction
    x: dict                     # (mask, job) -> positive value
    s: tuple
    lam: tuple
    mu: tuple
    objective: Fraction
    mode: str = "explicit"
    n_columns: int = 0
    rounds: int = 0
    pivots: int = 0
    certified: dict = field(default_factory=dict)

    def support(self, j: int) -> list[tuple[int, Fraction]]:
        return sorted(((S, v) for (S, jj), v in self.x.items() if jj == j), key=lambda t: t[0])

    def reduced(self, inst: Instance, j: int) -> ReducedSpeedFn:
        return ReducedSpeedFn(inst.speeds[j], self.lam[j], self.mu)

    def ratios(self, j: int) -> tuple:
        """``mu_i / lambda_j`` for every machine."""
        return tuple(m / self.lam[j] for m in self.mu)


def _build_master(inst: Instance, C: Fraction, columns: list[tuple[int, int]]) -> lpmod.LinearProgram:
    prog = lpmod.LinearProgram("max")
    job_rows = [dict() for _ in range(inst.n)]
    mach_rows = [dict() for _ in range(inst.m)]
    for S, j in columns:
        g = inst.speeds[j](S)
        k = prog.add_var(("x", S, j))
        job_rows[j][k] = 2 - 1 / (C * g)
        for i in bits(S):
            mach_rows[i][k] = 1 / g
    for i in range(inst.m):
        k = prog.add_var(("s", i), 1)
        mach_rows[i][k] = 1
    for j in range(inst.n):
        prog.add_row(("job", j), job_rows[j], lpmod.GE, 1)
    for i in range(inst.m):
        prog.add_row(("machine", i), mach_rows[i], lpmod.LE, C)
    return prog


def explicit_columns(inst: Instance) -> list[tuple[int, int]]:
    return [(S, j) for j in range(inst.n) for S in range(1, 1 << inst.m) if inst.speeds[j](S) > 0]


def explicit_lp(inst: Instance, C) -> lpmod.LinearProgram:
    """The configuration LP with every column written out."""
    if inst.m > EXPLICIT_MAX_MACHINES:
        raise ValidationError(f"explicit LP limited to {EXPLICIT_MAX_MACHINES} machines, got {inst.m}")
    C = Fraction(C)
    return _build_master(inst, C, explicit_columns(inst))


def price_column(fn, lam_j: Fraction, mu, C: Fraction):
    """Most violated dual constraint of one job via the greedy demand oracle.

    Returns ``(S, violation)`` when ``g(S) - sum_{i in S} mu_i/(2 lam_j)``
    exceeds ``1/(2C)`` (``violation`` is the excess), otherwise None.
    """
    if lam_j <= 0:
        return None
    prices = [m / (2 * lam_j) for m in mu]
    S = demand(fn, prices, len(prices))
    val = fn(S) - sum((prices[i] for i in bits(S)), Fraction(0))
    excess = val - 1 / (2 * C)
    if excess > 0:
        return S, excess
    return None


def _solve_master(inst, C, columns):
    prog = _build_master(inst, C, columns)
    return prog, lpmod.solve(prog)


def _extract(inst, C, prog, out, mode) -> ConfigLpSolution:
    x, s = {}, [Fraction(0)] * inst.m
    for label, v in zip(prog.var_labels, out.x):
        if label[0] == "s":
            s[label[1]] = v
        elif v != 0:
            x[(label[1], label[2])] = v
    lam = tuple(-out.duals[j] for j in range(inst.n))
    mu = tuple(out.duals[inst.n + i] for i in range(inst.m))
    return ConfigLpSolution(C=C, x=x, s=tuple(s), lam=lam, mu=mu, objective=out.objective, mode=mode,
                            n_columns=len(prog.var_labels) - inst.m, pivots=out.pivots)


def build_and_solve(inst: Instance, C, mode: str = "explicit") -> ConfigLpSolution | None:
    """Optimal primal-dual pair at target ``C``, or None if the LP is infeasible.

    Infeasibility means no assignment of load at most ``C`` exists.  Every
    structural guarantee of an optimal pair is verified before returning.
    """
    C = Fraction(C)
    if C <= 0:
        raise ValidationError("target load C must be positive")
    if mode == "explicit":
        if inst.m > EXPLICIT_MAX_MACHINES:
            raise ValidationError(
                f"explicit configuration LP limited to {EXPLICIT_MAX_MACHINES} machines; use colgen")
        columns = explicit_columns(inst)
        prog, out = _solve_master(inst, C, columns)
        if out.status == "infeasible":
            return None
        ensure(out.status == "optimal", f"configuration LP returned {out.status}")
        sol = _extract(inst, C, prog, out, mode)
        sol.rounds = 1
    elif mode == "colgen":
        sol = _colgen(inst, C)
        if sol is None:
            return None
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    verify_solution(inst, sol)
    return sol


def _initial_columns(inst: Instance) -> list[tuple[int, int]]:
    cols = []
    for j, fn in enumerate(inst.speeds):
        best = demand(fn, [Fraction(0)] * inst.m, inst.m)
        for S in (best, inst.full):
            if S and fn(S) > 0 and (S, j) not in cols:
                cols.append((S, j))
    return cols


def _column_coeffs(inst: Instance, C: Fraction, S: int, j: int) -> dict:
    g = inst.speeds[j](S)
    coeffs = {j: 2 - 1 / (C * g)}
    for i in bits(S):
        coeffs[inst.n + i] = 1 / g
    return coeffs


def _colgen(inst: Instance, C: Fraction) -> ConfigLpSolution | None:
    columns = _initial_columns(inst)
    seen = set(columns)
    engine = lpmod.Simplex(_build_master(inst, C, columns))
    for rnd in range(1, COLGEN_MAX_ROUNDS + 1):
        out = engine.solve()
        new = []
        if out.status == "infeasible":
            # Farkas ray: job rows carry y_j <= 0, machine rows y_i >= 0; a column helps
            # iff (-y_j)(2g - 1/C) - sum y_i > 0, the same form as a dual violation.
            lam_f = [-out.farkas[j] for j in range(inst.n)]
            mu_f = [out.farkas[inst.n + i] for i in range(inst.m)]
            for j, fn in enumerate(inst.speeds):
                if lam_f[j] <= 0:
                    continue
                prices = [m / (2 * lam_f[j]) for m in mu_f]
                S = demand(fn, prices, inst.m)
                val = fn(S) - sum((prices[i] for i in bits(S)), Fraction(0))
                if val > 1 / (2 * C) and (S, j) not in seen:
                    new.append((S, j))
            if not new:
                return None
        else:
            ensure(out.status == "optimal", f"restricted master returned {out.status}")
            sol = _extract(inst, C, engine.lp, out, "colgen")
            for j, fn in enumerate(inst.speeds):
                hit = price_column(fn, sol.lam[j], sol.mu, C)
                if hit is not None:
                    ensure((hit[0], j) not in seen, "pricing returned an existing column")
                    new.append((hit[0], j))
            if not new:
                sol.rounds = rnd
                sol.certified["pricing"] = "no violated dual constraint"
                return sol
        for S, j in new:
            seen.add((S, j))
            engine.add_var(("x", S, j), 0, _column_coeffs(inst, C, S, j))
            columns.append((S, j))
    raise InvariantViolation("column generation did not converge")


def verify_solution(inst: Instance, sol: ConfigLpSolution) -> None:
    """Exact post-hoc checks of an optimal pair; raises InvariantViolation."""
    C = sol.C
    # primal feasibility
    cover = [Fraction(0)] * inst.n
    loads = [Fraction(0)] * inst.m
    for (S, j), v in sol.x.items():
        ensure(v > 0, "negative primal value")
        g = inst.speeds[j](S)
        cover[j] += (2 - 1 / (C * g)) * v
        for i in bits(S):
            loads[i] += v / g
    for j in range(inst.n):
        ensure(cover[j] >= 1, f"job row {j} violated")
    for i in range(inst.m):
        ensure(sol.s[i] >= 0 and loads[i] + sol.s[i] <= C, f"machine row {i} violated")
    # dual feasibility
    for i in range(inst.m):
        ensure(sol.mu[i] >= 1, f"mu_{i} = {sol.mu[i]} < 1")
    for j in range(inst.n):
        if sol.lam[j] <= 0:
            raise InvariantViolation(f"lambda_{j} = {sol.lam[j]} in an optimal dual (must be > 0)")
    if sol.mode == "explicit":
        for S, j in explicit_columns(inst):
            g = inst.speeds[j](S)
            ensure((2 * g - 1 / C) * sol.lam[j] - sum((sol.mu[i] for i in bits(S)), Fraction(0)) <= 0,
                   f"dual constraint ({S:#b}, {j}) violated")
    else:
        for j, fn in enumerate(inst.speeds):
            ensure(price_column(fn, sol.lam[j], sol.mu, C) is None, f"pricing finds a violated column for job {j}")
    # strong duality
    dual_obj = -sum(sol.lam, Fraction(0)) + C * sum(sol.mu, Fraction(0))
    ensure(dual_obj == sol.objective == sum(sol.s, Fraction(0)), "strong duality fails")
    # complementary slackness consequences on the support
    for (S, j), v in sol.x.items():
        g = inst.speeds[j](S)
        red = sol.reduced(inst, j)
        ensure(red(S) == 1 / C, f"support ({S:#b}, {j}) has reduced value {red(S)} != 1/C")
        ensure(g >= 1 / (2 * C), f"support ({S:#b}, {j}) has speed below 1/(2C)")
    sol.certified.update(lambda_positive=True, support_reduced_equals_inv_C=True, strong_duality=True)


def search_bounds(inst: Instance) -> tuple[Fraction, Fraction]:
    """``(lo, hi)``: no assignment beats ``lo``; the LP is feasible at ``hi``.

    ``lo`` is the largest best-possible processing time of a single job;
    ``hi`` is the load of giving every job its fastest set.
    """
    best_times = []
    for fn in inst.speeds:
        S = demand(fn, [Fraction(0)] * inst.m, inst.m)
        g = fn(S)
        if g <= 0:
            raise ValidationError("some job has no set of positive speed")
        best_times.append(1 / g)
    return max(best_times), sum(best_times, Fraction(0))


def binary_search_C(inst: Instance, rel_eps=Fraction(1, 100), mode: str = "explicit"):
    """Bisect on ``C`` until ``hi/lo <= 1 + rel_eps``; returns ``(C, solution)`` at ``hi``.

    ``lo`` is only ever an infeasible point or the trivial lower bound, so the
    returned ``C`` is within ``1 + rel_eps`` of the optimum load.
    """
    rel_eps = Fraction(rel_eps)
    if rel_eps <= 0:
        raise ValidationError("rel_eps must be positive")
    lo, hi = search_bounds(inst)
    sol_lo = build_and_solve(inst, lo, mode)
    if sol_lo is not None:
        return lo, sol_lo
    sol_hi = build_and_solve(inst, hi, mode)
    ensure(sol_hi is not None, "configuration LP infeasible at the trivial upper bound")
    while hi > lo * (1 + rel_eps):
        mid = (lo + hi) / 2
        sol = build_and_solve(inst, mid, mode)
        if sol is None:
            lo = mid
        else:
            hi, sol_hi = mid, sol
    return hi, sol_hi
