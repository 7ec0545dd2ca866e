"""Rounding an optimal configuration-LP pair into an integral assignment.

Jobs are split into three groups by how the fractional solution uses them:

* J1: mostly served by individually fast machines; rounded to single
  machines through an unrelated-machines assignment LP (load <= 32C).
* J2: mostly served by cheap sets; each gets a maximizer of its reduced
  function with every machine shared by at most 20 jobs (load <= 40C).
* J3: the rest; fractional sets are split into cheap parts, machines are
  bucketed into dyadic price classes, and a polymatroid intersection picks
  integral sets with every machine shared by at most 26 jobs (load < 121C).
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from . import lp as lpmod
from .configlp import ConfigLpSolution, binary_search_C, build_and_solve
from .core import (CONSTANTS, Assignment, GsError, Instance, InvariantViolation, bits, ensure,
                   machine_loads, mask_of, popcount, subsets)
from .mnat import RankOracle, demand, matroid_greedy_top

logger = logging.getLogger(__name__)

K = CONSTANTS
#: welfare candidates are enumerated exhaustively up to this many machines
WELFARE_ENUM_MAX = 12
#: explicit (WF) LP certificate is built up to this many machines
WELFARE_LP_MAX = 10
#: explicit polymatroid LP is built when every job has at most this many candidate machines
PM_LP_MAX = 10
#: the fractional witness is checked against every rank row up to this many support machines
PM_WITNESS_ENUM_MAX = 12


class LpInfeasible(GsError):
    """The configuration LP has no solution at the requested C."""


def _sum(values) -> Fraction:
    return sum(values, Fraction(0))


# ---------------------------------------------------------------------------
# job partition


@dataclass
class JobPartition:
    J1: list
    J2: list
    J3: list
    M_plus: tuple          # mask per job
    j1_mass: tuple         # weighted fast-machine mass per job
    s2_mass: tuple         # LP mass on cheap sets per job


def is_cheap(sol: ConfigLpSolution, j: int, S: int) -> bool:
    """``S`` has total price ``sum mu_i/lambda_j <= 4/C``."""
    r = sol.ratios(j)
    return _sum(r[i] for i in bits(S)) <= K.low_speed / sol.C


def fast_machines(inst: Instance, C: Fraction, j: int) -> int:
    g = inst.speeds[j]
    thr = K.single_speed / C
    return mask_of(i for i in range(inst.m) if g(1 << i) >= thr)


def partition_jobs(inst: Instance, sol: ConfigLpSolution) -> JobPartition:
    C = sol.C
    J1, J2, J3, mp, m1, m2 = [], [], [], [], [], []
    for j in range(inst.n):
        g = inst.speeds[j]
        plus = fast_machines(inst, C, j)
        supp = sol.support(j)
        ensure(bool(supp), f"job {j} has empty support")
        mass1 = _sum(g(1 << i) / g(S) * v for S, v in supp for i in bits(S & plus))
        mass2 = _sum(v for S, v in supp if is_cheap(sol, j, S))
        mp.append(plus)
        m1.append(mass1)
        m2.append(mass2)
        if mass1 >= K.j1_mass:
            J1.append(j)
        elif mass2 >= K.j2_mass:
            J2.append(j)
        else:
            J3.append(j)
    return JobPartition(J1, J2, J3, tuple(mp), tuple(m1), tuple(m2))


@dataclass
class PartialAssignment:
    step: int
    sets: dict                   # job -> mask
    bound: Fraction              # certified per-machine load bound
    loads: tuple = ()
    multiplicity: tuple = ()     # jobs of this step per machine
    info: dict = field(default_factory=dict)


def _finish(inst: Instance, step: int, sets: dict, bound: Fraction, info=None) -> PartialAssignment:
    loads = [Fraction(0)] * inst.m
    mult = [0] * inst.m
    for j, S in sets.items():
        t = inst.time(j, S)
        for i in bits(S):
            loads[i] += t
            mult[i] += 1
    ensure(all(x <= bound for x in loads), f"step {step} load {max(loads, default=0)} exceeds {bound}")
    return PartialAssignment(step, dict(sets), bound, tuple(loads), tuple(mult), info or {})


# ---------------------------------------------------------------------------
# step 1: single machines


def step1_lp(inst: Instance, C: Fraction, J1, M_plus) -> tuple[lpmod.LinearProgram, list]:
    prog = lpmod.LinearProgram("max")
    var = []
    job_rows = {j: {} for j in J1}
    mach_rows = [dict() for _ in range(inst.m)]
    for j in J1:
        g = inst.speeds[j]
        for i in bits(M_plus[j]):
            k = prog.add_var(("y", i, j))
            var.append((i, j))
            job_rows[j][k] = 1
            mach_rows[i][k] = 1 / g(1 << i)
    for j in J1:
        prog.add_row(("job", j), job_rows[j], lpmod.EQ, 1)
    for i in range(inst.m):
        prog.add_row(("machine", i), mach_rows[i], lpmod.LE, K.step1_budget * C)
    return prog, var


def step1_assign(inst: Instance, sol: ConfigLpSolution, part: JobPartition) -> PartialAssignment:
    C = sol.C
    J1 = part.J1
    if not J1:
        return _finish(inst, 1, {}, K.step1_load * C)
    prog, var = step1_lp(inst, C, J1, part.M_plus)
    out = lpmod.solve(prog)
    if out.status != "optimal":
        raise InvariantViolation("single-machine assignment LP infeasible although it must contain the scaled LP solution")
    sets = {}
    frac_edges = []
    for (i, j), v in zip(var, out.x):
        if v == 1:
            sets[j] = 1 << i
        elif v > 0:
            frac_edges.append((i, j))
    frac_jobs = sorted({j for _, j in frac_edges})
    n_frac = len(frac_jobs)
    if frac_jobs:
        G = nx.Graph()
        G.add_nodes_from((("j", j) for j in frac_jobs), bipartite=0)
        G.add_nodes_from((("m", i) for i, _ in frac_edges), bipartite=1)
        G.add_edges_from((("j", j), ("m", i)) for i, j in frac_edges)
        match = nx.bipartite.hopcroft_karp_matching(G, top_nodes=[("j", j) for j in frac_jobs])
        for j in frac_jobs:
            ensure(("j", j) in match, f"fractional job {j} left unmatched in the support forest")
            sets[j] = 1 << match[("j", j)][1]
    ensure(sorted(sets) == sorted(J1), "step 1 did not place every job")
    return _finish(inst, 1, sets, K.step1_load * C, {"fractional_jobs": n_frac})


# ---------------------------------------------------------------------------
# step 2: welfare


def _reduced_maximizers(inst, sol, j) -> list[int]:
    red = sol.reduced(inst, j)
    best = 1 / sol.C
    return [S for S in range(1, 1 << inst.m) if red(S) == best]


def step2_candidates(inst: Instance, sol: ConfigLpSolution, j: int, avoid: int = 0) -> list[int]:
    """Maximizers of the reduced function: greedy seeds first, then support sets, then all."""
    oracle = RankOracle(sol.reduced(inst, j))
    out = []
    for U in (inst.full & ~avoid, inst.full):
        T = oracle.maximizer(U)
        if T and T not in out:
            out.append(T)
    for S, _ in sol.support(j):
        if S not in out:
            out.append(S)
    if inst.m <= WELFARE_ENUM_MAX:
        for S in _reduced_maximizers(inst, sol, j):
            if S not in out:
                out.append(S)
    return out


def welfare_search(inst: Instance, sol: ConfigLpSolution, jobs) -> tuple[dict, Fraction, int]:
    """Integral welfare optimum: one reduced maximizer per job, at most 20 jobs per machine.

    Depth-first over :func:`step2_candidates`; returns ``(sets, value, nodes)``.
    """
    C = sol.C
    cap = K.welfare_cap
    use = [0] * inst.m
    chosen: dict[int, int] = {}
    nodes = 0

    def dfs(k: int) -> bool:
        nonlocal nodes
        if k == len(jobs):
            return True
        j = jobs[k]
        full = mask_of(i for i in range(inst.m) if use[i] >= cap)
        for S in step2_candidates(inst, sol, j, full):
            nodes += 1
            if S & full:
                continue
            for i in bits(S):
                use[i] += 1
            chosen[j] = S
            if dfs(k + 1):
                return True
            for i in bits(S):
                use[i] -= 1
            del chosen[j]
        return False

    if not dfs(0):
        raise InvariantViolation("welfare search exhausted without an integral optimum")
    red = {j: sol.reduced(inst, j) for j in jobs}
    for j, S in chosen.items():
        ensure(red[j](S) == 1 / C, f"step 2 set of job {j} is not a reduced maximizer")
        ensure(inst.speeds[j](S) >= 1 / (2 * C), f"step 2 set of job {j} is slower than 1/(2C)")
    value = _sum(red[j](S) for j, S in chosen.items())
    ensure(value == len(jobs) / C, "step 2 welfare value differs from |J2|/C")
    return chosen, value, nodes


def step2_assign(inst: Instance, sol: ConfigLpSolution, part: JobPartition) -> PartialAssignment:
    C = sol.C
    J2 = part.J2
    if not J2:
        return _finish(inst, 2, {}, K.step2_load * C, {"welfare_value": Fraction(0)})
    chosen, value, nodes = welfare_search(inst, sol, J2)
    info = {"welfare_value": value, "search_nodes": nodes, "welfare_substitute": "certified backtracking search"}
    info["welfare_certificate"] = welfare_certificate(inst, sol, J2, value)
    info["fractional_witness_value"] = welfare_witness_value(inst, sol, J2)
    return _finish(inst, 2, chosen, K.step2_load * C, info)


def welfare_lp(inst: Instance, sol: ConfigLpSolution, J2) -> lpmod.LinearProgram:
    """Explicit welfare LP over all sets with positive reduced value."""
    prog = lpmod.LinearProgram("max")
    job_rows = {j: {} for j in J2}
    mach_rows = [dict() for _ in range(inst.m)]
    for j in J2:
        red = sol.reduced(inst, j)
        for S in range(1, 1 << inst.m):
            v = red(S)
            if v <= 0:
                continue
            k = prog.add_var(("z", S, j), v)
            job_rows[j][k] = 1
            for i in bits(S):
                mach_rows[i][k] = 1
    for j in J2:
        prog.add_row(("job", j), job_rows[j], lpmod.LE, 1)
    for i in range(inst.m):
        prog.add_row(("machine", i), mach_rows[i], lpmod.LE, K.welfare_cap)
    return prog


def welfare_certificate(inst: Instance, sol: ConfigLpSolution, J2, value: Fraction) -> dict:
    """Prove the integral welfare ``value`` optimal for the welfare LP.

    Up to ``WELFARE_LP_MAX`` machines the explicit LP is solved and compared.
    Beyond that the dual point (1/C per job, 0 per machine) is checked with the
    demand oracle; its objective |J2|/C bounds the LP from above.
    """
    if inst.m <= WELFARE_LP_MAX:
        out = lpmod.solve(welfare_lp(inst, sol, J2))
        ensure(out.optimal, "welfare LP not solved to optimality")
        ensure(out.objective == value, f"welfare LP optimum {out.objective} differs from integral value {value}")
        return {"kind": "explicit_lp", "lp_optimum": out.objective}
    bound = Fraction(len(J2)) / sol.C
    for j in J2:
        red = sol.reduced(inst, j)
        S = demand(inst.speeds[j], [r / 2 for r in red.ratios], inst.m)
        ensure(red(S) <= 1 / sol.C, "dual welfare bound violated")
    ensure(bound == value, "welfare value below the dual bound")
    return {"kind": "dual_bound", "lp_optimum": bound}


def welfare_witness_value(inst: Instance, sol: ConfigLpSolution, J2) -> Fraction:
    """Value of the fractional welfare point obtained by renormalizing cheap support mass."""
    total = Fraction(0)
    load = [Fraction(0)] * inst.m
    for j in J2:
        red = sol.reduced(inst, j)
        cheap = [(S, v) for S, v in sol.support(j) if is_cheap(sol, j, S)]
        mass = _sum(v for _, v in cheap)
        for S, v in cheap:
            z = v / mass
            total += red(S) * z
            for i in bits(S):
                load[i] += z
    ensure(all(x <= K.welfare_cap for x in load), "fractional welfare witness overloads a machine")
    ensure(total == len(J2) / sol.C, "fractional welfare witness value differs from |J2|/C")
    return total


# ---------------------------------------------------------------------------
# step 3A: splitting


@dataclass
class JobSplit:
    ratios: tuple                    # mu_i / lambda_j
    parts: dict                      # T -> list of part masks
    x_prime: dict                    # S -> value
    gamma: Fraction
    marginals: tuple                 # x'_ij per machine
    price_mass: Fraction             # sum_i ratio_i x'_ij


@dataclass
class SplitAssignment:
    jobs: dict                       # j -> JobSplit
    machine_totals: tuple            # sum_j x'_ij
    min_gamma: Fraction | None


def split_parts(items: list[int], ratios, cap: Fraction) -> list[int]:
    """Pack ``items`` into parts of price at most ``cap`` with every two parts jointly above it.

    First-fit decreasing by price, then merge any pair that still fits together.
    """
    order = sorted(items, key=lambda i: (-ratios[i], i))
    parts: list[list] = []           # [mask, price]
    for i in order:
        r = ratios[i]
        ensure(r <= cap, "single machine price exceeds the part cap")
        for p in parts:
            if p[1] + r <= cap:
                p[0] |= 1 << i
                p[1] += r
                break
        else:
            parts.append([1 << i, r])
    merged = True
    while merged:
        merged = False
        for a in range(len(parts)):
            for b in range(a + 1, len(parts)):
                if parts[a][1] + parts[b][1] <= cap:
                    parts[a][0] |= parts[b][0]
                    parts[a][1] += parts[b][1]
                    del parts[b]
                    merged = True
                    break
            if merged:
                break
    return [p[0] for p in parts]


def split_sets(inst: Instance, sol: ConfigLpSolution, j: int, plus: int) -> list[int]:
    """Support sets that are expensive and priced mostly outside the fast machines."""
    r = sol.ratios(j)
    out = []
    for T, _ in sol.support(j):
        if is_cheap(sol, j, T):
            continue
        if _sum(r[i] for i in bits(T & ~plus)) > _sum(r[i] for i in bits(T & plus)):
            out.append(T)
    return out


def step3_split(inst: Instance, sol: ConfigLpSolution, part: JobPartition) -> SplitAssignment:
    C = sol.C
    cap = K.low_speed / C
    jobs = {}
    totals = [Fraction(0)] * inst.m
    for j in part.J3:
        g = inst.speeds[j]
        r = sol.ratios(j)
        plus = part.M_plus[j]
        oracle = RankOracle(sol.reduced(inst, j))
        xbar: dict[int, Fraction] = {}
        parts = {}
        x = dict(sol.support(j))
        for T in split_sets(inst, sol, j, plus):
            A = split_parts(bits(T & ~plus), r, cap)
            prices = [_sum(r[i] for i in bits(a)) for a in A]
            ensure(all(p <= cap for p in prices), "part above the price cap")
            ensure(all(prices[a] + prices[b] > cap for a in range(len(A)) for b in range(a + 1, len(A))),
                   "two parts fit together under the cap")
            ensure(mask_of(i for a in A for i in bits(a)) == T & ~plus and
                   sum(popcount(a) for a in A) == popcount(T & ~plus), "parts do not partition T minus M+")
            total_g = _sum(g(a) for a in A)
            ensure(total_g >= K.split_speed_ratio * g(T), "parts keep less than 2/5 of the speed of T")
            parts[T] = A
            for a in A:
                xbar[a] = xbar.get(a, Fraction(0)) + g(a) / total_g * x[T]
        gamma = _sum(xbar.values())
        ensure(gamma >= K.gamma_floor, f"split scaling factor {gamma} below 39/160 for job {j}")
        xp = {S: v / gamma for S, v in xbar.items()}
        ensure(_sum(xp.values()) == 1, "split solution does not sum to 1")
        marg = [Fraction(0)] * inst.m
        for S, v in xp.items():
            ensure(S & plus == 0, "split set meets a fast machine")
            ensure(oracle.is_independent(S), "split set not independent in the reduced matroid")
            for i in bits(S):
                marg[i] += v
        pm = _sum(r[i] * marg[i] for i in range(inst.m))
        ensure(pm >= K.price_mass / C, f"split price mass {pm} below 79/(40C) for job {j}")
        for i in range(inst.m):
            totals[i] += marg[i]
        jobs[j] = JobSplit(tuple(r), parts, xp, gamma, tuple(marg), pm)
    ensure(all(t <= K.split_cap for t in totals), "split solution exceeds 26 on some machine")
    return SplitAssignment(jobs, tuple(totals), min((s.gamma for s in jobs.values()), default=None))


# ---------------------------------------------------------------------------
# step 3B: dyadic classes and polymatroid intersection


def dyadic_class(ratio: Fraction, C: Fraction) -> int:
    """``k`` with ``1/(2^(k+1) C) < ratio <= 1/(2^k C)``."""
    t = 1 / (ratio * C)
    k = t.numerator.bit_length() - t.denominator.bit_length()
    while Fraction(2) ** k > t:
        k -= 1
    while Fraction(2) ** (k + 1) <= t:
        k += 1
    return k


@dataclass
class JobClasses:
    classes: dict      # k -> mask of support machines
    demand: dict       # k -> int
    mass: dict         # k -> sum of x'_ij
    dyadic_sum: Fraction


@dataclass
class WeightClassData:
    C: Fraction
    jobs: dict         # j -> JobClasses

    def truncated_rank(self, j: int, oracle: RankOracle, U: int) -> int:
        jc = self.jobs[j]
        return sum(min(oracle.rank(U & M), jc.demand[k]) for k, M in jc.classes.items())


def step3_classes(split: SplitAssignment, C: Fraction) -> WeightClassData:
    out = {}
    for j, js in split.jobs.items():
        classes: dict[int, int] = {}
        mass: dict[int, Fraction] = {}
        for i, v in enumerate(js.marginals):
            if v > 0:
                k = dyadic_class(js.ratios[i], C)
                classes[k] = classes.get(k, 0) | 1 << i
                mass[k] = mass.get(k, Fraction(0)) + v
        dem = {k: math.floor(v) for k, v in mass.items()}
        ensure(all(d == 0 for k, d in dem.items() if k < 3), f"job {j} has demand in a class below 3")
        dsum = _sum(d / (Fraction(2) ** k * C) for k, d in dem.items())
        ensure(dsum >= K.dyadic_floor / C, f"dyadic demand sum {dsum} below 69/(40C) for job {j}")
        out[j] = JobClasses(dict(sorted(classes.items())), dict(sorted(dem.items())), mass, dsum)
    return WeightClassData(C, out)


def pm_witness(split: SplitAssignment, classes: WeightClassData) -> dict:
    """Fractional point scaling each class of x' down to its demand; keys ``(i, j)``."""
    y = {}
    for j, jc in classes.jobs.items():
        marg = split.jobs[j].marginals
        for k, M in jc.classes.items():
            d = jc.demand[k]
            if d == 0:
                continue
            for i in bits(M):
                if marg[i] > 0:
                    y[(i, j)] = d * marg[i] / jc.mass[k]
    return y


def check_pm_witness(split, classes, oracles, y, m) -> dict:
    """Feasibility of the witness for the polymatroid LP and its value ``sum d``."""
    target = sum(sum(jc.demand.values()) for jc in classes.jobs.values())
    ensure(_sum(y.values()) == target, "witness value differs from the demand total")
    per_machine = [Fraction(0)] * m
    for (i, j), v in y.items():
        per_machine[i] += v
    ensure(all(v <= K.split_cap for v in per_machine), "witness exceeds machine capacity")
    enumerated = True
    for j, jc in classes.jobs.items():
        js = split.jobs[j]
        # decomposition: on each class the witness is a subconvex combination of independent sets
        for k, M in jc.classes.items():
            d = jc.demand[k]
            if d == 0:
                continue
            coef = Fraction(d) / jc.mass[k]
            ensure(coef <= 1, "class demand exceeds class mass")
            for S in js.x_prime:
                ensure(oracles[j].is_independent(S & M), "class slice of a split set is dependent")
        supp = mask_of(i for (i, jj) in y if jj == j)
        if popcount(supp) <= PM_WITNESS_ENUM_MAX:
            for U in subsets(supp):
                lhs = _sum(y.get((i, j), Fraction(0)) for i in bits(U))
                ensure(lhs <= classes.truncated_rank(j, oracles[j], U), "witness violates a rank row")
        else:
            enumerated = False
    return {"value": target, "rank_rows_enumerated": enumerated}


def _ground(classes: WeightClassData) -> list[tuple[int, int, int]]:
    """Elements ``(i, j, k)`` for support machines of classes with positive demand."""
    out = []
    for j, jc in classes.jobs.items():
        for k, M in jc.classes.items():
            if jc.demand[k] > 0:
                out.extend((i, j, k) for i in bits(M))
    return out


def matroid_intersection(elements, indep1, indep2) -> list[int]:
    """Maximum common independent set (indices into ``elements``) via augmenting paths."""
    n = len(elements)
    cur: set[int] = set()
    for e in range(n):
        if indep1(cur | {e}) and indep2(cur | {e}):
            cur.add(e)
    while True:
        outside = [e for e in range(n) if e not in cur]
        sources = [x for x in outside if indep1(cur | {x})]
        sinks = {x for x in outside if indep2(cur | {x})}
        if not sources:
            break
        # edges y->x if I - y + x in M1, x->y if I - y + x in M2
        adj: dict[int, list[int]] = {e: [] for e in range(n)}
        for y in sorted(cur):
            base = cur - {y}
            for x in outside:
                if indep1(base | {x}):
                    adj[y].append(x)
                if indep2(base | {x}):
                    adj[x].append(y)
        prev = {s: None for s in sources}
        queue = list(sources)
        end = None
        for s in sources:
            if s in sinks:
                end = s
                break
        head = 0
        while end is None and head < len(queue):
            u = queue[head]
            head += 1
            for v in adj[u]:
                if v not in prev:
                    prev[v] = u
                    if v in sinks:
                        end = v
                        break
                    queue.append(v)
        if end is None:
            break
        path = []
        while end is not None:
            path.append(end)
            end = prev[end]
        for e in path:
            if e in cur:
                cur.remove(e)
            else:
                cur.add(e)
    return sorted(cur)


def pm_lp(classes: WeightClassData, oracles, elements) -> lpmod.LinearProgram:
    prog = lpmod.LinearProgram("max")
    by_machine: dict[int, dict] = {}
    by_job: dict[int, list] = {}
    for k, (i, j, _) in enumerate(elements):
        prog.add_var(("y", i, j), 1)
        by_machine.setdefault(i, {})[k] = 1
        by_job.setdefault(j, []).append((i, k))
    for i in sorted(by_machine):
        prog.add_row(("machine", i), by_machine[i], lpmod.LE, K.split_cap)
    for j, lst in sorted(by_job.items()):
        supp = mask_of(i for i, _ in lst)
        col = {i: k for i, k in lst}
        for U in subsets(supp):
            if U:
                prog.add_row(("rank", j, U), {col[i]: 1 for i in bits(U)}, lpmod.LE,
                             classes.truncated_rank(j, oracles[j], U))
    return prog


def step3_polymatroid(inst: Instance, sol: ConfigLpSolution, split: SplitAssignment,
                      classes: WeightClassData) -> PartialAssignment:
    C = sol.C
    if not classes.jobs:
        return _finish(inst, 3, {}, K.step3_load * C)
    oracles = {j: RankOracle(sol.reduced(inst, j)) for j in classes.jobs}
    witness = check_pm_witness(split, classes, oracles, pm_witness(split, classes), inst.m)
    elements = _ground(classes)
    target = witness["value"]

    def indep1(I):
        cnt: dict[int, int] = {}
        for e in I:
            i = elements[e][0]
            cnt[i] = cnt.get(i, 0) + 1
            if cnt[i] > K.split_cap:
                return False
        return True

    def indep2(I):
        blocks: dict[tuple, int] = {}
        for e in I:
            i, j, k = elements[e]
            blocks[(j, k)] = blocks.get((j, k), 0) | 1 << i
        for (j, k), T in blocks.items():
            if popcount(T) > classes.jobs[j].demand[k] or not oracles[j].is_independent(T):
                return False
        return True

    per_job = {}
    for i, j, _ in elements:
        per_job[j] = per_job.get(j, 0) + 1
    info = {"pm_value": target, "witness": witness}
    if max(per_job.values(), default=0) <= PM_LP_MAX:
        out = lpmod.solve(pm_lp(classes, oracles, elements))
        ensure(out.optimal, "polymatroid LP not optimal")
        ensure(all(v.denominator == 1 for v in out.x), "polymatroid LP vertex is fractional")
        ensure(out.objective == target, f"polymatroid LP optimum {out.objective} differs from demand total {target}")
        chosen = [e for e, v in enumerate(out.x) if v > 0]
        info["pm_engine"] = "explicit_lp"
    else:
        chosen = matroid_intersection(elements, indep1, indep2)
        ensure(len(chosen) == target, f"matroid intersection found {len(chosen)} < {target}")
        info["pm_engine"] = "matroid_intersection"
    ensure(indep1(set(chosen)) and indep2(set(chosen)), "polymatroid solution infeasible")
    sets: dict[int, int] = {j: 0 for j in classes.jobs}
    hit: dict[tuple, int] = {}
    for e in chosen:
        i, j, k = elements[e]
        sets[j] |= 1 << i
        hit[(j, k)] = hit.get((j, k), 0) + 1
    for j, jc in classes.jobs.items():
        for k, d in jc.demand.items():
            ensure(hit.get((j, k), 0) == d, f"class {k} of job {j} receives {hit.get((j, k), 0)} != {d}")
    final = {}
    replaced = []
    top_mass = {}
    floor = K.speed_floor / C
    for j, S in sets.items():
        r = split.jobs[j].ratios
        T = matroid_greedy_top(oracles[j], S, r)
        mass = _sum(r[i] for i in bits(T))
        ensure(mass >= K.greedy_floor / C, f"greedy top price {mass} below 69/(160C) for job {j}")
        ensure(inst.speeds[j](T) >= floor, f"independent top set of job {j} slower than 69/(320C)")
        top_mass[j] = mass
        if inst.speeds[j](S) >= floor:
            final[j] = S
        else:
            final[j] = T
            replaced.append(j)
    for j, S in final.items():
        ensure(inst.speeds[j](S) >= floor, f"step 3 set of job {j} slower than 69/(320C)")
    info.update(top_price_mass=top_mass, replaced_by_top=replaced, pm_sets=dict(sets))
    pa = _finish(inst, 3, final, K.step3_load * C, info)
    ensure(all(c <= K.split_cap for c in pa.multiplicity), "step 3 multiplicity above 26")
    return pa


# ---------------------------------------------------------------------------
# orchestration


@dataclass
class RoundingResult:
    C: Fraction
    assignment: Assignment
    solution: ConfigLpSolution
    partition: JobPartition
    steps: tuple                      # three PartialAssignment
    split: SplitAssignment
    classes: WeightClassData
    load: Fraction
    wall_time: float
    eps: Fraction | None = None

    def step_of(self) -> list[int]:
        out = [0] * len(self.assignment.sets)
        for pa in self.steps:
            for j in pa.sets:
                out[j] = pa.step
        return out


def choose_mode(inst: Instance, mode: str) -> str:
    if mode == "auto":
        return "explicit" if inst.m <= 8 else "colgen"
    return mode


def round_solution(inst: Instance, sol: ConfigLpSolution) -> tuple:
    part = partition_jobs(inst, sol)
    s1 = step1_assign(inst, sol, part)
    s2 = step2_assign(inst, sol, part)
    split = step3_split(inst, sol, part)
    classes = step3_classes(split, sol.C)
    s3 = step3_polymatroid(inst, sol, split, classes)
    ensure(all(c <= K.welfare_cap for c in s2.multiplicity), "step 2 multiplicity above 20")
    sets = [0] * inst.n
    for pa in (s1, s2, s3):
        for j, S in pa.sets.items():
            ensure(sets[j] == 0, f"job {j} assigned twice")
            sets[j] = S
    a = Assignment(tuple(sets))
    a.validate(inst)
    total = max(machine_loads(a, inst))
    ensure(total <= K.total * sol.C, f"final load {total} exceeds 193 C")
    return part, (s1, s2, s3), split, classes, a, total


def round(inst: Instance, C=None, *, eps=Fraction(1, 100), mode: str = "auto") -> RoundingResult:
    """Full pipeline at a given ``C`` or at the searched smallest feasible ``C``.

    Raises :class:`LpInfeasible` when a given ``C`` leaves the configuration LP
    infeasible; by contraposition no assignment of load at most ``C`` exists.
    """
    t0 = time.perf_counter()
    mode = choose_mode(inst, mode)
    if C is None:
        C, sol = binary_search_C(inst, eps, mode)
    else:
        C = Fraction(C)
        sol = build_and_solve(inst, C, mode)
        if sol is None:
            raise LpInfeasible(f"configuration LP infeasible at C = {C}: no assignment of load <= C exists")
        eps = None
    part, steps, split, classes, a, total = round_solution(inst, sol)
    return RoundingResult(C, a, sol, part, steps, split, classes, total, time.perf_counter() - t0, eps)
