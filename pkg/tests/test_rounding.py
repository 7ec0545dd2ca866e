import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gsmalleable.configlp import build_and_solve, search_bounds
from gsmalleable.core import CONSTANTS as K
from gsmalleable.core import Instance, LinearSpeed, machine_loads, popcount
from gsmalleable.gen import PROFILES, generate
from gsmalleable.mnat import RankOracle, ReducedSpeedFn
from gsmalleable.oracle import exact_assignment
from gsmalleable.rounding import (LpInfeasible, choose_mode, dyadic_class, matroid_intersection,
                                  round, split_parts, welfare_certificate, welfare_lp, welfare_search)
from gsmalleable import lp as lpmod

from helpers import speed_functions

F = Fraction


@pytest.mark.parametrize("ratio,C,k", [
    (F(1), F(1), 0), (F(1, 2), F(1), 1), (F(3, 4), F(1), 0), (F(1, 8), F(1), 3),
    (F(1, 9), F(1), 3), (F(1, 16), F(1), 4), (F(1, 3), F(2), 0), (F(4), F(1, 8), 1), (F(2), F(1), -1),
])
def test_dyadic_class(ratio, C, k):
    assert dyadic_class(ratio, C) == k
    assert 1 / (2 ** (k + 1) * C) < ratio <= 1 / (2 ** k * C)


@given(st.lists(st.integers(1, 12), min_size=1, max_size=9), st.integers(12, 30))
def test_split_parts_properties(prices, cap):
    r = [F(p) for p in prices]
    cap = F(cap)
    parts = split_parts(list(range(len(r))), r, cap)
    assert sorted(i for p in parts for i in range(len(r)) if p >> i & 1) == list(range(len(r)))
    assert sum(popcount(p) for p in parts) == len(r)
    cost = [sum(r[i] for i in range(len(r)) if p >> i & 1) for p in parts]
    assert all(c <= cap for c in cost)
    assert all(a + b > cap for a, b in itertools.combinations(cost, 2))


@st.composite
def matroid_pairs(draw):
    n = draw(st.integers(1, 6))
    labels = [draw(st.integers(0, 2)) for _ in range(n)]
    caps = [draw(st.integers(0, 2)) for _ in range(3)]
    fn, _ = draw(speed_functions(n_min=n, n_max=n))
    mu = tuple(draw(st.sampled_from([F(1), F(2), F(3)])) for _ in range(n))
    oracle = RankOracle(ReducedSpeedFn(fn, F(1), mu))

    def indep1(I):
        return all(sum(1 for e in I if labels[e] == b) <= caps[b] for b in range(3))

    def indep2(I):
        return oracle.is_independent(sum(1 << e for e in I))

    return n, indep1, indep2


@given(matroid_pairs())
def test_matroid_intersection_is_maximum(case):
    n, indep1, indep2 = case
    got = matroid_intersection(list(range(n)), indep1, indep2)
    assert indep1(set(got)) and indep2(set(got))
    best = max(len(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)
               if indep1(set(c)) and indep2(set(c)))
    assert len(got) == best


def _small(seed, profile):
    return generate(seed, profile)


@given(st.integers(0, 10 ** 5), st.sampled_from(PROFILES))
def test_pipeline_step_bounds(seed, profile):
    inst = _small(seed, profile)
    res = round(inst)
    C = res.C
    s1, s2, s3 = res.steps
    assert max(s1.loads) <= K.step1_load * C
    assert max(s2.loads) <= K.step2_load * C and max(s2.multiplicity) <= K.welfare_cap
    assert max(s3.loads) <= K.step3_load * C and max(s3.multiplicity) <= K.split_cap
    assert res.load == max(machine_loads(res.assignment, inst)) <= K.total * C
    assert sorted(res.partition.J1 + res.partition.J2 + res.partition.J3) == list(range(inst.n))
    assert set(j for pa in res.steps for j in pa.sets) == set(range(inst.n))


@given(st.integers(0, 10 ** 5), st.sampled_from(PROFILES))
def test_pipeline_within_guarantee_at_optimum(seed, profile):
    inst = _small(seed, profile)
    opt, _ = exact_assignment(inst)
    res = round(inst, opt)
    assert res.load <= K.total * opt


def test_round_raises_when_infeasible():
    inst = generate(1, "linear", 2, 2)
    with pytest.raises(LpInfeasible):
        round(inst, F(1, 100))


def test_choose_mode():
    assert choose_mode(generate(1, "linear", 3, 1), "auto") == "explicit"
    assert choose_mode(generate(0, "wide-j2"), "auto") == "colgen"
    assert choose_mode(generate(1, "linear", 3, 1), "colgen") == "colgen"


def test_step1_places_single_fast_machine_jobs():
    # three equal jobs, two identical machines: every job is J1 and gets one machine
    inst = Instance.build(["a", "b"], [(f"j{k}", LinearSpeed((F(1), F(1)))) for k in range(3)])
    res = round(inst, F(3, 2))
    assert res.partition.J1 == [0, 1, 2]
    assert all(popcount(S) == 1 for S in res.assignment.sets)
    assert max(res.steps[0].loads) <= 32 * F(3, 2)


@settings(max_examples=30)
@given(st.integers(0, 10 ** 5), st.sampled_from(PROFILES))
def test_welfare_search_matches_explicit_lp(seed, profile):
    # the welfare search accepts any job subset; running it on all jobs of
    # small instances exercises the explicit welfare LP certificate
    inst = _small(seed, profile)
    sol = build_and_solve(inst, search_bounds(inst)[1])
    jobs = list(range(inst.n))
    sets, value, _ = welfare_search(inst, sol, jobs)
    out = lpmod.solve(welfare_lp(inst, sol, jobs))
    assert value == out.objective == inst.n / sol.C
    assert welfare_certificate(inst, sol, jobs, value)["kind"] == "explicit_lp"
    assert all(c <= K.welfare_cap for c in [sum(1 for S in sets.values() if S >> i & 1) for i in range(inst.m)])


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(3))
def test_wide_j2_uses_welfare_step(seed):
    inst = generate(seed, "wide-j2")
    res = round(inst)
    assert res.partition.J2
    assert res.steps[1].info["welfare_certificate"]["kind"] == "dual_bound"
    for j, S in res.steps[1].sets.items():
        assert inst.speeds[j](S) >= 1 / (2 * res.C)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(2))
def test_wide_j3_uses_split_step(seed):
    inst = generate(seed, "wide-j3")
    res = round(inst)
    assert res.partition.J3
    assert res.split.min_gamma >= K.gamma_floor
    assert res.steps[2].info["pm_engine"] == "matroid_intersection"
    for j, S in res.steps[2].sets.items():
        assert inst.speeds[j](S) >= K.speed_floor / res.C
