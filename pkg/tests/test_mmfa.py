from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gsmalleable.core import (CONSTANTS as K, InvariantViolation, LinearShift, LinearSpeed, UniformMatroid,
                              ValidationError, WeightedMatroidRank)
from gsmalleable.gen import PROFILES, generate_mmfa
from gsmalleable.mmfa import (Allocation, MmfaInstance, certify, reduce, santa_instance, search_bounds, shifts,
                              solve_mmfa, truncate_table, truncation_builder)
from gsmalleable.oracle import exact_mmfa

F = Fraction


def _unit_demand_pair():
    u = WeightedMatroidRank(UniformMatroid(2, 1), (F(1), F(1)))
    return MmfaInstance.build(["x", "y"], [("a", u), ("b", u)])


def test_shifts_and_reduction():
    u = LinearSpeed((F(5), F(1), F(2)))
    assert shifts(u, F(2), 3) == (F(3), F(0), F(0))
    mm = santa_instance(["x", "y", "z"], {"a": [5, 1, 2], "b": [1, 1, 1]})
    inst = reduce(mm, F(2))
    assert inst.machines == ("x", "y", "z") and inst.job_ids == ("a", "b")
    assert isinstance(inst.speeds[0], LinearShift)
    assert inst.speeds[0](0b001) == 2 and inst.speeds[0](0b111) == 5
    with pytest.raises(ValidationError):
        reduce(mm, 0)


def test_hand_instance_against_exact():
    mm = santa_instance(["x", "y", "z"], {"a": [3, 1, 1], "b": [1, 1, 3]})
    V_star, _ = exact_mmfa(mm.utilities, 3)
    assert V_star == 3
    alloc = solve_mmfa(mm)
    assert alloc.status == "ok"
    assert alloc.V >= V_star / (1 + alloc.eps)
    assert alloc.min_utility >= alloc.V / K.total
    assert max(alloc.multiplicity) <= K.mmfa_mult


def test_unit_demand_agents_share_one_item():
    alloc = solve_mmfa(_unit_demand_pair())
    assert alloc.V == 1
    assert alloc.utilities == (1, 1)


def test_search_bounds():
    assert search_bounds(_unit_demand_pair()) == (F(1, 8), F(1))


def test_degenerate_zero_optimum():
    mm = santa_instance(["x"], {"a": [0], "b": [1]})
    alloc = solve_mmfa(mm)
    assert alloc.status == "degenerate" and alloc.V == 0


def test_truncation_builder():
    alloc = solve_mmfa(_unit_demand_pair(), speed_builder=truncation_builder())
    assert alloc.V == 1
    # min(additive, V) is budget additive and fails the exchange check in general
    mm = santa_instance(["x", "y", "z"], {"a": [3, 1, 1], "b": [1, 1, 3]})
    with pytest.raises(ValidationError):
        truncate_table(mm.utilities[0], F(3), 3)


def test_certify_rejects_overshared_item():
    alloc = Allocation((1,), F(1), (F(1),), F(1), (33,), ((33, 0, 0),))
    with pytest.raises(InvariantViolation):
        certify(alloc)


def test_build_errors():
    with pytest.raises(ValidationError):
        MmfaInstance.build([], [("a", LinearSpeed(()))])
    with pytest.raises(ValidationError):
        MmfaInstance.build(["x"], [])
    with pytest.raises(ValidationError):
        solve_mmfa(_unit_demand_pair(), rel_eps=0)


@settings(max_examples=25)
@given(st.integers(0, 10 ** 5), st.sampled_from(PROFILES))
def test_random_allocations_certified(seed, profile):
    mm = generate_mmfa(seed, profile)
    alloc = solve_mmfa(mm)
    V_star, _ = exact_mmfa(mm.utilities, mm.n_items)
    if alloc.status == "degenerate":
        assert V_star == 0
        return
    assert alloc.V >= V_star / (1 + alloc.eps)
    assert alloc.min_utility >= alloc.V / K.total
    for per_step, total in zip(alloc.step_multiplicity, alloc.multiplicity):
        assert per_step[0] <= K.step1_mult and per_step[1] <= K.welfare_cap and per_step[2] <= K.split_cap
        assert sum(per_step) == total <= K.mmfa_mult
