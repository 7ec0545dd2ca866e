from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gsmalleable.core import Instance, LinearSpeed, UniformMatroid, ValidationError, WeightedMatroidRank
from gsmalleable.gen import PROFILES, generate
from gsmalleable.oracle import exact_assignment, exact_demand, exact_maximizers, exact_mmfa

from helpers import all_assignments_load

F = Fraction


@settings(max_examples=30)
@given(st.integers(0, 10 ** 5), st.sampled_from(PROFILES), st.integers(1, 3), st.integers(1, 3))
def test_exact_assignment_matches_plain_enumeration(seed, profile, m, n):
    inst = generate(seed, profile, m, n)
    best, a = exact_assignment(inst)
    assert best == all_assignments_load(inst)
    from gsmalleable.core import load
    assert load(a, inst) == best


def test_exact_assignment_hand_instance():
    # two unit jobs on two unit machines: split them, load 1
    inst = Instance.build(["a", "b"], [("x", LinearSpeed((F(1), F(1)))), ("y", LinearSpeed((F(1), F(1))))])
    best, a = exact_assignment(inst)
    assert best == 1 and a.sets == (0b01, 0b10)


def test_exact_assignment_guard():
    inst = generate(0, "linear", 6, 5)
    with pytest.raises(ValidationError):
        exact_assignment(inst)


def test_exact_demand_and_maximizers():
    fn = WeightedMatroidRank(UniformMatroid(3, 2), (F(3), F(2), F(2)))
    assert exact_demand(fn, [F(1), F(1), F(1)]) == (3, 0b011)
    assert exact_maximizers(fn, 3) == (5, [0b011, 0b101, 0b111])
    with pytest.raises(ValidationError):
        exact_demand(fn, [F(0)] * 17)


def test_exact_mmfa_hand_instance():
    a = LinearSpeed((F(3), F(1), F(1)))
    b = LinearSpeed((F(1), F(1), F(3)))
    V, bundles = exact_mmfa([a, b], 3)
    assert V == 3
    assert min(a(bundles[0]), b(bundles[1])) == 3
    assert bundles[0] & bundles[1] == 0


def test_exact_mmfa_guard():
    with pytest.raises(ValidationError):
        exact_mmfa([LinearSpeed((F(1),) * 12)] * 3, 12)
