from fractions import Fraction

import pytest

from gsmalleable import jsonio
from gsmalleable.gen import PROFILES, WIDE_PROFILES, generate, generate_mmfa
from gsmalleable.mnat import check_mnat


@pytest.mark.parametrize("profile", PROFILES)
def test_deterministic_and_small(profile):
    for seed in range(20):
        a, b = generate(seed, profile), generate(seed, profile)
        assert jsonio.emit_instance(a) == jsonio.emit_instance(b)
        assert 1 <= a.m <= 5 and 1 <= a.n <= 4
        for fn in a.speeds:
            assert fn(a.full) > 0
            assert check_mnat(fn, a.m) is None


def test_explicit_sizes():
    inst = generate(7, "mbv", 3, 2)
    assert (inst.m, inst.n) == (3, 2)


def test_profiles_differ_by_seed():
    assert jsonio.emit_instance(generate(1, "mixed")) != jsonio.emit_instance(generate(2, "mixed"))


@pytest.mark.parametrize("profile", WIDE_PROFILES)
def test_wide_shapes(profile):
    inst = generate(0, profile)
    assert inst.job_ids[0] == "anchor"
    assert inst.m > 20
    # every job except the anchor runs on machines of speed below 1/16 each
    for fn in inst.speeds[1:]:
        assert fn(1) == 0
        assert all(fn(1 << i) < Fraction(1, 16) for i in range(inst.m))


def test_unknown_profile():
    with pytest.raises(ValueError):
        generate(0, "cubic")


def test_mmfa_generator():
    mm = generate_mmfa(3)
    assert 1 <= mm.n_items <= 5 and 1 <= len(mm.agents) <= 3
    assert jsonio.emit_mmfa(mm) == jsonio.emit_mmfa(generate_mmfa(3))
