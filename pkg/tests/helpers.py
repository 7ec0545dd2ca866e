"""Independent brute-force references used across the test modules."""

import itertools
from fractions import Fraction

from hypothesis import strategies as st

from gsmalleable.core import LinearSpeed, PartitionMatroid, UniformMatroid, WeightedMatroidRank, bits
from gsmalleable.gen import PROFILES, random_speed


def all_assignments_load(inst):
    """Minimum load by plain enumeration, without the kernels."""
    best = None
    masks = range(1, 1 << inst.m)
    for sets in itertools.product(masks, repeat=inst.n):
        loads = [Fraction(0)] * inst.m
        ok = True
        for j, S in enumerate(sets):
            g = inst.speeds[j](S)
            if g <= 0:
                ok = False
                break
            for i in bits(S):
                loads[i] += 1 / g
        if ok and (best is None or max(loads) < best):
            best = max(loads)
    return best


def _solve_square(A, b):
    """Gaussian elimination over Fractions; None if singular."""
    n = len(A)
    M = [list(r) + [v] for r, v in zip(A, b)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return None
        M[c], M[p] = M[p], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * bb for a, bb in zip(M[r], M[c])]
    return [M[r][n] / M[r][r] for r in range(n)]


def vertex_enumeration(c, A, b, sense="max"):
    """Optimum of ``c x`` over ``{A x <= b, x >= 0}`` (assumed bounded) by trying every vertex.

    Returns None when the polyhedron is empty.
    """
    n = len(c)
    rows = [list(r) for r in A] + [[-Fraction(int(k == i)) for k in range(n)] for i in range(n)]
    rhs = list(b) + [Fraction(0)] * n
    best = None
    for idx in itertools.combinations(range(len(rows)), n):
        x = _solve_square([rows[i] for i in idx], [rhs[i] for i in idx])
        if x is None:
            continue
        if all(sum(a * v for a, v in zip(r, x)) <= h for r, h in zip(rows, rhs)):
            val = sum(a * v for a, v in zip(c, x))
            if best is None or (val > best if sense == "max" else val < best):
                best = val
    return best


def fractions(lo=-6, hi=6, dens=(1, 2, 3)):
    return st.builds(lambda p, q: Fraction(p, q), st.integers(lo, hi), st.sampled_from(dens))


@st.composite
def speed_functions(draw, n_min=1, n_max=5, profiles=PROFILES):
    """A random M-natural concave speed function from the generator's families."""
    import random
    n = draw(st.integers(n_min, n_max))
    seed = draw(st.integers(0, 10 ** 6))
    profile = draw(st.sampled_from(profiles))
    return random_speed(random.Random(seed), profile, n), n


@st.composite
def price_vectors(draw, n):
    return [draw(fractions(0, 24, (1, 2, 4, 8))) for _ in range(n)]


def small_wmr(weights, rank=None, blocks=None, caps=None):
    n = len(weights)
    w = tuple(Fraction(x) for x in weights)
    if blocks is not None:
        return WeightedMatroidRank(PartitionMatroid(n, tuple(blocks), tuple(caps)), w)
    if rank is not None:
        return WeightedMatroidRank(UniformMatroid(n, rank), w)
    return LinearSpeed(w)


# filled by the acceptance suite, printed in the terminal summary
ACCEPTANCE_LINES: list = []
