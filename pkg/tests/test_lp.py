from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gsmalleable.core import ValidationError
from gsmalleable.lp import EQ, GE, LE, LinearProgram, Simplex, solve, to_cplex_lp

from helpers import fractions, vertex_enumeration

F = Fraction


def _as_le(lp):
    """Rewrite a program as ``A x <= b`` rows for the vertex-enumeration oracle."""
    A, b = [], []
    n = lp.n_vars
    for r in lp.rows:
        row = [r.coeffs.get(k, F(0)) for k in range(n)]
        if r.rel in (LE, EQ):
            A.append(row)
            b.append(r.rhs)
        if r.rel in (GE, EQ):
            A.append([-v for v in row])
            b.append(-r.rhs)
    return A, b


@st.composite
def bounded_programs(draw):
    n = draw(st.integers(1, 3))
    m = draw(st.integers(1, 3))
    lp = LinearProgram(draw(st.sampled_from(["max", "min"])))
    for k in range(n):
        lp.add_var(("v", k), draw(fractions(-4, 4)))
    for r in range(m):
        coeffs = {k: draw(fractions(-3, 3)) for k in range(n)}
        lp.add_row(("r", r), coeffs, draw(st.sampled_from([LE, GE, EQ])), draw(fractions(-4, 6)))
    # a box keeps the program bounded
    lp.add_row("box", {k: 1 for k in range(n)}, LE, draw(st.integers(1, 6)))
    return lp


def _check_duals(lp, out):
    y = out.duals
    assert sum(y[r] * row.rhs for r, row in enumerate(lp.rows)) == out.objective
    sign = 1 if lp.sense == "max" else -1
    for k in range(lp.n_vars):
        red = lp.objective[k] - sum(y[r] * row.coeffs.get(k, 0) for r, row in enumerate(lp.rows))
        assert sign * red <= 0
    for r, row in enumerate(lp.rows):
        if row.rel == LE:
            assert sign * y[r] >= 0
        elif row.rel == GE:
            assert sign * y[r] <= 0


@given(bounded_programs())
def test_simplex_matches_vertex_enumeration(lp):
    A, b = _as_le(lp)
    ref = vertex_enumeration(lp.objective, A, b, lp.sense)
    out = solve(lp)
    if ref is None:
        assert out.status == "infeasible"
        y = out.farkas
        # y certifies emptiness: y A >= 0 on every column, y b < 0, signs match the rows
        for k in range(lp.n_vars):
            assert sum(y[r] * row.coeffs.get(k, 0) for r, row in enumerate(lp.rows)) >= 0
        assert sum(y[r] * row.rhs for r, row in enumerate(lp.rows)) < 0
        for r, row in enumerate(lp.rows):
            assert (row.rel != LE or y[r] >= 0) and (row.rel != GE or y[r] <= 0)
    else:
        assert out.optimal and out.objective == ref
        for row in lp.rows:
            lhs = sum(row.coeffs.get(k, 0) * v for k, v in enumerate(out.x))
            assert {LE: lhs <= row.rhs, GE: lhs >= row.rhs, EQ: lhs == row.rhs}[row.rel]
        assert all(v >= 0 for v in out.x)
        _check_duals(lp, out)


def test_known_optimum():
    # max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3
    lp = LinearProgram("max")
    x, y = lp.add_var("x", 3), lp.add_var("y", 2)
    lp.add_row("a", {x: 1, y: 1}, LE, 4)
    lp.add_row("b", {x: 1, y: 3}, LE, 6)
    lp.add_row("c", {x: 1}, LE, 3)
    out = solve(lp)
    assert out.objective == 11 and out.x == [3, 1]
    assert out.duals == [2, 0, 1]


def test_unbounded():
    lp = LinearProgram("max")
    x = lp.add_var("x", 1)
    lp.add_row("r", {x: 1}, GE, 1)
    assert solve(lp).status == "unbounded"


def test_degenerate_cycle_example():
    # Beale's example cycles under the textbook rule; Bland's rule terminates
    lp = LinearProgram("min")
    c = [F(-3, 4), F(150), F(-1, 50), F(6)]
    v = [lp.add_var(k, ck) for k, ck in enumerate(c)]
    lp.add_row(0, dict(zip(v, [F(1, 4), F(-60), F(-1, 25), F(9)])), LE, 0)
    lp.add_row(1, dict(zip(v, [F(1, 2), F(-90), F(-1, 50), F(3)])), LE, 0)
    lp.add_row(2, {v[2]: 1}, LE, 1)
    out = solve(lp)
    assert out.optimal and out.objective == F(-1, 20)


def test_incremental_columns_match_fresh_solve():
    lp = LinearProgram("max")
    s = lp.add_var("s", 1)
    lp.add_row("cap", {s: 1}, LE, 5)
    lp.add_row("need", {}, GE, 2)
    sx = Simplex(lp)
    assert sx.solve().status == "infeasible"
    sx.add_var("x", 0, {0: 1, 1: 1})
    out = sx.solve()
    assert out.optimal and out.objective == 3
    sx.add_var("z", 0, {1: 2})
    out = sx.solve()
    assert out.objective == 5

    fresh = LinearProgram("max")
    a, b, c = fresh.add_var("s", 1), fresh.add_var("x"), fresh.add_var("z")
    fresh.add_row("cap", {a: 1, b: 1}, LE, 5)
    fresh.add_row("need", {b: 1, c: 2}, GE, 2)
    assert solve(fresh).objective == out.objective


def test_bad_relation_and_sense():
    lp = LinearProgram("max")
    with pytest.raises(ValidationError):
        lp.add_row("r", {}, "<", 1)
    with pytest.raises(ValidationError):
        Simplex(LinearProgram("maximize"))


def test_cplex_export():
    lp = LinearProgram("min")
    x, y = lp.add_var(("x", 1), F(1, 2)), lp.add_var(("x", 2), 1)
    lp.add_row(("job", 0), {x: F(1, 3), y: 1}, GE, F(1, 2))
    lp.add_row(("job", 0), {x: 1}, LE, 4)
    text = to_cplex_lp(lp, "demo")
    assert text.splitlines() == [
        "\\ demo",
        "Minimize",
        " obj: x_1 + 2 x_2",
        "Subject To",
        " job_0: 2 x_1 + 6 x_2 >= 3",
        " job_0_1: x_1 <= 4",
        "End",
    ]
