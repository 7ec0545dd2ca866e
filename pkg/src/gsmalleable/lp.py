"""Exact two-phase primal simplex with Bland's rule.

All pivoting is done in ``gmpy2.mpq``; inputs and outputs are ``Fraction``.
Rows and columns keep caller-provided labels so duals map back by name.

Dual convention: for every row ``r`` the returned ``duals[r]`` satisfies
``objective = sum_r duals[r] * rhs[r]`` and, for a max problem,
``c_k - sum_r duals[r] * A[r][k] <= 0`` for every column (``>= 0`` for min).
Hence ``<=`` rows of a max problem have nonnegative duals and ``>=`` rows
nonpositive ones.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable

from gmpy2 import mpq

from .core import ValidationError

LE, GE, EQ = "<=", ">=", "="


@dataclass
class Row:
    label: Hashable
    coeffs: dict[int, Fraction]
    rel: str
    rhs: Fraction


@dataclass
class LinearProgram:
    sense: str = "max"
    var_labels: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def add_var(self, label: Hashable, cost=0) -> int:
        self.var_labels.append(label)
        self.objective.append(Fraction(cost))
        return len(self.var_labels) - 1

    def add_row(self, label: Hashable, coeffs: dict, rel: str, rhs) -> int:
        if rel not in (LE, GE, EQ):
            raise ValidationError(f"unknown relation {rel!r}")
        self.rows.append(Row(label, {k: Fraction(v) for k, v in coeffs.items() if v != 0}, rel, Fraction(rhs)))
        return len(self.rows) - 1

    @property
    def n_vars(self) -> int:
        return len(self.var_labels)


@dataclass
class LpOutcome:
    status: str                      # optimal | infeasible | unbounded
    x: list | None = None            # primal values per variable
    duals: list | None = None        # per row, convention in module docstring
    objective: Fraction | None = None
    basis: list | None = None        # basic original variable indices
    farkas: list | None = None       # per row, present when infeasible
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    """Dense tableau over mpq.

    Column layout: originals, slack/surplus, artificials, then any columns
    appended later by :meth:`Simplex.add_var`.  Artificial columns are barred
    from entering once phase 1 has found a feasible basis.
    """

    def __init__(self, lp: LinearProgram):
        nv = lp.n_vars
        rows = lp.rows
        self.flip = []
        kinds = []
        for r in rows:
            flip = r.rhs < 0
            rel = r.rel
            if flip:
                rel = {LE: GE, GE: LE, EQ: EQ}[rel]
            self.flip.append(flip)
            kinds.append(rel)
        n_slack = sum(1 for k in kinds if k != EQ)
        n_art = sum(1 for k in kinds if k != LE)
        self.ncols = nv + n_slack + n_art
        self.art = set(range(nv + n_slack, self.ncols))
        self.orig = list(range(nv))          # tableau column of each original variable
        self.T = []
        self.basis = []
        self.unit_col = []                   # column holding +e_r initially
        s_idx, a_idx = nv, nv + n_slack
        for r, rel, flip in zip(rows, kinds, self.flip):
            sign = -1 if flip else 1
            row = [mpq(0)] * self.ncols
            for k, v in r.coeffs.items():
                row[k] = mpq(v.numerator * sign, v.denominator)
            if rel == LE:
                row[s_idx] = mpq(1)
                self.basis.append(s_idx)
                self.unit_col.append(s_idx)
                s_idx += 1
            else:
                if rel == GE:
                    row[s_idx] = mpq(-1)
                    s_idx += 1
                row[a_idx] = mpq(1)
                self.basis.append(a_idx)
                self.unit_col.append(a_idx)
                a_idx += 1
            self.T.append(row)
        self.rhs = [mpq(r.rhs.numerator * (-1 if f else 1), r.rhs.denominator) for r, f in zip(rows, self.flip)]
        self.pivots = 0

    def append_column(self, coeffs: dict) -> int:
        """Add an original column given by row coefficients; entries become ``B^-1 a``."""
        a = {}
        for r, v in coeffs.items():
            if v:
                a[r] = mpq(v.numerator * (-1 if self.flip[r] else 1), v.denominator)
        for row in self.T:
            acc = mpq(0)
            for r, v in a.items():
                e = row[self.unit_col[r]]
                if e:
                    acc += v * e
            row.append(acc)
        self.ncols += 1
        return self.ncols - 1

    def pivot(self, p: int, q: int, d: list):
        T = self.T
        prow = T[p]
        piv = prow[q]
        if piv != 1:
            inv = 1 / piv
            for k in range(len(prow)):
                if prow[k]:
                    prow[k] *= inv
            self.rhs[p] *= inv
        nz = [k for k in range(len(prow)) if prow[k]]
        prhs = self.rhs[p]
        for r, row in enumerate(T):
            if r != p:
                f = row[q]
                if f:
                    for k in nz:
                        row[k] -= f * prow[k]
                    self.rhs[r] -= f * prhs
        f = d[q]
        if f:
            for k in nz:
                d[k] -= f * prow[k]
            d[-1] -= f * prhs
        self.basis[p] = q
        self.pivots += 1

    def reduced_costs(self, c: list) -> list:
        """``d_k = c_k - c_B B^-1 A_k``; the last entry holds ``-c_B x_B``."""
        d = list(c) + [mpq(0)]
        for r, row in enumerate(self.T):
            cb = c[self.basis[r]]
            if cb:
                for k, v in enumerate(row):
                    if v:
                        d[k] -= cb * v
                d[-1] -= cb * self.rhs[r]
        return d

    def run(self, d: list, barred: set) -> str:
        """Maximize with Bland's rule, never entering a column in ``barred``."""
        T = self.T
        while True:
            q = next((k for k in range(self.ncols) if d[k] > 0 and k not in barred), -1)
            if q < 0:
                return "optimal"
            p, best = -1, None
            for r, row in enumerate(T):
                a = row[q]
                if a > 0:
                    ratio = self.rhs[r] / a
                    if best is None or ratio < best or (ratio == best and self.basis[r] < self.basis[p]):
                        p, best = r, ratio
            if p < 0:
                return "unbounded"
            self.pivot(p, q, d)

    def row_duals(self, c: list, d: list, sign: int) -> list:
        out = []
        for r, col in enumerate(self.unit_col):
            y = c[col] - d[col]
            if self.flip[r]:
                y = -y
            out.append(_frac(y * sign))
        return out


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class Simplex:
    """Resumable two-phase simplex; columns may be appended between solves.

    Appending a column keeps the current basis, so a re-solve after column
    generation usually needs only a few pivots.
    """

    def __init__(self, lp: LinearProgram):
        if lp.sense not in ("max", "min"):
            raise ValidationError(f"unknown sense {lp.sense!r}")
        self.lp = lp
        self.sign = 1 if lp.sense == "max" else -1
        self.tab = _Tableau(lp)
        self.phase = 1

    def add_var(self, label: Hashable, cost, coeffs: dict) -> int:
        """Append a variable with ``coeffs`` mapping row index to coefficient."""
        k = self.lp.add_var(label, cost)
        for r, v in coeffs.items():
            if v:
                self.lp.rows[r].coeffs[k] = Fraction(v)
        tab = self.tab
        col = tab.append_column({r: Fraction(v) for r, v in coeffs.items()})
        tab.orig.append(col)
        if self.phase == 2:
            # a zero-level artificial left in the basis must not move off zero
            for r, b in enumerate(tab.basis):
                if b in tab.art and tab.T[r][col]:
                    tab.pivot(r, col, [mpq(0)] * (tab.ncols + 1))
                    break
        return k

    def _costs(self, phase: int) -> list:
        tab = self.tab
        c = [mpq(0)] * tab.ncols
        if phase == 1:
            for k in tab.art:
                c[k] = mpq(-1)
        else:
            for k, v in enumerate(self.lp.objective):
                c[tab.orig[k]] = mpq(v.numerator * self.sign, v.denominator)
        return c

    def solve(self) -> LpOutcome:
        tab = self.tab
        if self.phase == 1:
            c1 = self._costs(1)
            d = tab.reduced_costs(c1)
            tab.run(d, set())
            if -d[-1] < 0:
                return LpOutcome("infeasible", farkas=tab.row_duals(c1, d, 1), pivots=tab.pivots)
            # drive zero-level artificials out of the basis where possible
            for r in range(len(tab.T)):
                if tab.basis[r] in tab.art:
                    row = tab.T[r]
                    q = next((k for k in range(tab.ncols) if row[k] and k not in tab.art), -1)
                    if q >= 0:
                        tab.pivot(r, q, d)
            self.phase = 2
        c2 = self._costs(2)
        d = tab.reduced_costs(c2)
        status = tab.run(d, tab.art)
        if status == "unbounded":
            return LpOutcome("unbounded", pivots=tab.pivots)
        lp = self.lp
        where = {col: k for k, col in enumerate(tab.orig)}
        x = [Fraction(0)] * lp.n_vars
        basis = []
        for r, b in enumerate(tab.basis):
            k = where.get(b)
            if k is not None:
                x[k] = _frac(tab.rhs[r])
                basis.append(k)
        duals = tab.row_duals(c2, d, self.sign)
        obj = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
        return LpOutcome("optimal", x=x, duals=duals, objective=obj, basis=sorted(basis), pivots=tab.pivots)


def solve(lp: LinearProgram) -> LpOutcome:
    """Solve exactly; the returned primal is a basic (vertex) solution."""
    return Simplex(lp).solve()


# ---------------------------------------------------------------------------
# CPLEX-LP text export


def _name(label, prefix, k):
    if isinstance(label, tuple):
        label = "_".join(map(str, label))
    s = re.sub(r"[^A-Za-z0-9_.]+", "_", str(label)).strip("_") or f"{prefix}{k}"
    if s[0].isdigit() or s[0] in ".eE":
        s = prefix + s
    return s[:250]


def _int_scaled(coeffs):
    den = 1
    for v in coeffs:
        den = math.lcm(den, v.denominator)
    return [int(v * den) for v in coeffs], den


def _term(coef: int, name: str, first: bool) -> str:
    sgn = "-" if coef < 0 else ("" if first else "+")
    a = abs(coef)
    return f"{sgn} {'' if a == 1 else a} {name}".replace("  ", " ").strip()


def to_cplex_lp(lp: LinearProgram, title: str = "") -> str:
    """Render in CPLEX-LP format; each row is scaled to integer coefficients."""
    names = []
    used = set()
    for k, lab in enumerate(lp.var_labels):
        nm = _name(lab, "x", k)
        while nm in used:
            nm = f"{nm}_{k}"
        used.add(nm)
        names.append(nm)
    out = []
    if title:
        out.append(f"\\ {title}")
    out.append("Maximize" if lp.sense == "max" else "Minimize")
    ints, _ = _int_scaled(lp.objective)
    terms = [_term(c, names[k], i == 0) for i, (k, c) in enumerate((k, c) for k, c in enumerate(ints) if c)]
    out.append(" obj: " + (" ".join(terms) if terms else "0 " + names[0]))
    out.append("Subject To")
    used_rows = set()
    for ri, r in enumerate(lp.rows):
        rn = _name(r.label, "r", ri)
        while rn in used_rows:
            rn = f"{rn}_{ri}"
        used_rows.add(rn)
        ks = sorted(r.coeffs)
        vals, den = _int_scaled([r.coeffs[k] for k in ks] + [r.rhs])
        body = " ".join(_term(c, names[k], i == 0) for i, (k, c) in enumerate(zip(ks, vals[:-1])))
        rel = {LE: "<=", GE: ">=", EQ: "="}[r.rel]
        out.append(f" {rn}: {body or '0 ' + names[0]} {rel} {vals[-1]}")
    out.append("End")
    return "\n".join(out) + "\n"
