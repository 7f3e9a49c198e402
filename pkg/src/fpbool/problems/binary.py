"""Linear 0/1 programs and QUBO as standard optimization problems."""

from __future__ import annotations

from dataclasses import dataclass

from ..algebra import Monomial, SparsePoly, VarTable, ZZ
from ..optimize import IntVar, StandardProblem


@dataclass
class ShiftedProblem:
    """A StandardProblem whose objective was shifted to be nonnegative."""

    problem: StandardProblem
    shift: int

    def unshift(self, value: int) -> int:
        return value - self.shift


def binlp_build(c: list[int], A: list[list[int]], h: list[int]) -> ShiftedProblem:
    """Minimize sum c_j y_j over y in {0,1}^m subject to A y <= h.

    Row i is rewritten as the window 0 <= sum_j a_ij y_j + e_i <= h_i + e_i
    with e_i the sum of |a_ij|, so the lower end is vacuous.  A row whose
    window bound comes out negative is unsatisfiable and is replaced by the
    contradictory window 0 <= 1 <= 0.
    """
    m = len(c)
    vt = VarTable()
    yvars = [vt.add(f"y{j}") for j in range(m)]
    ineqs = []
    for i, row in enumerate(A):
        if len(row) != m:
            raise ValueError(f"row {i} has {len(row)} entries, expected {m}")
        e_i = sum(abs(a) for a in row)
        b_i = h[i] + e_i
        if b_i < 0:
            ineqs.append((SparsePoly.const(ZZ, 1), 0))
            continue
        pairs = [(Monomial.var(yvars[j]), a) for j, a in enumerate(row) if a]
        pairs.append((Monomial(), e_i))
        ineqs.append((SparsePoly.from_pairs(ZZ, pairs), b_i))
    shift = sum(abs(x) for x in c)
    u = 2 * shift + 1
    obj_pairs = [(Monomial.var(yvars[j]), cj) for j, cj in enumerate(c) if cj]
    if shift:
        obj_pairs.append((Monomial(), shift))
    objective = SparsePoly.from_pairs(ZZ, obj_pairs)
    prob = StandardProblem(
        p=2,
        x_vars=[],
        y_vars=[IntVar(v, 0, 1) for v in yvars],
        equalities=[],
        inequalities=ineqs,
        objective=objective,
        u=u,
        vartab=vt,
    )
    return ShiftedProblem(prob, shift)


def qubo_build(Q: list[list[int]]) -> ShiftedProblem:
    """Minimize y^T Q y over y in {0,1}^m for an upper-triangular integer Q."""
    m = len(Q)
    vt = VarTable()
    yvars = [vt.add(f"y{j}") for j in range(m)]
    qmax = max((abs(Q[i][j]) for i in range(m) for j in range(len(Q[i]))), default=0)
    shift = m * m * qmax
    u = 2 * shift + 1
    pairs = []
    for i in range(m):
        for j in range(len(Q[i])):
            if Q[i][j]:
                pairs.append((Monomial.var(yvars[i]).mul(Monomial.var(yvars[j])), Q[i][j]))
    if shift:
        pairs.append((Monomial(), shift))
    objective = SparsePoly.from_pairs(ZZ, pairs)
    prob = StandardProblem(
        p=2,
        x_vars=[],
        y_vars=[IntVar(v, 0, 1) for v in yvars],
        equalities=[],
        inequalities=[],
        objective=objective,
        u=u,
        vartab=vt,
    )
    return ShiftedProblem(prob, shift)
