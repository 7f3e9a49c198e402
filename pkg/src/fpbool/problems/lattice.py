"""Lattice problems: short solutions modulo p, Hermite normal form, SVP/CVP.

Basis vectors are the columns of the integer matrix B.  Everything runs on
exact arbitrary-precision arithmetic; the worst-case coefficient bound for
SVP is astronomically large even on toy instances, so the builders accept a
user override for the coefficient box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ..algebra import Monomial, Ring, SparsePoly, VarTable, ZZ
from ..encode import (
    BooleanSystem,
    EncodingContext,
    GBIT,
    full_reduce,
    theta,
)
from ..errors import CenteredRepUnsupported, RankDeficient
from ..optimize import CENTERED, IntVar, StandardProblem


def _ceil_sqrt(n: int) -> int:
    s = math.isqrt(n)
    return s if s * s == n else s + 1


# -- SIS and smallest solution ----------------------------------------------------


@dataclass
class SisInstance:
    system: BooleanSystem
    ctx: EncodingContext
    x_vars: list[int]
    norm_window: int  # attained squared norm lies in [1, norm_window + 1]


def _matrix_rows_to_polys(A: list[list[int]], ring: Ring, xvars: list[int]) -> list[SparsePoly]:
    polys = []
    for row in A:
        pairs = [(Monomial.var(xvars[j]), a) for j, a in enumerate(row)]
        polys.append(SparsePoly.from_pairs(ring, pairs))
    return polys


def sis_build(
    A: list[list[int]],
    p: int,
    b: Optional[int] = None,
    b_sq: Optional[int] = None,
    vartab: Optional[VarTable] = None,
) -> SisInstance:
    """Feasibility system for a nonzero X with A X = 0 (mod p) and ||X||^2 <= b^2.

    Variables use the centered residue representation, so decoded coordinates
    lie in [-(p-1)/2, (p-1)/2] where the Euclidean norm of a residue class is
    globally minimal.  The squared-norm window 0 <= ||X||^2 - 1 <= b^2 - 1
    excludes the zero vector.
    """
    if p % 2 == 0:
        raise CenteredRepUnsupported("centered residues need an odd prime")
    window = (b_sq if b_sq is not None else b * b) - 1
    if window < 0:
        raise ValueError("norm bound must be at least 1")
    n = len(A[0])
    vt = vartab or VarTable()
    xvars = [vt.get_or_add(f"x{j}") for j in range(n)]
    ring = Ring.mod(p)
    ctx = EncodingContext(vt)
    for v in xvars:
        ctx.expand_field_var(v, p, centered=True)
    sys = full_reduce(_matrix_rows_to_polys(A, ring, xvars), ctx, centered=True)
    norm = SparsePoly.from_pairs(
        ZZ, [(Monomial.var(v, 2), 1) for v in xvars] + [(Monomial(), -1)]
    )
    norm_bits = ctx.substitute_bits(norm)
    delta = theta(window, ctx.registry, GBIT, origin=("norm",)).poly().sub(norm_bits)
    sys.add_equation(delta, f"norm window 1..{window + 1}")
    for v in xvars:
        sys.decode.setdefault(v, ctx.expansions[v])
    return SisInstance(sys, ctx, xvars, window)


def smallest_solution_build(
    A: list[list[int]], p: int, vartab: Optional[VarTable] = None
) -> StandardProblem:
    """Minimize ||X||^2 over nonzero X with A X = 0 (mod p), centered residues.

    The objective ||X||^2 - 1 with window [0, n(p-1)^2) keeps the zero vector
    infeasible.
    """
    if p % 2 == 0:
        raise CenteredRepUnsupported("centered residues need an odd prime")
    n = len(A[0])
    vt = vartab or VarTable()
    xvars = [vt.get_or_add(f"x{j}") for j in range(n)]
    ring = Ring.mod(p)
    equalities = _matrix_rows_to_polys(A, ring, xvars)
    objective = SparsePoly.from_pairs(
        ZZ, [(Monomial.var(v, 2), 1) for v in xvars] + [(Monomial(), -1)]
    )
    return StandardProblem(
        p=p,
        x_vars=xvars,
        y_vars=[],
        equalities=equalities,
        inequalities=[],
        objective=objective,
        u=n * (p - 1) ** 2,
        representation=CENTERED,
        vartab=vt,
    )


# -- Hermite normal form --------------------------------------------------------


@dataclass
class HnfResult:
    H: list[list[int]]
    E: list[list[int]]
    pivots: list[int]  # pivot row of each column (strictly increasing)
    det_e: int


@dataclass
class LatticeInstance:
    basis: list[list[int]]  # m x n, columns generate the lattice
    target: Optional[list[int]] = None
    coeff_bound: Optional[int] = None

    @property
    def m(self) -> int:
        return len(self.basis)

    @property
    def n(self) -> int:
        return len(self.basis[0])

    def max_entry(self) -> int:
        return max((abs(x) for row in self.basis for x in row), default=0)


def hnf(B: list[list[int]]) -> HnfResult:
    """Column-style Hermite normal form by exact integer row reduction.

    Returns H = E B with E unimodular; column j has its pivot (last nonzero)
    at row j, pivots are positive, and entries above each pivot are reduced
    into [0, pivot).  The entry bound (ceil(sqrt(n)) * ||B||_inf)^n is
    asserted on the result.
    """
    m = len(B)
    n = len(B[0]) if B else 0
    if any(len(row) != n for row in B):
        raise ValueError("ragged matrix")
    if n > m:
        raise RankDeficient(f"{m}x{n} matrix cannot have column rank {n}")
    H = [list(map(int, row)) for row in B]
    E = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    det_e = 1

    def swap(i, j):
        nonlocal det_e
        if i != j:
            H[i], H[j] = H[j], H[i]
            E[i], E[j] = E[j], E[i]
            det_e = -det_e

    def addmul(dst, src, q):
        if q:
            H[dst] = [a - q * b for a, b in zip(H[dst], H[src])]
            E[dst] = [a - q * b for a, b in zip(E[dst], E[src])]

    for col in range(n):
        # clear everything below the pivot row by gcd elimination
        while True:
            rows = [i for i in range(col, m) if H[i][col] != 0]
            if not rows:
                raise RankDeficient(f"no pivot for column {col}")
            best = min(rows, key=lambda i: (abs(H[i][col]), i))
            swap(col, best)
            others = [i for i in range(col + 1, m) if H[i][col] != 0]
            if not others:
                break
            for i in others:
                addmul(i, col, H[i][col] // H[col][col])
        if H[col][col] < 0:
            H[col] = [-x for x in H[col]]
            E[col] = [-x for x in E[col]]
            det_e = -det_e
        # reduce entries above the pivot into [0, pivot)
        for i in range(col):
            addmul(i, col, H[i][col] // H[col][col])

    binf = max((abs(x) for row in B for x in row), default=0)
    bound = (_ceil_sqrt(n) * binf) ** n if n else 0
    hinf = max((abs(x) for row in H for x in row), default=0)
    assert hinf <= max(bound, 0) or n == 0, f"entry bound violated: {hinf} > {bound}"
    return HnfResult(H, E, list(range(n)), det_e)


def svp_coeff_bound(B: list[list[int]]) -> int:
    """Worst-case bound on the coefficients expressing a shortest vector.

    n * ceil(sqrt(m)) * ||B||_inf * ((ceil(sqrt(n)) * ||B||_inf)^n + 1)^(n+1),
    with the square roots rounded up so the bound stays valid over Z.
    """
    m = len(B)
    n = len(B[0])
    binf = max((abs(x) for row in B for x in row), default=0)
    return n * _ceil_sqrt(m) * binf * ((_ceil_sqrt(n) * binf) ** n + 1) ** (n + 1)


@dataclass
class LatticeProblem:
    problem: StandardProblem
    a_vars: list[int]
    v_vars: list[int]
    coeff_bound: int
    coord_bound: int
    target: Optional[list[int]] = None

    def vector_of(self, result_values: dict[int, int]) -> list[int]:
        return [result_values[v] for v in self.v_vars]

    def coeffs_of(self, result_values: dict[int, int]) -> list[int]:
        return [result_values[a] for a in self.a_vars]


def _lattice_problem(L: LatticeInstance, target: Optional[list[int]]) -> LatticeProblem:
    B = L.basis
    m, n = L.m, L.n
    binf = L.max_entry()
    vt = VarTable()
    avars = [vt.add(f"a{i}") for i in range(n)]
    vvars = [vt.add(f"v{j}") for j in range(m)]

    if target is None:
        if L.coeff_bound is not None:
            a_b = L.coeff_bound
        else:
            hnf(B)  # full-rank check; the bound itself is closed-form
            a_b = svp_coeff_bound(B)
        v_b = _ceil_sqrt(m) * binf
        obj_pairs = [(Monomial.var(v, 2), 1) for v in vvars] + [(Monomial(), -1)]
        u = max(1, m * binf * binf)
    else:
        h0 = max((abs(x) for x in target), default=0)
        if L.coeff_bound is not None:
            a_b = L.coeff_bound
        else:
            hnf(B)
            e1 = (1 + _ceil_sqrt(m)) * h0
            a_b = n * e1 * ((_ceil_sqrt(n) * binf) ** n + 1) ** (n + 1)
        v_b = (1 + _ceil_sqrt(m)) * h0
        obj_pairs = []
        for j, v in enumerate(vvars):
            obj_pairs.append((Monomial.var(v, 2), 1))
            if target[j]:
                obj_pairs.append((Monomial.var(v), -2 * target[j]))
        cst = sum(t * t for t in target)
        if cst:
            obj_pairs.append((Monomial(), cst))
        u = max(1, m * (binf + h0) ** 2)

    ineqs = []
    for j in range(m):
        pairs = [(Monomial.var(avars[i]), B[j][i]) for i in range(n) if B[j][i]]
        pairs.append((Monomial.var(vvars[j]), -1))
        ineqs.append((SparsePoly.from_pairs(ZZ, pairs), 0))

    yv = [IntVar(a, -a_b, a_b) for a in avars] + [IntVar(v, -v_b, v_b) for v in vvars]
    prob = StandardProblem(
        p=2,
        x_vars=[],
        y_vars=yv,
        equalities=[],
        inequalities=ineqs,
        objective=SparsePoly.from_pairs(ZZ, obj_pairs),
        u=u,
        vartab=vt,
    )
    return LatticeProblem(prob, avars, vvars, a_b, v_b, target)


def svp_build(L: LatticeInstance) -> LatticeProblem:
    """Shortest nonzero vector: minimize ||v||^2 - 1 over v = B a in the box.

    The window [0, m ||B||_inf^2) keeps v = 0 infeasible; Lagrange coordinates
    a_i range over [-coeff_bound, coeff_bound].
    """
    return _lattice_problem(L, None)


def cvp_build(L: LatticeInstance) -> LatticeProblem:
    """Closest vector to the target: minimize ||v - b0||^2 over v = B a.

    Distance zero is allowed (the target may lie in the lattice), so the
    objective is not shifted by -1.
    """
    if L.target is None:
        raise ValueError("closest-vector instance needs a target")
    return _lattice_problem(L, list(L.target))
