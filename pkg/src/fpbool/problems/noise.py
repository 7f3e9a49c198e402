"""Noisy polynomial systems: minimize the number of violated equations.

Each equation f_j gets an error variable e_j and a Boolean indicator H_j with
slack equation H_j = e_j^(p-1); the indicator is 1 exactly when the equation
is violated, so the Hamming weight of the error vector is the plain integer
sum of the indicators.
"""

from __future__ import annotations

from ..algebra import Monomial, Ring, SparsePoly, VarTable, ZZ, MOD
from ..errors import RingMismatch
from ..optimize import StandardProblem


def pswn_build(polys: list[SparsePoly], vartab: VarTable) -> StandardProblem:
    """Minimize the number of violated equations of a system over F_p.

    Returns a problem whose objective is the indicator sum (0 <= o <= r) with
    u = r + 1; indicators are single-bit field variables because their only
    attainable values are 0 and 1.
    """
    if not polys:
        raise ValueError("need at least one equation")
    ring = polys[0].ring
    if ring.kind != MOD:
        raise RingMismatch("noisy systems are defined over a prime field")
    p = ring.modulus
    r = len(polys)

    evars = [vartab.fresh(f"e{j}_") for j in range(r)]
    hvars = [vartab.fresh(f"H{j}_") for j in range(r)]
    equalities = []
    for j, f in enumerate(polys):
        equalities.append(f.sub(SparsePoly.var(ring, evars[j])))
    for j in range(r):
        slack = SparsePoly.var(ring, hvars[j]).sub(SparsePoly.var(ring, evars[j], p - 1))
        equalities.append(slack)

    objective = SparsePoly.from_pairs(ZZ, [(Monomial.var(h), 1) for h in hvars])
    x_vars = sorted({v for f in polys for v in f.variables()}) + evars + hvars
    return StandardProblem(
        p=p,
        x_vars=x_vars,
        y_vars=[],
        equalities=equalities,
        inequalities=[],
        objective=objective,
        u=r + 1,
        vartab=vartab,
        bound_overrides={h: 1 for h in hvars},
    )
