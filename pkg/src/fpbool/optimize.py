"""Bisection optimizer over encoded Boolean feasibility queries.

A StandardProblem bundles field variables, bounded integer variables, modular
equalities, integer window constraints and an integer objective with a strict
upper bound u (0 <= objective < u on every feasible point; shift_objective
arranges that).  The optimizer bisects the feasible interval: each level
system adds one window equation

    alpha + sum_j F_j 2^j - objective_encoding = 0

whose fresh F bits span [alpha, alpha + 2^beta), and asks a Boolean backend
for feasibility.  Satisfiable levels tighten the upper end to the witnessed
objective value; unsatisfiable ones raise the lower end by 2^beta.  Each round
shrinks the interval to at most 3/4 of its size, so the loop finishes within
ceil(log_{4/3} u) + 1 iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

from .algebra import Monomial, SparsePoly, VarTable, ZZ
from .encode import (
    FBIT,
    AffineExpansion,
    BooleanSystem,
    EncodingContext,
    IntBound,
    encode_integers,
    encode_inequalities,
    full_reduce,
    decode as decode_solution,
)
from .errors import UnboundedVariable
from .solver import BackendConfig, SolveOutcome, solve

STANDARD = "standard"
CENTERED = "centered"

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNKNOWN = "unknown"


@dataclass
class IntVar:
    var: int
    lo: int
    hi: int


@dataclass
class StandardProblem:
    p: int
    x_vars: list[int]
    y_vars: list[IntVar]
    equalities: list[SparsePoly]  # over Z_p in x variables
    inequalities: list[tuple[SparsePoly, int]]  # (g, b): require 0 <= g <= b
    objective: SparsePoly  # over Z
    u: int
    representation: str = STANDARD
    vartab: VarTable = dc_field(default_factory=VarTable)
    # field variables whose expansion range is narrower than {0..p-1}
    bound_overrides: dict[int, int] = dc_field(default_factory=dict)

    def bounds(self) -> dict[int, IntBound]:
        return {yv.var: IntBound(yv.lo, yv.hi) for yv in self.y_vars}


@dataclass
class BaseSystem:
    """Feasibility core shared by every bisection level."""

    system: BooleanSystem
    objective_bits: SparsePoly  # the objective rewritten over Boolean variables
    ctx: EncodingContext
    problem: StandardProblem


@dataclass
class LevelSystem:
    system: BooleanSystem
    alpha: int
    beta: int
    fbits: list


@dataclass
class TraceEntry:
    alpha: int
    mu: int
    beta: int
    outcome: str


@dataclass
class OptResult:
    status: str
    value: Optional[int] = None
    x_values: dict[int, int] = dc_field(default_factory=dict)
    y_values: dict[int, int] = dc_field(default_factory=dict)
    assignment: Optional[dict[int, int]] = None
    trace: list[TraceEntry] = dc_field(default_factory=list)
    reason: Optional[str] = None
    iterations: int = 0


def shift_objective(
    o: SparsePoly, p: int, bounds: dict[int, IntBound]
) -> tuple[SparsePoly, int, int]:
    """Shift an objective so it is nonnegative on the variable box.

    Returns (shifted objective, u, shift) where u = 2*#o*h_o*h^d + 1 with h_o
    the largest coefficient magnitude, h the largest variable magnitude
    (including p-1), and d the total degree: |o| never exceeds #o*h_o*h^d.
    """
    for v in o.variables():
        if v not in bounds and p < 2:
            raise UnboundedVariable(f"variable {v} has no bound")
    nterms = o.sparseness()
    if nterms == 0:
        return o, 1, 0
    h_o = max(abs(int(c)) for c in o.terms.values())
    mags = [p - 1] + [max(abs(b.lo), abs(b.hi)) for b in bounds.values()]
    h = max(mags + [1])
    d = o.degree()
    shift = nterms * h_o * h**d
    shifted = o.add(SparsePoly.const(ZZ, shift))
    return shifted, 2 * shift + 1, shift


def build_base(prob: StandardProblem) -> BaseSystem:
    """Encode equalities, windows and the objective over one shared context."""
    centered = prob.representation == CENTERED
    ctx = EncodingContext(prob.vartab)
    sys = full_reduce(
        prob.equalities,
        ctx,
        centered=centered,
        bound_overrides=prob.bound_overrides or None,
    )
    bounds = prob.bounds()
    field_vars = set(prob.x_vars)
    if prob.inequalities:
        frag = encode_inequalities(
            prob.inequalities, bounds, prob.p, ctx, field_vars, centered
        )
        sys.union(frag)
    targets, side = encode_integers(
        [prob.objective], bounds, prob.p, ctx, field_vars, centered
    )
    sys.union(side)
    obar = targets[0] if targets else SparsePoly.zero(ZZ)
    for v in sorted(prob.objective.variables()):
        if v not in ctx.internal_vars:
            sys.decode.setdefault(v, ctx.expansions[v])
    return BaseSystem(sys, obar, ctx, prob)


def build_level(base: BaseSystem, alpha: int, beta: int) -> LevelSystem:
    """Level system: base constraints plus the window equation for [alpha, alpha + 2^beta).

    beta <= 0 gives an empty bit window, so the equation pins the objective to
    exactly alpha.
    """
    registry = base.system.registry.clone()
    fbits = [registry.fresh(FBIT, ("level", j)) for j in range(max(beta, 0))]
    window = SparsePoly.from_pairs(
        ZZ,
        [(Monomial(), alpha)]
        + [(Monomial.var(fb.id), 1 << j) for j, fb in enumerate(fbits)],
    )
    delta = window.sub(base.objective_bits)
    level = BooleanSystem(registry)
    level.equations = list(base.system.equations)
    level.provenance = list(base.system.provenance)
    level.lifts = list(base.system.lifts)
    level.decode = dict(base.system.decode)
    level.aux_decode = dict(base.system.aux_decode)
    level.ext_decode = dict(base.system.ext_decode)
    level.add_equation(delta, f"objective window [{alpha}, {alpha}+2^{beta})")
    return LevelSystem(level, alpha, beta, fbits)


def _decode_xy(base: BaseSystem, assignment: dict[int, int]) -> tuple[dict, dict]:
    sol = decode_solution(base.system, assignment)
    xs = {v: sol.decoded[v] for v in base.problem.x_vars if v in sol.decoded}
    ys = {yv.var: sol.decoded[yv.var] for yv in base.problem.y_vars if yv.var in sol.decoded}
    return xs, ys


def qfp_opt(
    prob: StandardProblem,
    cfg: Optional[BackendConfig] = None,
    oracle_minimum: Optional[Callable[[], Optional[int]]] = None,
) -> OptResult:
    """Minimize the objective by interval bisection over feasibility queries.

    `oracle_minimum`, when given, is consulted at every loop head and the
    bracketing invariant alpha <= minimum <= mu is asserted (test hook).
    """
    base = build_base(prob)
    return bisect_minimum(base, cfg, oracle_minimum)


def bisect_minimum(
    base: BaseSystem,
    cfg: Optional[BackendConfig] = None,
    oracle_minimum: Optional[Callable[[], Optional[int]]] = None,
) -> OptResult:
    """Run the bisection loop over an already-encoded base system."""
    cfg = cfg or BackendConfig()
    prob = base.problem
    alpha, mu = 0, prob.u
    best_assignment = None
    trace: list[TraceEntry] = []
    max_iter = math.ceil(math.log(max(prob.u, 2)) / math.log(4 / 3)) + 1

    while True:
        if oracle_minimum is not None:
            true_min = oracle_minimum()
            if true_min is not None:
                assert alpha <= true_min <= mu, (alpha, true_min, mu)
        if len(trace) > max_iter:
            raise AssertionError(f"bisection exceeded {max_iter} iterations")
        beta = (mu - alpha).bit_length() - 2  # floor(log2(mu - alpha)) - 1
        level = build_level(base, alpha, beta)
        out = solve(level.system, cfg)
        trace.append(TraceEntry(alpha, mu, beta, out.status))
        if out.is_sat:
            witness = out.assignment
            if all(witness.get(fb.id, 0) == 0 for fb in level.fbits):
                xs, ys = _decode_xy(base, witness)
                return OptResult(
                    OPTIMAL, alpha, xs, ys, witness, trace, iterations=len(trace)
                )
            value = base.objective_bits.evaluate(witness)
            assert alpha <= value < mu, (alpha, value, mu)
            mu = value
            best_assignment = witness
            continue
        if out.is_unsat:
            if mu - alpha > 1:
                alpha = alpha + (1 << max(beta, 0))
                continue
            if mu != prob.u:
                xs, ys = _decode_xy(base, best_assignment)
                return OptResult(
                    OPTIMAL, mu, xs, ys, best_assignment, trace, iterations=len(trace)
                )
            return OptResult(INFEASIBLE, trace=trace, iterations=len(trace))
        return OptResult(UNKNOWN, trace=trace, reason=out.reason, iterations=len(trace))
