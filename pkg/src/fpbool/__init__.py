"""fpbool: reduce finite-field polynomial systems and bounded-integer programs
to Boolean polynomial systems, solve them classically, and optimize by
interval bisection."""

from .algebra import CyclicElement, Monomial, Ring, SparsePoly, VarTable, ZZ
from .encode import (
    AffineExpansion,
    BooleanSystem,
    EncodingContext,
    bit_blast,
    decode,
    descend_extension,
    encode_inequalities,
    encode_integers,
    full_reduce,
    lift_modular,
    quadratize,
    theta,
    theta_centered,
)
from .optimize import IntVar, OptResult, StandardProblem, qfp_opt, shift_objective
from .solver import BackendConfig, SolveOutcome, evaluate, export_opb, import_solution, solve

__all__ = [
    "CyclicElement",
    "Monomial",
    "Ring",
    "SparsePoly",
    "VarTable",
    "ZZ",
    "AffineExpansion",
    "BooleanSystem",
    "EncodingContext",
    "bit_blast",
    "decode",
    "descend_extension",
    "encode_inequalities",
    "encode_integers",
    "full_reduce",
    "lift_modular",
    "quadratize",
    "theta",
    "theta_centered",
    "IntVar",
    "OptResult",
    "StandardProblem",
    "qfp_opt",
    "shift_objective",
    "BackendConfig",
    "SolveOutcome",
    "evaluate",
    "export_opb",
    "import_solution",
    "solve",
]
