"""Key recovery systems for the convolution-ring cryptosystem.

The private key f has d_f coefficients 1, d_f - 1 coefficients -1 and the
rest 0; g has d_g of each sign; the public key is h = g * f^(-1) (mod q).
Recovery is phrased as a Boolean system: ternary key coefficients become two
bits via t = T1 + T2 - 1 (with T1*T2 = T2 banning the redundant state), the
inverse coordinates are interval-encoded, and the convolution identities are
lifted modulo q and p.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from ..algebra import (
    CyclicElement,
    Monomial,
    Ring,
    SparsePoly,
    VarTable,
    ZZ,
    cyclic_convolve,
    cyclic_invert,
)
from ..encode import (
    AUX,
    BooleanSystem,
    EncodingContext,
    bit_blast,
    extend_with_counters,
    lift_modular,
    theta_centered,
)
from ..errors import KeygenFailed, NotInvertible
from ..optimize import BaseSystem, OptResult, StandardProblem, bisect_minimum
from ..solver import BackendConfig


@dataclass
class NtruParams:
    N: int
    p: int
    q: int
    d_f: int
    d_g: int
    h: Optional[CyclicElement] = None

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"p={self.p} and q={self.q} must be coprime")
        if self.q <= self.p:
            raise ValueError("q must exceed p")
        if self.N < 2 or self.d_f < 1 or self.d_g < 1:
            raise ValueError("need N >= 2 and positive coefficient counts")


@dataclass
class NtruKey:
    f: list[int]  # ternary coefficients
    g: list[int]
    h: CyclicElement  # public key mod q
    f_p: CyclicElement  # f^(-1) mod p
    f_q: CyclicElement  # f^(-1) mod q


def _ternary(rng: random.Random, n: int, ones: int, negs: int) -> list[int]:
    coeffs = [0] * n
    positions = rng.sample(range(n), ones + negs)
    for i in positions[:ones]:
        coeffs[i] = 1
    for i in positions[ones:]:
        coeffs[i] = -1
    return coeffs


def ntru_keygen(params: NtruParams, rng: random.Random, max_tries: int = 500) -> NtruKey:
    """Sample f, g until f is invertible mod p and mod q; h = g * f^(-1) mod q."""
    for _ in range(max_tries):
        f = _ternary(rng, params.N, params.d_f, params.d_f - 1)
        try:
            f_p = cyclic_invert(CyclicElement(params.p, f))
            f_q = cyclic_invert(CyclicElement(params.q, f))
        except NotInvertible:
            continue
        g = _ternary(rng, params.N, params.d_g, params.d_g)
        h = cyclic_convolve(CyclicElement(params.q, g), f_q)
        return NtruKey(f, g, h, f_p, f_q)
    raise KeygenFailed(f"no invertible f within {max_tries} samples")


@dataclass
class NtruAttack:
    params: NtruParams
    system: BooleanSystem
    ctx: EncodingContext
    f_vars: list[int]
    g_vars: list[int]
    q_vars: list[int]  # coordinates of f^(-1) mod q
    p_vars: list[int]  # coordinates of f^(-1) mod p
    ternary_count: int = 0  # equations fixing the support sizes

    def decode_key(self, assignment: dict[int, int]) -> tuple[list[int], list[int]]:
        f = [self.ctx.expansions[v].value(assignment) for v in self.f_vars]
        g = [self.ctx.expansions[v].value(assignment) for v in self.g_vars]
        return f, g


def _convolution_poly(ring, coeffs, xvars, yvars, i, n):
    """sum over j+k = i (mod n) of coeffs[j] * y[k], or x[j] * y[k] when coeffs is None."""
    pairs = []
    for j in range(n):
        k = (i - j) % n
        if coeffs is not None:
            if coeffs[j] % ring.modulus:
                pairs.append((Monomial.var(yvars[k]), coeffs[j]))
        else:
            pairs.append((Monomial.var(xvars[j]).mul(Monomial.var(yvars[k])), 1))
    return SparsePoly.from_pairs(ring, pairs)


def ntru_attack_system(params: NtruParams, include_cardinality: bool = True) -> NtruAttack:
    """Boolean system whose solutions decode to usable private keys.

    Pieces: ternary support constraints on f and g over Z (with the
    anti-redundancy products), the public-key convolution h * f = g and the
    inverse identity q * f = 1 lifted mod q, and p * f = 1 lifted mod p.
    """
    if params.h is None:
        raise ValueError("attack needs the public key h")
    N, p, q = params.N, params.p, params.q
    vt = VarTable()
    ctx = EncodingContext(vt)
    fvars = [vt.add(f"f{i}") for i in range(N)]
    gvars = [vt.add(f"g{i}") for i in range(N)]
    qvars = [vt.add(f"q{i}") for i in range(N)]
    pvars = [vt.add(f"p{i}") for i in range(N)]
    for v in fvars + gvars:
        ctx.set_expansion(v, theta_centered(2, 1, ctx.registry, AUX, origin=v, var=v))

    sys = BooleanSystem(ctx.registry)

    def ternary_sum_sq(vars_):  # sum t_i^2 as a polynomial over Z
        return SparsePoly.from_pairs(ZZ, [(Monomial.var(v, 2), 1) for v in vars_])

    def plain_sum(vars_):
        return SparsePoly.from_pairs(ZZ, [(Monomial.var(v), 1) for v in vars_])

    card_eqs = 0
    if include_cardinality:
        eq_f = ternary_sum_sq(fvars).add(SparsePoly.const(ZZ, 1 - 2 * params.d_f))
        eq_g = ternary_sum_sq(gvars).add(SparsePoly.const(ZZ, -2 * params.d_g))
        sys.add_equation(ctx.substitute_bits(eq_f), "support size of f")
        sys.add_equation(ctx.substitute_bits(eq_g), "support size of g")
        card_eqs = 2
    sum_f = plain_sum(fvars).add(SparsePoly.const(ZZ, -1))
    sum_g = plain_sum(gvars)
    sys.add_equation(ctx.substitute_bits(sum_f), "coefficient sum of f is 1")
    sys.add_equation(ctx.substitute_bits(sum_g), "coefficient sum of g is 0")
    for i, v in enumerate(fvars + gvars):
        exp = ctx.expansions[v]
        b1, b2 = exp.weights[0][0], exp.weights[1][0]
        anti = SparsePoly.from_pairs(
            ZZ,
            [(Monomial.var(b1.id).mul(Monomial.var(b2.id)), 1), (Monomial.var(b2.id), -1)],
        )
        sys.add_equation(anti, f"ternary state {vt.name(v)}")

    ring_q = Ring.mod(q)
    ring_p = Ring.mod(p)
    polys_q = []
    provs_q = []
    for i in range(N):
        conv = _convolution_poly(ring_q, list(params.h.coeffs), None, fvars, i, N)
        conv = conv.sub(SparsePoly.var(ring_q, gvars[i]))
        polys_q.append(conv)
        provs_q.append(f"public key convolution row {i}")
    for i in range(N):
        conv = _convolution_poly(ring_q, None, qvars, fvars, i, N)
        conv = conv.sub(SparsePoly.const(ring_q, 1 if i == 0 else 0))
        polys_q.append(conv)
        provs_q.append(f"inverse mod {q} row {i}")
    blasted_q = bit_blast(polys_q, q, ctx)
    sys.union(lift_modular(blasted_q, q, ctx.registry, provenance=provs_q))

    polys_p = []
    provs_p = []
    for i in range(N):
        conv = _convolution_poly(ring_p, None, pvars, fvars, i, N)
        conv = conv.sub(SparsePoly.const(ring_p, 1 if i == 0 else 0))
        polys_p.append(conv)
        provs_p.append(f"inverse mod {p} row {i}")
    blasted_p = bit_blast(polys_p, p, ctx)
    sys.union(lift_modular(blasted_p, p, ctx.registry, provenance=provs_p))

    for v in fvars + gvars + qvars + pvars:
        sys.decode[v] = ctx.expansions[v]
    return NtruAttack(params, sys, ctx, fvars, gvars, qvars, pvars, card_eqs)


def ntru_witness(attack: NtruAttack, key: NtruKey) -> dict[int, int]:
    """Bit assignment of a known keypair, with all multiple counters filled in."""
    a: dict[int, int] = {}
    for i, v in enumerate(attack.f_vars):
        a.update(attack.ctx.expansions[v].preimage(key.f[i]))
    for i, v in enumerate(attack.g_vars):
        a.update(attack.ctx.expansions[v].preimage(key.g[i]))
    for i, v in enumerate(attack.q_vars):
        a.update(attack.ctx.expansions[v].preimage(key.f_q.coeffs[i]))
    for i, v in enumerate(attack.p_vars):
        a.update(attack.ctx.expansions[v].preimage(key.f_p.coeffs[i]))
    return extend_with_counters(attack.system, a)


def ntru_min_weight(
    params: NtruParams, cfg: Optional[BackendConfig] = None
) -> tuple[OptResult, NtruAttack]:
    """Minimize the total support of f and g over the attack system.

    Drops the two support-size equations and minimizes o = sum f_i^2 +
    sum g_i^2, which counts the nonzero coefficients; 0 <= o < 4N.
    """
    attack = ntru_attack_system(params, include_cardinality=False)
    objective = SparsePoly.from_pairs(
        ZZ, [(Monomial.var(v, 2), 1) for v in attack.f_vars + attack.g_vars]
    )
    obar = attack.ctx.substitute_bits(objective)
    shim = StandardProblem(
        p=params.q,
        x_vars=attack.f_vars + attack.g_vars,
        y_vars=[],
        equalities=[],
        inequalities=[],
        objective=objective,
        u=4 * params.N,
        vartab=attack.ctx.vartab,
    )
    base = BaseSystem(attack.system, obar, attack.ctx, shim)
    return bisect_minimum(base, cfg), attack
