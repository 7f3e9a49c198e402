"""Reduction chain from polynomial systems to Boolean polynomial systems.

Stages, each usable on its own and composed by full_reduce:

  * theta / theta_centered: affine Boolean expansions whose value set is
    exactly an integer interval.
  * quadratize: rewrite any sparse system as a system of total degree <= 2
    using squaring chains and per-monomial product chains.
  * descend_extension: split an F_{p^m} system into m component systems
    over F_p in the power basis.
  * bit_blast: substitute interval expansions for the field variables of a
    quadratic system over F_p.
  * lift_modular: turn "f = 0 (mod k)" into "f - k*(multiple counter) = 0"
    over Z, with the counter theta-encoded.
  * encode_integers / encode_inequalities: bounded-integer and window
    constraints over Z.

Every stored equation is multilinear: the Boolean relation X^2 = X is folded
in during construction and never emitted as an equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .algebra import Monomial, Ring, SparsePoly, VarTable, ZZ, MOD, EXT
from .errors import (
    BadModulus,
    CenteredRepUnsupported,
    EmptyOrPointConstraint,
    MissingBits,
    NotQuadratic,
    RingMismatch,
    UnboundedVariable,
)

# Boolean variable classes, named after the family of the encoding they serve.
XBIT = "XBit"  # bits of an F_p-valued variable
YBIT = "YBit"  # bits of a bounded integer variable
VBIT = "VBit"  # bits of a quadratization chain value
UBIT = "UBit"  # bits of a modular multiple counter
GBIT = "GBit"  # bits of an inequality window
FBIT = "FBit"  # bits of an objective bisection window
HBIT = "HBit"  # error indicator bits
AUX = "Aux"

TERM_COUNT = "TermCount"
COEFF_SUM = "CoeffSum"
SIGNED_RANGE = "SignedRange"


@dataclass(frozen=True)
class BoolVar:
    id: int
    cls: str
    origin: Optional[tuple] = None


class Registry:
    """Hands out Boolean variables with dense ids, deterministically."""

    def __init__(self):
        self.vars: list[BoolVar] = []

    def fresh(self, cls: str, origin=None) -> BoolVar:
        v = BoolVar(len(self.vars), cls, origin)
        self.vars.append(v)
        return v

    def __len__(self):
        return len(self.vars)

    def clone(self) -> "Registry":
        out = Registry()
        out.vars = list(self.vars)
        return out


def theta_weights(b: int) -> list[int]:
    """Weights 2^0, ..., 2^(s-1), b+1-2^s with s = floor(log2 b); empty for b <= 0."""
    if b <= 0:
        return []
    s = b.bit_length() - 1
    return [1 << i for i in range(s)] + [b + 1 - (1 << s)]


class AffineExpansion:
    """Decoding record: one source variable as offset + sum(weight * bit).

    The value set over all bit assignments is exactly the integer interval
    [offset, offset + b] when the weights come from theta_weights(b).
    """

    __slots__ = ("var", "weights", "offset")

    def __init__(self, var: Optional[int], weights: Sequence[tuple[BoolVar, int]], offset: int = 0):
        self.var = var
        self.weights = list(weights)
        self.offset = offset

    def bits(self) -> list[BoolVar]:
        return [bv for bv, _ in self.weights]

    def span(self) -> int:
        """b such that the value set is [offset, offset + b]."""
        return sum(w for _, w in self.weights)

    def value_range(self) -> tuple[int, int]:
        return self.offset, self.offset + self.span()

    def value(self, assignment: Mapping[int, int]) -> int:
        total = self.offset
        for bv, w in self.weights:
            if bv.id not in assignment:
                raise MissingBits(f"bit {bv.id} unassigned")
            total += w * assignment[bv.id]
        return total

    def poly(self) -> SparsePoly:
        pairs = [(Monomial.var(bv.id), w) for bv, w in self.weights]
        if self.offset:
            pairs.append((Monomial(), self.offset))
        return SparsePoly.from_pairs(ZZ, pairs)

    def preimage(self, value: int) -> dict[int, int]:
        """Canonical bit assignment with this value (theta-shaped weights only)."""
        t = value - self.offset
        if not self.weights:
            if t != 0:
                raise ValueError(f"value {value} outside empty expansion")
            return {}
        s = len(self.weights) - 1
        closing = self.weights[-1][1]
        lo_max = (1 << s) - 1
        out = {}
        if t <= lo_max:
            out[self.weights[-1][0].id] = 0
        else:
            t -= closing
            out[self.weights[-1][0].id] = 1
        if not 0 <= t <= lo_max:
            raise ValueError(f"value {value} outside expansion range")
        for i in range(s):
            out[self.weights[i][0].id] = (t >> i) & 1
        return out

    def __repr__(self):
        ws = " + ".join(f"{w}*b{bv.id}" for bv, w in self.weights)
        return f"AffineExpansion({self.offset} + {ws})"


def theta(b: int, registry: Registry, cls: str = GBIT, origin=None, var: Optional[int] = None) -> AffineExpansion:
    """Expansion with value set exactly {0, ..., b}; b = 0 gives the empty expansion."""
    weights = theta_weights(b)
    bvs = [registry.fresh(cls, (origin, i) if origin is not None else None) for i in range(len(weights))]
    return AffineExpansion(var, list(zip(bvs, weights)), 0)


def theta_centered(
    b: int, shift: int, registry: Registry, cls: str = XBIT, origin=None, var: Optional[int] = None
) -> AffineExpansion:
    """Same weights as theta(b) with offset -shift: value set {-shift, ..., b - shift}."""
    exp = theta(b, registry, cls, origin=origin, var=var)
    exp.offset = -shift
    return exp


@dataclass
class LiftRecord:
    """How one equation was lifted: body - modulus*(m_lo + counter) = 0."""

    modulus: int
    m_lo: int
    counter: AffineExpansion
    body: SparsePoly  # pre-lift polynomial over Z in non-counter bits


@dataclass
class ExtSplit:
    """An F_{p^m} variable split into component variables in the power basis."""

    p: int
    m: int
    components: list[int]  # component variable ids, power-basis order


class BooleanSystem:
    """Multilinear integer polynomial equations over registered Boolean variables.

    An assignment is a solution when every equation evaluates to exactly 0
    over Z.  `decode` maps each original problem variable to its expansion;
    `aux_decode` keeps expansions of internal chain variables; `lifts` records
    per-equation modular lift metadata (None for unlifted equations).
    """

    def __init__(self, registry: Registry):
        self.registry = registry
        self.equations: list[SparsePoly] = []
        self.provenance: list[str] = []
        self.lifts: list[Optional[LiftRecord]] = []
        self.decode: dict[int, AffineExpansion] = {}
        self.aux_decode: dict[int, AffineExpansion] = {}
        self.ext_decode: dict[int, ExtSplit] = {}
        self.chain_defs: list[tuple[int, Monomial]] = []

    def add_equation(self, poly: SparsePoly, provenance: str, lift: Optional[LiftRecord] = None):
        if not poly.is_multilinear():
            raise ValueError("stored equations must be multilinear")
        if poly.ring != ZZ:
            raise RingMismatch("stored equations live over Z")
        self.equations.append(poly)
        self.provenance.append(provenance)
        self.lifts.append(lift)

    def union(self, other: "BooleanSystem") -> "BooleanSystem":
        """Merge a fragment built on the same registry."""
        if other.registry is not self.registry:
            raise ValueError("fragments must share one registry")
        self.equations.extend(other.equations)
        self.provenance.extend(other.provenance)
        self.lifts.extend(other.lifts)
        for src, dst in (
            (other.decode, self.decode),
            (other.aux_decode, self.aux_decode),
            (other.ext_decode, self.ext_decode),
        ):
            for k, v in src.items():
                if k in dst and dst[k] is not v:
                    raise ValueError(f"conflicting decode entry for variable {k}")
                dst[k] = v
        self.chain_defs.extend(other.chain_defs)
        return self

    def num_vars(self) -> int:
        return len(self.registry)

    def total_sparseness(self) -> int:
        return sum(eq.sparseness() for eq in self.equations)

    def to_json(self, vartab: Optional[VarTable] = None) -> dict:
        def expansion_json(exp: AffineExpansion) -> dict:
            return {
                "var": exp.var,
                "offset": exp.offset,
                "weights": [[bv.id, w] for bv, w in exp.weights],
            }

        obj = {
            "registry": [
                {"id": v.id, "class": v.cls, "origin": list(v.origin) if v.origin else None}
                for v in self.registry.vars
            ],
            "equations": [
                [{"m": {str(v): e for v, e in mono.exps}, "c": str(c)} for mono, c in eq.sorted_terms()]
                for eq in self.equations
            ],
            "decode": [expansion_json(e) for _, e in sorted(self.decode.items())],
            "provenance": list(self.provenance),
        }
        if vartab is not None:
            obj["var_names"] = {str(v): vartab.name(v) for v in sorted(self.decode)}
        return obj


@dataclass
class EncodedSolution:
    assignment: dict[int, int]
    decoded: dict[int, object]  # original var -> int, or tuple for extension fields


class EncodingContext:
    """Shared state for one encoding pipeline: expansions are created once per
    original variable and reused by every stage that mentions the variable."""

    def __init__(self, vartab: Optional[VarTable] = None, registry: Optional[Registry] = None):
        self.vartab = vartab if vartab is not None else VarTable()
        self.registry = registry if registry is not None else Registry()
        self.expansions: dict[int, AffineExpansion] = {}
        self.internal_vars: set[int] = set()
        self.ext_splits: dict[int, ExtSplit] = {}
        self.chain_defs: list[tuple[int, Monomial]] = []

    def set_expansion(self, var: int, exp: AffineExpansion):
        exp.var = var
        self.expansions[var] = exp

    def expand_field_var(self, var: int, p: int, centered: bool, cls: str = XBIT) -> AffineExpansion:
        if var in self.expansions:
            return self.expansions[var]
        if p == 2:
            exp = theta(1, self.registry, cls, origin=var, var=var)
        elif centered:
            if p % 2 == 0:
                raise CenteredRepUnsupported("centered residues need an odd prime")
            exp = theta_centered(p - 1, (p - 1) // 2, self.registry, cls, origin=var, var=var)
        else:
            exp = theta(p - 1, self.registry, cls, origin=var, var=var)
        self.expansions[var] = exp
        return exp

    def expand_int_var(self, var: int, lo: int, hi: int, cls: str = YBIT) -> AffineExpansion:
        if var in self.expansions:
            return self.expansions[var]
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        exp = theta_centered(hi - lo, -lo, self.registry, cls, origin=var, var=var)
        self.expansions[var] = exp
        return exp

    def substitute_bits(self, poly: SparsePoly) -> SparsePoly:
        """Replace every variable by its expansion and fold X^2 = X eagerly.

        The input must be over Z (or is reinterpreted coefficient-wise); the
        result is a multilinear polynomial over Z in Boolean variable ids.
        """
        out: dict[Monomial, int] = {}
        cache: dict[tuple, SparsePoly] = {}
        for mono, c in poly.terms.items():
            key = mono.exps
            piece = cache.get(key)
            if piece is None:
                piece = SparsePoly.const(ZZ, 1)
                for v, e in mono.exps:
                    exp = self.expansions.get(v)
                    if exp is None:
                        raise MissingBits(f"variable {v} has no expansion")
                    ep = exp.poly()
                    for _ in range(e):
                        piece = piece.mul(ep).multilinearize()
                cache[key] = piece
            ci = int(c)
            for m2, c2 in piece.terms.items():
                out[m2] = out.get(m2, 0) + ci * c2
        return SparsePoly(ZZ, out)


# -- quadratization -----------------------------------------------------------


@dataclass
class QuadResult:
    chains: list[SparsePoly]
    rewritten: list[SparsePoly]
    new_vars: list[int]
    defs: list[tuple[int, Monomial]] = field(default_factory=list)

    @property
    def system(self) -> list[SparsePoly]:
        return self.chains + self.rewritten


def quadratize(polys: Sequence[SparsePoly], vartab: VarTable) -> QuadResult:
    """Rewrite a sparse system as one of total degree <= 2.

    Squaring chains u_{i,1} = x_i^2, u_{i,j+1} = u_{i,j}^2 cover the powers
    x_i^(2^j); each high-degree monomial gets a fresh left-to-right product
    chain over its binary-decomposed factors.  A system that is already
    quadratic is returned unchanged with no new variables.
    """
    if not polys:
        return QuadResult([], [], [])
    ring = polys[0].ring
    for f in polys[1:]:
        if f.ring != ring:
            raise RingMismatch("all polynomials must share one ring")
    if all(f.degree() <= 2 for f in polys):
        return QuadResult([], list(polys), [])

    max_deg: dict[int, int] = {}
    for f in polys:
        for v in f.variables():
            max_deg[v] = max(max_deg.get(v, 0), f.degree_in(v))

    chains: list[SparsePoly] = []
    new_vars: list[int] = []
    defs: list[tuple[int, Monomial]] = []
    square_chain: dict[int, list[int]] = {}
    for v in sorted(max_deg):
        d = max_deg[v]
        if d < 2:
            continue
        levels = []
        prev = v
        for j in range(d.bit_length() - 1):
            uid = vartab.fresh(f"u{vartab.name(v)}_")
            chains.append(
                SparsePoly.from_pairs(
                    ring, [(Monomial.var(uid), 1), (Monomial.var(prev, 2), ring.neg(ring.one()))]
                )
            )
            defs.append((uid, Monomial.var(prev, 2)))
            levels.append(uid)
            new_vars.append(uid)
            prev = uid
        square_chain[v] = levels

    def factors_of(mono: Monomial) -> list[int]:
        out = []
        for v, e in mono.exps:
            for j in range(e.bit_length()):
                if (e >> j) & 1:
                    out.append(v if j == 0 else square_chain[v][j - 1])
        return out

    replacement: dict[Monomial, Monomial] = {}
    monomials = sorted({m for f in polys for m in f.terms if m.degree() > 2}, key=lambda m: m.exps)
    for mono in monomials:
        fs = factors_of(mono)
        if len(fs) <= 2:
            replacement[mono] = Monomial((v, fs.count(v)) for v in set(fs))
            continue
        acc = fs[0]
        pair = fs[1]
        for nxt_idx in range(1, len(fs) - 1):
            vid = vartab.fresh("v")
            chains.append(
                SparsePoly.from_pairs(
                    ring,
                    [
                        (Monomial.var(vid), 1),
                        (Monomial.var(acc).mul(Monomial.var(pair)), ring.neg(ring.one())),
                    ],
                )
            )
            defs.append((vid, Monomial.var(acc).mul(Monomial.var(pair))))
            new_vars.append(vid)
            acc = vid
            if nxt_idx + 1 < len(fs):
                pair = fs[nxt_idx + 1]
        replacement[mono] = Monomial.var(acc).mul(Monomial.var(fs[-1]))

    rewritten = []
    for f in polys:
        pairs = [(replacement.get(m, m), c) for m, c in f.terms.items()]
        rewritten.append(SparsePoly.from_pairs(ring, pairs))
    return QuadResult(chains, rewritten, new_vars, defs)


# -- extension field descent ----------------------------------------------------


def descend_extension(
    polys: Sequence[SparsePoly],
    vartab: VarTable,
    variables: Optional[Iterable[int]] = None,
) -> tuple[list[SparsePoly], dict[int, ExtSplit]]:
    """Split an F_{p^m} system into m*#F component polynomials over F_p.

    Each variable x becomes m variables x_j with x = sum_j x_j theta^j; each
    polynomial f = sum_j g_j theta^j contributes the components g_0, ..., g_(m-1)
    in order (zero components included, so counts stay m per input).
    `variables` adds declared variables that may not occur in any polynomial.
    """
    if not polys:
        return [], {}
    ring = polys[0].ring
    if ring.kind != EXT:
        raise RingMismatch("descend_extension needs an extension field ring")
    p, m = ring.p, ring.m
    base = Ring.mod(p)

    declared = set(variables or ())
    for f in polys:
        declared.update(f.variables())
    splits: dict[int, ExtSplit] = {}
    for v in sorted(declared):
        comps = [vartab.fresh(f"{vartab.name(v)}_t") for _ in range(m)]
        splits[v] = ExtSplit(p, m, comps)

    if m == 1:
        out = []
        for f in polys:
            mapping = {}
            for v, split in splits.items():
                mapping[v] = split.components[0]
            pairs = []
            for mono, c in f.terms.items():
                new_mono = Monomial((mapping[v], e) for v, e in mono.exps)
                pairs.append((new_mono, c[0]))
            out.append(SparsePoly.from_pairs(base, pairs))
        return out, splits

    def vec_add(a, b):
        return [x.add(y) for x, y in zip(a, b)]

    def vec_mul(a, b):
        # product in (F_p[vars])[theta]/(phi) with components as polynomials
        conv = [SparsePoly.zero(base) for _ in range(2 * m - 1)]
        for i, x in enumerate(a):
            if x.is_zero():
                continue
            for j, y in enumerate(b):
                if y.is_zero():
                    continue
                conv[i + j] = conv[i + j].add(x.mul(y))
        out = conv[:m]
        for k in range(m, 2 * m - 1):
            if conv[k].is_zero():
                continue
            red = ring._theta_power(k)
            for j in range(m):
                if red[j]:
                    out[j] = out[j].add(conv[k].scale(red[j]))
        return out

    var_vectors = {
        v: [SparsePoly.var(base, comp) for comp in split.components] for v, split in splits.items()
    }

    out = []
    for f in polys:
        total = [SparsePoly.zero(base) for _ in range(m)]
        for mono, c in f.terms.items():
            piece = [SparsePoly.const(base, cj) for cj in c]
            for v, e in mono.exps:
                for _ in range(e):
                    piece = vec_mul(piece, var_vectors[v])
            total = vec_add(total, piece)
        out.extend(total)
    return out, splits


# -- bit blasting and the modular lift -------------------------------------------


def _coeff_to_int(ring: Ring, c) -> int:
    if ring.kind == EXT:
        raise RingMismatch("descend the extension field first")
    return int(c)


def bit_blast(
    polys: Sequence[SparsePoly],
    p: int,
    ctx: EncodingContext,
    centered: bool = False,
    bound_overrides: Optional[Mapping[int, int]] = None,
) -> list[SparsePoly]:
    """Substitute interval expansions for the variables of a quadratic system over F_p.

    Coefficients of the result are reduced into {0, ..., p-1} (standard) or
    {-(p-1)/2, ..., (p-1)/2} (centered).  Variables listed in bound_overrides
    expand over {0, ..., bound} instead of the full residue range; variables
    that already carry an expansion in the context keep it.
    """
    out = []
    for f in polys:
        if f.degree() > 2:
            raise NotQuadratic(f"degree {f.degree()} polynomial in bit_blast")
        for v in sorted(f.variables()):
            if v in ctx.expansions:
                continue
            if bound_overrides and v in bound_overrides:
                b = bound_overrides[v]
                exp = theta(b, ctx.registry, XBIT, origin=v, var=v)
                ctx.expansions[v] = exp
            else:
                ctx.expand_field_var(v, p, centered)
    half = (p - 1) // 2
    for f in polys:
        if centered and p > 2:
            # signed representatives in, exact signed integers out
            fi = f.map_ring(ZZ, lambda c: ((_coeff_to_int(f.ring, c) + half) % p) - half)
            out.append(ctx.substitute_bits(fi))
        else:
            fi = f.map_ring(ZZ, lambda c: _coeff_to_int(f.ring, c))
            blasted = ctx.substitute_bits(fi)
            out.append(SparsePoly(ZZ, {m: c % p for m, c in blasted.terms.items()}))
    return out


def _poly_value_range(f: SparsePoly) -> tuple[int, int]:
    """Attainable [min, max] of a multilinear integer polynomial on the cube."""
    lo = hi = 0
    for mono, c in f.terms.items():
        if mono.degree() == 0:
            lo += c
            hi += c
        elif c > 0:
            hi += c
        else:
            lo += c
    return lo, hi


def lift_window(f: SparsePoly, k: int, mode: str) -> tuple[int, int]:
    """(m_lo, M) describing the multiple range m_lo, ..., m_lo + M for f/k."""
    if mode == TERM_COUNT:
        return 0, f.sparseness()
    if mode == COEFF_SUM:
        total = sum(f.terms.values())
        return 0, total // k
    if mode == SIGNED_RANGE:
        lo, hi = _poly_value_range(f)
        m_lo = -((-lo) // k)  # ceil(lo / k)
        m_hi = hi // k
        return m_lo, max(m_hi - m_lo, -1)
    raise ValueError(f"unknown lift mode {mode!r}")


def lift_modular(
    polys: Sequence[SparsePoly],
    k: int,
    registry: Registry,
    mode: str = COEFF_SUM,
    provenance: Optional[Sequence[str]] = None,
) -> BooleanSystem:
    """Replace each "f = 0 (mod k)" by "f - k*(m_lo + counter) = 0" over Z.

    The counter is theta-encoded over a range wide enough to cover every
    attainable multiple of k: the term count, the coefficient sum divided by
    k, or exact signed interval arithmetic.  An empty window (no attainable
    multiple) leaves the bare, unsatisfiable equation in place.
    """
    if k < 2:
        raise BadModulus(f"modulus {k} < 2")
    sys = BooleanSystem(registry)
    for i, f in enumerate(polys):
        tag = provenance[i] if provenance else f"lift eq{i} mod {k}"
        m_lo, width = lift_window(f, k, mode)
        if width < 0:
            sys.add_equation(f, tag + " (empty multiple window)")
            continue
        counter = theta(width, registry, UBIT, origin=("lift", i))
        shifted = f
        if m_lo:
            shifted = shifted.add(SparsePoly.const(ZZ, -k * m_lo))
        lifted = shifted.add(counter.poly().scale(-k))
        sys.add_equation(lifted, tag, LiftRecord(k, m_lo, counter, f))
    return sys


def extend_with_counters(sys: BooleanSystem, assignment: dict[int, int]) -> dict[int, int]:
    """Fill counter bits so every lifted equation vanishes, given all other bits.

    Raises ValueError when the body value is not an attainable multiple of the
    modulus, which means the partial assignment is not extendable.
    """
    out = dict(assignment)
    for rec in sys.lifts:
        if rec is None:
            continue
        val = rec.body.evaluate(out)
        if val % rec.modulus:
            raise ValueError(f"body value {val} not divisible by {rec.modulus}")
        out.update(rec.counter.preimage(val // rec.modulus - rec.m_lo))
    return out


# -- composed pipeline ------------------------------------------------------------


def full_reduce(
    polys: Sequence[SparsePoly],
    ctx: Optional[EncodingContext] = None,
    centered: bool = False,
    lift_mode: Optional[str] = None,
    bound_overrides: Optional[Mapping[int, int]] = None,
    vartab: Optional[VarTable] = None,
    variables: Optional[Iterable[int]] = None,
) -> BooleanSystem:
    """quadratize -> (descend if extension field) -> bit_blast -> lift_modular.

    Returns the Boolean system with a decode map for the original variables
    (`variables` declares ones that may not occur in any polynomial).  Chain
    variables keep their expansions in aux_decode.
    """
    if ctx is None:
        ctx = EncodingContext(vartab)
    if not polys:
        return BooleanSystem(ctx.registry)
    ring = polys[0].ring
    declared = sorted(set(variables or ()) | {v for f in polys for v in f.variables()})

    ext_splits: dict[int, ExtSplit] = {}
    if ring.kind == EXT:
        if centered:
            raise CenteredRepUnsupported("centered residues are defined over prime fields")
        p = ring.p
        quad = quadratize(list(polys), ctx.vartab)
        for vid, _ in quad.defs:
            ctx.internal_vars.add(vid)
        work, ext_splits = descend_extension(quad.system, ctx.vartab, declared)
        ctx.ext_splits.update(ext_splits)
        for split in ext_splits.values():
            for comp in split.components:
                ctx.expand_field_var(comp, p, centered=False)
        defs = quad.defs
        chain_provs = [f"component eq{i}" for i in range(len(work))]
    elif ring.kind == MOD:
        p = ring.modulus
        quad = quadratize(list(polys), ctx.vartab)
        for vid, _ in quad.defs:
            ctx.internal_vars.add(vid)
        work = quad.system
        defs = quad.defs
        for v in declared:
            if bound_overrides and v in bound_overrides:
                if v not in ctx.expansions:
                    ctx.set_expansion(
                        v, theta(bound_overrides[v], ctx.registry, XBIT, origin=v, var=v)
                    )
            else:
                ctx.expand_field_var(v, p, centered)
        chain_provs = [f"chain {ctx.vartab.name(v)}" for v, _ in quad.defs] + [
            f"reduced eq{i}" for i in range(len(quad.rewritten))
        ]
    else:
        raise RingMismatch("full_reduce expects a finite field or Z_k system")

    mode = lift_mode
    if mode is None or (centered and mode != SIGNED_RANGE):
        mode = SIGNED_RANGE if centered else (lift_mode or COEFF_SUM)

    blasted = bit_blast(work, p, ctx, centered=centered, bound_overrides=bound_overrides)
    sys = lift_modular(blasted, p, ctx.registry, mode, provenance=chain_provs)

    sys.chain_defs = list(defs)
    ctx.chain_defs.extend(defs)
    comp_owner = {c: ov for ov, sp in ext_splits.items() for c in sp.components}
    for v, exp in ctx.expansions.items():
        owner = comp_owner.get(v)
        if v in ctx.internal_vars or (owner is not None and owner in ctx.internal_vars):
            sys.aux_decode[v] = exp
        elif ring.kind == EXT:
            sys.aux_decode[v] = exp
        elif v in declared:
            sys.decode[v] = exp
        else:
            sys.aux_decode[v] = exp
    for v, split in ext_splits.items():
        if v in declared and v not in ctx.internal_vars:
            sys.ext_decode[v] = split
    return sys


def decode(sys: BooleanSystem, assignment: Mapping[int, int]) -> EncodedSolution:
    """Evaluate every decode expansion under a full assignment."""
    values: dict[int, object] = {}
    for v, exp in sys.decode.items():
        values[v] = exp.value(assignment)
    for v, split in sys.ext_decode.items():
        comp_vals = []
        for comp in split.components:
            exp = sys.aux_decode.get(comp) or sys.decode.get(comp)
            if exp is None:
                raise MissingBits(f"no expansion for component variable {comp}")
            comp_vals.append(exp.value(assignment))
        values[v] = tuple(comp_vals)
    return EncodedSolution(dict(assignment), values)


# -- bounded integers and inequality windows ---------------------------------------


@dataclass
class IntBound:
    lo: int
    hi: int


def encode_integers(
    polys: Sequence[SparsePoly],
    bounds: Mapping[int, IntBound],
    p: int,
    ctx: EncodingContext,
    field_vars: Iterable[int] = (),
    centered: bool = False,
) -> tuple[list[SparsePoly], BooleanSystem]:
    """Rewrite integer polynomials in field and bounded-integer variables as
    multilinear Boolean polynomials plus a chain side system.

    Returns (rewritten targets, side system).  Chain values are bounded by
    h^d with h = max(p-1, bounds) and d the maximal degree; with signed
    bounds the symmetric window [-h^d, h^d] is used instead.
    """
    field_vars = set(field_vars)
    sys = BooleanSystem(ctx.registry)
    if not polys:
        return [], sys
    for f in polys:
        if f.ring != ZZ:
            raise RingMismatch("integer encoding expects polynomials over Z")

    all_vars = sorted({v for f in polys for v in f.variables()} | set(bounds) | field_vars)
    for v in all_vars:
        if v in ctx.expansions or v in field_vars:
            continue
        if v not in bounds:
            raise UnboundedVariable(f"variable {ctx.vartab.name(v)} has no bound")

    quad = quadratize(list(polys), ctx.vartab)
    d_g = max((f.degree() for f in polys), default=1)
    h = max(
        [p - 1]
        + [max(abs(b.lo), abs(b.hi)) for b in bounds.values()]
        + [1]
    )
    any_signed = any(b.lo < 0 for b in bounds.values()) or centered

    var_range: dict[int, tuple[int, int]] = {}
    for v in all_vars:
        if v in ctx.expansions:
            var_range[v] = ctx.expansions[v].value_range()
        elif v in field_vars:
            if centered:
                var_range[v] = (-((p - 1) // 2), (p - 1) // 2)
            else:
                var_range[v] = (0, p - 1)
        else:
            var_range[v] = (bounds[v].lo, bounds[v].hi)

    for vid, mono in quad.defs:
        ctx.internal_vars.add(vid)
        if any_signed:
            bound = h**d_g
            var_range[vid] = (-bound, bound)
        else:
            var_range[vid] = (0, h**d_g)

    for v in all_vars:
        if v in field_vars:
            ctx.expand_field_var(v, p, centered)
        else:
            lo, hi = var_range[v]
            ctx.expand_int_var(v, lo, hi)
    for vid, _ in quad.defs:
        lo, hi = var_range[vid]
        exp = theta_centered(hi - lo, -lo, ctx.registry, VBIT, origin=vid, var=vid)
        ctx.expansions[vid] = exp
        sys.aux_decode[vid] = exp

    for i, chain_eq in enumerate(quad.chains):
        sys.add_equation(ctx.substitute_bits(chain_eq), f"chain eq{i}")
    rewritten = [ctx.substitute_bits(f) for f in quad.rewritten]
    sys.chain_defs = list(quad.defs)
    ctx.chain_defs.extend(quad.defs)
    return rewritten, sys


def encode_inequalities(
    ineqs: Sequence[tuple[SparsePoly, int]],
    bounds: Mapping[int, IntBound],
    p: int,
    ctx: EncodingContext,
    field_vars: Iterable[int] = (),
    centered: bool = False,
) -> BooleanSystem:
    """Encode windows 0 <= g_i <= b_i as window-matching equations.

    Each inequality becomes theta_{b_i} - g_i_rewritten = 0 together with the
    shared chain side system; b_i = 0 degenerates to the exact equation
    g_i = 0, and negative b_i is rejected.
    """
    field_vars = set(field_vars)
    for g, b in ineqs:
        if b < 0:
            raise EmptyOrPointConstraint(f"window bound {b} < 0; use an exact equation")
    targets, sys = encode_integers([g for g, _ in ineqs], bounds, p, ctx, field_vars, centered)
    for i, ((g, b), gbar) in enumerate(zip(ineqs, targets)):
        window = theta(b, ctx.registry, GBIT, origin=("ineq", i))
        sys.add_equation(window.poly().sub(gbar), f"window 0..{b} eq{i}")
    covered = {v for g, _ in ineqs for v in g.variables()} | set(bounds) | field_vars
    for v in sorted(covered):
        if v not in ctx.internal_vars and v in ctx.expansions:
            sys.decode[v] = ctx.expansions[v]
    return sys
