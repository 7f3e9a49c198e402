"""Encoding stages: interval expansions, quadratization, bit-blasting, lifts."""

import itertools
import random

import pytest

from fpbool.algebra import Monomial, Ring, SparsePoly, VarTable, ZZ
from fpbool.encode import (
    COEFF_SUM,
    SIGNED_RANGE,
    TERM_COUNT,
    EncodingContext,
    Registry,
    XBIT,
    bit_blast,
    decode,
    descend_extension,
    encode_inequalities,
    encode_integers,
    extend_with_counters,
    full_reduce,
    IntBound,
    lift_modular,
    lift_window,
    quadratize,
    theta,
    theta_centered,
    theta_weights,
)
from fpbool.errors import EmptyOrPointConstraint, NotQuadratic, UnboundedVariable
from fpbool.solver import all_solutions, evaluate

from oracles import brute_roots


def expansion_images(exp):
    bits = exp.bits()
    values = []
    for point in itertools.product((0, 1), repeat=len(bits)):
        values.append(exp.value({bv.id: x for bv, x in zip(bits, point)}))
    return values


# -- theta ------------------------------------------------------------------


def test_theta_weight_examples():
    assert theta_weights(6) == [1, 2, 3]
    assert theta_weights(1) == [1]
    assert theta_weights(8) == [1, 2, 4, 1]


def test_theta_image_and_injectivity_up_to_64():
    for b in range(1, 65):
        exp = theta(b, Registry(), XBIT)
        values = expansion_images(exp)
        assert len(exp.weights) == b.bit_length()
        assert set(values) == set(range(b + 1))
        injective = len(set(values)) == len(values)
        assert injective == (b & (b + 1) == 0)  # b = 2^k - 1


def test_theta_preimage_roundtrip():
    for b in range(1, 33):
        exp = theta(b, Registry(), XBIT)
        for v in range(b + 1):
            bits = exp.preimage(v)
            assert exp.value(bits) == v


def test_theta_six_value_three_has_two_preimages():
    exp = theta(6, Registry(), XBIT)
    b0, b1, b2 = (bv.id for bv in exp.bits())
    assert exp.value({b0: 1, b1: 1, b2: 0}) == 3
    assert exp.value({b0: 0, b1: 0, b2: 1}) == 3


def test_theta_centered():
    exp = theta_centered(2, 1, Registry(), XBIT)
    assert sorted(set(expansion_images(exp))) == [-1, 0, 1]
    same = theta_centered(5, 0, Registry(), XBIT)
    assert sorted(set(expansion_images(same))) == list(range(6))
    wide = theta_centered(6, 3, Registry(), XBIT)
    values = expansion_images(wide)
    assert sorted(set(values)) == list(range(-3, 4))
    assert values.count(0) == 2


def test_theta_zero_is_empty():
    exp = theta(0, Registry(), XBIT)
    assert exp.weights == [] and exp.value({}) == 0


# -- quadratize ----------------------------------------------------------------


def example_poly(ring, x1, x2):
    return SparsePoly.from_pairs(
        ring,
        [(Monomial([(x1, 3), (x2, 5)]), 1), (Monomial([(x1, 7), (x2, 5)]), 2), (Monomial(), 3)],
    )


def test_quadratize_worked_example():
    vt = VarTable()
    x1, x2 = vt.add("x1"), vt.add("x2")
    ring = Ring.mod(11)
    q = quadratize([example_poly(ring, x1, x2)], vt)
    assert len(q.new_vars) == 9
    assert len(q.system) == 10
    # squaring chains: u11 = x1^2, u12 = u11^2, u21 = x2^2, u22 = u21^2
    u11, u12, u21, u22 = q.new_vars[0], q.new_vars[1], q.new_vars[2], q.new_vars[3]
    v = q.new_vars[4:]
    neg = ring.neg(1)

    def binom(new, a, b=None):
        mono = Monomial.var(a, 2) if b is None else Monomial.var(a).mul(Monomial.var(b))
        return SparsePoly.from_pairs(ring, [(Monomial.var(new), 1), (mono, neg)])

    assert q.chains[0] == binom(u11, x1)
    assert q.chains[1] == binom(u12, u11)
    assert q.chains[2] == binom(u21, x2)
    assert q.chains[3] == binom(u22, u21)
    # product chains, first monomial x1^3 x2^5 then x1^7 x2^5
    assert q.chains[4] == binom(v[0], x1, u11)
    assert q.chains[5] == binom(v[1], v[0], x2)
    assert q.chains[6] == binom(v[2], x1, u11)
    assert q.chains[7] == binom(v[3], v[2], u12)
    assert q.chains[8] == binom(v[4], v[3], x2)
    expected_hat = SparsePoly.from_pairs(
        ring,
        [
            (Monomial.var(v[1]).mul(Monomial.var(u22)), 1),
            (Monomial.var(v[4]).mul(Monomial.var(u22)), 2),
            (Monomial(), 3),
        ],
    )
    assert q.rewritten[0] == expected_hat


def test_quadratize_mq_unchanged():
    vt = VarTable()
    x1, x2 = vt.add("x1"), vt.add("x2")
    f = SparsePoly.from_pairs(ZZ, [(Monomial.var(x1).mul(Monomial.var(x2)), 1), (Monomial(), -1)])
    q = quadratize([f], vt)
    assert q.new_vars == [] and q.system == [f]


def test_quadratize_size_formulas():
    # T_Q = T_F + 2 #V and #Q = r + #V, exactly
    rng = random.Random(7)
    for _ in range(100):
        vt = VarTable()
        n = rng.randrange(1, 5)
        xs = [vt.add(f"x{i}") for i in range(n)]
        ring = rng.choice([ZZ, Ring.mod(5), Ring.mod(7)])
        polys = []
        r = rng.randrange(1, 4)
        for _ in range(r):
            pairs = []
            for _ in range(rng.randrange(1, 5)):
                mono = Monomial(
                    (x, rng.randrange(0, 9)) for x in xs if rng.random() < 0.6
                )
                c = rng.randrange(1, 5)
                pairs.append((mono, c))
            poly = SparsePoly.from_pairs(ring, pairs)
            if poly.is_zero():
                poly = SparsePoly.const(ring, 1)
            polys.append(poly)
        t_f = sum(f.sparseness() for f in polys)
        q = quadratize(polys, vt)
        t_q = sum(f.sparseness() for f in q.system)
        assert t_q == t_f + 2 * len(q.new_vars)
        assert len(q.system) == len(polys) + len(q.new_vars)
        assert all(f.degree() <= 2 for f in q.system)
        # variable-count bound
        d = {x: max(f.degree_in(x) for f in polys) for x in xs}
        log_sum = sum(max(d[x], 1).bit_length() - 1 for x in xs)
        assert len(q.new_vars) <= (t_f + 1) * log_sum + n * t_f


def test_quadratize_roots_lift_and_project():
    # common roots of F extend to roots of Q(F), and roots of Q(F) project back
    rng = random.Random(13)
    for _ in range(20):
        p = rng.choice([2, 3, 5])
        ring = Ring.mod(p)
        vt = VarTable()
        n = rng.randrange(1, 3)
        xs = [vt.add(f"x{i}") for i in range(n)]
        polys = []
        for _ in range(rng.randrange(1, 3)):
            pairs = [
                (
                    Monomial((x, rng.randrange(0, 9)) for x in xs if rng.random() < 0.7),
                    rng.randrange(1, p),
                )
                for _ in range(rng.randrange(1, 4))
            ]
            polys.append(SparsePoly.from_pairs(ring, pairs))
        q = quadratize(polys, vt)
        base_roots = set(brute_roots(polys, xs, ring))
        lifted_roots = brute_roots(q.system, xs + q.new_vars, ring)
        projected = {root[: len(xs)] for root in lifted_roots}
        assert projected == base_roots
        # extension is unique: chain values are determined by the x part
        seen = {}
        for root in lifted_roots:
            head = root[: len(xs)]
            assert seen.setdefault(head, root) == root


# -- bit blasting ------------------------------------------------------------------


def test_bit_blast_linear_p3():
    vt = VarTable()
    x1, x2 = vt.add("x1"), vt.add("x2")
    ring = Ring.mod(3)
    f = SparsePoly.from_pairs(ring, [(Monomial.var(x1), 1), (Monomial.var(x2), 1), (Monomial(), 1)])
    ctx = EncodingContext(vt)
    (bf,) = bit_blast([f], 3, ctx)
    exp1, exp2 = ctx.expansions[x1], ctx.expansions[x2]
    assert [w for _, w in exp1.weights] == [1, 1]
    bits = [bv.id for bv in exp1.bits()] + [bv.id for bv in exp2.bits()]
    expected = SparsePoly.from_pairs(
        ZZ, [(Monomial.var(b), 1) for b in bits] + [(Monomial(), 1)]
    )
    assert bf == expected


def test_bit_blast_p2_passthrough():
    vt = VarTable()
    x = vt.add("x")
    ring = Ring.mod(2)
    f = SparsePoly.from_pairs(ring, [(Monomial.var(x, 2), 1), (Monomial.var(x), 1), (Monomial(), 1)])
    ctx = EncodingContext(vt)
    (bf,) = bit_blast([f], 2, ctx)
    # x^2 + x + 1 multilinearizes to 2x + 1 and reduces to the constant 1 mod 2
    assert bf == SparsePoly.const(ZZ, 1)
    assert len(ctx.expansions[x].weights) == 1


def test_bit_blast_square_matches_values_mod5():
    vt = VarTable()
    x = vt.add("x")
    ring = Ring.mod(5)
    f = SparsePoly.var(ring, x, 2)
    ctx = EncodingContext(vt)
    (bf,) = bit_blast([f], 5, ctx)
    assert bf.is_multilinear()
    exp = ctx.expansions[x]
    bits = [bv.id for bv in exp.bits()]
    for point in itertools.product((0, 1), repeat=len(bits)):
        assignment = dict(zip(bits, point))
        xval = exp.value(assignment)
        assert bf.evaluate(assignment) % 5 == (xval * xval) % 5


def test_bit_blast_rejects_cubics():
    vt = VarTable()
    x = vt.add("x")
    f = SparsePoly.var(Ring.mod(3), x, 3)
    with pytest.raises(NotQuadratic):
        bit_blast([f], 3, EncodingContext(vt))


def test_bit_blast_sparseness_bound():
    # total sparseness of the blasted system is at most T_F * (bits per var)^2
    rng = random.Random(5)
    for p in (3, 5, 7):
        vt = VarTable()
        xs = [vt.add(f"x{i}") for i in range(3)]
        ring = Ring.mod(p)
        polys = []
        for _ in range(2):
            pairs = []
            for _ in range(rng.randrange(1, 4)):
                mono = Monomial((x, rng.randrange(0, 3)) for x in xs if rng.random() < 0.7)
                if mono.degree() > 2:
                    mono = Monomial(list(mono.exps)[:1])
                pairs.append((mono, rng.randrange(1, p)))
            polys.append(SparsePoly.from_pairs(ring, pairs))
        ctx = EncodingContext(vt)
        blasted = bit_blast(polys, p, ctx)
        t_f = sum(f.sparseness() for f in polys)
        width = (p - 1).bit_length()
        assert sum(f.sparseness() for f in blasted) <= t_f * width * width


# -- modular lift ---------------------------------------------------------------


def test_lift_modes_on_linear_example():
    vt = VarTable()
    x1, x2 = vt.add("x1"), vt.add("x2")
    ring = Ring.mod(3)
    f = SparsePoly.from_pairs(ring, [(Monomial.var(x1), 1), (Monomial.var(x2), 1), (Monomial(), 1)])
    ctx = EncodingContext(vt)
    (bf,) = bit_blast([f], 3, ctx)
    assert lift_window(bf, 3, COEFF_SUM) == (0, 1)
    assert lift_window(bf, 3, TERM_COUNT) == (0, 5)
    sys = lift_modular([bf], 3, ctx.registry, COEFF_SUM)
    ubits = sys.lifts[0].counter.bits()
    assert len(ubits) == 1
    # witness x1 = x2 = 1: bits (1,0,1,0) and the counter at 1
    e1, e2 = ctx.expansions[x1], ctx.expansions[x2]
    assignment = {e1.bits()[0].id: 1, e1.bits()[1].id: 0, e2.bits()[0].id: 1, e2.bits()[1].id: 0}
    assignment[ubits[0].id] = 1
    assert evaluate(sys, assignment) == [0]


def test_lift_zero_poly():
    sys = lift_modular([SparsePoly.zero(ZZ)], 3, Registry(), COEFF_SUM)
    assert sys.equations[0].is_zero()
    assert sys.lifts[0].counter.bits() == []


def test_lift_signed_range_centered_example():
    # f = x1 + x2 with x_i in {-1, 0, 1}: attainable multiples of 3 in [-2, 2] is {0}
    vt = VarTable()
    x1, x2 = vt.add("x1"), vt.add("x2")
    ring = Ring.mod(3)
    f = SparsePoly.from_pairs(ring, [(Monomial.var(x1), 1), (Monomial.var(x2), 1)])
    ctx = EncodingContext(vt)
    (bf,) = bit_blast([f], 3, ctx, centered=True)
    assert lift_window(bf, 3, SIGNED_RANGE) == (0, 0)


def test_lift_bad_modulus():
    from fpbool.errors import BadModulus

    with pytest.raises(BadModulus):
        lift_modular([SparsePoly.zero(ZZ)], 1, Registry())


# -- extension descent ---------------------------------------------------------


def test_descend_trivial_extension():
    vt = VarTable()
    x = vt.add("x")
    F2e1 = Ring.ext(2, [1, 1])  # theta = 1: F_2 itself
    f = SparsePoly.from_pairs(F2e1, [(Monomial.var(x, 2), (1,)), (Monomial(), (1,))])
    out, splits = descend_extension([f], vt)
    assert len(out) == 1 and splits[x].m == 1


def test_descend_f4_square_plus_theta():
    vt = VarTable()
    x = vt.add("x")
    F4 = Ring.ext(2, [1, 1, 1])
    f = SparsePoly.from_pairs(F4, [(Monomial.var(x, 2), (1, 0)), (Monomial(), (0, 1))])
    out, splits = descend_extension([f], vt)
    x0, x1 = splits[x].components
    base = Ring.mod(2)
    # x^2 + theta = (x0 + x1 theta)^2 + theta = x0^2 + x1^2(theta+1) + theta
    g0 = SparsePoly.from_pairs(base, [(Monomial.var(x0, 2), 1), (Monomial.var(x1, 2), 1)])
    g1 = SparsePoly.from_pairs(base, [(Monomial.var(x1, 2), 1), (Monomial(), 1)])
    assert out == [g0, g1]


def test_descend_root_bijection():
    rng = random.Random(3)
    fields = [Ring.ext(2, [1, 1, 1]), Ring.ext(3, [1, 0, 1]), Ring.ext(2, [1, 1, 0, 1])]
    for ring in fields:
        for _ in range(6):
            vt = VarTable()
            n = rng.randrange(1, 3)
            xs = [vt.add(f"x{i}") for i in range(n)]
            polys = []
            for _ in range(rng.randrange(1, 3)):
                pairs = []
                for _ in range(rng.randrange(1, 4)):
                    mono = Monomial((x, rng.randrange(0, 3)) for x in xs if rng.random() < 0.8)
                    c = tuple(rng.randrange(ring.p) for _ in range(ring.m))
                    pairs.append((mono, c))
                polys.append(SparsePoly.from_pairs(ring, pairs))
            out, splits = descend_extension(polys, vt, xs)
            assert len(out) == ring.m * len(polys)
            comp_vars = [c for x in xs for c in splits[x].components]
            base = Ring.mod(ring.p)
            descended_roots = brute_roots(out, comp_vars, base)
            original_roots = brute_roots(polys, xs, ring)
            # recompose each descended root into field elements
            recomposed = {
                tuple(tuple(root[i * ring.m + j] for j in range(ring.m)) for i in range(n))
                for root in descended_roots
            }
            assert recomposed == set(original_roots)
            assert len(descended_roots) == len(original_roots)


def test_descend_mq_sparseness_bound():
    vt = VarTable()
    xs = [vt.add(f"x{i}") for i in range(2)]
    F9 = Ring.ext(3, [1, 0, 1])
    polys = [
        SparsePoly.from_pairs(
            F9,
            [
                (Monomial.var(xs[0]).mul(Monomial.var(xs[1])), (1, 2)),
                (Monomial.var(xs[1]), (0, 1)),
                (Monomial(), (2, 0)),
            ],
        )
    ]
    out, _ = descend_extension(polys, vt)
    t_f = sum(f.sparseness() for f in polys)
    assert sum(f.sparseness() for f in out) <= ring_m3(F9) * t_f
    assert all(f.degree() <= 2 for f in out)


def ring_m3(ring):
    return ring.m**3


# -- integer encoding ---------------------------------------------------------------


def test_encode_integers_linear_no_side_system():
    vt = VarTable()
    y = vt.add("y")
    g = SparsePoly.from_pairs(ZZ, [(Monomial.var(y), 1)])
    ctx = EncodingContext(vt)
    targets, side = encode_integers([g], {y: IntBound(0, 3)}, 2, ctx)
    assert side.equations == []
    exp = ctx.expansions[y]
    assert targets[0] == exp.poly()


def test_encode_integers_chain_bit_width():
    # chain value bound h^d: h = 3, d = 2 gives 9, hence 4 bits
    assert len(theta_weights(9)) == 4
    vt = VarTable()
    y = vt.add("y")
    g = SparsePoly.var(ZZ, y, 4)  # degree 4 so a squaring chain appears
    ctx = EncodingContext(vt)
    targets, side = encode_integers([g], {y: IntBound(0, 3)}, 2, ctx)
    assert len(side.equations) == 2  # u1 = y^2, u2 = u1^2
    (chain_var, _), (chain_var2, _) = side.chain_defs
    width = 3**4  # h = 3, d_g = 4
    assert ctx.expansions[chain_var].span() == width
    assert ctx.expansions[chain_var2].span() == width


def test_encode_integers_zero_poly():
    ctx = EncodingContext(VarTable())
    targets, side = encode_integers([SparsePoly.zero(ZZ)], {}, 3, ctx)
    assert targets[0].is_zero() and side.equations == []


def test_encode_integers_unbounded():
    vt = VarTable()
    y = vt.add("y")
    with pytest.raises(UnboundedVariable):
        encode_integers([SparsePoly.var(ZZ, y)], {}, 2, EncodingContext(vt))


def test_encode_integers_evaluation_identity():
    # g(x, y) equals its rewritten form at matching bit assignments
    rng = random.Random(11)
    for _ in range(15):
        vt = VarTable()
        x = vt.add("x")
        y = vt.add("y")
        p, ub = 3, rng.randrange(1, 5)
        pairs = []
        for _ in range(rng.randrange(1, 4)):
            mono = Monomial(
                [(x, rng.randrange(0, 3)), (y, rng.randrange(0, 4))]
            )
            pairs.append((mono, rng.randrange(-4, 5) or 1))
        g = SparsePoly.from_pairs(ZZ, pairs)
        ctx = EncodingContext(vt)
        targets, side = encode_integers([g], {y: IntBound(0, ub)}, p, ctx, field_vars={x})
        gbar = targets[0]
        for xval in range(p):
            for yval in range(ub + 1):
                bits = {}
                bits.update(ctx.expansions[x].preimage(xval))
                bits.update(ctx.expansions[y].preimage(yval))
                for vid, mono in side.chain_defs:
                    val = mono.exps and 1 or 1
                    chain_val = 1
                    for v, e in mono.exps:
                        vsrc = {x: xval, y: yval}
                        src = vsrc.get(v)
                        if src is None:
                            src = ctx.expansions[v].value(bits)
                        chain_val *= src**e
                    bits.update(ctx.expansions[vid].preimage(chain_val))
                assert all(r == 0 for r in evaluate(side, bits))
                assert gbar.evaluate(bits) == g.evaluate({x: xval, y: yval})


# -- inequality encoding ----------------------------------------------------------


def test_encode_inequalities_window():
    vt = VarTable()
    y = vt.add("y")
    g = SparsePoly.var(ZZ, y)
    ctx = EncodingContext(vt)
    sys = encode_inequalities([(g, 3)], {y: IntBound(0, 3)}, 2, ctx)
    assert len(sys.equations) == 1
    sols = list(all_solutions(sys))
    decoded = sorted(ctx.expansions[y].value(s) for s in sols)
    assert decoded == [0, 1, 2, 3]


def test_encode_inequalities_constant_zero():
    ctx = EncodingContext(VarTable())
    sys = encode_inequalities([(SparsePoly.zero(ZZ), 1)], {}, 2, ctx)
    sols = list(all_solutions(sys))
    assert len(sols) >= 1  # window bit 0 satisfies theta_1(G) - 0 = 0


def test_encode_inequalities_negative_bound():
    vt = VarTable()
    y = vt.add("y")
    with pytest.raises(EmptyOrPointConstraint):
        encode_inequalities([(SparsePoly.var(ZZ, y), -1)], {y: IntBound(0, 1)}, 2, EncodingContext(vt))


def test_encode_inequalities_exact_point():
    # b = 0 pins g to exactly zero
    vt = VarTable()
    y = vt.add("y")
    g = SparsePoly.from_pairs(ZZ, [(Monomial.var(y), 1), (Monomial(), -2)])
    ctx = EncodingContext(vt)
    sys = encode_inequalities([(g, 0)], {y: IntBound(0, 3)}, 2, ctx)
    decoded = sorted(ctx.expansions[y].value(s) for s in all_solutions(sys))
    assert decoded == [2]


def test_inequality_feasible_set_matches_oracle():
    rng = random.Random(23)
    for _ in range(15):
        vt = VarTable()
        y1, y2 = vt.add("y1"), vt.add("y2")
        b1, b2 = rng.randrange(1, 4), rng.randrange(1, 4)
        g = SparsePoly.from_pairs(
            ZZ,
            [
                (Monomial.var(y1), rng.randrange(-2, 3)),
                (Monomial.var(y2), rng.randrange(-2, 3)),
                (Monomial(), rng.randrange(0, 3)),
            ],
        )
        wb = rng.randrange(1, 5)
        ctx = EncodingContext(vt)
        bounds = {y1: IntBound(0, b1), y2: IntBound(0, b2)}
        sys = encode_inequalities([(g, wb)], bounds, 2, ctx)
        got = set()
        for s in all_solutions(sys):
            got.add((ctx.expansions[y1].value(s), ctx.expansions[y2].value(s)))
        want = {
            (v1, v2)
            for v1 in range(b1 + 1)
            for v2 in range(b2 + 1)
            if 0 <= g.evaluate({y1: v1, y2: v2}) <= wb
        }
        assert got == want


# -- full pipeline ------------------------------------------------------------------


def decoded_solution_set(sys, original_vars):
    """Project Boolean solutions onto the original variables, via enumeration."""
    bits = set()
    for exp in sys.decode.values():
        bits.update(bv.id for bv in exp.bits())
    for split in sys.ext_decode.values():
        for comp in split.components:
            bits.update(bv.id for bv in sys.aux_decode[comp].bits())
    out = set()
    for proj in all_solutions(sys, project=bits):
        sol = decode(sys, proj)
        out.add(tuple(sol.decoded[v] for v in original_vars))
    return out


def test_full_reduce_single_linear():
    vt = VarTable()
    x = vt.add("x")
    F3 = Ring.mod(3)
    f = SparsePoly.from_pairs(F3, [(Monomial.var(x), 1), (Monomial(), -1)])
    sys = full_reduce([f], vartab=vt)
    assert decoded_solution_set(sys, [x]) == {(1,)}


def test_full_reduce_unsat_f2():
    vt = VarTable()
    x = vt.add("x")
    F2 = Ring.mod(2)
    f = SparsePoly.from_pairs(F2, [(Monomial.var(x, 2), 1), (Monomial.var(x), 1), (Monomial(), 1)])
    sys = full_reduce([f], vartab=vt)
    assert decoded_solution_set(sys, [x]) == set()


def test_full_reduce_matches_bruteforce_f5():
    rng = random.Random(31)
    F5 = Ring.mod(5)
    for _ in range(10):
        vt = VarTable()
        xs = [vt.add(f"x{i}") for i in range(3)]
        polys = []
        for _ in range(rng.randrange(1, 3)):
            pairs = []
            for _ in range(rng.randrange(1, 4)):
                mono = Monomial((x, rng.randrange(0, 5)) for x in xs if rng.random() < 0.5)
                pairs.append((mono, rng.randrange(1, 5)))
            polys.append(SparsePoly.from_pairs(F5, pairs))
        sys = full_reduce(polys, vartab=vt, variables=xs)
        got = decoded_solution_set(sys, xs)
        want = set(brute_roots(polys, xs, F5))
        assert got == want


def test_full_reduce_extension_field_roundtrip():
    rng = random.Random(37)
    F4 = Ring.ext(2, [1, 1, 1])
    for _ in range(5):
        vt = VarTable()
        xs = [vt.add(f"x{i}") for i in range(2)]
        polys = []
        for _ in range(rng.randrange(1, 3)):
            pairs = []
            for _ in range(rng.randrange(1, 3)):
                mono = Monomial((x, rng.randrange(0, 3)) for x in xs if rng.random() < 0.7)
                pairs.append((mono, (rng.randrange(2), rng.randrange(2))))
            poly = SparsePoly.from_pairs(F4, pairs)
            polys.append(poly)
        sys = full_reduce(polys, vartab=vt, variables=xs)
        got = decoded_solution_set(sys, xs)
        want = set(brute_roots(polys, xs, F4))
        assert got == want


def test_size_ledger_after_lift():
    # counter bit total equals sum over equations of the window bit count
    vt = VarTable()
    xs = [vt.add(f"x{i}") for i in range(2)]
    F7 = Ring.mod(7)
    rng = random.Random(41)
    polys = []
    for _ in range(2):
        pairs = [
            (Monomial((x, rng.randrange(0, 3)) for x in xs), rng.randrange(1, 7))
            for _ in range(3)
        ]
        polys.append(SparsePoly.from_pairs(F7, pairs))
    ctx = EncodingContext(vt)
    q = quadratize(polys, vt)
    blasted = bit_blast(q.system, 7, ctx)
    sys = lift_modular(blasted, 7, ctx.registry, COEFF_SUM)
    expected_bits = 0
    for f in blasted:
        total = sum(f.terms.values())
        width = total // 7
        expected_bits += len(theta_weights(width))
    got = sum(1 for v in ctx.registry.vars if v.cls == "UBit")
    assert got == expected_bits


def test_decode_examples():
    vt = VarTable()
    x = vt.add("x")
    F3 = Ring.mod(3)
    f = SparsePoly.var(F3, x)
    sys = full_reduce([f], vartab=vt)
    exp = sys.decode[x]
    b0, b1 = (bv.id for bv in exp.bits())
    full = {v.id: 0 for v in sys.registry.vars}
    full.update({b0: 1, b1: 0})
    assert decode(sys, full).decoded[x] == 1

    vt2 = VarTable()
    xc = vt2.add("x")
    ctx = EncodingContext(vt2)
    sysc = full_reduce([SparsePoly.var(F3, xc)], ctx, centered=True)
    expc = sysc.decode[xc]
    c0, c1 = (bv.id for bv in expc.bits())
    fullc = {v.id: 0 for v in sysc.registry.vars}
    assert decode(sysc, fullc).decoded[xc] == -1


def test_extend_with_counters_fills_lift_bits():
    vt = VarTable()
    x = vt.add("x")
    F3 = Ring.mod(3)
    f = SparsePoly.from_pairs(F3, [(Monomial.var(x), 1), (Monomial(), 2)])  # x = 1 mod 3
    sys = full_reduce([f], vartab=vt)
    bits = sys.decode[x].preimage(1)
    full = extend_with_counters(sys, bits)
    assert all(r == 0 for r in evaluate(sys, full))
