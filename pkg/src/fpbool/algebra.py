"""Exact arithmetic for sparse multivariate polynomials over Z, Z_k and F_{p^m},
plus the cyclic convolution ring Z_k[X]/(X^N - 1).

Polynomials are stored in normal form: a map from monomials to nonzero ring
elements.  Coefficients are arbitrary-precision Python integers (Z_k keeps the
canonical representative in {0, ..., k-1}; F_{p^m} elements are coefficient
vectors of length m over {0, ..., p-1} in the power basis 1, theta, ...,
theta^(m-1)).  Variables are dense integer ids handed out by a VarTable; names
are metadata only.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

from .errors import (
    NotInvertible,
    ParseError,
    RingMismatch,
    ShapeMismatch,
    UnsupportedModulus,
)

INT = "int"
MOD = "mod"
EXT = "ext"

# Exhaustive trial division gets expensive for big p and m; above this many
# candidate divisors the polynomial is accepted unverified.
_IRRED_CHECK_LIMIT = 200_000


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _polydiv_mod(num: list[int], den: list[int], p: int) -> tuple[list[int], list[int]]:
    """Quotient and remainder of num / den over F_p (dense lists, low degree first)."""
    num = [c % p for c in num]
    den = [c % p for c in den]
    while den and den[-1] == 0:
        den.pop()
    if not den:
        raise ZeroDivisionError("division by zero polynomial")
    inv_lead = pow(den[-1], -1, p)
    quot = [0] * max(1, len(num) - len(den) + 1)
    rem = num[:]
    while len(rem) >= len(den) and any(rem):
        while rem and rem[-1] == 0:
            rem.pop()
        if len(rem) < len(den):
            break
        shift = len(rem) - len(den)
        factor = (rem[-1] * inv_lead) % p
        quot[shift] = factor
        for i, c in enumerate(den):
            rem[shift + i] = (rem[shift + i] - factor * c) % p
    while rem and rem[-1] == 0:
        rem.pop()
    return quot, rem


def _check_irreducible(p: int, phi: tuple[int, ...]) -> bool | None:
    """Trial division by every monic divisor of degree <= m/2.

    Returns True/False when the check ran, None when the search space was too
    big and the polynomial is accepted as trusted.
    """
    m = len(phi) - 1
    if m == 1:
        return True
    budget = sum(p**d for d in range(1, m // 2 + 1))
    if m > 8 or budget > _IRRED_CHECK_LIMIT:
        return None
    for d in range(1, m // 2 + 1):
        for idx in range(p**d):
            coeffs = []
            x = idx
            for _ in range(d):
                coeffs.append(x % p)
                x //= p
            coeffs.append(1)  # monic
            _, rem = _polydiv_mod(list(phi), coeffs, p)
            if not rem:
                return False
    return True


class Ring:
    """One of Z, Z_k (k >= 2, not necessarily prime) or F_{p^m}."""

    __slots__ = ("kind", "modulus", "p", "m", "phi", "trusted_irreducible", "_theta_pows")

    def __init__(self, kind, modulus=None, p=None, m=None, phi=None, trusted=None):
        self.kind = kind
        self.modulus = modulus
        self.p = p
        self.m = m
        self.phi = phi
        self.trusted_irreducible = trusted
        self._theta_pows = None

    @classmethod
    def integers(cls) -> "Ring":
        return cls(INT)

    @classmethod
    def mod(cls, k: int) -> "Ring":
        if k < 2:
            raise ValueError(f"modulus must be >= 2, got {k}")
        return cls(MOD, modulus=k)

    @classmethod
    def ext(cls, p: int, phi: Iterable[int]) -> "Ring":
        """F_{p^m} presented as F_p[theta]/(phi), phi monic of degree m (low degree first)."""
        phi = tuple(c % p for c in phi)
        m = len(phi) - 1
        if not _is_prime(p):
            raise ValueError(f"extension field characteristic must be prime, got {p}")
        if m < 1 or phi[-1] != 1:
            raise ValueError("phi must be monic of degree >= 1")
        verdict = _check_irreducible(p, phi)
        if verdict is False:
            raise ValueError("phi is reducible over F_p")
        return cls(EXT, p=p, m=m, phi=phi, trusted=(verdict is None))

    # -- element plumbing ---------------------------------------------------

    def normalize(self, c):
        if self.kind == INT:
            return int(c)
        if self.kind == MOD:
            return int(c) % self.modulus
        if isinstance(c, int):
            vec = [c % self.p] + [0] * (self.m - 1)
        else:
            vec = [int(x) % self.p for x in c]
            if len(vec) != self.m:
                raise RingMismatch(f"expected coefficient vector of length {self.m}")
        return tuple(vec)

    def zero(self):
        return self.normalize(0)

    def one(self):
        return self.normalize(1)

    def is_zero(self, c) -> bool:
        if self.kind == EXT:
            return all(x == 0 for x in c)
        return c == 0

    def add(self, a, b):
        if self.kind == INT:
            return a + b
        if self.kind == MOD:
            return (a + b) % self.modulus
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        if self.kind == INT:
            return -a
        if self.kind == MOD:
            return (-a) % self.modulus
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        if self.kind == INT:
            return a * b
        if self.kind == MOD:
            return (a * b) % self.modulus
        return self._ext_mul(a, b)

    def pow(self, a, e: int):
        result = self.one()
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def _theta_power(self, k: int) -> tuple[int, ...]:
        """Coordinates of theta^k in the power basis, reduced mod phi."""
        if self._theta_pows is None:
            self._theta_pows = {}
            for j in range(self.m):
                vec = [0] * self.m
                vec[j] = 1
                self._theta_pows[j] = tuple(vec)
        pows = self._theta_pows
        if k in pows:
            return pows[k]
        top = max(pows)
        while top < k:
            vec = [0] + list(pows[top])
            lead = vec[self.m]
            if lead:
                vec[self.m] = 0
                for j in range(self.m):
                    vec[j] = (vec[j] - lead * self.phi[j]) % self.p
            top += 1
            pows[top] = tuple(vec[: self.m])
        return pows[k]

    def _ext_mul(self, a, b):
        m, p = self.m, self.p
        conv = [0] * (2 * m - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                conv[i + j] += x * y
        out = [c % p for c in conv[:m]]
        for k in range(m, 2 * m - 1):
            c = conv[k] % p
            if c:
                red = self._theta_power(k)
                for j in range(m):
                    out[j] = (out[j] + c * red[j]) % p
        return tuple(out)

    # -- misc ----------------------------------------------------------------

    def order(self) -> int:
        if self.kind == MOD:
            return self.modulus
        if self.kind == EXT:
            return self.p**self.m
        raise RingMismatch("Z is not finite")

    def elements(self):
        """Iterate every element (finite rings only)."""
        if self.kind == MOD:
            yield from range(self.modulus)
            return
        if self.kind == EXT:
            for idx in range(self.p**self.m):
                vec, x = [], idx
                for _ in range(self.m):
                    vec.append(x % self.p)
                    x //= self.p
                yield tuple(vec)
            return
        raise RingMismatch("Z is not finite")

    def __eq__(self, other):
        return (
            isinstance(other, Ring)
            and self.kind == other.kind
            and self.modulus == other.modulus
            and self.p == other.p
            and self.phi == other.phi
        )

    def __hash__(self):
        return hash((self.kind, self.modulus, self.p, self.phi))

    def __repr__(self):
        if self.kind == INT:
            return "Ring(Z)"
        if self.kind == MOD:
            return f"Ring(Z_{self.modulus})"
        return f"Ring(F_{self.p}^{self.m})"

    def to_json(self) -> dict:
        if self.kind == INT:
            return {"kind": "int"}
        if self.kind == MOD:
            return {"kind": "mod", "k": self.modulus}
        return {"kind": "ext", "p": self.p, "m": self.m, "phi": list(self.phi)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Ring":
        kind = obj.get("kind")
        if kind == "int":
            return cls.integers()
        if kind == "mod":
            return cls.mod(int(obj["k"]))
        if kind == "ext":
            return cls.ext(int(obj["p"]), [int(c) for c in obj["phi"]])
        raise ParseError(f"unknown ring kind {kind!r}")


ZZ = Ring.integers()


def ext_reduce(ring: Ring, c, k: int) -> tuple[int, ...]:
    """Coordinates of c * theta^k in the power basis 1, theta, ..., theta^(m-1)."""
    if ring.kind != EXT:
        raise RingMismatch("ext_reduce needs an extension field ring")
    c = ring.normalize(c)
    if k == 0:
        return c
    return ring._ext_mul(c, ring._theta_power(k))


class Monomial:
    """Product of variable powers; exponents stored sorted by variable id."""

    __slots__ = ("exps",)

    def __init__(self, exps: Iterable[tuple[int, int]] = ()):
        cleaned = tuple(sorted((v, e) for v, e in exps if e != 0))
        for _, e in cleaned:
            if e < 0:
                raise ValueError("negative exponent")
        self.exps = cleaned

    @classmethod
    def var(cls, v: int, e: int = 1) -> "Monomial":
        return cls(((v, e),))

    def degree(self) -> int:
        return sum(e for _, e in self.exps)

    def degree_in(self, v: int) -> int:
        for var, e in self.exps:
            if var == v:
                return e
        return 0

    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.exps)

    def mul(self, other: "Monomial") -> "Monomial":
        merged = dict(self.exps)
        for v, e in other.exps:
            merged[v] = merged.get(v, 0) + e
        return Monomial(merged.items())

    def multilinear(self) -> "Monomial":
        return Monomial((v, 1) for v, _ in self.exps)

    def is_multilinear(self) -> bool:
        return all(e <= 1 for _, e in self.exps)

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.exps == other.exps

    def __lt__(self, other):
        return self.exps < other.exps

    def __hash__(self):
        return hash(self.exps)

    def __repr__(self):
        if not self.exps:
            return "1"
        return "*".join(f"x{v}" + (f"^{e}" if e > 1 else "") for v, e in self.exps)


_ONE = Monomial()


class SparsePoly:
    """Sparse multivariate polynomial in normal form over a declared ring."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[Monomial, object] | None = None):
        self.ring = ring
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = ring.normalize(c)
                if not ring.is_zero(c):
                    clean[mono] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, ring: Ring) -> "SparsePoly":
        return cls(ring)

    @classmethod
    def const(cls, ring: Ring, c) -> "SparsePoly":
        return cls(ring, {_ONE: c})

    @classmethod
    def var(cls, ring: Ring, v: int, e: int = 1, coeff=1) -> "SparsePoly":
        return cls(ring, {Monomial.var(v, e): coeff})

    @classmethod
    def from_pairs(cls, ring: Ring, pairs) -> "SparsePoly":
        acc = {}
        for mono, c in pairs:
            if mono in acc:
                acc[mono] = ring.add(acc[mono], ring.normalize(c))
            else:
                acc[mono] = ring.normalize(c)
        return cls(ring, acc)

    # -- queries ----------------------------------------------------------------

    def sparseness(self) -> int:
        """Number of stored terms (#f)."""
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((m.degree() for m in self.terms), default=0)

    def degree_in(self, v: int) -> int:
        return max((m.degree_in(v) for m in self.terms), default=0)

    def variables(self) -> set[int]:
        out = set()
        for m in self.terms:
            out.update(m.variables())
        return out

    def constant(self):
        return self.terms.get(_ONE, self.ring.zero())

    def is_multilinear(self) -> bool:
        return all(m.is_multilinear() for m in self.terms)

    def sorted_terms(self) -> list[tuple[Monomial, object]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].exps)

    # -- arithmetic ---------------------------------------------------------------

    def _need_same_ring(self, other: "SparsePoly"):
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring!r} vs {other.ring!r}")

    def add(self, other: "SparsePoly") -> "SparsePoly":
        self._need_same_ring(other)
        ring = self.ring
        out = dict(self.terms)
        for mono, c in other.terms.items():
            if mono in out:
                s = ring.add(out[mono], c)
                if ring.is_zero(s):
                    del out[mono]
                else:
                    out[mono] = s
            else:
                out[mono] = c
        return SparsePoly(ring, out)

    def neg(self) -> "SparsePoly":
        ring = self.ring
        return SparsePoly(ring, {m: ring.neg(c) for m, c in self.terms.items()})

    def sub(self, other: "SparsePoly") -> "SparsePoly":
        return self.add(other.neg())

    def scale(self, c) -> "SparsePoly":
        ring = self.ring
        c = ring.normalize(c)
        if ring.is_zero(c):
            return SparsePoly.zero(ring)
        return SparsePoly(ring, {m: ring.mul(k, c) for m, k in self.terms.items()})

    def mul(self, other: "SparsePoly") -> "SparsePoly":
        self._need_same_ring(other)
        ring = self.ring
        acc: dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = m1.mul(m2)
                c = ring.mul(c1, c2)
                if mono in acc:
                    acc[mono] = ring.add(acc[mono], c)
                else:
                    acc[mono] = c
        return SparsePoly(ring, acc)

    def pow(self, e: int) -> "SparsePoly":
        if e < 0:
            raise ValueError("negative power")
        result = SparsePoly.const(self.ring, 1)
        base = self
        while e:
            if e & 1:
                result = result.mul(base)
            base = base.mul(base)
            e >>= 1
        return result

    def substitute(self, mapping: Mapping[int, "SparsePoly"]) -> "SparsePoly":
        """Replace variables by polynomials over the same ring."""
        ring = self.ring
        out = SparsePoly.zero(ring)
        for mono, c in self.terms.items():
            piece = SparsePoly.const(ring, c)
            for v, e in mono.exps:
                rep = mapping.get(v)
                if rep is None:
                    piece = piece.mul(SparsePoly.var(ring, v, e))
                else:
                    if rep.ring != ring:
                        raise RingMismatch("substitution image in a different ring")
                    piece = piece.mul(rep.pow(e))
            out = out.add(piece)
        return out

    def multilinearize(self) -> "SparsePoly":
        """Cap every exponent at 1 (the Boolean relation x^2 = x)."""
        if self.is_multilinear():
            return self
        return SparsePoly.from_pairs(
            self.ring, ((m.multilinear(), c) for m, c in self.terms.items())
        )

    def evaluate(self, point: Mapping[int, object]):
        ring = self.ring
        total = ring.zero()
        for mono, c in self.terms.items():
            val = c
            for v, e in mono.exps:
                if v not in point:
                    raise KeyError(f"no value for variable {v}")
                val = ring.mul(val, ring.pow(ring.normalize(point[v]), e))
            total = ring.add(total, val)
        return total

    def map_ring(self, ring: Ring, convert) -> "SparsePoly":
        """Rebuild the polynomial over another ring, converting each coefficient."""
        return SparsePoly.from_pairs(ring, ((m, convert(c)) for m, c in self.terms.items()))

    # -- operators -------------------------------------------------------------------

    __add__ = add
    __sub__ = sub
    __mul__ = mul
    __neg__ = neg

    def __eq__(self, other):
        return (
            isinstance(other, SparsePoly)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{m!r}" for m, c in self.sorted_terms())


class VarTable:
    """Dense integer ids for named variables; ids are assigned in registration order."""

    def __init__(self):
        self.names: list[str] = []
        self.ids: dict[str, int] = {}

    def add(self, name: str) -> int:
        if name in self.ids:
            raise ValueError(f"variable {name!r} already registered")
        vid = len(self.names)
        self.names.append(name)
        self.ids[name] = vid
        return vid

    def get_or_add(self, name: str) -> int:
        return self.ids[name] if name in self.ids else self.add(name)

    def fresh(self, prefix: str) -> int:
        n = 0
        while f"{prefix}{n}" in self.ids:
            n += 1
        return self.add(f"{prefix}{n}")

    def name(self, vid: int) -> str:
        return self.names[vid]

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self.ids


# -- cyclic convolution ring ----------------------------------------------------


class CyclicElement:
    """Element of Z_k[X]/(X^N - 1), stored as the length-N residue vector."""

    __slots__ = ("modulus", "length", "coeffs")

    def __init__(self, modulus: int, coeffs: Iterable[int]):
        if modulus < 2:
            raise ValueError("modulus must be >= 2")
        self.modulus = modulus
        self.coeffs = tuple(int(c) % modulus for c in coeffs)
        self.length = len(self.coeffs)
        if self.length < 1:
            raise ValueError("need at least one coefficient")

    @classmethod
    def one(cls, modulus: int, length: int) -> "CyclicElement":
        return cls(modulus, [1] + [0] * (length - 1))

    def centered(self) -> list[int]:
        """Coefficients lifted into (-k/2, k/2]."""
        half = self.modulus // 2
        return [c - self.modulus if c > half else c for c in self.coeffs]

    def __eq__(self, other):
        return (
            isinstance(other, CyclicElement)
            and self.modulus == other.modulus
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.modulus, self.coeffs))

    def __repr__(self):
        return f"CyclicElement(mod {self.modulus}, {list(self.coeffs)})"


def cyclic_convolve(a: CyclicElement, b: CyclicElement) -> CyclicElement:
    """Product in Z_k[X]/(X^N - 1): coefficient i sums a_j*b_l over j+l = i mod N."""
    if a.modulus != b.modulus or a.length != b.length:
        raise ShapeMismatch("operands must share modulus and length")
    n, k = a.length, a.modulus
    out = [0] * n
    for j, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for l, y in enumerate(b.coeffs):
            if y == 0:
                continue
            idx = j + l
            if idx >= n:
                idx -= n
            out[idx] = (out[idx] + x * y) % k
    return CyclicElement(k, out)


def _poly_mod_ring(coeffs: list[int], n: int, k: int) -> list[int]:
    """Reduce a dense polynomial modulo (X^n - 1, k)."""
    out = [0] * n
    for i, c in enumerate(coeffs):
        out[i % n] = (out[i % n] + c) % k
    return out


def _ext_gcd_poly(a: list[int], b: list[int], p: int):
    """Extended Euclid over F_p[x]: returns (g, s, t) with s*a + t*b = g."""
    r0, r1 = [c % p for c in a], [c % p for c in b]
    s0, s1 = [1], [0]
    t0, t1 = [0], [1]

    def trim(v):
        while v and v[-1] == 0:
            v.pop()
        return v

    def sub_scaled(u, v, q):
        out = list(u) + [0] * max(0, len(v) + len(q) - 1 - len(u))
        for i, qc in enumerate(q):
            if qc == 0:
                continue
            for j, vc in enumerate(v):
                out[i + j] = (out[i + j] - qc * vc) % p
        return trim(out)

    r0, r1 = trim(r0), trim(r1)
    while r1:
        q, rem = _polydiv_mod(r0, r1, p)
        q = trim(q)
        r0, r1 = r1, trim(rem)
        s0, s1 = s1, sub_scaled(s0, s1, q)
        t0, t1 = t1, sub_scaled(t0, t1, q)
    return r0, s0, t0


def cyclic_invert(f: CyclicElement) -> CyclicElement:
    """Inverse of f in Z_k[X]/(X^N - 1) for k prime or k = 2^e.

    Prime k goes through extended Euclid against X^N - 1; powers of two invert
    mod 2 first and Hensel-lift e-1 times.
    """
    k, n = f.modulus, f.length
    if _is_prime(k):
        return _invert_prime(f, k, n)
    if k & (k - 1) == 0:
        return _invert_pow2(f, k, n)
    raise UnsupportedModulus(f"modulus {k} is neither prime nor a power of two")


def _invert_prime(f: CyclicElement, p: int, n: int) -> CyclicElement:
    modpoly = [-1 % p] + [0] * (n - 1) + [1]
    g, s, _ = _ext_gcd_poly(list(f.coeffs), modpoly, p)
    if len(g) != 1:
        raise NotInvertible(f"gcd with X^{n} - 1 has degree {len(g) - 1}")
    inv_c = pow(g[0], -1, p)
    inv = [(c * inv_c) % p for c in s]
    return CyclicElement(p, _poly_mod_ring(inv, n, p))


def _invert_pow2(f: CyclicElement, k: int, n: int) -> CyclicElement:
    e = k.bit_length() - 1
    f2 = CyclicElement(2, f.coeffs)
    try:
        g = _invert_prime(f2, 2, n)
    except NotInvertible:
        raise NotInvertible("not a unit modulo 2")
    cur = list(g.coeffs)
    fk = [c % k for c in f.coeffs]
    for _ in range(max(0, e - 1)):
        # g <- g*(2 - f*g) mod (X^n - 1, k); one step at full modulus per lift
        prod = [0] * n
        for i, x in enumerate(fk):
            if x == 0:
                continue
            for j, y in enumerate(cur):
                if y == 0:
                    continue
                idx = i + j
                if idx >= n:
                    idx -= n
                prod[idx] = (prod[idx] + x * y) % k
        corr = [(-c) % k for c in prod]
        corr[0] = (corr[0] + 2) % k
        nxt = [0] * n
        for i, x in enumerate(cur):
            if x == 0:
                continue
            for j, y in enumerate(corr):
                if y == 0:
                    continue
                idx = i + j
                if idx >= n:
                    idx -= n
                nxt[idx] = (nxt[idx] + x * y) % k
        cur = nxt
    out = CyclicElement(k, cur)
    if cyclic_convolve(CyclicElement(k, f.coeffs), out) != CyclicElement.one(k, n):
        raise NotInvertible("Hensel lift did not converge to an inverse")
    return out


# -- JSON ----------------------------------------------------------------------


def _coeff_to_json(ring: Ring, c):
    if ring.kind == EXT:
        return [str(x) for x in c]
    return str(c)


def _coeff_from_json(ring: Ring, obj):
    if ring.kind == EXT:
        if not isinstance(obj, list):
            raise ParseError("extension field coefficient must be a list of strings")
        return tuple(int(x) for x in obj)
    return int(obj)


def poly_to_json(poly: SparsePoly, names: Mapping[int, str] | VarTable) -> dict:
    """Serialize with named variables and decimal-string coefficients."""
    name_of = names.name if isinstance(names, VarTable) else names.__getitem__
    var_names = sorted({name_of(v) for v in poly.variables()})
    terms = []
    for mono, c in poly.sorted_terms():
        terms.append(
            {
                "m": {name_of(v): e for v, e in mono.exps},
                "c": _coeff_to_json(poly.ring, c),
            }
        )
    return {"ring": poly.ring.to_json(), "vars": var_names, "terms": terms}


def poly_from_json(obj: Mapping, table: VarTable, ring: Ring | None = None) -> SparsePoly:
    if ring is None:
        ring = Ring.from_json(obj["ring"])
    pairs = []
    for term in obj.get("terms", []):
        mono = Monomial((table.get_or_add(n), int(e)) for n, e in term.get("m", {}).items())
        pairs.append((mono, _coeff_from_json(ring, term["c"])))
    return SparsePoly.from_pairs(ring, pairs)


def dumps_canonical(obj) -> str:
    """Stable JSON text: sorted keys, no whitespace variance."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
