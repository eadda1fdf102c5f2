"""Finite fields and the polynomial ring A = F_q[theta].

Field elements are stored as integer codes: an element of an extension of
degree m over a base field B is the coefficient vector (c_0, ..., c_{m-1})
packed as sum(c_i * |B|**i).  With this packing the base field embeds as the
codes 0 .. |B|-1, so constants never need conversion.

Polynomials in A are immutable tuples of base-field codes, little-endian in
theta, with trailing zeros stripped.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Iterator, Sequence

TABLE_LIMIT = 1 << 16
ADD_TABLE_LIMIT = 1024


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class FiniteField:
    """F_p, or an extension of another FiniteField by a monic irreducible modulus.

    Use :meth:`prime` and :meth:`extension` rather than the constructor.
    """

    def __init__(self, p: int, base: "FiniteField | None", modulus: tuple[int, ...] | None):
        self.p = p
        self.base = base
        self.modulus = modulus
        if base is None:
            self.degree = 1
            self.order = p
            self.q = p
        else:
            self.degree = len(modulus) - 1
            self.q = base.order
            self.order = base.order ** self.degree
        self._exp: list[int] | None = None
        self._log: list[int] | None = None
        self._add: list[list[int]] | None = None
        if base is not None and self.order <= TABLE_LIMIT:
            self._build_tables()

    # -- construction -------------------------------------------------
    @classmethod
    def prime(cls, p: int) -> "FiniteField":
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        return _cached_prime(p)

    @classmethod
    def extension(cls, base: "FiniteField", modulus: "Poly | Sequence[int]") -> "FiniteField":
        coeffs = tuple(modulus.coeffs) if isinstance(modulus, Poly) else tuple(modulus)
        if not coeffs or coeffs[-1] != 1 or len(coeffs) < 2:
            raise ValueError("modulus must be monic of degree >= 1")
        if not Poly(base, coeffs).is_irreducible():
            raise ValueError("modulus is not irreducible")
        return cls(base.p, base, coeffs)

    def __repr__(self) -> str:
        if self.base is None:
            return f"GF({self.p})"
        return f"GF({self.order}; {self.base!r}[z]/({Poly(self.base, self.modulus)}))"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteField):
            return NotImplemented
        return (self.p, self.base, self.modulus) == (other.p, other.base, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.base, self.modulus))

    # -- code <-> vector ----------------------------------------------
    def to_vector(self, a: int) -> list[int]:
        q = self.q
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, q)
            out.append(r)
        return out

    def from_vector(self, vec: Sequence[int]) -> int:
        a = 0
        for c in reversed(vec):
            a = a * self.q + c
        return a

    # -- arithmetic on codes ------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.base is None:
            return (a + b) % self.p
        if self._add is not None:
            return self._add[a][b]
        if self.p == 2 and self.base.base is None:
            return a ^ b
        badd = self.base.add
        return self.from_vector([badd(x, y) for x, y in zip(self.to_vector(a), self.to_vector(b))])

    def neg(self, a: int) -> int:
        if self.base is None:
            return -a % self.p
        if self.p == 2:
            return a
        bneg = self.base.neg
        return self.from_vector([bneg(x) for x in self.to_vector(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.base is None:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            e = self._log[a] + self._log[b]
            n = self.order - 1
            return self._exp[e - n if e >= n else e]
        return self._poly_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("division by zero in finite field")
        if self.base is None:
            return pow(a, self.p - 2, self.p)
        if self._log is not None:
            return self._exp[(-self._log[a]) % (self.order - 1)]
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        if a == 0:
            return 1 if e == 0 else 0
        if self._log is not None:
            return self._exp[(self._log[a] * e) % (self.order - 1)]
        if self.base is None:
            return pow(a, e, self.p)
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def frobenius(self, a: int, times: int = 1) -> int:
        """z -> z^(q^times), q the order of the base field."""
        return self.pow(a, pow(self.q, times % max(self.degree, 1)))

    def elements(self) -> range:
        return range(self.order)

    def units(self) -> range:
        return range(1, self.order)

    def generator(self) -> int:
        """A primitive element (smallest code)."""
        if self._exp is not None:
            return self._exp[1]
        n = self.order - 1
        fac = _prime_factors(n)
        for g in range(1, self.order):
            if all(self.pow(g, n // f) != 1 for f in fac):
                return g
        raise ArithmeticError("no primitive element")  # pragma: no cover

    def log(self, a: int) -> int:
        if a == 0:
            raise ValueError("log of zero")
        if self._log is not None:
            return self._log[a]
        g = self.generator()
        x, k = 1, 0
        while x != a:
            x, k = self.mul(x, g), k + 1
        return k

    def embed_poly_root(self, f: "Poly") -> list[int]:
        """All roots in this field of a polynomial over the prime/base field."""
        return [z for z in self.elements() if f.eval_code(self, z) == 0]

    # -- table construction -------------------------------------------
    def _poly_mul(self, a: int, b: int) -> int:
        B = self.base
        x, y = self.to_vector(a), self.to_vector(b)
        prod = [0] * (2 * self.degree - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        prod[i + j] = B.add(prod[i + j], B.mul(xi, yj))
        m = self.modulus
        for k in range(len(prod) - 1, self.degree - 1, -1):
            c = prod[k]
            if c:
                for t in range(self.degree):
                    prod[k - self.degree + t] = B.sub(prod[k - self.degree + t], B.mul(c, m[t]))
                prod[k] = 0
        return self.from_vector(prod[: self.degree])

    def _build_tables(self) -> None:
        n = self.order - 1
        if self.order <= ADD_TABLE_LIMIT:
            self._add = None
            badd = self.base.add
            vecs = [self.to_vector(a) for a in range(self.order)]
            self._add = [[self.from_vector([badd(x, y) for x, y in zip(va, vb)]) for vb in vecs] for va in vecs]
        for g in range(1, self.order):
            exp = [1] * n
            for k in range(1, n):
                exp[k] = self._poly_mul(exp[k - 1], g)
            if len(set(exp)) == n:
                break
        else:  # pragma: no cover
            raise ArithmeticError("modulus does not define a field")
        log = [0] * self.order
        for k, z in enumerate(exp):
            log[z] = k
        self._exp, self._log = exp, log

    # -- public element wrapper ---------------------------------------
    def __call__(self, value: "int | Sequence[int]") -> "FieldElem":
        if isinstance(value, int):
            if not 0 <= value < self.order:
                raise ValueError(f"code {value} out of range for {self!r}")
            return FieldElem(self, value)
        return FieldElem(self, self.from_vector(list(value)))

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, 0)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, 1)


_PRIMES: dict[int, FiniteField] = {}


def _cached_prime(p: int) -> FiniteField:
    if p not in _PRIMES:
        _PRIMES[p] = FiniteField(p, None, None)
    return _PRIMES[p]


class FieldElem:
    """Immutable element of a FiniteField.  Mixing fields raises TypeError."""

    __slots__ = ("field", "code")

    def __init__(self, field: FiniteField, code: int):
        self.field = field
        self.code = code

    def _other(self, other: object) -> int:
        if isinstance(other, FieldElem):
            if other.field is not self.field and other.field != self.field:
                raise TypeError("elements of different finite fields")
            return other.code
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return FieldElem(self.field, self.field.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return FieldElem(self.field, self.field.sub(self.code, b))

    def __rsub__(self, other):
        b = self._other(other)
        return FieldElem(self.field, self.field.sub(b, self.code))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        b = self._other(other)
        return FieldElem(self.field, self.field.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return FieldElem(self.field, self.field.div(self.code, b))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.code, e))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.code))

    def frobenius(self, times: int = 1) -> "FieldElem":
        return FieldElem(self.field, self.field.frobenius(self.code, times))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.code == other % self.field.p
        if isinstance(other, FieldElem):
            return self.field == other.field and self.code == other.code
        return NotImplemented

    def __hash__(self):
        return hash((self.field.order, self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return f"FieldElem({self.field.to_vector(self.code)})"


# ----------------------------------------------------------------------
# polynomials over a finite field
# ----------------------------------------------------------------------


def _strip(c: Iterable[int]) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class Poly:
    """Element of F[theta]; coefficients are codes of ``field``, constant term first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FiniteField, coeffs: Iterable[int] = ()):
        self.field = field
        self.coeffs = _strip(coeffs)

    # -- constructors --------------------------------------------------
    @classmethod
    def const(cls, field: FiniteField, c: int) -> "Poly":
        return cls(field, (c % field.order,) if field.base is None else (c,))

    @classmethod
    def theta(cls, field: FiniteField) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def monomial(cls, field: FiniteField, k: int, c: int = 1) -> "Poly":
        return cls(field, [0] * k + [c])

    # -- basic properties ---------------------------------------------
    @property
    def deg(self) -> int:
        """Degree; -1 stands in for -infinity on the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly.const(self.field, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.order, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def _check(self, other) -> "Poly":
        if isinstance(other, int):
            return Poly.const(self.field, other)
        if not isinstance(other, Poly):
            return NotImplemented
        if other.field != self.field:
            raise TypeError("polynomials over different fields")
        return other

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        F, a, b = self.field, self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly(F, out)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return Poly(F, [F.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return Poly(self.field, mul_coeffs(self.field, self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def scale(self, c: int) -> "Poly":
        F = self.field
        return Poly(F, [F.mul(c, x) for x in self.coeffs])

    def __pow__(self, e: int) -> "Poly":
        r, b = Poly.const(self.field, 1), self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def __divmod__(self, other):
        other = self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        r = list(self.coeffs)
        db = other.deg
        if len(r) <= db:
            return Poly(F, ()), self
        inv_lc = F.inv(other.lc)
        b = other.coeffs
        quot = [0] * (len(r) - db)
        if F.base is None:
            p = F.p
            nz = [(t, bt) for t, bt in enumerate(b) if bt]
            for k in range(len(r) - 1, db - 1, -1):
                c = r[k]
                if c:
                    c = c * inv_lc % p
                    quot[k - db] = c
                    off = k - db
                    for t, bt in nz:
                        r[off + t] = (r[off + t] - c * bt) % p
            return Poly(F, quot), Poly(F, r[:db])
        for k in range(len(r) - 1, db - 1, -1):
            c = r[k]
            if c:
                c = F.mul(c, inv_lc)
                quot[k - db] = c
                off = k - db
                for t in range(db + 1):
                    if b[t]:
                        r[off + t] = F.sub(r[off + t], F.mul(c, b[t]))
        return Poly(F, quot), Poly(F, r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.lc))

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while b:
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other: "Poly") -> tuple["Poly", "Poly", "Poly"]:
        """Return (g, s, t) with s*self + t*other = g, g monic."""
        F = self.field
        r0, r1 = self, other
        s0, s1 = Poly.const(F, 1), Poly(F, ())
        t0, t1 = Poly(F, ()), Poly.const(F, 1)
        while r1:
            quo, rem = divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, s0 - quo * s1
            t0, t1 = t1, t0 - quo * t1
        if r0.is_zero():
            return r0, s0, t0
        c = F.inv(r0.lc)
        return r0.scale(c), s0.scale(c), t0.scale(c)

    def powmod(self, e: int, m: "Poly") -> "Poly":
        r, b = Poly.const(self.field, 1) % m, self % m
        while e:
            if e & 1:
                r = (r * b) % m
            b = (b * b) % m
            e >>= 1
        return r

    def valuation(self, f: "Poly") -> int:
        """ord_f of a nonzero polynomial."""
        if self.is_zero():
            raise ValueError("valuation of zero")
        n, g = 0, self
        while True:
            quo, rem = divmod(g, f)
            if rem:
                return n
            g, n = quo, n + 1

    # -- evaluation ---------------------------------------------------
    def eval_code(self, E: FiniteField, z: int) -> int:
        """Evaluate at the element with code z of E (E must contain this field's codes)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = E.add(E.mul(acc, z), c)
        return acc

    def __call__(self, z: FieldElem) -> FieldElem:
        return FieldElem(z.field, self.eval_code(z.field, z.code))

    # -- irreducibility -------------------------------------------------
    def is_irreducible(self) -> bool:
        """Distinct-degree test: gcd(f, theta^(q^j) - theta) = 1 for all j <= deg/2."""
        if self.deg < 1:
            raise ValueError("irreducibility test needs a non-constant polynomial")
        f = self.monic()
        if f.deg == 1:
            return True
        q = self.field.order
        t = Poly.theta(self.field)
        h = t % f
        for _ in range(1, f.deg // 2 + 1):
            h = h.powmod(q, f)
            if (h - t).gcd(f).deg > 0:
                return False
        return True

    # -- text forms ------------------------------------------------------
    def to_text(self) -> str:
        """Coefficient-list form ``c0,c1,...``; field codes for non-prime fields."""
        return ",".join(str(c) for c in self.coeffs) if self.coeffs else "0"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.deg, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mon = "" if k == 0 else ("theta" if k == 1 else f"theta^{k}")
            if not mon:
                terms.append(str(c))
            elif c == 1:
                terms.append(mon)
            else:
                terms.append(f"{c}*{mon}")
        return "+".join(terms)

    def __repr__(self) -> str:
        return f"Poly({self})"


def mul_coeffs(F: FiniteField, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Product of coefficient vectors.  Prime fields go through Kronecker packing."""
    if not a or not b:
        return ()
    if F.base is None:
        p = F.p
        bits = (min(len(a), len(b)) * (p - 1) ** 2).bit_length() + 1
        A = _pack(a, bits)
        B = _pack(b, bits)
        return _strip(c % p for c in _unpack(A * B, bits, len(a) + len(b) - 1))
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _strip(out)


def _pack(c: Sequence[int], bits: int) -> int:
    acc = 0
    for x in reversed(c):
        acc = (acc << bits) | x
    return acc


def _unpack(n: int, bits: int, count: int) -> list[int]:
    mask = (1 << bits) - 1
    out = []
    for _ in range(count):
        out.append(n & mask)
        n >>= bits
    return out


def enumerate_monic(F: FiniteField, i: int) -> list[Poly]:
    """All monic polynomials of degree i, constant term varying fastest."""
    if i < 0:
        raise ValueError("degree must be non-negative")
    return list(iter_monic(F, i))


def iter_monic(F: FiniteField, i: int) -> Iterator[Poly]:
    for tail in itertools.product(range(F.order), repeat=i):
        yield Poly(F, tuple(reversed(tail)) + (1,))


def monic_irreducibles(F: FiniteField, d: int) -> list[Poly]:
    return [f for f in iter_monic(F, d) if f.is_irreducible()]


def first_irreducible(F: FiniteField, d: int) -> Poly:
    for f in iter_monic(F, d):
        if f.is_irreducible():
            return f
    raise ArithmeticError("no irreducible polynomial found")  # pragma: no cover


_TERM = re.compile(r"^(?:(\d+)\*?)?(?:(theta|t|T|x)(?:\^(\d+))?)?$")


def parse_poly(F: FiniteField, text: str) -> Poly:
    """Parse ``c0,c1,...`` or a human form like ``theta^2+theta+1`` / ``theta-1``."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial text")
    if re.fullmatch(r"-?\d+(,-?\d+)*", s):
        return Poly(F, [int(c) % F.p if F.base is None else int(c) for c in s.split(",")])
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    s = s.replace("-", "+-")
    acc = Poly(F, ())
    for term in filter(None, s.split("+")):
        neg = term.startswith("-")
        term = term.lstrip("-")
        m = _TERM.match(term)
        if not m or term == "":
            raise ValueError(f"cannot parse polynomial term {term!r}")
        coef = int(m.group(1)) if m.group(1) else 1
        if m.group(2):
            k = int(m.group(3)) if m.group(3) else 1
        else:
            k = 0
            if m.group(1) is None:
                raise ValueError(f"cannot parse polynomial term {term!r}")
        c = coef % F.p
        if neg:
            c = -c % F.p
        acc = acc + Poly.monomial(F, k, c)
    return acc


class RatFunc:
    """Element f/g of k = F_q(theta), kept reduced with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: "Poly | None" = None):
        F = num.field
        if den is None:
            den = Poly.const(F, 1)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        g = num.gcd(den) if num else den.monic()
        num, den = num // g, den // g
        c = F.inv(den.lc)
        self.num, self.den = num.scale(c), den.scale(c)

    @property
    def field(self) -> FiniteField:
        return self.num.field

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (Poly, int)):
            return RatFunc(other if isinstance(other, Poly) else Poly.const(self.field, other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return RatFunc(self.num * o.den, self.den * o.num)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def degree(self) -> int | None:
        """deg f - deg g, so |x| = q^degree; None for zero."""
        return None if self.num.is_zero() else self.num.deg - self.den.deg

    def is_integral(self) -> bool:
        return self.den.deg == 0

    def frac_part(self) -> "RatFunc":
        """The representative of self mod A with |.| < 1."""
        return RatFunc(self.num % self.den, self.den)

    def floor(self) -> Poly:
        return self.num // self.den

    def __str__(self):
        if self.den.deg == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = lambda self: f"RatFunc({self})"


def parse_ratfunc(F: FiniteField, text: str) -> RatFunc:
    """Parse ``num/den`` where each side is a polynomial text form."""
    s = text.replace(" ", "")
    depth, cut = 0, -1
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            cut = i
    if cut < 0:
        return RatFunc(parse_poly(F, s))
    return RatFunc(parse_poly(F, s[:cut]), parse_poly(F, s[cut + 1:]))
