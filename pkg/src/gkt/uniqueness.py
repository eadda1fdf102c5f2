"""Step-function models for the classification of functions satisfying
Gross-Koblitz-type product identities.

Given a product space O of completions with digit shift phi, the forward
direction builds H = Gamma * G / G(-phi(-x)) and checks the orbit-product
identity on every periodic point; the backward direction recovers G from a
cocycle F (F = G / G o phi) as the limit of the explicit sequence G_n built from
the periodic points alpha_n(x), beta_n(x).

Continuous functions are modelled by locally constant tables (StepFn): the
value at x depends on the first ``level`` digits of each component.  Values
live in a discretely valued field K, stored exactly as t^val * unit with the
unit known modulo t^prec.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import prod
from typing import Callable, Iterable, Sequence

from .algebra import Poly, RatFunc
from .local.digits import (
    Component,
    Domain,
    LocalElem,
    ProdElem,
    _split_digits,
    _component_words,
    _word_value,
    point_from_words,
)


ORBIT_CAP = 10**6


class CocycleError(ValueError):
    """F fails the periodic-product condition at some periodic point."""


class ConvergenceError(ArithmeticError):
    """G_n did not settle before the iteration cap."""


# ----------------------------------------------------------------------
# the value field K
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ValuedField:
    """Q_p or k_v (fraction field of a rank-one component), relative precision ``prec``."""

    comp: Component
    prec: int = 40

    def __post_init__(self):
        if self.comp.e != 1 or not self.comp.canonical:
            raise ValueError("K is built on a canonical component with pi = uniformizer")

    @classmethod
    def parse(cls, text: str, prec: int = 40) -> "ValuedField":
        return cls(Component.parse(text), prec)

    @classmethod
    def of_domain(cls, domain: Domain, prec: int = 40) -> "ValuedField":
        c = domain.comps[0]
        base = Component.Zp(c.p) if c.kind == "Z" else Component.Av(c.F, c.v)
        return cls(base, prec)

    @property
    def t(self):
        return self.comp.pi

    @cached_property
    def modulus(self):
        return self.t**self.prec

    @property
    def cid(self) -> str:
        return self.comp.cid

    def _reduce(self, u):
        return u % self.modulus

    def ord_t(self, u) -> int:
        """Valuation of a nonzero integer / polynomial."""
        if self.comp.kind == "Z":
            k = 0
            while u % self.t == 0:
                u //= self.t
                k += 1
            return k
        return u.valuation(self.t)

    def _is_zero(self, u) -> bool:
        return u == 0 if self.comp.kind == "Z" else u.is_zero()

    def make(self, val: int, unit) -> "KElem":
        unit = self._reduce(unit)
        if self._is_zero(unit % self.t):
            raise ValueError("unit part is divisible by the uniformizer")
        return KElem(self, val, unit)

    def from_value(self, x) -> "KElem":
        """Nonzero integer or polynomial (or fraction) as an element of K."""
        if self.comp.kind == "Z":
            x = Fraction(x)
            if x == 0:
                raise ValueError("zero is not allowed")
            vn, vd = self.ord_t(x.numerator), self.ord_t(x.denominator)
            num, den = x.numerator // self.t**vn, x.denominator // self.t**vd
            return self.make(vn - vd, num * pow(den, -1, self.modulus))
        if not isinstance(x, RatFunc):
            x = RatFunc(x if isinstance(x, Poly) else Poly.const(self.comp.F, x))
        if x.num.is_zero():
            raise ValueError("zero is not allowed")
        vn, vd = x.num.valuation(self.t), x.den.valuation(self.t)
        num = x.num // self.t**vn
        den = x.den // self.t**vd
        return self.make(vn - vd, num * _poly_inv(den, self.modulus))

    def one(self) -> "KElem":
        return self.make(0, self.comp.one_value())

    def uniformizer(self) -> "KElem":
        return self.make(1, self.comp.one_value())

    def random(self, rng: random.Random, vmin: int = -2, vmax: int = 2) -> "KElem":
        val = rng.randint(vmin, vmax)
        if self.comp.kind == "Z":
            while True:
                u = rng.randrange(self.modulus)
                if u % self.t:
                    return KElem(self, val, u)
        F, n = self.comp.F, self.t.deg * self.prec
        while True:
            u = Poly(F, [rng.randrange(F.order) for _ in range(n)])
            if not (u % self.t).is_zero():
                return KElem(self, val, u)

    def unit_text(self, u) -> str:
        return str(u) if self.comp.kind == "Z" else "[" + u.to_text() + "]"

    def parse_unit(self, text: str):
        return self.comp.parse_digit(text)


def _poly_inv(u: Poly, m: Poly) -> Poly:
    g, s, _ = u.xgcd(m)
    if g.deg != 0:
        raise ZeroDivisionError("not invertible")
    return (s * Poly.const(u.field, u.field.inv(g.coeffs[0]))) % m


class KElem:
    """Nonzero t^val * unit in K."""

    __slots__ = ("K", "val", "unit")

    def __init__(self, K: ValuedField, val: int, unit):
        self.K, self.val, self.unit = K, val, unit

    def __mul__(self, other: "KElem") -> "KElem":
        return KElem(self.K, self.val + other.val, (self.unit * other.unit) % self.K.modulus)

    def inverse(self) -> "KElem":
        K = self.K
        if K.comp.kind == "Z":
            return KElem(K, -self.val, pow(self.unit, -1, K.modulus))
        return KElem(K, -self.val, _poly_inv(self.unit, K.modulus))

    def __truediv__(self, other: "KElem") -> "KElem":
        return self * other.inverse()

    def __pow__(self, e: int) -> "KElem":
        if e < 0:
            return self.inverse() ** (-e)
        K = self.K
        if K.comp.kind == "Z":
            return KElem(K, self.val * e, pow(self.unit, e, K.modulus))
        return KElem(K, self.val * e, self.unit.powmod(e, K.modulus) if e else K.comp.one_value())

    def __eq__(self, other) -> bool:
        return isinstance(other, KElem) and self.val == other.val and self.unit == other.unit

    def __hash__(self):
        return hash((self.val, self.unit))

    def is_one(self) -> bool:
        return self.val == 0 and self.unit == self.K.comp.one_value()

    def diff_valuation(self, other: "KElem") -> int:
        """ord_t(self - other), capped at the absolute precision min(val) + prec."""
        a, b = (self, other) if self.val <= other.val else (other, self)
        K = a.K
        k = b.val - a.val
        if k >= K.prec:
            return a.val
        s = (a.unit - b.unit * K.t**k) % K.modulus
        if K._is_zero(s):
            return a.val + K.prec
        return a.val + K.ord_t(s)

    def to_text(self) -> str:
        return f"{self.val}:{self.K.unit_text(self.unit)}"

    def __repr__(self) -> str:
        return f"KElem({self.to_text()})"


def kelem_parse(K: ValuedField, text: str) -> KElem:
    v, u = text.split(":", 1)
    return K.make(int(v), K.parse_unit(u))


def kprod(values: Iterable[KElem], K: ValuedField) -> KElem:
    acc = K.one()
    for x in values:
        acc = acc * x
    return acc


# ----------------------------------------------------------------------
# step functions
# ----------------------------------------------------------------------

Key = tuple  # one digit tuple per component


def truncate_key(key: Key, level: int) -> Key:
    return tuple(k[:level] for k in key)


@dataclass(frozen=True)
class StepFn:
    """Locally constant non-vanishing function O -> K given on O / pi^level."""

    domain: Domain
    level: int
    K: ValuedField
    table: dict = field(hash=False, compare=False)
    _dense: dict = field(default_factory=dict, hash=False, compare=False, repr=False, init=False)

    def __post_init__(self):
        expected = self.domain.residue_count(self.level)
        if len(self.table) != expected:
            raise ValueError(f"table has {len(self.table)} entries, expected {expected}")

    # -- constructors --------------------------------------------------------
    @classmethod
    def from_function(cls, domain: Domain, K: ValuedField, level: int, fn: Callable[[Key], KElem]) -> "StepFn":
        return cls(domain, level, K, {key: fn(key) for key in domain.residues(level)})

    @classmethod
    def constant(cls, domain: Domain, K: ValuedField, value: KElem | None = None) -> "StepFn":
        value = value or K.one()
        return cls.from_function(domain, K, 0, lambda _k: value)

    @classmethod
    def random(cls, domain: Domain, K: ValuedField, level: int, rng: random.Random,
               vmin: int = -2, vmax: int = 2) -> "StepFn":
        return cls.from_function(domain, K, level, lambda _k: K.random(rng, vmin, vmax))

    # -- evaluation ----------------------------------------------------------
    def at_key(self, key: Key) -> KElem:
        return self.table[truncate_key(key, self.level)]

    def __call__(self, x: ProdElem) -> KElem:
        return self.table[x.key(self.level)]

    def dense(self, level: int) -> list:
        """Values indexed by ``key_code`` at a level >= self.level."""
        hit = self._dense.get(level)
        if hit is None:
            hit = [None] * self.domain.residue_count(level)
            for k in self.domain.residues(level):
                hit[key_code(self.domain, k, level)] = self.at_key(k)
            self._dense[level] = hit
        return hit

    def lift(self, level: int) -> "StepFn":
        if level < self.level:
            raise ValueError("cannot lower the level of a step function")
        return StepFn.from_function(self.domain, self.K, level, self.at_key)

    # -- pointwise algebra ---------------------------------------------------
    def _combine(self, other: "StepFn", op) -> "StepFn":
        if other.domain != self.domain:
            raise ValueError("step functions on different domains")
        L = max(self.level, other.level)
        return StepFn.from_function(self.domain, self.K, L, lambda k: op(self.at_key(k), other.at_key(k)))

    def __mul__(self, other: "StepFn") -> "StepFn":
        return self._combine(other, lambda a, b: a * b)

    def __truediv__(self, other: "StepFn") -> "StepFn":
        return self._combine(other, lambda a, b: a / b)

    def compose_neg(self) -> "StepFn":
        """x -> self(-x)."""
        return StepFn.from_function(self.domain, self.K, self.level, lambda k: self.at_key(neg_key(self.domain, k)))

    def compose_phi(self) -> "StepFn":
        """x -> self(phi(x)), one level finer."""
        return StepFn.from_function(self.domain, self.K, self.level + 1, lambda k: self.at_key(tuple(d[1:] for d in k)))

    def compose_neg_phi_neg(self) -> "StepFn":
        """x -> self(-phi(-x)), one level finer."""
        D = self.domain

        def f(k):
            nk = neg_key(D, k)
            return self.at_key(neg_key(D, tuple(d[1:] for d in nk)))

        return StepFn.from_function(D, self.K, self.level + 1, f)

    def valuation_bounds(self) -> tuple[int, int]:
        vals = [x.val for x in self.table.values()]
        return min(vals), max(vals)

    def equals(self, other: "StepFn") -> bool:
        L = max(self.level, other.level)
        return all(self.at_key(k) == other.at_key(k) for k in self.domain.residues(L))

    # -- serialization -------------------------------------------------------
    def to_json(self) -> str:
        comps = self.domain.comps
        table = {
            key_text(comps, k): v.to_text() for k, v in sorted(self.table.items(), key=lambda kv: key_text(comps, kv[0]))
        }
        return json.dumps(
            {"domain": self.domain.cid, "level": self.level, "K": self.K.cid, "prec": self.K.prec, "table": table},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str, domain: Domain | None = None) -> "StepFn":
        obj = json.loads(text)
        domain = domain or Domain.parse(obj["domain"])
        K = ValuedField.parse(obj["K"], obj["prec"])
        table = {parse_key_text(domain, k): kelem_parse(K, v) for k, v in obj["table"].items()}
        return cls(domain, obj["level"], K, table)


def key_text(comps: Sequence[Component], key: Key) -> str:
    return "|".join(",".join(c.digit_text(d) for d in k) for c, k in zip(comps, key))


def parse_key_text(domain: Domain, text: str) -> Key:
    parts = text.split("|")
    return tuple(tuple(c.parse_digit(t) for t in _split_digits(p)) for c, p in zip(domain.comps, parts))


@lru_cache(maxsize=None)
def _neg_digits(comp: Component, digits: tuple) -> tuple:
    return (-LocalElem(comp, digits)).digits


def neg_key(domain: Domain, key: Key) -> Key:
    return tuple(_neg_digits(c, k) for c, k in zip(domain.comps, key))


# ----------------------------------------------------------------------
# forward direction
# ----------------------------------------------------------------------


def build_H(gamma: StepFn, G: StepFn) -> StepFn:
    """H(x) = Gamma(x) G(x) / G(-phi(-x))."""
    if gamma.domain != G.domain:
        raise ValueError("Gamma and G live on different domains")
    for f in (gamma, G):
        for v in f.table.values():
            if v is None:
                raise ValueError("vanishing table entry")
    return gamma * (G / G.compose_neg_phi_neg())


def _rot_window(word: tuple, j: int, L: int) -> tuple:
    n = len(word)
    return tuple(word[(j + k) % n] for k in range(L))


def _code(comp: Component, digits: tuple) -> int:
    """Mixed-radix index of a digit tuple."""
    ix = _digit_index(comp)
    return sum(ix[d] * comp.size**k for k, d in enumerate(digits))


def key_code(domain: Domain, key: Key, level: int) -> int:
    code, stride = 0, 1
    for c, k in zip(domain.comps, key):
        code += _code(c, k[:level]) * stride
        stride *= c.size**level
    return code


@lru_cache(maxsize=None)
def _component_orbit(comp: Component, word: tuple, level: int) -> tuple:
    """Codes at ``level`` of -phi^j(-x) and of <pi^j x> for one component, j < n.

    The second list comes from pi^j m mod (pi^n - 1), m the word value, so it
    is computed by arithmetic rather than by rotating the word.
    """
    n = len(word)
    shift = tuple(_code(comp, _neg_digits(comp, _rot_window(word, j, level))) for j in range(n))
    frac = None
    if comp.canonical:
        m = _word_value(comp, word)
        mod = comp.pi**n - 1
        # <pi^j x> = m_j / (pi^n - 1) = -(digits of m_j, repeated)
        frac = tuple(
            _code(comp, _neg_digits(comp, _rot_window(comp.expand((m * comp.pi**j) % mod, n), 0, level)))
            for j in range(n)
        )
    return shift, frac


@dataclass(frozen=True)
class OrbitClass:
    """Periodic points sharing one orbit (rotations of a single word tuple)."""

    members: tuple  # word tuples
    shift: tuple  # codes of -phi^j(-x) for the first member
    frac: tuple | None  # codes of <pi^j x>, canonical digits only


@lru_cache(maxsize=64)
def orbit_classes(domain: Domain, n: int, level: int) -> tuple[OrbitClass, ...]:
    """Periodic points of period n grouped by orbit, with orbit codes at ``level``."""
    restrict = domain.canonical
    per = [_component_words(c, n, restrict) for c in domain.comps]
    if prod(len(w) for w in per) > ORBIT_CAP:
        raise ValueError(f"periodic point enumeration exceeds cap {ORBIT_CAP}")
    idx = [_digit_index(c) for c in domain.comps]
    groups: dict = {}
    for words in itertools.product(*per):
        cols = tuple(zip(*(tuple(ix[d] for d in w) for ix, w in zip(idx, words))))
        rep = min(cols[j:] + cols[:j] for j in range(n))
        groups.setdefault(rep, []).append(words)
    strides, st = [], 1
    for c in domain.comps:
        strides.append(st)
        st *= c.size**level
    out = []
    for members in groups.values():
        orbs = [_component_orbit(c, w, level) for c, w in zip(domain.comps, members[0])]
        shift = tuple(sum(o[0][j] * s for o, s in zip(orbs, strides)) for j in range(n))
        frac = tuple(sum(o[1][j] * s for o, s in zip(orbs, strides)) for j in range(n)) if restrict else None
        out.append(OrbitClass(tuple(members), shift, frac))
    return tuple(out)


@dataclass(frozen=True)
class PointCheck:
    words: tuple
    lhs: KElem  # prod Gamma over the orbit
    rhs: KElem  # prod H over the orbit
    passed: bool
    forms_agree: bool  # the <pi^j x> and -phi^j(-x) products coincide (True when not applicable)

    def x(self, domain: Domain) -> tuple:
        return point_from_words(domain, self.words).x


@dataclass(frozen=True)
class ProductIdentityReport:
    n: int
    points: tuple[PointCheck, ...]

    @property
    def passed(self) -> bool:
        return all(p.passed and p.forms_agree for p in self.points)

    @property
    def failures(self) -> list[PointCheck]:
        return [p for p in self.points if not (p.passed and p.forms_agree)]

    def summary(self) -> dict:
        return {"n": self.n, "points": len(self.points), "failures": len(self.failures), "pass": self.passed}


def check_product_identity(H: StepFn, gamma: StepFn, n: int) -> ProductIdentityReport:
    """Compare prod Gamma and prod H over the orbit of every periodic point of period n.

    Rotations of one periodic point share an orbit, so products are formed
    once per orbit and reported for every member.
    """
    D, K = H.domain, H.K
    L = max(H.level, gamma.level)
    tg, th = gamma.dense(L), H.dense(L)
    points = []
    for cls in orbit_classes(D, n, L):
        lhs = kprod((tg[c] for c in cls.shift), K)
        rhs = kprod((th[c] for c in cls.shift), K)
        agree = True
        if cls.frac is not None:
            agree = kprod((tg[c] for c in cls.frac), K) == lhs and kprod((th[c] for c in cls.frac), K) == rhs
        ok = lhs == rhs
        points.extend(PointCheck(w, lhs, rhs, ok, agree) for w in cls.members)
    return ProductIdentityReport(n, tuple(points))


# ----------------------------------------------------------------------
# alpha_n, beta_n and the sequences A_n, B_n, G_n
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ProofParams:
    b: tuple  # one digit per component

    @classmethod
    def default(cls, domain: Domain) -> "ProofParams":
        return cls(tuple(c.zero_value() if c.zero_value() in c._digit_lookup else c.digit_set[0] for c in domain.comps))

    def validate(self, domain: Domain) -> None:
        if len(self.b) != len(domain.comps):
            raise ValueError("one b digit per component is required")
        for c, bt in zip(domain.comps, self.b):
            if bt not in c._digit_lookup:
                raise ValueError(f"b = {bt!r} is not a digit of {c.cid}")
            if c.canonical and c.kind == "Z" and not 0 <= bt < c.pi - 1:
                raise ValueError("need 0 <= b_t < pi_t - 1")
            # polynomial digits automatically satisfy deg b_t < deg pi_t


def alpha_word(x: ProdElem, n: int, params: ProofParams) -> tuple:
    """Period-(2n-1) digit words of alpha_n(x): b^(n-1) then x_0..x_{n-1}."""
    if x.prec < n:
        raise ValueError(f"alpha_{n} needs {n} digits of x")
    return tuple((bt,) * (n - 1) + e.digits[:n] for bt, e in zip(params.b, x.parts))


def beta_word(x: ProdElem, n: int, params: ProofParams) -> tuple:
    """Period-(2n-2) digit words of beta_n(x): b^(n-1) then x_0..x_{n-2}."""
    if n < 2:
        raise ValueError("beta_n is defined for n >= 2")
    if x.prec < n - 1:
        raise ValueError(f"beta_{n} needs {n - 1} digits of x")
    return tuple((bt,) * (n - 1) + e.digits[: n - 1] for bt, e in zip(params.b, x.parts))


def word_elem(domain: Domain, words: tuple, N: int) -> ProdElem:
    return ProdElem(tuple(LocalElem(c, _rot_window(w, 0, N)) for c, w in zip(domain.comps, words)))


def _value_formula(domain: Domain, x: ProdElem, n: int, params: ProofParams, period: int, count: int, N: int) -> ProdElem:
    parts = []
    for c, bt, e in zip(domain.comps, params.b, x.parts):
        pi = c.pi
        num = c.zero_value()
        for i in range(n - 1):
            num = num + bt * pi**i
        tail = c.zero_value()
        for i in range(count):
            tail = tail + e.digits[i] * pi**i
        num = num + pi ** (n - 1) * tail
        den = c.one_value() - pi**period
        frac = Fraction(num, den) if c.kind == "Z" else RatFunc(num, den)
        parts.append(c.digits_of(frac, N))
    return ProdElem(tuple(parts))


def alpha_n(x: ProdElem, n: int, params: ProofParams, N: int | None = None) -> ProdElem:
    """alpha_n(x) from its defining quotient, to precision N (default 2(2n-1))."""
    N = N or 2 * (2 * n - 1)
    return _value_formula(x.domain, x, n, params, 2 * n - 1, n, N)


def beta_n(x: ProdElem, n: int, params: ProofParams, N: int | None = None) -> ProdElem:
    if n < 2:
        raise ValueError("beta_n is defined for n >= 2")
    N = N or 2 * (2 * n - 2)
    return _value_formula(x.domain, x, n, params, 2 * n - 2, n - 1, N)


def _shift_word_value(F: StepFn, words: tuple, i: int) -> KElem:
    """F(phi^i(w)) for the purely periodic point with digit words w."""
    return F.at_key(tuple(_rot_window(w, i, F.level) for w in words))


def g_level(n: int, level: int) -> int:
    """Number of x-digits G_n reads for a level-``level`` F.

    Windows phi^i(beta_n(x)), i <= n-2, wrap around the period only when
    level > n; otherwise they stop at x_{level-2}.
    """
    if n < 2:
        return 0
    return n - 1 if level > n else max(level - 1, 0)


def G_n(F: StepFn, x: ProdElem, n: int, params: ProofParams) -> KElem:
    """[prod_{i=0}^{n-2} F(phi^i(beta_n(x)))]^-1; G_1 = 1."""
    if n < 2:
        return F.K.one()
    words = _lazy_beta_words(x, n, params, F.level)
    return kprod((_shift_word_value(F, words, i) for i in range(n - 1)), F.K).inverse()


def _lazy_beta_words(x: ProdElem, n: int, params: ProofParams, level: int) -> tuple:
    """beta_n words with the x-digits no F-window reads replaced by b."""
    need = g_level(n, level)
    if x.prec < need:
        raise ValueError(f"G_{n} needs {need} digits of x")
    return tuple(
        (bt,) * (n - 1) + tuple(e.digits[:need]) + (bt,) * (n - 1 - need) for bt, e in zip(params.b, x.parts)
    )


def A_n_B_n(F: StepFn, x: ProdElem, n: int, params: ProofParams) -> tuple[KElem, KElem]:
    if n < 2:
        raise ValueError("A_n, B_n are defined for n >= 2")
    K = F.K
    aw, bw = alpha_word(x, n, params), beta_word(x, n, params)
    bpw = beta_word(x.phi(), n, params)
    A = kprod((_shift_word_value(F, bw, i) for i in range(n - 1)), K) / kprod(
        (_shift_word_value(F, aw, i) for i in range(n - 1)), K
    )
    B = kprod((_shift_word_value(F, bpw, i) for i in range(n - 1, 2 * n - 2)), K) / kprod(
        (_shift_word_value(F, aw, i) for i in range(n, 2 * n - 1)), K
    )
    return A, B


def G_n_exact(F: StepFn, x: ProdElem, n: int, params: ProofParams) -> KElem:
    """G_n straight from the beta_n word (needs n-1 digits of x)."""
    if n < 2:
        return F.K.one()
    words = beta_word(x, n, params)
    return kprod((_shift_word_value(F, words, i) for i in range(n - 1)), F.K).inverse()


@dataclass(frozen=True)
class FABGCheck:
    lhs: KElem
    rhs: KElem
    A: KElem
    B: KElem

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def check_fabg(F: StepFn, x: ProdElem, n: int, params: ProofParams) -> FABGCheck:
    """F(phi^(n-1)(alpha_n(x))) against A_n(x) B_n(x) G_n(x) / G_n(phi(x))."""
    aw = alpha_word(x, n, params)
    lhs = _shift_word_value(F, aw, n - 1)
    A, B = A_n_B_n(F, x, n, params)
    rhs = A * B * G_n_exact(F, x, n, params) / G_n_exact(F, x.phi(), n, params)
    return FABGCheck(lhs, rhs, A, B)


# ----------------------------------------------------------------------
# backward direction
# ----------------------------------------------------------------------


def _phi_words(comp: Component, n: int, restrict: bool) -> list[tuple]:
    words = list(itertools.product(comp.digit_set, repeat=n))
    if restrict and comp.kind == "Z" and comp.canonical:
        top = comp.pi - 1
        # all digits pi-1 is x = -1, outside |x| < 1
        words = [w for w in words if any(d != top for d in w)]
    return words


def _is_necklace_rep(domain: Domain, words: tuple) -> bool:
    n = len(words[0])
    idx = [_digit_index(c) for c in domain.comps]
    cols = tuple(zip(*(tuple(ix[d] for d in w) for ix, w in zip(idx, words))))
    return all(cols <= cols[j:] + cols[:j] for j in range(1, n))


@lru_cache(maxsize=None)
def _digit_index(comp: Component) -> dict:
    return {d: i for i, d in enumerate(comp.digit_set)}


@dataclass(frozen=True)
class CocycleScan:
    max_period: int
    checked: int  # number of rotation classes examined
    truncated: bool  # True when the enumeration cap cut the scan short


def scan_cocycle(F: StepFn, max_period: int | None = None, cap: int = 200_000) -> CocycleScan:
    """Check prod_{j<n} F(phi^j x) = 1 on periodic points of phi, n = 1 .. max_period.

    Raises CocycleError naming the first violating point.
    """
    D, K = F.domain, F.K
    max_period = max_period or F.level + 2
    checked, truncated = 0, False
    for n in range(1, max_period + 1):
        per = [_phi_words(c, n, True) for c in D.comps]
        if prod(len(w) for w in per) > cap:
            truncated = True
            break
        for words in itertools.product(*per):
            if not _is_necklace_rep(D, words):
                continue
            checked += 1
            val = kprod((_shift_word_value(F, words, j) for j in range(n)), K)
            if not val.is_one():
                x = _phi_point(D, words)
                raise CocycleError(f"periodic product is {val.to_text()} != 1 at x = {x} (period {n})")
    return CocycleScan(max_period, checked, truncated)


def _phi_point(domain: Domain, words: tuple) -> tuple:
    """x with purely periodic digits w: x = W / (1 - pi^n)."""
    pt = point_from_words(domain, words)
    return tuple(-xt for xt in pt.x)


@dataclass(frozen=True)
class Recovery:
    G: StepFn
    n_final: int
    trace: tuple  # (n, min over x of ord(G_n - G_{n+1}))
    residual: int  # min over x of ord(F(x) G(phi x) - G(x)), capped at working precision
    scan: CocycleScan

    def to_dict(self) -> dict:
        return {
            "level": self.G.level,
            "n_final": self.n_final,
            "trace": [list(t) for t in self.trace],
            "residual_valuation": self.residual,
            "scan": {"max_period": self.scan.max_period, "classes": self.scan.checked, "truncated": self.scan.truncated},
        }


def _G_table(F: StepFn, n: int, params: ProofParams, level: int) -> StepFn:
    D = F.domain
    return StepFn.from_function(D, F.K, level, lambda k: G_n(F, D.elem_from_key(k), n, params))


def _table_diff(a: StepFn, b: StepFn) -> int:
    L = max(a.level, b.level)
    return min(a.at_key(k).diff_valuation(b.at_key(k)) for k in a.domain.residues(L))


def functional_residual(F: StepFn, G: StepFn, shift: str = "phi", sample: int | None = None,
                        rng: random.Random | None = None) -> int:
    """min ord(F(x) G(s(x)) - G(x)) with s = phi or x -> -phi(-x)."""
    Gs = G.compose_phi() if shift == "phi" else G.compose_neg_phi_neg()
    L = max(F.level, Gs.level)
    keys = list(F.domain.residues(L))
    if sample is not None and len(keys) > sample:
        keys = (rng or random.Random(0)).sample(keys, sample)
    return min((F.at_key(k) * Gs.at_key(k)).diff_valuation(G.at_key(k)) for k in keys)


def recover_G(F: StepFn, r: int = 12, params: ProofParams | None = None, max_period: int | None = None) -> Recovery:
    """G with F = G / G o phi, as the limit of G_n (plus-sign form)."""
    D = F.domain
    params = params or ProofParams.default(D)
    params.validate(D)
    scan = scan_cocycle(F, max_period)
    fixed = F.at_key(tuple((bt,) * F.level for bt in params.b))
    if not fixed.is_one():
        raise CocycleError(f"F(b/(1-pi)) = {fixed.to_text()} != 1")
    m = F.level
    level = max(m - 1, 0)
    cap = m + r + 8
    trace = []
    prev = _G_table(F, 2, params, g_level(2, m))
    for n in range(2, cap + 1):
        nxt = _G_table(F, n + 1, params, g_level(n + 1, m))
        diff = _table_diff(prev, nxt)
        trace.append((n, diff))
        lo, _ = nxt.valuation_bounds()
        if diff >= r + max(0, -lo):
            G = nxt.lift(level) if nxt.level < level else nxt
            res = functional_residual(F, G, "phi")
            return Recovery(G, n + 1, tuple(trace), res, scan)
        prev = nxt
    raise ConvergenceError(f"G_n did not settle by n = {cap}; trace {trace}")


def recover_G_minus(F: StepFn, r: int = 12, params: ProofParams | None = None,
                    max_period: int | None = None) -> Recovery:
    """G with F(x) = G(x) / G(-phi(-x)), via F~(x) = F(-x) and G(x) = G~(-x)."""
    rec = recover_G(F.compose_neg(), r, params, max_period)
    G = rec.G.compose_neg()
    res = functional_residual(F, G, "neg")
    return Recovery(G, rec.n_final, rec.trace, res, rec.scan)


def coboundary(G0: StepFn, shift: str = "phi") -> StepFn:
    """F = G0 / G0 o s for s = phi or x -> -phi(-x)."""
    return G0 / (G0.compose_phi() if shift == "phi" else G0.compose_neg_phi_neg())


def perturb(F: StepFn, key: Key | None = None) -> StepFn:
    """Multiply F by the uniformizer of K on one residue class."""
    key = key if key is not None else next(iter(sorted(F.table, key=repr)))
    table = dict(F.table)
    table[key] = table[key] * F.K.uniformizer()
    return StepFn(F.domain, F.level, F.K, table)


def classify_H(H: StepFn, gamma: StepFn, r: int = 12, params: ProofParams | None = None) -> Recovery:
    """For H satisfying the product identity, recover G with H = Gamma G / G(-phi(-x))."""
    return recover_G_minus(H / gamma, r, params)
