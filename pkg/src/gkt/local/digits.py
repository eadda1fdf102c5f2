"""Digit expansions in completions Z_p and A_v, products of them, and the shift phi.

A component is Z_p with pi = p^e or A_v with pi = v^e, together with a digit
set: either the canonical one ({0..pi-1}, or polynomials of degree < deg pi)
or any complete, duplicate-free set of representatives of O/pi.  Elements
are digit vectors known to absolute precision N, i.e. modulo pi^N.

Negation and ring operations go through the value x mod pi^N and re-expand;
digits are never negated termwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import prod
from typing import Iterable, Iterator, Sequence, Union

from ..algebra import FiniteField, Poly, RatFunc, parse_poly

Digit = Union[int, Poly]
FracVal = Union[Fraction, RatFunc]

DEFAULT_CAP = 10**6


class PrecisionExhausted(ArithmeticError):
    pass


class NotIntegral(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Component:
    """One factor O_t of the product space, with pi_t and a digit set S_t."""

    kind: str  # "Z" or "A"
    p: int = 0
    F: FiniteField | None = None
    v: Poly | None = None
    e: int = 1
    custom_digits: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("Z", "A"):
            raise ValueError("component kind must be 'Z' or 'A'")
        if self.e < 1:
            raise ValueError("uniformizer exponent must be >= 1")
        if self.kind == "A":
            if self.v is None or not self.v.is_monic() or not self.v.is_irreducible():
                raise ValueError("A-component needs a monic irreducible v")
        if self.custom_digits is not None:
            self._validate_digits(self.custom_digits)

    # -- constructors ---------------------------------------------------
    @classmethod
    def Zp(cls, p: int, e: int = 1, digits: Sequence[int] | None = None) -> "Component":
        FiniteField.prime(p)
        return cls("Z", p=p, e=e, custom_digits=tuple(digits) if digits is not None else None)

    @classmethod
    def Av(cls, F: FiniteField, v: Poly, e: int = 1, digits: Sequence[Poly] | None = None) -> "Component":
        return cls("A", p=F.p, F=F, v=v, e=e, custom_digits=tuple(digits) if digits is not None else None)

    @classmethod
    def parse(cls, text: str) -> "Component":
        """``Zp:<p>[:e]`` or ``Av:<q>:<v>[:e]``, optionally followed by ``:S=d1|d2|...``."""
        parts = text.strip().split(":")
        digits_txt = None
        if parts[-1].startswith("S="):
            digits_txt = parts.pop()[2:].split("|")
        if parts[0] == "Zp":
            p = int(parts[1])
            e = int(parts[2]) if len(parts) > 2 else 1
            return cls.Zp(p, e, [int(t) for t in digits_txt] if digits_txt else None)
        if parts[0] == "Av":
            F = FiniteField.prime(int(parts[1]))
            v = parse_poly(F, parts[2])
            e = int(parts[3]) if len(parts) > 3 else 1
            return cls.Av(F, v, e, [parse_poly(F, t) for t in digits_txt] if digits_txt else None)
        raise ValueError(f"unknown component descriptor {text!r}")

    @property
    def cid(self) -> str:
        if self.kind == "Z":
            s = f"Zp:{self.p}" + (f":{self.e}" if self.e != 1 else "")
        else:
            s = f"Av:{self.F.order}:{self.v}" + (f":{self.e}" if self.e != 1 else "")
        if self.custom_digits is not None:
            s += ":S=" + "|".join(str(d) for d in self.custom_digits)
        return s

    def __repr__(self) -> str:
        return f"Component({self.cid})"

    def __eq__(self, other):
        return isinstance(other, Component) and self.cid == other.cid

    def __hash__(self):
        return hash(self.cid)

    # -- uniformizer and digits ----------------------------------------
    @cached_property
    def pi(self) -> Digit:
        return self.p**self.e if self.kind == "Z" else self.v**self.e

    @cached_property
    def size(self) -> int:
        """|O/pi|, the number of digits."""
        return self.pi if self.kind == "Z" else self.F.order ** self.pi.deg

    @property
    def canonical(self) -> bool:
        return self.custom_digits is None

    @cached_property
    def digit_set(self) -> tuple:
        if self.custom_digits is not None:
            return self.custom_digits
        if self.kind == "Z":
            return tuple(range(self.pi))
        n = self.pi.deg
        return tuple(Poly(self.F, tuple(reversed(t))) for t in itertools.product(range(self.F.order), repeat=n))

    def _validate_digits(self, digits: tuple) -> None:
        if len(digits) != self.size:
            raise ValueError(f"digit set must have {self.size} elements, got {len(digits)}")
        residues = {self.reduce(d, 1) for d in digits}
        if len(residues) != self.size:
            raise ValueError("digit set is not a complete set of representatives")

    @cached_property
    def _digit_lookup(self) -> frozenset:
        return frozenset(self.digit_set)

    @cached_property
    def _digit_for_residue(self) -> dict:
        return {self.reduce(d, 1): d for d in self.digit_set}

    # -- values modulo pi^N ----------------------------------------------
    def modulus(self, N: int) -> Digit:
        return _pi_power(self, N)

    def reduce(self, x: Digit, N: int) -> Digit:
        if self.kind == "Z":
            return x % _pi_power(self, N)
        if N == 0:
            return Poly(self.F, ())
        return x % _pi_power(self, N)

    def zero_value(self) -> Digit:
        return 0 if self.kind == "Z" else Poly(self.F, ())

    def one_value(self) -> Digit:
        return 1 if self.kind == "Z" else Poly.const(self.F, 1)

    def to_value(self, x) -> Digit:
        if self.kind == "Z":
            return int(x)
        if isinstance(x, int):
            return Poly.const(self.F, x)
        return x

    def expand(self, value: Digit, N: int) -> tuple:
        """Digits of value mod pi^N in this component's digit set."""
        pi = self.pi
        x = self.reduce(value, N)
        out = []
        for k in range(N, 0, -1):
            d = self._digit_for_residue[self.reduce(x, 1)]
            out.append(d)
            x = self.reduce((x - d) // pi, k - 1)
        return tuple(out)

    def value_of(self, digits: Sequence[Digit]) -> Digit:
        acc = self.zero_value()
        for d in reversed(digits):
            acc = acc * self.pi + d
        return self.reduce(acc, len(digits))

    def frac_value(self, x: FracVal, N: int) -> Digit:
        """Image of a fraction in O/pi^N; denominator must be a unit."""
        if self.kind == "Z":
            x = Fraction(x)
            num, den = x.numerator, x.denominator
            if den % self.p == 0:
                raise NotIntegral("not integral at the place")
            M = _pi_power(self, N)
            return num * pow(den, -1, M) % M if M > 1 else 0
        if not isinstance(x, RatFunc):
            x = RatFunc(x if isinstance(x, Poly) else Poly.const(self.F, x))
        if (x.den % self.v).is_zero():
            raise NotIntegral("not integral at the place")
        if N == 0:
            return Poly(self.F, ())
        M = _pi_power(self, N)
        g, s, _ = x.den.xgcd(M)
        return (x.num * s) % M

    def digits_of(self, x: FracVal, N: int) -> "LocalElem":
        return LocalElem(self, self.expand(self.frac_value(x, N), N))

    # -- fractions in the fraction field ----------------------------------
    def frac_part(self, x: FracVal) -> FracVal:
        if self.kind == "Z":
            x = Fraction(x)
            return x - (x.numerator // x.denominator)
        if not isinstance(x, RatFunc):
            x = RatFunc(x if isinstance(x, Poly) else Poly.const(self.F, x))
        return x.frac_part()

    def as_frac(self, x) -> FracVal:
        if self.kind == "Z":
            return Fraction(x)
        if isinstance(x, RatFunc):
            return x
        return RatFunc(x if isinstance(x, Poly) else Poly.const(self.F, x))

    def digit_text(self, d: Digit) -> str:
        return str(d) if self.kind == "Z" else "[" + d.to_text() + "]"

    def parse_digit(self, text: str) -> Digit:
        text = text.strip()
        if self.kind == "Z":
            return int(text)
        return parse_poly(self.F, text.strip("[]"))


@lru_cache(maxsize=4096)
def _pi_power(comp: Component, N: int) -> Digit:
    return comp.pi**N


# ----------------------------------------------------------------------
# elements
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class LocalElem:
    comp: Component
    digits: tuple

    def __post_init__(self):
        allowed = self.comp._digit_lookup
        for d in self.digits:
            if d not in allowed:
                raise ValueError(f"digit {d!r} not in the digit set of {self.comp.cid}")

    @property
    def prec(self) -> int:
        return len(self.digits)

    @classmethod
    def from_value(cls, comp: Component, value: Digit, N: int) -> "LocalElem":
        return cls(comp, comp.expand(value, N))

    def value(self) -> Digit:
        return self.comp.value_of(self.digits)

    def _binary(self, other: "LocalElem", op) -> "LocalElem":
        if other.comp != self.comp:
            raise TypeError("elements of different components")
        N = min(self.prec, other.prec)
        return LocalElem.from_value(self.comp, op(self.value(), other.value()), N)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def __neg__(self):
        return LocalElem.from_value(self.comp, -self.value(), self.prec)

    def phi(self) -> "LocalElem":
        if self.prec == 0:
            raise PrecisionExhausted("precision exhausted")
        return LocalElem(self.comp, self.digits[1:])

    def neg_phi_neg(self) -> "LocalElem":
        return -((-self).phi())

    def truncate(self, N: int) -> "LocalElem":
        if N > self.prec:
            raise PrecisionExhausted(f"cannot raise precision {self.prec} -> {N}")
        return LocalElem(self.comp, self.digits[:N])

    def is_unit(self) -> bool:
        if self.prec == 0:
            raise PrecisionExhausted("precision exhausted: unit-ness undecidable")
        return self.comp.reduce(self.digits[0], 1) != self.comp.zero_value()

    def congruent(self, other: "LocalElem", n: int) -> bool:
        return self.comp.reduce(self.value() - other.value(), n) == self.comp.zero_value()

    def to_text(self) -> str:
        c = self.comp
        return f"{c.cid} : {','.join(c.digit_text(d) for d in self.digits)} : {self.prec}"

    @classmethod
    def parse(cls, text: str) -> "LocalElem":
        cid, digs, N = [t.strip() for t in text.split(" : ")]
        comp = Component.parse(cid)
        toks = _split_digits(digs)
        elem = cls(comp, tuple(comp.parse_digit(t) for t in toks))
        if elem.prec != int(N):
            raise ValueError("precision field does not match the digit count")
        return elem


def _split_digits(s: str) -> list[str]:
    if not s:
        return []
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


@dataclass(frozen=True)
class Domain:
    """The product space of finitely many components."""

    comps: tuple[Component, ...]

    def __post_init__(self):
        if not self.comps:
            raise ValueError("empty product space")

    @classmethod
    def parse(cls, text: str) -> "Domain":
        return cls(tuple(Component.parse(t) for t in text.split(",")))

    @classmethod
    def of(cls, *comps: Component) -> "Domain":
        return cls(tuple(comps))

    @property
    def cid(self) -> str:
        return ",".join(c.cid for c in self.comps)

    def __len__(self):
        return len(self.comps)

    @property
    def canonical(self) -> bool:
        return all(c.canonical for c in self.comps)

    def residue_count(self, level: int) -> int:
        return prod(c.size for c in self.comps) ** level

    def residues(self, level: int) -> Iterator[tuple]:
        """Keys (tuple of digit tuples) of all classes of O / pi^level."""
        per = [list(itertools.product(c.digit_set, repeat=level)) for c in self.comps]
        return iter(itertools.product(*per))

    def elem_from_key(self, key: tuple) -> "ProdElem":
        return ProdElem(tuple(LocalElem(c, tuple(k)) for c, k in zip(self.comps, key)))

    def from_fracs(self, xs: Sequence[FracVal], N: int) -> "ProdElem":
        return ProdElem(tuple(c.digits_of(x, N) for c, x in zip(self.comps, xs)))

    def from_values(self, vals: Sequence[Digit], N: int) -> "ProdElem":
        return ProdElem(tuple(LocalElem.from_value(c, x, N) for c, x in zip(self.comps, vals)))

    def fixed_point(self, b: Sequence[Digit], N: int) -> "ProdElem":
        """b/(1 - pi): every digit equal to b_t."""
        return ProdElem(tuple(LocalElem(c, (bt,) * N) for c, bt in zip(self.comps, b)))


@dataclass(frozen=True)
class ProdElem:
    parts: tuple[LocalElem, ...]

    @property
    def prec(self) -> int:
        return min(e.prec for e in self.parts)

    @property
    def domain(self) -> Domain:
        return Domain(tuple(e.comp for e in self.parts))

    def digit(self, i: int) -> tuple:
        """x_(i) = (x_{t,i})_t."""
        return tuple(e.digits[i] for e in self.parts)

    def key(self, level: int) -> tuple:
        if self.prec < level:
            raise PrecisionExhausted(f"need {level} digits, have {self.prec}")
        return tuple(e.digits[:level] for e in self.parts)

    def phi(self) -> "ProdElem":
        return ProdElem(tuple(e.phi() for e in self.parts))

    def phi_n(self, n: int) -> "ProdElem":
        return ProdElem(tuple(LocalElem(e.comp, e.digits[n:]) if e.prec >= n else _exhausted() for e in self.parts))

    def __neg__(self):
        return ProdElem(tuple(-e for e in self.parts))

    def neg_phi_neg(self) -> "ProdElem":
        return ProdElem(tuple(e.neg_phi_neg() for e in self.parts))

    def truncate(self, N: int) -> "ProdElem":
        return ProdElem(tuple(e.truncate(N) for e in self.parts))

    def values(self) -> tuple:
        return tuple(e.value() for e in self.parts)

    def congruent(self, other: "ProdElem", n: int) -> bool:
        return all(a.congruent(b, n) for a, b in zip(self.parts, other.parts))

    def to_text(self) -> str:
        return "; ".join(e.to_text() for e in self.parts)

    @classmethod
    def parse(cls, text: str) -> "ProdElem":
        return cls(tuple(LocalElem.parse(t) for t in text.split(";")))


def _exhausted():
    raise PrecisionExhausted("precision exhausted")


def phi(x: ProdElem | LocalElem):
    return x.phi()


def neg_phi_neg(x: ProdElem | LocalElem):
    return x.neg_phi_neg()


def digits_of(comp: Component, x: FracVal, N: int) -> LocalElem:
    return comp.digits_of(x, N)


def frac_part(comps: Component | Sequence[Component], x):
    """Fractional part, componentwise for tuples."""
    if isinstance(comps, Component):
        return comps.frac_part(x)
    return tuple(c.frac_part(xi) for c, xi in zip(comps, x))


# ----------------------------------------------------------------------
# periodic points of phi
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodicPoint:
    """x with phi^n(-x) = -x; ``words`` are the repeating digit words of -x."""

    n: int
    words: tuple
    x: tuple = field(compare=False)


def _word_value(comp: Component, word: Sequence[Digit]):
    acc = comp.zero_value()
    for d in reversed(word):
        acc = acc * comp.pi + d
    return acc


def point_from_words(domain: Domain, words: Sequence[Sequence[Digit]]) -> PeriodicPoint:
    n = len(words[0])
    xs = []
    for c, w in zip(domain.comps, words):
        m = _word_value(c, w)
        den = c.pi**n - 1
        xs.append(Fraction(m, den) if c.kind == "Z" else RatFunc(m, den))
    return PeriodicPoint(n, tuple(tuple(w) for w in words), tuple(xs))


def _component_words(comp: Component, n: int, restrict: bool) -> list[tuple]:
    words = [tuple(reversed(t)) for t in itertools.product(comp.digit_set, repeat=n)]
    if restrict and comp.kind == "Z" and comp.canonical:
        top = comp.pi - 1
        # x = 1 has -x = (pi-1, pi-1, ...); excluded by 0 <= x < 1
        words = [w for w in words if any(d != top for d in w)]
    return words


def periodic_points(domain: Domain, n: int, cap: int = DEFAULT_CAP, verify: bool = True) -> list[PeriodicPoint]:
    """All x with phi^n(-x) = -x; for canonical digits, restricted to 0 <= x < 1 / |x| < 1."""
    if n < 1:
        raise ValueError("period must be >= 1")
    restrict = domain.canonical
    per = [_component_words(c, n, restrict) for c in domain.comps]
    count = prod(len(w) for w in per)
    if count > cap:
        raise ValueError(f"periodic point enumeration of size {count} exceeds cap {cap}")
    out = []
    for words in itertools.product(*per):
        pt = point_from_words(domain, words)
        if verify:
            _verify_periodic(domain, pt)
        out.append(pt)
    return out


def _verify_periodic(domain: Domain, pt: PeriodicPoint) -> None:
    for c, xt, w in zip(domain.comps, pt.x, pt.words):
        _verify_component(c, xt, tuple(w))


@lru_cache(maxsize=1 << 16)
def _verify_component(comp: Component, xt, word: tuple) -> None:
    n = len(word)
    negx = comp.digits_of(-xt, 2 * n)
    if negx.digits != word * 2:
        raise AssertionError(f"digits of -x are not the periodic word {word}")
    if negx.digits[n:] != negx.digits[:n]:
        raise AssertionError("phi^n(-x) != -x")


@lru_cache(maxsize=1 << 16)
def _component_shift_orbit(comp: Component, word: tuple) -> tuple:
    n = len(word)
    den = comp.pi**n - 1
    out = []
    for j in range(n):
        m = _word_value(comp, word[j:] + word[:j])
        out.append(Fraction(m, den) if comp.kind == "Z" else RatFunc(m, den))
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def _component_frac_orbit(comp: Component, word: tuple) -> tuple:
    n = len(word)
    m = _word_value(comp, word)
    den = comp.pi**n - 1
    xt = Fraction(m, den) if comp.kind == "Z" else RatFunc(m, den)
    return tuple(comp.frac_part(xt * comp.pi**j) for j in range(n))


def shift_orbit(domain: Domain, pt: PeriodicPoint) -> list[tuple]:
    """[-phi^j(-x) for j < n] as exact fraction tuples."""
    per = [_component_shift_orbit(c, tuple(w)) for c, w in zip(domain.comps, pt.words)]
    return list(zip(*per))


def frac_orbit(domain: Domain, pt: PeriodicPoint) -> list[tuple]:
    """[<pi^j x> for j < n] as exact fraction tuples."""
    per = [_component_frac_orbit(c, tuple(w)) for c, w in zip(domain.comps, pt.words)]
    return list(zip(*per))


def check_periodic_input(domain: Domain, x: Sequence[FracVal], n: int) -> PeriodicPoint:
    """Validate x in (pi^n - 1)^-1 O with the range condition; return its PeriodicPoint."""
    words = []
    for c, xt in zip(domain.comps, x):
        xt = c.as_frac(xt)
        m = xt * (c.pi**n - 1)
        if c.kind == "Z":
            if m.denominator != 1 or not 0 <= xt < 1:
                raise ValueError(f"{xt} is not a periodic point of period {n}")
        else:
            if not m.is_integral() or (xt.degree() is not None and xt.degree() >= 0):
                raise ValueError(f"{xt} is not a periodic point of period {n}")
        words.append(c.digits_of(-xt, n).digits)
    pt = point_from_words(domain, words)
    if tuple(domain.comps[i].as_frac(x[i]) for i in range(len(x))) != pt.x:
        raise ValueError("input is not periodic")  # pragma: no cover
    return pt


def orbit_sets_equal(domain: Domain, x: PeriodicPoint | Sequence[FracVal], n: int | None = None) -> bool:
    if not domain.canonical:
        raise ValueError("fractional-part orbits are defined for canonical digit sets only")
    pt = x if isinstance(x, PeriodicPoint) else check_periodic_input(domain, x, n)
    return set(frac_orbit(domain, pt)) == set(shift_orbit(domain, pt))
