"""Carlitz factorials, the global geometric gamma, Morita's Gamma_p, and the
three v-adic gamma functions.

The v-adic gammas are infinite products over i of factors B_i built from the
monic polynomials of degree i.  They are evaluated as truncated products: the
loop stops once W consecutive factors are congruent to 1 modulo v^(N+g), and the
index and the observed tail valuations are returned as a certificate.

All v-adic arithmetic runs on Teichmuller power series over A/v (see
:mod:`gkt.local.tower`); results are handed back in digit form as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator

from .algebra import FiniteField, Poly, RatFunc, enumerate_monic
from .local.convert import from_tower, to_tower
from .local.digits import Component, LocalElem
from .local.tower import Tower, TowerElem


class InsufficientPrecision(ValueError):
    """An input was not known to enough digits for the requested output."""


class TruncationFailure(ArithmeticError):
    """The product did not settle before the index cap."""


@dataclass(frozen=True)
class TruncationConfig:
    guard: int = 2  # g: extra v-digits carried internally
    window: int = 3  # W: consecutive trivial factors required to stop
    max_index: int = 64  # I_max
    max_enumeration: int = 1 << 20  # refuse degrees with more monic polynomials than this


@dataclass(frozen=True)
class Certificate:
    index: int  # factors with i < index were multiplied in
    tail_valuations: tuple[int, ...]  # ord_v(B_i - 1) for index <= i < index + W
    guard: int
    window: int

    @property
    def min_tail(self) -> int:
        return min(self.tail_valuations) if self.tail_valuations else 0

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "tail_valuations": list(self.tail_valuations),
            "min_tail_valuation": self.min_tail,
            "guard": self.guard,
            "window": self.window,
        }


@dataclass(frozen=True)
class GammaValue:
    value: LocalElem  # digit form, precision N
    series: TowerElem  # Teichmuller series form, precision N
    certificate: Certificate | None = None

    @property
    def prec(self) -> int:
        return self.value.prec

    def to_dict(self) -> dict:
        out = {"value": self.value.to_text(), "series": self.series.to_text()}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out


# ----------------------------------------------------------------------
# flat
# ----------------------------------------------------------------------


def flat(x: LocalElem | TowerElem):
    """x if x is a unit, else 1 (same precision)."""
    if x.prec < 1:
        raise InsufficientPrecision("precision 0: unit-ness undecidable")
    if isinstance(x, TowerElem):
        return x if x.is_unit() else x.tower.one(x.prec)
    if x.is_unit():
        return x
    return LocalElem.from_value(x.comp, x.comp.one_value(), x.prec)


# ----------------------------------------------------------------------
# global objects
# ----------------------------------------------------------------------


@lru_cache(maxsize=None)
def monic_product(F: FiniteField, i: int) -> Poly:
    """D_i: product of all monic polynomials of degree i."""
    acc = Poly.const(F, 1)
    for a in enumerate_monic(F, i):
        acc = acc * a
    return acc


def base_q_digits(y: int, q: int) -> list[int]:
    out = []
    while y:
        y, r = divmod(y, q)
        out.append(r)
    return out


def carlitz_factorial(y: int, F: FiniteField) -> Poly:
    """Gamma^ari(y+1) = prod_i D_i^{y_i} over the base-q digits of y >= 0."""
    if y < 0:
        raise ValueError("carlitz_factorial needs y >= 0")
    acc = Poly.const(F, 1)
    for i, yi in enumerate(base_q_digits(y, F.order)):
        if yi:
            acc = acc * monic_product(F, i) ** yi
    return acc


def sinnott_valuation(y: int, f: Poly) -> int:
    """ord_f of carlitz_factorial(y), by the floor-sum formula."""
    if f.deg < 1 or not f.is_monic() or not f.is_irreducible():
        raise ValueError("f must be monic irreducible of positive degree")
    if y < 0:
        raise ValueError("y must be >= 0")
    step = f.field.order**f.deg
    total, power = 0, step
    while power <= y:
        total += y // power
        power *= step
    return total


@dataclass(frozen=True)
class GlobalGamma:
    pole: bool
    value: RatFunc | None  # partial product over deg a <= degree
    degree: int
    tail_exponent: int | None  # |partial/true - 1|_inf <= q^tail_exponent

    def to_dict(self) -> dict:
        return {
            "pole": self.pole,
            "value": None if self.value is None else f"({self.value.num})/({self.value.den})",
            "degree": self.degree,
            "tail_exponent": self.tail_exponent,
        }


def is_geo_pole(x: RatFunc) -> bool:
    """x in -A_+ or x = 0."""
    if not x.is_integral():
        return False
    return x.num.is_zero() or (-x.num).is_monic()


def gamma_geo_global(x: RatFunc, degree: int | None = None) -> GlobalGamma:
    """(1/x) prod_{a monic, deg a <= degree} a/(x+a), with an infinity-adic tail bound.

    For deg a > deg x each factor is 1 + O(q^(deg x - deg a)), so the omitted tail
    multiplies the partial product by 1 + O(q^(deg x - degree - 1)).
    """
    F = x.field
    if is_geo_pole(x):
        return GlobalGamma(True, None, 0, None)
    dx = x.degree()
    lo = max(dx, 0)
    degree = lo + 3 if degree is None else max(degree, lo)
    acc = RatFunc(Poly.const(F, 1)) / x
    for i in range(degree + 1):
        for a in enumerate_monic(F, i):
            acc = acc * RatFunc(a) / (x + RatFunc(a))
    return GlobalGamma(False, acc, degree, dx - degree - 1)


# ----------------------------------------------------------------------
# Morita
# ----------------------------------------------------------------------


def _zp_value(x, p: int, N: int) -> int:
    if isinstance(x, LocalElem):
        comp = x.comp
        if comp.kind != "Z" or comp.p != p or not comp.canonical:
            raise ValueError("argument must be a canonical Z_p element")
        avail = x.prec * comp.e
        if avail < N:
            raise InsufficientPrecision(f"need {N} p-adic digits, have {avail}")
        return x.value() % p**N
    return Component.Zp(p).frac_value(Fraction(x), N)


def morita_gamma_p(x, N: int, p: int | None = None) -> LocalElem:
    """Morita's Gamma_p(x) mod p^N via the representative 1 <= n <= p^N."""
    if isinstance(x, LocalElem):
        p = x.comp.p
    if p is None:
        raise ValueError("p is required for non-LocalElem arguments")
    if p == 2:
        raise ValueError("morita_gamma_p: p = 2 unsupported")
    M = p**N
    n = _zp_value(x, p, N) or M
    acc = 1
    for t in range(1, n):
        if t % p:
            acc = acc * t % M
    if n % 2:
        acc = -acc % M
    return LocalElem.from_value(Component.Zp(p), acc, N)


# ----------------------------------------------------------------------
# v-adic gammas
# ----------------------------------------------------------------------


class _YDigits:
    """Lazy base-q digits of y = arg - 1 for an argument in Z_p."""

    def __init__(self, arg, q: int, p: int):
        f = 0
        while p**f < q:
            f += 1
        self.comp = Component.Zp(p, f)
        self.q = q
        if isinstance(arg, LocalElem):
            c = arg.comp
            if c.kind != "Z" or c.p != p or not c.canonical:
                raise ValueError("argument must be a canonical Z_p element")
            self.avail = arg.prec * c.e // f
            self._y = (arg.value() - 1) % q**self.avail
            self._exact = None
        else:
            self._exact = Fraction(arg) - 1
            self.avail = None
        self._cache: tuple = ()

    def upto(self, k: int) -> tuple:
        if len(self._cache) >= k:
            return self._cache[:k]
        if self.avail is not None and k > self.avail:
            raise InsufficientPrecision(f"need {k} base-q digits of y, have {self.avail}")
        size = max(k, 2 * len(self._cache), 8)
        if self.avail is not None:
            size = min(size, self.avail)
            self._cache = self.comp.expand(self._y, size)
        else:
            self._cache = self.comp.digits_of(self._exact, size).digits
        return self._cache[:k]


class VAdicGamma:
    """The three v-adic gamma functions at a fixed place v of F_q[theta]."""

    def __init__(self, F: FiniteField, v: Poly, config: TruncationConfig | None = None):
        if not v.is_monic() or not v.is_irreducible():
            raise ValueError("v must be monic irreducible")
        self.F, self.v = F, v
        self.config = config or TruncationConfig()
        self.tower = Tower.unramified(F, v, 1)
        self.comp = Component.Av(F, v)
        self._low: dict[int, tuple[int, list[TowerElem]]] = {}
        self._ari: dict[int, tuple[int, TowerElem]] = {}
        self._geo: dict[tuple, TowerElem] = {}

    # -- images of polynomials ------------------------------------------
    def _theta_powers(self, i: int, M: int) -> list[TowerElem]:
        th = self.tower.theta(M)
        out = [self.tower.one(M)]
        for _ in range(i):
            out.append(out[-1] * th)
        return out

    def _lower_images(self, i: int, M: int) -> list[TowerElem]:
        """Images of all polynomials of degree < i, in monic enumeration order."""
        hit = self._low.get(i)
        if hit is not None and hit[0] >= M:
            return [t.truncate(M) for t in hit[1]] if hit[0] > M else hit[1]
        if self.F.order**i > self.config.max_enumeration:
            raise TruncationFailure(f"degree {i} exceeds the enumeration cap")
        pw = self._theta_powers(i, M)
        layer = [self.tower.zero(M)]
        for j in range(i):
            scaled = [pw[j].scale(c) for c in self.F.elements()]
            layer = [low + s for s in scaled for low in layer]
        self._low[i] = (M, layer)
        return layer

    def monic_images(self, i: int, M: int) -> Iterator[TowerElem]:
        lead = self._theta_powers(i, M)[i]
        for low in self._lower_images(i, M):
            yield lead + low

    # -- base factors ----------------------------------------------------
    def flat_product(self, i: int, M: int) -> TowerElem:
        """prod_{a in A_+,i} a^flat."""
        hit = self._ari.get(i)
        if hit is not None and hit[0] >= M:
            return hit[1].truncate(M)
        acc = self.tower.one(M)
        for a in self.monic_images(i, M):
            if a.coeffs[0]:
                acc = acc * a
        self._ari[i] = (M, acc)
        return acc

    def ari_factor(self, i: int, M: int) -> TowerElem:
        return -self.flat_product(i, M)

    def geo_factor(self, x: TowerElem, i: int, M: int) -> TowerElem:
        """prod_{a in A_+,i} a^flat / (x+a)^flat."""
        key = (tuple(x.coeffs[:M]), i, M)
        hit = self._geo.get(key)
        if hit is not None:
            return hit
        den = self.tower.one(M)
        xs = x.truncate(M)
        for a in self.monic_images(i, M):
            s = xs + a
            if s.coeffs[0]:
                den = den * s
        out = self.flat_product(i, M) * den.inverse()
        if len(self._geo) > 4096:
            self._geo.clear()
        self._geo[key] = out
        return out

    # -- truncation driver -----------------------------------------------
    def _settle(self, factor: Callable[[int], TowerElem], M: int) -> tuple[list[TowerElem], Certificate]:
        cfg = self.config
        factors: list[TowerElem] = []
        run: list[int] = []
        for i in range(cfg.max_index + cfg.window):
            B = factor(i)
            factors.append(B)
            tv = (B - 1).valuation()
            run = run + [tv] if tv >= M else []
            if len(run) == cfg.window:
                I = i - cfg.window + 1
                if I > cfg.max_index:
                    break
                return factors[:I], Certificate(I, tuple(run), cfg.guard, cfg.window)
        raise TruncationFailure(f"factors did not settle below index {cfg.max_index}")

    def _finish(self, acc: TowerElem, N: int, cert: Certificate) -> GammaValue:
        s = acc.truncate(N)
        return GammaValue(from_tower(s, self.comp), s, cert)

    def _series_of(self, x, M: int) -> TowerElem:
        if isinstance(x, TowerElem):
            if x.prec < M:
                raise InsufficientPrecision(f"need x to precision {M}, have {x.prec}")
            return x.truncate(M)
        if isinstance(x, LocalElem):
            if x.prec < M:
                raise InsufficientPrecision(f"need x to precision {M}, have {x.prec}")
            return to_tower(x.truncate(M), self.tower)
        if isinstance(x, Poly):
            x = RatFunc(x)
        return self.tower.from_frac(x.num, x.den, M)

    @staticmethod
    def _powered(factors: list[TowerElem], digits: tuple, one: TowerElem) -> TowerElem:
        acc = one
        for B, d in zip(factors, digits):
            if d:
                acc = acc * B**d
        return acc

    # -- the three gammas --------------------------------------------------
    def ari(self, arg, N: int) -> GammaValue:
        """Gamma_v^ari(arg), arg = y+1 in Z_p (Fraction, int, or LocalElem)."""
        M = N + self.config.guard
        ys = _YDigits(arg, self.F.order, self.F.p)
        factors, cert = self._settle(lambda i: self.ari_factor(i, M), M)
        digits = ys.upto(cert.index)
        return self._finish(self._powered(factors, digits, self.tower.one(M)), N, cert)

    def geo(self, x, N: int) -> GammaValue:
        """Gamma_v^geo(x) for x in A_v (RatFunc, Poly, LocalElem or series)."""
        M = N + self.config.guard
        xs = self._series_of(x, M)
        factors, cert = self._settle(lambda i: self.geo_factor(xs, i, M), M)
        acc = flat(xs).inverse()
        for B in factors:
            acc = acc * B
        return self._finish(acc, N, cert)

    def two(self, x, arg2, N: int) -> GammaValue:
        """Gamma_v^two(x, arg2), arg2 = y+1 in Z_p."""
        M = N + self.config.guard
        xs = self._series_of(x, M)
        ys = _YDigits(arg2, self.F.order, self.F.p)
        factors, cert = self._settle(lambda i: self.geo_factor(xs, i, M), M)
        digits = ys.upto(cert.index)
        return self._finish(self._powered(factors, digits, flat(xs).inverse()), N, cert)


@lru_cache(maxsize=None)
def vadic_gamma(F: FiniteField, v: Poly, config: TruncationConfig | None = None) -> VAdicGamma:
    """Shared evaluator per place, so factor caches are reused across calls."""
    return VAdicGamma(F, v, config)


def gamma_v_ari(arg, N: int, F: FiniteField, v: Poly) -> GammaValue:
    return vadic_gamma(F, v).ari(arg, N)


def gamma_v_geo(x, N: int, F: FiniteField, v: Poly) -> GammaValue:
    return vadic_gamma(F, v).geo(x, N)


def gamma_v_two(x, arg2, N: int, F: FiniteField, v: Poly) -> GammaValue:
    return vadic_gamma(F, v).two(x, arg2, N)
