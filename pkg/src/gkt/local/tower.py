"""Truncated elements of local fields over k_v.

Every completion used here is complete, discretely valued, of equal
characteristic, so it is a power-series ring R[[u]] over its residue field R
(the coefficients being Teichmuller representatives).  Two shapes occur:

* unramified: u = v, residue field F_{q^{d*ell}} containing A/v;
* ramified: u = varpi with varpi^(q^d - 1) = -v, residue field A/v.

A :class:`TowerElem` is a coefficient list over R, known modulo u^prec.
"""

from __future__ import annotations

from functools import cached_property
from typing import Callable, Sequence

from ..algebra import FiniteField, Poly, first_irreducible


class PrecisionError(ArithmeticError):
    pass


class Tower:
    """Descriptor of R[[u]] together with the embedding of A_v into it."""

    def __init__(self, F: FiniteField, v: Poly, residue: FiniteField, zeta: int, ramification: int):
        if v.deg < 1 or not v.is_monic() or not v.is_irreducible():
            raise ValueError("v must be monic irreducible")
        self.F = F
        self.v = v
        self.d = v.deg
        self.q = F.order
        self.R = residue
        self.zeta = zeta
        self.e = ramification
        if v.eval_code(self.R, zeta) != 0:
            raise ValueError("zeta is not a root of v in the residue field")
        self._mul = _make_multiplier(self.R)

    # -- constructors ---------------------------------------------------
    @classmethod
    def unramified(cls, F: FiniteField, v: Poly, ell: int = 1) -> "Tower":
        """Completion of k(Lambda_{v^ell - 1}) above v: residue field F_{q^(d ell)}, u = v."""
        R, zeta = _residue_field(F, v, ell)
        return cls(F, v, R, zeta, 1)

    @classmethod
    def ramified(cls, F: FiniteField, v: Poly) -> "Tower":
        """k_v(varpi) with varpi^(q^d - 1) = -v; u = varpi."""
        R, zeta = _residue_field(F, v, 1)
        return cls(F, v, R, zeta, F.order ** v.deg - 1)

    def __repr__(self) -> str:
        kind = "unramified" if self.e == 1 else f"ramified(e={self.e})"
        return f"Tower(q={self.q}, v={self.v}, residue=GF({self.R.order}), {kind})"

    @property
    def ramified_flag(self) -> bool:
        return self.e > 1

    # -- element constructors ------------------------------------------
    def elem(self, coeffs: Sequence[int], prec: int) -> "TowerElem":
        c = list(coeffs[:prec])
        c.extend([0] * (prec - len(c)))
        return TowerElem(self, c)

    def zero(self, prec: int) -> "TowerElem":
        return TowerElem(self, [0] * prec)

    def const(self, code: int, prec: int) -> "TowerElem":
        """Teichmuller representative of a residue-field element."""
        if prec == 0:
            return TowerElem(self, [])
        return TowerElem(self, [code] + [0] * (prec - 1))

    def one(self, prec: int) -> "TowerElem":
        return self.const(1, prec)

    def uniformizer(self, prec: int) -> "TowerElem":
        return self.monomial(1, 1, prec)

    def monomial(self, k: int, code: int, prec: int) -> "TowerElem":
        c = [0] * prec
        if k < prec:
            c[k] = code
        return TowerElem(self, c)

    def from_int(self, n: int, prec: int) -> "TowerElem":
        return self.const(n % self.R.p, prec)

    def v_elem(self, prec: int) -> "TowerElem":
        """Image of v: u itself, or -u^e in the ramified tower."""
        return self.monomial(self.e, self.R.neg(1) if self.e > 1 else 1, prec)

    # -- residue field <-> A/v ---------------------------------------------
    def residue_of_poly(self, r: Poly) -> int:
        """Image in R of a polynomial taken mod v (theta -> zeta)."""
        return r.eval_code(self.R, self.zeta)

    @cached_property
    def _residue_to_poly(self) -> dict[int, Poly]:
        import itertools

        out = {}
        for tail in itertools.product(range(self.q), repeat=self.d):
            r = Poly(self.F, tail)
            out[self.residue_of_poly(r)] = r
        return out

    def poly_of_residue(self, code: int) -> Poly:
        """Inverse of residue_of_poly on the image of A/v; error off the image."""
        try:
            return self._residue_to_poly[code]
        except KeyError:
            raise ValueError(f"residue {code} is not in the image of A/v") from None

    # -- embedding of A ------------------------------------------------------
    def theta(self, prec: int) -> "TowerElem":
        """Image of theta: the root of v(X) = v lying over zeta."""
        vprec = -(-prec // self.e)
        base = self._theta_unramified(vprec)
        if self.e == 1:
            return self.elem(base.coeffs, prec)
        out = [0] * prec
        neg = self.R.neg
        for k, c in enumerate(base.coeffs):
            pos = k * self.e
            if pos >= prec:
                break
            out[pos] = neg(c) if k % 2 else c
        return TowerElem(self, out)

    def _theta_unramified(self, vprec: int) -> "TowerElem":
        cache = self.__dict__.setdefault("_theta_cache", {})
        for p, val in cache.items():
            if p >= vprec:
                return TowerElem(self, val.coeffs[:vprec])
        # Newton on P(X) = v(X) - u in R[[u]] starting at zeta; P'(zeta) = v'(zeta) is a unit.
        un = Tower(self.F, self.v, self.R, self.zeta, 1)
        vcoeffs = [un.const(c, vprec) for c in self.v.coeffs]
        vcoeffs[0] = vcoeffs[0] - un.uniformizer(vprec)
        root = hensel_lift(vcoeffs, un.const(self.zeta, vprec), vprec)
        cache[vprec] = root
        return TowerElem(self, root.coeffs)

    def from_poly(self, a: Poly, prec: int) -> "TowerElem":
        """Image of a in A under A -> A_v -> this tower (Horner in theta)."""
        if a.is_zero():
            return self.zero(prec)
        t = self.theta(prec)
        acc = self.const(a.coeffs[-1], prec)
        for c in reversed(a.coeffs[:-1]):
            acc = acc * t
            if c:
                acc = acc.add_const(c)
        return acc

    def from_frac(self, num: Poly, den: Poly, prec: int) -> "TowerElem":
        n = self.from_poly(num, prec)
        dd = self.from_poly(den, prec)
        if dd.valuation() > 0:
            raise ValueError("denominator is not a unit at v")
        return n * dd.inverse()

    # -- internal products -------------------------------------------------
    def _conv(self, a: list[int], b: list[int], n: int) -> list[int]:
        return self._mul(a, b, n)


def _residue_field(F: FiniteField, v: Poly, ell: int) -> tuple[FiniteField, int]:
    d = v.deg
    if d * ell == 1:
        return F, F.neg(v.coeffs[0])
    if ell == 1:
        R = FiniteField.extension(F, v)
        return R, R.from_vector([0, 1])
    R = FiniteField.extension(F, first_irreducible(F, d * ell))
    roots = R.embed_poly_root(v)
    return R, min(roots)


class TowerElem:
    """Element of a tower known modulo u^prec (prec = len(coeffs))."""

    __slots__ = ("tower", "coeffs")

    def __init__(self, tower: Tower, coeffs: list[int]):
        self.tower = tower
        self.coeffs = coeffs

    @property
    def prec(self) -> int:
        return len(self.coeffs)

    def _coerce(self, other) -> "TowerElem":
        if isinstance(other, TowerElem):
            if other.tower is not self.tower:
                raise TypeError("elements of different towers")
            return other
        if isinstance(other, int):
            return self.tower.from_int(other, self.prec)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        add = self.tower.R.add
        n = min(self.prec, other.prec)
        return TowerElem(self.tower, [add(x, y) for x, y in zip(self.coeffs[:n], other.coeffs[:n])])

    __radd__ = __add__

    def __neg__(self):
        neg = self.tower.R.neg
        return TowerElem(self.tower, [neg(x) for x in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        va, vb = self.valuation(), other.valuation()
        # absolute precision of a product: min(prec_a + val_b, prec_b + val_a)
        n = min(self.prec + min(vb, other.prec), other.prec + min(va, self.prec))
        n = min(n, max(self.prec, other.prec))
        return TowerElem(self.tower, self.tower._conv(self.coeffs, other.coeffs, n))

    __rmul__ = __mul__

    def scale(self, code: int) -> "TowerElem":
        mul = self.tower.R.mul
        return TowerElem(self.tower, [mul(code, x) for x in self.coeffs])

    def add_const(self, code: int) -> "TowerElem":
        if not self.coeffs:
            return self
        c = list(self.coeffs)
        c[0] = self.tower.R.add(c[0], code)
        return TowerElem(self.tower, c)

    def valuation(self) -> int:
        """Index of the first nonzero coefficient; prec if none is known."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return self.prec

    def is_unit(self) -> bool:
        if not self.coeffs:
            raise PrecisionError("precision exhausted: unit-ness undecidable")
        return self.coeffs[0] != 0

    def truncate(self, prec: int) -> "TowerElem":
        if prec > self.prec:
            raise PrecisionError(f"cannot raise precision {self.prec} -> {prec}")
        return TowerElem(self.tower, self.coeffs[:prec])

    def shift(self, k: int) -> "TowerElem":
        """Multiply by u^k (k >= 0) or divide exactly by u^-k."""
        if k >= 0:
            return TowerElem(self.tower, [0] * k + self.coeffs)
        if self.valuation() < -k:
            raise ArithmeticError("not divisible by the uniformizer power")
        return TowerElem(self.tower, self.coeffs[-k:])

    def inverse(self) -> "TowerElem":
        """Inverse of a unit by Newton iteration b <- b(2 - ab)."""
        if not self.is_unit():
            raise ZeroDivisionError("inverse of a non-unit")
        R, N = self.tower.R, self.prec
        b = self.tower.const(R.inv(self.coeffs[0]), N)
        k = 1
        two = self.tower.from_int(2, N)
        while k < N:
            k = min(2 * k, N)
            a = self.truncate(k)
            bb = self.tower.elem(b.coeffs, k)
            b = bb * (two.truncate(k) - a * bb)
        return b.truncate(N)

    def __truediv__(self, other):
        other = self._coerce(other)
        k = other.valuation()
        if k >= other.prec:
            raise ZeroDivisionError("division by an element indistinguishable from zero")
        if self.valuation() < k:
            raise ArithmeticError("quotient is not integral")
        return self.shift(-k) * other.shift(-k).inverse()

    def __pow__(self, e: int) -> "TowerElem":
        if e < 0:
            return self.inverse() ** (-e)
        r = self.tower.one(self.prec)
        b = self
        while e:
            if e & 1:
                r = r * b
            e >>= 1
            if e:
                b = b * b
        return r

    def frobenius_q(self) -> "TowerElem":
        """x -> x^q, valid in characteristic p: coefficients to the q, u^i -> u^(qi)."""
        T = self.tower
        q, R, N = T.q, T.R, self.prec
        out = [0] * N
        for i, c in enumerate(self.coeffs):
            if i * q >= N:
                break
            if c:
                out[i * q] = R.pow(c, q)
        return TowerElem(T, out)

    def constant_frobenius(self, s: int) -> "TowerElem":
        """Apply z -> z^(q^s) to every coefficient (fixes u)."""
        R = self.tower.R
        return TowerElem(self.tower, [R.frobenius(c, s) for c in self.coeffs])

    def equal_mod(self, other: "TowerElem", n: int) -> bool:
        return (self - other).valuation() >= n

    def __eq__(self, other):
        if not isinstance(other, TowerElem):
            return NotImplemented
        n = min(self.prec, other.prec)
        return self.tower is other.tower and self.coeffs[:n] == other.coeffs[:n]

    def __hash__(self):  # pragma: no cover - value objects compared by equality only
        return hash(tuple(self.coeffs))

    def __repr__(self):
        terms = [f"{c}*u^{i}" for i, c in enumerate(self.coeffs) if c][:6]
        more = " + ..." if sum(1 for c in self.coeffs if c) > 6 else ""
        return f"TowerElem({' + '.join(terms) or '0'}{more}; prec={self.prec})"

    def to_text(self) -> str:
        return ",".join(map(str, self.coeffs))


# ----------------------------------------------------------------------
# fast truncated products
# ----------------------------------------------------------------------


def _make_multiplier(R: FiniteField) -> Callable[[list[int], list[int], int], list[int]]:
    if R.base is None:
        return _prime_multiplier(R.p)
    if R.base.base is None:
        return _extension_multiplier(R)
    return _generic_multiplier(R)


def _slot_bytes(terms: int, p: int) -> int:
    return ((terms * (p - 1) ** 2).bit_length() + 8) // 8


def _prime_multiplier(p: int):
    def mul(a: list[int], b: list[int], n: int) -> list[int]:
        la, lb = min(len(a), n), min(len(b), n)
        if la == 0 or lb == 0:
            return [0] * n
        w = _slot_bytes(min(la, lb), p)
        A = int.from_bytes(b"".join(x.to_bytes(w, "little") for x in a[:la]), "little")
        B = int.from_bytes(b"".join(x.to_bytes(w, "little") for x in b[:lb]), "little")
        raw = (A * B).to_bytes(w * (la + lb), "little")
        out = [int.from_bytes(raw[i * w:(i + 1) * w], "little") % p for i in range(n)]
        return out

    return mul


def _extension_multiplier(R: FiniteField):
    """Two-level Kronecker packing for R = F_p[z]/(m)."""
    p, k = R.p, R.degree
    span = 2 * k - 1
    vec = [R.to_vector(c) for c in range(R.order)]
    # reduction: coefficient c of z^j  ->  code of c*z^j mod m
    z = R.from_vector([0, 1]) if k > 1 else 1
    zpow = [R.pow(z, j) for j in range(span)]
    red = [[R.mul(c, zpow[j]) for c in range(p)] for j in range(span)]
    add = R.add

    def mul(a: list[int], b: list[int], n: int) -> list[int]:
        la, lb = min(len(a), n), min(len(b), n)
        if la == 0 or lb == 0:
            return [0] * n
        w = _slot_bytes(min(la, lb) * k, p)
        pad = bytes(w * (k - 1))

        def pack(c: list[int]) -> int:
            parts = []
            for x in c:
                parts.append(b"".join(y.to_bytes(w, "little") for y in vec[x]))
                parts.append(pad)
            return int.from_bytes(b"".join(parts), "little")

        raw_len = w * span * (la + lb)
        raw = (pack(a[:la]) * pack(b[:lb])).to_bytes(raw_len, "little")
        out = [0] * n
        for i in range(min(n, la + lb - 1)):
            base = i * span * w
            acc = 0
            for j in range(span):
                c = int.from_bytes(raw[base + j * w: base + (j + 1) * w], "little") % p
                if c:
                    acc = add(acc, red[j][c])
            out[i] = acc
        return out

    return mul


def _generic_multiplier(R: FiniteField):
    def mul(a: list[int], b: list[int], n: int) -> list[int]:
        out = [0] * n
        for i, x in enumerate(a[:n]):
            if x:
                for j, y in enumerate(b[: n - i]):
                    if y:
                        out[i + j] = R.add(out[i + j], R.mul(x, y))
        return out

    return mul


# ----------------------------------------------------------------------
# Newton / Hensel
# ----------------------------------------------------------------------


class HenselError(ArithmeticError):
    pass


def poly_eval(coeffs: Sequence[TowerElem], x: TowerElem) -> TowerElem:
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs: Sequence[TowerElem]) -> list[TowerElem]:
    if len(coeffs) == 1:
        return [coeffs[0] * 0]
    return [c * k for k, c in enumerate(coeffs) if k > 0]


def hensel_lift(coeffs: Sequence[TowerElem], x0: TowerElem, prec: int) -> TowerElem:
    """Root of f = sum coeffs[k] X^k near x0, to absolute precision prec.

    Requires the Newton hypothesis ord f(x0) > 2 ord f'(x0).
    """
    T = x0.tower
    df = poly_derivative(coeffs)
    fx, dfx = poly_eval(coeffs, x0), poly_eval(df, x0)
    vf, vd = fx.valuation(), dfx.valuation()
    if vd >= dfx.prec or vf <= 2 * vd:
        raise HenselError(f"Newton hypothesis fails: ord f(x0) = {vf}, ord f'(x0) = {vd}")
    work = prec + 2 * vd + 1
    cs = [c.truncate(min(c.prec, work)) for c in coeffs]
    if any(c.prec < work for c in cs):
        cs = [T.elem(c.coeffs, work) if c.prec < work else c for c in cs]
    dcs = poly_derivative(cs)
    x = T.elem(x0.coeffs, work)
    for _ in range(2 * work.bit_length() + 4):
        fx = poly_eval(cs, x)
        if fx.valuation() >= prec + vd:
            break
        # padding the iterate with zeros is harmless: it is only an approximation
        x = T.elem((x - fx / poly_eval(dcs, x)).coeffs, work)
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise HenselError("Newton iteration did not converge")
    return x.truncate(prec)


def teichmuller_lift(tower: Tower, start: TowerElem) -> TowerElem:
    """Iterate x -> x^Q (Q = |R|) from any lift until stable; returns the Teichmuller point."""
    Q = tower.R.order
    x = start
    for _ in range(start.prec + 2):
        y = x ** Q
        if y == x:
            return x
        x = y
    return x
