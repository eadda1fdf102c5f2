"""Carlitz module, torsion points, Gauss sums, and the Gross-Koblitz-Thakur identities.

Two local fields are used.

* Arithmetic case: the totally ramified extension R[[w]] of k_v with
  w^(q^d - 1) = -v and R = F_{q^d}.  Here w is the distinguished root of -v,
  and psi(1) is the root of C_v(X)/X congruent to -w.
* Geometric case: the unramified extension R'[[v]] with R' = F_{q^(d ell)}, the
  completion of the (v^ell - 1)-th Carlitz cyclotomic field above v.  Torsion
  points omega(z) are Hensel lifts of residue-field points; psi(z) is the
  Teichmuller lift, i.e. the constant series z.

Galois conjugates are taken by twisting only the constant-field factor of each
summand with a power of Frobenius.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .algebra import FieldElem, FiniteField, Poly, RatFunc
from .gamma import GammaValue, base_q_digits, vadic_gamma
from .local.tower import Tower, TowerElem, hensel_lift


# ----------------------------------------------------------------------
# the Carlitz module
# ----------------------------------------------------------------------


def poly_frobenius(c: Poly) -> Poly:
    """c(theta)^q = c(theta^q) over F_q."""
    q = c.field.order
    out = [0] * (q * c.deg + 1) if c.coeffs else []
    for k, a in enumerate(c.coeffs):
        out[q * k] = a
    return Poly(c.field, out)


@lru_cache(maxsize=None)
def carlitz_coefficients(a: Poly) -> tuple[Poly, ...]:
    """Coefficients (c_0, ..., c_deg a) of C_a = sum c_i tau^i."""
    F = a.field
    zero, theta = Poly(F, ()), Poly.theta(F)
    cs: list[Poly] = []
    for ak in reversed(a.coeffs):
        # C_{ak + theta b} = ak + C_theta o C_b
        new = [theta * c for c in cs] + [zero]
        for i in range(1, len(new)):
            new[i] = new[i] + poly_frobenius(cs[i - 1])
        if not new:
            new = [zero]
        new[0] = new[0] + Poly.const(F, ak)
        cs = new
    while cs and cs[-1].is_zero():
        cs.pop()
    return tuple(cs)


def _scalar(x, c: int):
    if isinstance(x, (Poly, TowerElem)):
        return x.scale(c)
    if isinstance(x, FieldElem):
        return x * x.field(c)
    if isinstance(x, RatFunc):
        return x * RatFunc(Poly.const(x.field, c))
    raise TypeError(f"unsupported algebra element {type(x).__name__}")


def _qpow(x, q: int):
    if isinstance(x, TowerElem):
        return x.frobenius_q()
    return x**q


def carlitz_action(a: Poly, x, theta=None):
    """C_a(x) for x in an F_q-algebra; theta is the image of theta (defaults per type)."""
    q = a.field.order
    if theta is None:
        if isinstance(x, TowerElem):
            theta = x.tower.theta(x.prec)
        elif isinstance(x, Poly):
            theta = Poly.theta(x.field)
        elif isinstance(x, RatFunc):
            theta = RatFunc(Poly.theta(x.field))
        else:
            raise ValueError("theta image required for this algebra")
    acc = x - x
    for ak in reversed(a.coeffs):
        acc = theta * acc + _qpow(acc, q)
        if ak:
            acc = acc + _scalar(x, ak)
    return acc


def carlitz_action_code(R: FiniteField, zeta: int, a: Poly, z: int) -> int:
    """C_a(z) on a finite field R given as codes, theta acting as zeta."""
    q = a.field.order
    acc = 0
    for ak in reversed(a.coeffs):
        acc = R.add(R.mul(zeta, acc), R.pow(acc, q))
        if ak:
            acc = R.add(acc, R.mul(ak, z))
    return acc


# ----------------------------------------------------------------------
# context
# ----------------------------------------------------------------------


class DomainError(ValueError):
    """Argument outside the domain of a Gauss sum or identity."""


@dataclass(frozen=True)
class CarlitzContext:
    F: FiniteField
    v: Poly
    ell: int = 1
    N: int = 40  # target precision in uniformizer digits
    guard: int = 4

    def __post_init__(self):
        if not self.v.is_monic() or not self.v.is_irreducible():
            raise ValueError("v must be monic irreducible")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")

    @property
    def q(self) -> int:
        return self.F.order

    @property
    def d(self) -> int:
        return self.v.deg

    @property
    def n(self) -> Poly:
        return self.v**self.ell

    @property
    def prec(self) -> int:
        return self.N + self.guard

    @property
    def big_q(self) -> int:
        """q^(d ell) = |F_P|."""
        return self.q ** (self.d * self.ell)

    def at_precision(self, N: int) -> "CarlitzContext":
        return context(self.F, self.v, self.ell, N)

    # -- towers ------------------------------------------------------------
    @property
    def ari_tower(self) -> Tower:
        return _ari_tower(self.F, self.v)

    @property
    def geo_tower(self) -> Tower:
        return _geo_tower(self.F, self.v, self.ell)

    # -- arithmetic torsion -------------------------------------------------
    @property
    def psi_one(self) -> TowerElem:
        return _psi_basis(self)[0]

    def psi(self, z: Poly) -> TowerElem:
        """psi(z) = C_z(psi(1)) for z in A/v."""
        z = z % self.v
        basis = _psi_basis(self)
        acc = self.ari_tower.zero(self.prec)
        for k, c in enumerate(z.coeffs):
            if c:
                acc = acc + basis[k].scale(c)
        return acc

    def residues(self) -> list[Poly]:
        """A/v as polynomials of degree < d, constant term fastest."""
        out = [Poly(self.F, ())]
        for k in range(self.d):
            out = [r + Poly.monomial(self.F, k, c) for c in self.F.elements() for r in out]
        return out

    # -- geometric torsion --------------------------------------------------
    def omega(self, z: int) -> TowerElem:
        """The (n-1)-torsion point reducing to z in F_P."""
        T = self.geo_tower
        basis = _omega_basis(self)
        acc = T.zero(self.prec)
        for k, c in enumerate(T.R.to_vector(z)):
            if c:
                acc = acc + basis[k].scale(c)
        return acc


@lru_cache(maxsize=None)
def context(F: FiniteField, v: Poly, ell: int = 1, N: int = 40) -> CarlitzContext:
    return CarlitzContext(F, v, ell, N)


@lru_cache(maxsize=None)
def _ari_tower(F: FiniteField, v: Poly) -> Tower:
    return Tower.ramified(F, v)


@lru_cache(maxsize=None)
def _geo_tower(F: FiniteField, v: Poly, ell: int) -> Tower:
    return Tower.unramified(F, v, ell)


@lru_cache(maxsize=None)
def _psi_basis(ctx: CarlitzContext) -> tuple[TowerElem, ...]:
    """(psi(1), psi(theta), ..., psi(theta^(d-1)))."""
    T, P, v = ctx.ari_tower, ctx.prec, ctx.v
    e = T.e
    cs = carlitz_coefficients(v)
    work = P + 2
    # Substituting X = -w Y in C_v(X)/X and dividing by w^e gives
    # g(Y) = sum_i b_i Y^(q^i - 1) with g(1) = 0 mod w and g'(1) a unit.
    g = [T.zero(work) for _ in range(e + 1)]
    minus_w = -T.uniformizer(work)
    for i, c in enumerate(cs):
        pos = ctx.q**i - 1
        if i == ctx.d:
            g[pos] = T.one(work)
            continue
        quot, rem = divmod(c, v)
        if not rem.is_zero():  # pragma: no cover - C_v is congruent to tau^d mod v
            raise ArithmeticError("Carlitz coefficient not divisible by v")
        g[pos] = -(T.from_poly(quot, work) * minus_w**pos)
    Y = hensel_lift(g, T.one(work), work)
    psi1 = (minus_w * Y).truncate(P)
    th = T.theta(P)
    out = [psi1]
    for _ in range(1, ctx.d):
        out.append(th * out[-1] + out[-1].frobenius_q())
    return tuple(out)


@lru_cache(maxsize=None)
def _omega_basis(ctx: CarlitzContext) -> tuple[TowerElem, ...]:
    """omega of the F_q-basis 1, X, X^2, ... of F_P."""
    T, P = ctx.geo_tower, ctx.prec
    cs = [T.from_poly(c, P) for c in carlitz_coefficients(ctx.n - Poly.const(ctx.F, 1))]
    c0_inv = cs[0].inverse()
    R = T.R
    out = []
    for k in range(R.degree):
        b = R.from_vector([0] * k + [1])
        x = T.const(b, P)
        for _ in range(2 * P.bit_length() + 4):
            fx = _qpoly_eval(cs, x)
            if fx.valuation() >= P:
                break
            x = x - fx * c0_inv
        else:  # pragma: no cover - f is additive with unit linear term
            raise ArithmeticError("omega lift did not converge")
        out.append(x)
    return tuple(out)


def _qpoly_eval(cs: list[TowerElem], x: TowerElem) -> TowerElem:
    acc, xp = cs[0] * x, x
    for c in cs[1:]:
        xp = xp.frobenius_q()
        acc = acc + c * xp
    return acc


# ----------------------------------------------------------------------
# public wrappers for the torsion data
# ----------------------------------------------------------------------


def varpi_v(ctx: CarlitzContext) -> TowerElem:
    """The (q^d-1)-st root of -v congruent to -psi(1); the ramified uniformizer."""
    return ctx.ari_tower.uniformizer(ctx.prec)


def chi_teich(ctx: CarlitzContext, z: Poly, inverse: bool = False) -> int:
    """Teichmuller character A/v -> F_{q^d} (as a residue-field code)."""
    code = ctx.ari_tower.residue_of_poly(z % ctx.v)
    if inverse:
        if code == 0:
            raise ZeroDivisionError("chi of z^-1 needs z != 0 mod v")
        return ctx.ari_tower.R.inv(code)
    return code


def omega_lift(ctx: CarlitzContext, z: int) -> TowerElem:
    return ctx.omega(z)


@dataclass(frozen=True)
class TorsionTable:
    case: str
    rows: tuple  # arithmetic: (z, psi(z)); geometric: (z, C_theta(z), omega(z))

    def to_dict(self) -> dict:
        if self.case == "arithmetic":
            return {"case": self.case, "psi": {z.to_text(): p.to_text() for z, p in self.rows}}
        return {
            "case": self.case,
            "C_theta": {str(z): c for z, c, _ in self.rows},
            "omega": {str(z): w.to_text() for z, _, w in self.rows},
        }


def torsion_module_structure(ctx: CarlitzContext, case: str = "arithmetic") -> TorsionTable:
    if case == "arithmetic":
        return TorsionTable(case, tuple((z, ctx.psi(z)) for z in ctx.residues()))
    if case == "geometric":
        T = ctx.geo_tower
        th = Poly.theta(ctx.F)
        rows = tuple(
            (z, carlitz_action_code(T.R, T.zeta, th, z), ctx.omega(z)) for z in T.R.elements()
        )
        return TorsionTable(case, rows)
    raise ValueError("case must be 'arithmetic' or 'geometric'")


# ----------------------------------------------------------------------
# Gauss sums
# ----------------------------------------------------------------------


@dataclass
class GaussSum:
    case: str
    ctx: CarlitzContext
    x: RatFunc | None
    value: TowerElem
    _conj: dict[int, TowerElem] = field(default_factory=dict, repr=False)

    @property
    def period(self) -> int:
        # tau_q has order d on F_{q^d} and d*ell on F_{q^(d ell)}
        return self.ctx.d if self.case == "arithmetic" else self.ctx.d * self.ctx.ell

    def conjugate(self, s: int) -> TowerElem:
        s %= self.period
        if s not in self._conj:
            if self.case == "arithmetic":
                self._conj[s] = _gauss_ari_twisted(self.ctx, s)
            else:
                self._conj[s] = _gauss_geo_twisted(self.ctx, self.x, s)
        return self._conj[s]


def _gauss_ari_twisted(ctx: CarlitzContext, s: int) -> TowerElem:
    T, R = ctx.ari_tower, ctx.ari_tower.R
    acc = T.zero(ctx.prec)
    for z in ctx.residues():
        if z.is_zero():
            continue
        c = R.frobenius(chi_teich(ctx, z, inverse=True), s)
        acc = acc + ctx.psi(z).scale(c)
    return -acc


def gauss_ari(ctx: CarlitzContext) -> GaussSum:
    """g^ari = -sum_{z in (A/v)^x} chi(z^-1) psi(z)."""
    return _gauss_ari_cached(ctx)


@lru_cache(maxsize=None)
def _gauss_ari_cached(ctx: CarlitzContext) -> GaussSum:
    g = _gauss_ari_twisted(ctx, 0)
    return GaussSum("arithmetic", ctx, None, g, {0: g})


def gauss_ari_conjugate(ctx: CarlitzContext, s: int) -> TowerElem:
    return gauss_ari(ctx).conjugate(s)


def check_geo_x(ctx: CarlitzContext, x: RatFunc) -> Poly:
    """Validate x in (n-1)^-1 A with |x| < 1 and return a = x (n - 1)."""
    if not isinstance(x, RatFunc):
        x = RatFunc(x if isinstance(x, Poly) else Poly.const(ctx.F, x))
    m = ctx.n - Poly.const(ctx.F, 1)
    a = x * RatFunc(m)
    if not a.is_integral():
        raise DomainError("x is not in (v^ell - 1)^-1 A")
    if not x.num.is_zero() and x.degree() >= 0:
        raise DomainError("|x| >= 1")
    return a.num


def _gauss_geo_twisted(ctx: CarlitzContext, x: RatFunc, s: int) -> TowerElem:
    a = check_geo_x(ctx, x)
    T = ctx.geo_tower
    R = T.R
    acc = T.one(ctx.prec)
    for z in R.units():
        w = carlitz_action_code(R, T.zeta, a, R.inv(z))
        if w:
            acc = acc + ctx.omega(w).scale(R.frobenius(z, s))
    return acc


def gauss_geo(ctx: CarlitzContext, x: RatFunc) -> GaussSum:
    """g^geo_x = 1 + sum_{z in F_P^x} omega(C_{x(n-1)}(z^-1)) psi(z)."""
    if not isinstance(x, RatFunc):
        x = RatFunc(x if isinstance(x, Poly) else Poly.const(ctx.F, x))
    return _gauss_geo_cached(ctx, x)


@lru_cache(maxsize=4096)
def _gauss_geo_cached(ctx: CarlitzContext, x: RatFunc) -> GaussSum:
    g = _gauss_geo_twisted(ctx, x, 0)
    return GaussSum("geometric", ctx, x, g, {0: g})


# ----------------------------------------------------------------------
# the products G
# ----------------------------------------------------------------------


def y_digits(ctx: CarlitzContext, y) -> list[int]:
    """(y_0, ..., y_{d ell - 1}) with y = sum y_s q^s / (q^(d ell) - 1)."""
    y = Fraction(y)
    Q = ctx.big_q
    if not 0 <= y < 1:
        raise DomainError("y must satisfy 0 <= y < 1")
    m = y * (Q - 1)
    if m.denominator != 1:
        raise DomainError(f"y is not in (q^(d ell) - 1)^-1 Z (q^(d ell) = {Q})")
    ds = base_q_digits(int(m), ctx.q)
    return ds + [0] * (ctx.d * ctx.ell - len(ds))


def _conj_product(g: GaussSum, exps: list[int], one: TowerElem) -> TowerElem:
    acc = one
    for s, ys in enumerate(exps):
        if ys:
            acc = acc * g.conjugate(s) ** ys
    return acc


def big_G_ari(ctx: CarlitzContext, y) -> TowerElem:
    """(-1)^(ell(d-1)) prod_s (g^ari)^(y_s tau_q^s)."""
    ys = y_digits(ctx, y)
    T = ctx.ari_tower
    sign = T.from_int(-1 if (ctx.ell * (ctx.d - 1)) % 2 else 1, ctx.prec)
    return _conj_product(gauss_ari(ctx), ys, sign)


def big_G_geo(ctx: CarlitzContext, x, y) -> TowerElem:
    """prod_s (g^geo_x)^(y_s tau_q^s)."""
    ys = y_digits(ctx, y)
    return _conj_product(gauss_geo(ctx, x), ys, ctx.geo_tower.one(ctx.prec))


def big_G_geo_default(ctx: CarlitzContext, x) -> TowerElem:
    """prod_s (g^geo_x)^(tau_q^s), every exponent 1."""
    return _conj_product(gauss_geo(ctx, x), [1] * (ctx.d * ctx.ell), ctx.geo_tower.one(ctx.prec))


# ----------------------------------------------------------------------
# rational helpers for the geometric identities
# ----------------------------------------------------------------------


def x_digits(ctx: CarlitzContext, x) -> list[Poly]:
    """(x_0, ..., x_{ell-1}), deg x_j < d, with x = sum x_j v^j / (v^ell - 1)."""
    a = check_geo_x(ctx, x)
    out = []
    for _ in range(ctx.ell):
        a, r = divmod(a, ctx.v)
        out.append(r)
    return out


def _ratfunc(ctx: CarlitzContext, x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    return RatFunc(x if isinstance(x, Poly) else Poly.const(ctx.F, x))


def shifted_frac(ctx: CarlitzContext, x, j: int) -> RatFunc:
    """<v^j x>."""
    return (_ratfunc(ctx, x) * RatFunc(ctx.v**j)).frac_part()


def delta_factor(ctx: CarlitzContext, x, j: int) -> RatFunc:
    """v <v^(ell-j-1) x> when x_j is monic, else 1."""
    xj = x_digits(ctx, x)[j]
    if xj.is_monic():
        return RatFunc(ctx.v) * shifted_frac(ctx, x, ctx.ell - j - 1)
    return RatFunc(Poly.const(ctx.F, 1))


def _flat_frac(r: RatFunc, v: Poly) -> RatFunc:
    if r.num.is_zero() or (r.num % v).is_zero():
        return RatFunc(Poly.const(r.field, 1))
    return r


# ----------------------------------------------------------------------
# verifiers
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class GKTReport:
    case: str
    q: int
    v: str
    d: int
    ell: int
    x: str | None
    y: str | None
    N: int
    lhs: str
    rhs: str
    diff_valuation: int
    passed: bool
    retried: bool = False
    cleared: bool = False

    def to_dict(self) -> dict:
        return {
            "case": self.case, "q": self.q, "v": self.v, "d": self.d, "ell": self.ell,
            "x": self.x, "y": self.y, "N": self.N, "lhs": self.lhs, "rhs": self.rhs,
            "diff_valuation": self.diff_valuation, "pass": self.passed,
            "retried": self.retried, "cleared": self.cleared,
        }


def _frac_text(x) -> str | None:
    if x is None:
        return None
    if isinstance(x, RatFunc):
        return f"({x.num})/({x.den})" if x.den.deg > 0 else str(x.num)
    return str(Fraction(x))


def _report(ctx, case, x, y, N, lhs: TowerElem, rhs: TowerElem, cleared=False) -> GKTReport:
    dv = min((lhs - rhs).valuation(), N)
    return GKTReport(
        case, ctx.q, str(ctx.v), ctx.d, ctx.ell, _frac_text(x), _frac_text(y), N,
        lhs.truncate(N).to_text(), rhs.truncate(N).to_text(), dv, dv >= N, False, cleared,
    )


def _with_retry(run, ctx: CarlitzContext, N: int) -> GKTReport:
    rep = run(ctx.at_precision(N), N)
    if N - 2 <= rep.diff_valuation < N:
        rep2 = run(ctx.at_precision(2 * N), 2 * N)
        return GKTReport(**{**rep2.__dict__, "retried": True})
    return rep


def gamma_in_tower(g: GammaValue, T: Tower, prec: int) -> TowerElem:
    """Image of an A_v value in another tower over k_v."""
    return T.from_poly(g.value.value(), prec)


def ari_exponent(ctx: CarlitzContext, y) -> int:
    """(q^d - 1) sum_j <q^(dj) y>, asserted to be a non-negative integer."""
    y = Fraction(y)
    qd = ctx.q**ctx.d
    tot = sum((y * qd**j) % 1 for j in range(ctx.ell)) * (qd - 1)
    if tot.denominator != 1 or tot < 0:
        raise ArithmeticError(f"w-exponent {tot} is not a non-negative integer")
    return int(tot)


def verify_gkt_ari(ctx: CarlitzContext, y, N: int | None = None) -> GKTReport:
    def run(c: CarlitzContext, N: int) -> GKTReport:
        T, P = c.ari_tower, c.prec
        lhs = big_G_ari(c, y)
        k = ari_exponent(c, y)
        vprec = -(-P // T.e) + 1
        gam = vadic_gamma(c.F, c.v)
        rhs = T.uniformizer(P) ** k
        qd = c.q**c.d
        for j in range(c.ell):
            arg = (Fraction(y) * qd**j) % 1
            rhs = rhs * gamma_in_tower(gam.ari(arg, vprec), T, P)
        return _report(c, "ari", None, y, N, lhs, rhs)

    return _with_retry(run, ctx, N or ctx.N)


def verify_gkt_geo(ctx: CarlitzContext, x, N: int | None = None) -> GKTReport:
    x = _ratfunc(ctx, x)

    def run(c: CarlitzContext, N: int) -> GKTReport:
        T, P = c.geo_tower, c.prec
        lhs = big_G_geo_default(c, x)
        gam = vadic_gamma(c.F, c.v)
        num = T.one(P)
        den = T.one(P)
        for j in range(c.ell):
            xj = shifted_frac(c, x, j)
            dj = delta_factor(c, x, j)
            fl = _flat_frac(xj, c.v)
            num = num * T.from_frac(dj.num, dj.den, P)
            den = den * T.from_frac(fl.num, fl.den, P) * gamma_in_tower(gam.geo(xj, P), T, P)
        return _report(c, "geo", x, None, N, lhs, num * den.inverse())

    return _with_retry(run, ctx, N or ctx.N)


def verify_gkt_two(ctx: CarlitzContext, x, y, N: int | None = None) -> GKTReport:
    """Checked as lhs * prod delta^(q-1-y_.) = prod <v^j x>^flat * G(x)^(q-1) * prod Gamma^two."""
    x = _ratfunc(ctx, x)

    def run(c: CarlitzContext, N: int) -> GKTReport:
        T, P = c.geo_tower, c.prec
        ys = y_digits(c, y)
        xd = x_digits(c, x)
        gam = vadic_gamma(c.F, c.v)
        lhs = big_G_geo(c, x, y)
        rhs = big_G_geo_default(c, x) ** (c.q - 1)
        qd = c.q**c.d
        for j in range(c.ell):
            xj = shifted_frac(c, x, j)
            fl = _flat_frac(xj, c.v)
            rhs = rhs * T.from_frac(fl.num, fl.den, P)
            arg = (Fraction(y) * qd**j) % 1
            rhs = rhs * gamma_in_tower(gam.two(xj, arg, P), T, P)
            if xd[j].is_monic():  # otherwise delta = 1 and the digit index is never read
                dj = delta_factor(c, x, j)
                lhs = lhs * T.from_frac(dj.num, dj.den, P) ** (c.q - 1 - ys[c.d * j + xd[j].deg])
        return _report(c, "two", x, y, N, lhs, rhs, cleared=True)

    return _with_retry(run, ctx, N or ctx.N)


# ----------------------------------------------------------------------
# parameter grids
# ----------------------------------------------------------------------


def admissible_y(ctx: CarlitzContext) -> list[Fraction]:
    Q = ctx.big_q
    return [Fraction(m, Q - 1) for m in range(Q - 1)]


def admissible_x(ctx: CarlitzContext) -> list[RatFunc]:
    m = ctx.n - Poly.const(ctx.F, 1)
    out = [Poly(ctx.F, ())]
    for k in range(ctx.d * ctx.ell):
        out = [r + Poly.monomial(ctx.F, k, c) for c in ctx.F.elements() for r in out]
    return [RatFunc(a, m) for a in out]
