"""Bridge between digit expansions in A_v and Teichmuller power series.

The digit form writes x = sum x_i v^i with deg x_i < d; the series form writes
x = sum t_i v^i with t_i Teichmuller representatives (t^(q^d) = t).  The two
agree as elements of A_v; this module converts between them without going
through the theta-series embedding of :class:`Tower`, so the two routes can
check each other.
"""

from __future__ import annotations

from functools import lru_cache

from ..algebra import Poly
from .digits import Component, LocalElem
from .tower import Tower, TowerElem


@lru_cache(maxsize=None)
def teichmuller_poly(v: Poly, r: Poly, N: int) -> Poly:
    """The Teichmuller lift of r mod v, as a polynomial mod v^N."""
    if N == 0:
        return Poly(v.field, ())
    M = v**N
    Q = v.field.order ** v.deg
    x = r % M
    while True:
        y = x.powmod(Q, M)
        if y == x:
            return x
        x = y


def _check(comp: Component, tower: Tower) -> None:
    if comp.kind != "A" or comp.e != 1:
        raise ValueError("convert_rep needs an A_v component with pi = v")
    if comp.v != tower.v or comp.F != tower.F:
        raise ValueError("component and tower live over different places")


def to_tower(x: LocalElem, tower: Tower) -> TowerElem:
    """Digit form -> series form (precision N in v becomes N*e in the tower's uniformizer)."""
    comp = x.comp
    _check(comp, tower)
    v, N = comp.v, x.prec
    val = x.value()
    out = [0] * (N * tower.e)
    neg = tower.R.neg
    for k in range(N):
        r = val % v
        code = tower.residue_of_poly(r)
        pos = k * tower.e
        out[pos] = neg(code) if (tower.e > 1 and k % 2) else code
        rest = N - k - 1
        if rest == 0:
            break
        val = ((val - teichmuller_poly(v, r, rest + 1)) // v) % v**rest
    return TowerElem(tower, out)


def from_tower(t: TowerElem, comp: Component) -> LocalElem:
    """Series form (unramified tower, coefficients in A/v) -> digit form."""
    tower = t.tower
    _check(comp, tower)
    if tower.e != 1:
        raise ValueError("inverse conversion is defined on the unramified tower")
    v, N = comp.v, t.prec
    acc = Poly(v.field, ())
    vk = Poly.const(v.field, 1)
    for c in t.coeffs:
        if c:
            acc = acc + teichmuller_poly(v, tower.poly_of_residue(c), N) * vk
        vk = vk * v
    return LocalElem.from_value(comp, acc, N)


def convert_rep(x, target):
    """LocalElem -> TowerElem when target is a Tower; TowerElem -> LocalElem when it is a Component."""
    if isinstance(x, LocalElem):
        return to_tower(x, target)
    return from_tower(x, target)
