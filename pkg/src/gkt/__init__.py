"""Gross-Koblitz-Thakur formulas for v-adic gammas over F_q[theta], and the
classification of functions satisfying such product identities.
"""

from .algebra import FiniteField, Poly, RatFunc, parse_poly, parse_ratfunc
from .carlitz import (
    CarlitzContext,
    GKTReport,
    context,
    gauss_ari,
    gauss_geo,
    verify_gkt_ari,
    verify_gkt_geo,
    verify_gkt_two,
)
from .gamma import (
    carlitz_factorial,
    gamma_geo_global,
    gamma_v_ari,
    gamma_v_geo,
    gamma_v_two,
    morita_gamma_p,
    sinnott_valuation,
)
from .uniqueness import StepFn, ValuedField, build_H, check_product_identity, recover_G, recover_G_minus

__version__ = "0.1.0"

__all__ = [
    "CarlitzContext",
    "FiniteField",
    "GKTReport",
    "Poly",
    "RatFunc",
    "StepFn",
    "ValuedField",
    "build_H",
    "carlitz_factorial",
    "check_product_identity",
    "context",
    "gamma_geo_global",
    "gamma_v_ari",
    "gamma_v_geo",
    "gamma_v_two",
    "gauss_ari",
    "gauss_geo",
    "morita_gamma_p",
    "parse_poly",
    "parse_ratfunc",
    "recover_G",
    "recover_G_minus",
    "sinnott_valuation",
    "verify_gkt_ari",
    "verify_gkt_geo",
    "verify_gkt_two",
]
