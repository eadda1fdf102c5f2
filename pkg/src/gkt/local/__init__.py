"""Truncated arithmetic in completions, digit shifts, and local-field towers."""

from .convert import convert_rep, from_tower, teichmuller_poly, to_tower
from .digits import (
    Component,
    Domain,
    LocalElem,
    NotIntegral,
    PeriodicPoint,
    PrecisionExhausted,
    ProdElem,
    digits_of,
    frac_orbit,
    frac_part,
    neg_phi_neg,
    orbit_sets_equal,
    periodic_points,
    phi,
    shift_orbit,
)
from .tower import HenselError, PrecisionError, Tower, TowerElem, hensel_lift, teichmuller_lift

__all__ = [
    "Component", "Domain", "HenselError", "LocalElem", "NotIntegral", "PeriodicPoint",
    "PrecisionError", "PrecisionExhausted", "ProdElem", "Tower", "TowerElem", "convert_rep",
    "digits_of", "frac_orbit", "frac_part", "from_tower", "hensel_lift", "neg_phi_neg",
    "orbit_sets_equal", "periodic_points", "phi", "shift_orbit", "teichmuller_lift",
    "teichmuller_poly", "to_tower",
]
