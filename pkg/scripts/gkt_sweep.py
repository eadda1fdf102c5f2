"""Sweep the three GKT verifiers over a grid of (q, v, ell) and report timings.

    python scripts/gkt_sweep.py                 # desk grid, N=40
    python scripts/gkt_sweep.py --wide --N 30   # larger places and fields
"""

import argparse
import time

from gkt import carlitz as cz
from gkt.algebra import FiniteField, parse_poly

DESK = [(2, "theta", 1), (2, "theta", 2), (3, "theta", 1), (3, "theta", 2), (2, "theta^2+theta+1", 1)]
WIDE = [(3, "theta^2+1", 1), (2, "theta", 3), (5, "theta", 1), (2, "theta^3+theta+1", 1),
        (3, "theta+1", 1), (5, "theta+2", 1)]


def reports(kind, ctx, N, two_cap):
    if kind == "ari":
        return [cz.verify_gkt_ari(ctx, y, N) for y in cz.admissible_y(ctx)]
    if kind == "geo":
        return [cz.verify_gkt_geo(ctx, x, N) for x in cz.admissible_x(ctx)]
    xs, ys = cz.admissible_x(ctx), cz.admissible_y(ctx)
    if len(xs) * len(ys) > two_cap:
        return None
    return [cz.verify_gkt_two(ctx, x, y, N) for x in xs for y in ys]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=40)
    ap.add_argument("--wide", action="store_true", help="use the larger grid")
    ap.add_argument("--two-cap", type=int, default=80, help="skip two-variable grids above this size")
    args = ap.parse_args()

    print("kind\tq\tv\tell\tcases\tfailed\tmin_diff\tseconds")
    for kind in ("ari", "geo", "two"):
        for q, v, ell in WIDE if args.wide else DESK:
            F = FiniteField.prime(q)
            t0 = time.perf_counter()
            ctx = cz.context(F, parse_poly(F, v), ell, args.N)
            reps = reports(kind, ctx, args.N, args.two_cap)
            if reps is None:
                print(f"{kind}\t{q}\t{v}\t{ell}\tskipped")
                continue
            failed = sum(not r.passed for r in reps)
            low = min(r.diff_valuation for r in reps)
            print(f"{kind}\t{q}\t{v}\t{ell}\t{len(reps)}\t{failed}\t{low}\t{time.perf_counter() - t0:.2f}")


if __name__ == "__main__":
    main()
