"""Print ord(G_n(x) - G_{n+1}(x)) for a few x as n grows."""

import argparse
import random

from gkt.local import Domain
from gkt.uniqueness import G_n, ProofParams, StepFn, ValuedField, coboundary


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--components", default="Av:2:theta")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--level", type=int, default=2, help="level of the hidden G; F has one more")
    ap.add_argument("--points", type=int, default=5)
    ap.add_argument("--nmax", type=int, default=10)
    args = ap.parse_args()

    D = Domain.parse(args.components)
    K = ValuedField.of_domain(D, 40)
    params = ProofParams.default(D)
    rng = random.Random(args.seed)
    F = coboundary(StepFn.random(D, K, args.level, rng))
    xs = [D.elem_from_key(tuple(tuple(rng.choice(c.digit_set) for _ in range(args.nmax + 4)) for c in D.comps))
          for _ in range(args.points)]

    print("n\t" + "\t".join(f"x{i}" for i in range(len(xs))))
    for n in range(2, args.nmax + 1):
        row = [G_n(F, x, n, params).diff_valuation(G_n(F, x, n + 1, params)) for x in xs]
        print(f"{n}\t" + "\t".join(map(str, row)))


if __name__ == "__main__":
    main()
