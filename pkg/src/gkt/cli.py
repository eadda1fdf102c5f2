"""Command-line entry point: ``gkt gamma|gauss|gkt|unique``.

Output is TSV (default) or JSON lines, deterministic for a fixed
configuration and seed.  Exit status is 0 iff every check passed; argument
and domain errors go to stderr with status 2.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import FiniteField, RatFunc, parse_poly, parse_ratfunc
from .carlitz import (
    admissible_x,
    admissible_y,
    context,
    gauss_ari,
    gauss_geo,
    verify_gkt_ari,
    verify_gkt_geo,
    verify_gkt_two,
)
from .gamma import carlitz_factorial, morita_gamma_p, vadic_gamma
from .local.digits import Component, Domain
from .uniqueness import (
    CocycleError,
    ConvergenceError,
    ProofParams,
    StepFn,
    ValuedField,
    build_H,
    check_product_identity,
    coboundary,
    recover_G,
    recover_G_minus,
)

SECTION3_DEFAULT = "Zp:3:S=0|1|-1,Av:2:theta:S=0|theta+1"


@dataclass(frozen=True)
class SessionConfig:
    q: int = 2
    v: str = "theta"
    ell: int = 1
    N: int = 40
    seed: int = 0
    fmt: str = "tsv"
    max_rows: int = 4096

    @property
    def field(self) -> FiniteField:
        return FiniteField.prime(self.q)

    @property
    def place(self):
        v = parse_poly(self.field, self.v)
        if not v.is_monic() or not v.is_irreducible():
            raise ValueError(f"v = {self.v} is not monic irreducible over F_{self.q}")
        return v

    @property
    def d(self) -> int:
        return self.place.deg


class Emitter:
    """Buffered TSV / JSON-lines writer with a trailing summary."""

    def __init__(self, fmt: str, columns: Sequence[str], out=None):
        self.fmt, self.columns = fmt, list(columns)
        self.out = out or sys.stdout
        self.rows: list[dict] = []

    def row(self, **kw) -> None:
        self.rows.append(kw)

    def flush(self, summary: dict) -> None:
        w = self.out.write
        if self.fmt == "json":
            for r in self.rows:
                w(json.dumps(r, sort_keys=True, default=str) + "\n")
            w(json.dumps({"summary": summary}, sort_keys=True) + "\n")
            return
        w("\t".join(self.columns) + "\n")
        for r in self.rows:
            w("\t".join(_cell(r.get(c)) for c in self.columns) + "\n")
        w("# " + " ".join(f"{k}={_cell(v)}" for k, v in summary.items()) + "\n")


def _cell(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "pass" if x else "FAIL"
    return str(x)


def _config(args) -> SessionConfig:
    return SessionConfig(
        q=args.q, v=args.v, ell=args.ell, N=args.N, seed=getattr(args, "seed", 0),
        fmt=args.format, max_rows=args.max_rows,
    )


def _parse_y(text: str) -> Fraction:
    return Fraction(text)


def _parse_x(F: FiniteField, text: str) -> RatFunc:
    return parse_ratfunc(F, text)


# ----------------------------------------------------------------------
# gamma
# ----------------------------------------------------------------------


def cmd_gamma(args) -> int:
    cfg = _config(args)
    out = sys.stdout
    if args.kind == "carlitz":
        if args.y is None or int(args.y) < 0:
            raise ValueError("carlitz factorial needs --y >= 0")
        out.write(carlitz_factorial(int(args.y), cfg.field).to_text() + "\n")
        return 0
    if args.kind == "morita":
        if args.x is None:
            raise ValueError("morita needs --x")
        val = morita_gamma_p(Fraction(args.x), args.N, args.p)
        if cfg.fmt == "json":
            out.write(json.dumps({"value": val.to_text(), "integer": val.value()}, sort_keys=True) + "\n")
        else:
            out.write(val.to_text() + "\n")
        return 0
    F, v = cfg.field, cfg.place
    gam = vadic_gamma(F, v)
    if args.kind == "ari":
        if args.arg is None:
            raise ValueError("ari needs --arg (the argument y+1)")
        g = gam.ari(Fraction(args.arg), args.N)
    elif args.kind == "geo":
        if args.x is None:
            raise ValueError("geo needs --x")
        g = gam.geo(_parse_x(F, args.x), args.N)
    else:
        if args.x is None or args.arg is None:
            raise ValueError("two needs --x and --arg")
        g = gam.two(_parse_x(F, args.x), Fraction(args.arg), args.N)
    d = g.to_dict()
    if cfg.fmt == "json":
        out.write(json.dumps(d, sort_keys=True) + "\n")
    else:
        out.write(f"value\t{d['value']}\n")
        for k, val in d.get("certificate", {}).items():
            out.write(f"{k}\t{val}\n")
    return 0


# ----------------------------------------------------------------------
# gauss / gkt
# ----------------------------------------------------------------------


def cmd_gauss(args) -> int:
    cfg = _config(args)
    ctx = context(cfg.field, cfg.place, cfg.ell, cfg.N)
    if args.kind == "ari":
        g = gauss_ari(ctx)
    else:
        if args.x is None:
            raise ValueError("geo Gauss sum needs --x")
        g = gauss_geo(ctx, _parse_x(cfg.field, args.x))
    em = Emitter(cfg.fmt, ["s", "value"])
    for s in range(g.period if args.conjugates else 1):
        em.row(s=s, value=g.conjugate(s).truncate(cfg.N).to_text())
    em.flush({"case": g.case, "period": g.period, "N": cfg.N})
    return 0


GKT_COLUMNS = ["case", "q", "v", "d", "ell", "x", "y", "N", "diff_valuation", "pass"]


def cmd_gkt(args) -> int:
    cfg = _config(args)
    ctx = context(cfg.field, cfg.place, cfg.ell, cfg.N)
    F = cfg.field
    if args.all:
        xs = admissible_x(ctx) if args.case in ("geo", "two") else [None]
        ys = admissible_y(ctx) if args.case in ("ari", "two") else [None]
    else:
        xs = [_parse_x(F, args.x) if args.x else None]
        ys = [_parse_y(args.y) if args.y else None]
        if args.case in ("geo", "two") and xs[0] is None:
            raise ValueError(f"gkt {args.case} needs --x or --all")
        if args.case in ("ari", "two") and ys[0] is None:
            raise ValueError(f"gkt {args.case} needs --y or --all")
    if len(xs) * len(ys) > cfg.max_rows:
        raise ValueError(f"grid of {len(xs) * len(ys)} rows exceeds --max-rows {cfg.max_rows}")
    em = Emitter(cfg.fmt, GKT_COLUMNS + (["lhs", "rhs"] if args.show_values else []))
    npass = 0
    for x in xs:
        for y in ys:
            if args.case == "ari":
                rep = verify_gkt_ari(ctx, y)
            elif args.case == "geo":
                rep = verify_gkt_geo(ctx, x)
            else:
                rep = verify_gkt_two(ctx, x, y)
            d = rep.to_dict()
            if not args.show_values and cfg.fmt == "tsv":
                d.pop("lhs"), d.pop("rhs")
            em.row(**d)
            npass += rep.passed
    total = len(xs) * len(ys)
    em.flush({"total": total, "passed": npass, "failed": total - npass})
    return 0 if npass == total else 1


# ----------------------------------------------------------------------
# unique
# ----------------------------------------------------------------------


def _domain(args) -> Domain:
    text = args.components or (SECTION3_DEFAULT if args.mode == "section3" else "Zp:3")
    D = Domain.parse(text)
    if args.digits:
        with open(args.digits) as fh:
            table = json.load(fh)
        comps = []
        for c in D.comps:
            digs = table.get(c.cid)
            if digs is None:
                comps.append(c)
                continue
            if c.kind == "Z":
                comps.append(Component.Zp(c.p, c.e, [int(t) for t in digs]))
            else:
                comps.append(Component.Av(c.F, c.v, c.e, [parse_poly(c.F, str(t)) for t in digs]))
        D = Domain(tuple(comps))
    if args.mode == "section3" and D.canonical:
        raise ValueError("section3 mode needs at least one custom digit set (S=...)")
    return D


def _params(args, D: Domain) -> ProofParams:
    if not args.b:
        return ProofParams.default(D)
    toks = args.b.split(";")
    if len(toks) != len(D.comps):
        raise ValueError("--b needs one digit per component, separated by ';'")
    p = ProofParams(tuple(c.parse_digit(t) for c, t in zip(D.comps, toks)))
    p.validate(D)
    return p


def _levels(text: str) -> tuple[int, int]:
    parts = [int(t) for t in text.split(",")]
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2 or min(parts) < 0:
        raise ValueError("--levels is 'm' or 'mGamma,mG' with non-negative entries")
    return parts[0], parts[1]


def _value_field(args, D: Domain) -> ValuedField:
    if args.K:
        return ValuedField.parse(args.K, args.prec)
    return ValuedField.of_domain(D, args.prec)


def _run_forward(args, D: Domain, em: Emitter) -> tuple[int, int]:
    K = _value_field(args, D)
    rng = random.Random(args.seed)
    lg, lG = _levels(args.levels)
    gamma = StepFn.random(D, K, lg, rng)
    G = StepFn.random(D, K, lG, rng)
    H = build_H(gamma, G)
    total = ok = 0
    for n in range(1, args.n + 1):
        rep = check_product_identity(H, gamma, n)
        for p in rep.points:
            x = ",".join(str(t) for t in p.x(D))
            good = p.passed and p.forms_agree
            em.row(stage="forward", n=n, x=x, lhs=p.lhs.to_text(), rhs=p.rhs.to_text(),
                   forms_agree=p.forms_agree, **{"pass": good})
            total += 1
            ok += good
    return total, ok


def _run_recover(args, D: Domain, em: Emitter) -> tuple[int, int]:
    K = _value_field(args, D)
    rng = random.Random(args.seed)
    _, lG = _levels(args.levels)
    G0 = StepFn.random(D, K, lG, rng)
    minus = args.sign == "minus"
    F = coboundary(G0, "neg" if minus else "phi")
    rec = (recover_G_minus if minus else recover_G)(F, args.r, _params(args, D))
    for n, dv in rec.trace:
        em.row(stage="trace", n=n, diff_valuation=dv)
    good = rec.residual >= args.r
    em.row(stage="residual", n=rec.n_final, diff_valuation=rec.residual, **{"pass": good})
    return 1, int(good)


UNIQUE_COLUMNS = ["stage", "n", "x", "lhs", "rhs", "forms_agree", "diff_valuation", "pass"]


def cmd_unique(args) -> int:
    D = _domain(args)
    em = Emitter(args.format, UNIQUE_COLUMNS)
    total = ok = 0
    if args.mode in ("forward", "section3"):
        t, o = _run_forward(args, D, em)
        total, ok = total + t, ok + o
    if args.mode in ("recover", "section3"):
        t, o = _run_recover(args, D, em)
        total, ok = total + t, ok + o
    em.flush({"domain": D.cid, "seed": args.seed, "checks": total, "passed": ok, "failed": total - ok})
    return 0 if ok == total else 1


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=int, default=2, help="prime field size")
    p.add_argument("--v", default="theta", help="monic irreducible place, e.g. theta^2+theta+1")
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--N", type=int, default=40, help="precision in uniformizer digits")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--max-rows", type=int, default=4096)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gkt", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file whose keys mirror the long flags")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gamma", help="evaluate a gamma function")
    g.add_argument("kind", choices=("ari", "geo", "two", "carlitz", "morita"))
    _common(g)
    g.add_argument("--x", help="argument in A_v (geo, two) or Z_p (morita)")
    g.add_argument("--y", help="integer y for the Carlitz factorial")
    g.add_argument("--arg", help="Z_p argument y+1 (ari, two)")
    g.add_argument("--p", type=int, default=3, help="prime for morita")
    g.set_defaults(func=cmd_gamma)

    s = sub.add_parser("gauss", help="arithmetic or geometric Gauss sum")
    s.add_argument("kind", choices=("ari", "geo"))
    _common(s)
    s.add_argument("--x")
    s.add_argument("--conjugates", action="store_true", help="also print all Frobenius conjugates")
    s.set_defaults(func=cmd_gauss)

    k = sub.add_parser("gkt", help="verify a Gross-Koblitz-Thakur identity")
    k.add_argument("case", choices=("ari", "geo", "two"))
    _common(k)
    k.add_argument("--x")
    k.add_argument("--y")
    k.add_argument("--all", action="store_true", help="sweep the full admissible grid")
    k.add_argument("--show-values", action="store_true", help="include lhs/rhs series columns")
    k.set_defaults(func=cmd_gkt)

    u = sub.add_parser("unique", help="step-function checks of the classification")
    u.add_argument("mode", choices=("forward", "recover", "section3"))
    u.add_argument("--components", help="e.g. Zp:3,Av:2:theta or Zp:3:S=0|1|-1")
    u.add_argument("--digits", help="JSON file mapping component descriptors to digit lists")
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--levels", default="2,3", help="'m' or 'mGamma,mG'")
    u.add_argument("--n", type=int, default=4, help="largest period to check")
    u.add_argument("--r", type=int, default=12, help="target precision for recovery")
    u.add_argument("--b", help="fixed-point digits, one per component, ';'-separated")
    u.add_argument("--sign", choices=("plus", "minus"), default="plus")
    u.add_argument("--K", help="value field descriptor (default: first component)")
    u.add_argument("--prec", type=int, default=40, help="relative precision in K")
    u.add_argument("--format", choices=("tsv", "json"), default="tsv")
    u.set_defaults(func=cmd_unique)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv: Sequence[str] | None) -> argparse.Namespace:
    args = ap.parse_args(argv)
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        # explicit flags win over file values
        given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in (argv or sys.argv[1:]) if a.startswith("--")}
        for key, val in cfg.items():
            key = key.replace("-", "_")
            if key not in given and hasattr(args, key):
                setattr(args, key, val)
    return args


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = _apply_config(ap, argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, KeyError, OSError, CocycleError, ConvergenceError) as exc:
        print(f"gkt: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
