"""Command-line experiment harness: ``hermite-mult <subcommand> [options]``.

Every subcommand writes CSV or JSON records (stdout, or ``--out``) and exits
0 when its embedded checks pass, 1 when one fails and 2 on configuration
errors.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import acceptance as acc
from . import thresholds as th
from .errors import HermiteError
from .hermite_core import build_basis
from .hnorms import FLAVORS, MODES, hormander_norm
from .opnorms import band_opnorm, compactness_profile, lp_opnorm_lower, projection_opnorm_lower
from .operators import OperatorSpec, dyadic_range
from .report import FORMATS, emit_report, render
from .symbols import KINDS, parse_symbol


class ConfigError(Exception):
    """Bad command-line or config-file input (exit status 2)."""


# --------------------------------------------------------------------------
# argument helpers
# --------------------------------------------------------------------------

def parse_range(text, points=None):
    """Integers from ``a..b`` (inclusive), ``a..b:m`` (m log-spaced) or ``a,b,c``.

    ``points`` gives a default m for ``a..b``.
    """
    text = str(text).strip()
    try:
        if ".." in text:
            span, _, count = text.partition(":")
            lo, hi = (int(v) for v in span.split(".."))
            count = int(count) if count else points
            if lo > hi or lo < 0:
                raise ConfigError(f"bad range {text!r}")
            if count is None:
                return list(range(lo, hi + 1))
            if lo == 0:
                raise ConfigError("log-spaced ranges must start at a positive index")
            return sorted({int(v) for v in np.round(np.geomspace(lo, hi, count))})
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad integer list or range {text!r}") from None


def parse_exponents(text):
    """Comma separated exponents; each may be a rational like 10/3 or inf."""
    try:
        return [th.as_exponent(v) for v in str(text).split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad exponent list {text!r}") from None


def exp_float(p):
    return math.inf if p == math.inf else float(p)


def exp_label(p):
    return "inf" if p == math.inf else str(p)


def read_config(path):
    """Flat ``key = value`` file; '#' starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for num, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{num}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _symbol(args, kind=None):
    kind = kind or args.kind
    if not args.symbol:
        raise ConfigError("--symbol is required")
    arity = getattr(args, "arity", 2) if kind == "multilinear" else 1
    try:
        return parse_symbol(args.symbol, n=args.n, kind=kind, arity=arity)
    except (HermiteError, ValueError, OSError) as exc:
        raise ConfigError(f"bad symbol {args.symbol!r}: {exc}") from None


# --------------------------------------------------------------------------
# subcommands: each returns (records, fields, passed)
# --------------------------------------------------------------------------

def slope_target(p):
    """Expected 1-D slope of log ||phi_nu||_p against log nu, or a bracket at p = 4."""
    if p == math.inf:
        return -1.0 / 12.0
    p = float(p)
    if p < 4:
        return 0.5 / p - 0.25
    if p == 4:
        return None
    return -1.0 / (6 * p) - 1.0 / 12.0


def cmd_asymptotics(args):
    if args.n != 1:
        raise ConfigError("asymptotics fits one-dimensional norms (--n 1)")
    nus = parse_range(args.nu, args.points)
    if len(nus) < 2 or min(nus) < 1:
        raise ConfigError("need at least two positive indices")
    ps = parse_exponents(args.p)
    norms = acc.asymptotic_norms(tuple(nus), tuple(exp_float(p) for p in ps))
    records, ok = [], True
    for p in ps:
        pf = exp_float(p)
        slope = acc.fit_slope(nus, [norms[k][pf] for k in nus])
        target = slope_target(p)
        if target is None:
            passed = -0.125 < slope < -0.10
            target = float("nan")
        else:
            passed = abs(slope - target) <= args.tol
        ok &= passed
        records.append({"seed": args.seed, "n": args.n, "p": exp_label(p), "nu_min": nus[0],
                        "nu_max": nus[-1], "points": len(nus), "slope": slope,
                        "target": target, "passed": passed})
    return records, None, ok


def cmd_gamma_fit(args):
    if args.n not in (1, 2):
        raise ConfigError("gamma-fit supports n = 1 and diagonal indices in n = 2")
    nus = parse_range(args.nu, args.points)
    ps = parse_exponents(args.p)
    pairs = []
    for p in ps:
        if p != math.inf and p <= 1:
            raise ConfigError("gamma-fit needs p in (1, inf]")
        pairs.append((p, th.conjugate(p)))
    flat = tuple(sorted({exp_float(v) for pair in pairs for v in pair}))
    norms = acc.asymptotic_norms(tuple(nus), flat)
    records, ok = [], True
    for p, q in pairs:
        vals = [norms[k][exp_float(p)] * norms[k][exp_float(q)] for k in nus]
        sizes = nus
        if args.n == 2:
            vals = [v * v for v in vals]
            sizes = [2 * k for k in nus]
        slope = acc.fit_slope(sizes, vals)
        gamma = float(th.gamma(args.n, p))
        passed = slope <= gamma + args.tol
        ok &= passed
        records.append({"seed": args.seed, "n": args.n, "p": exp_label(p), "slope": slope,
                        "gamma": gamma, "tol": args.tol, "passed": passed})
    return records, None, ok


def cmd_lowerbound(args):
    s = _symbol(args)
    basis = build_basis(args.n, args.N)
    ps = parse_exponents(args.p)
    records, ok = [], True
    nu = basis.indices()
    m = np.abs(s.at_multi_indices(nu)) if not s.depends_on_x else None
    for p in ps:
        q = p if args.q is None else th.as_exponent(args.q)
        est = lp_opnorm_lower(s, exp_float(p), exp_float(q), basis, n_random=args.random, seed=args.seed)
        sup = float(m.max()) if m is not None else float("nan")
        passed = True
        if m is not None and p == q:
            passed = est.value >= sup - args.tol
        ok &= passed
        records.append({"seed": args.seed, "symbol": args.symbol, "n": args.n, "N": args.N,
                        "p": exp_label(p), "q": exp_label(q), "lower_bound": est.value,
                        "sup_m": sup, "witness": est.witness, "passed": passed})
    return records, None, ok


def cmd_compactness(args):
    s = _symbol(args)
    basis = build_basis(args.n, args.N)
    ks = parse_range(args.k)
    records, ok = [], True
    for k, tail_sup, measured in compactness_profile(s, ks, basis):
        passed = s.depends_on_x or abs(measured - tail_sup) < args.tol
        ok &= passed
        records.append({"symbol": args.symbol, "k": k, "tail_sup": tail_sup,
                        "measured": measured, "passed": passed})
    return records, None, ok


def cmd_lp_blocks(args):
    s = _symbol(args)
    basis = build_basis(args.n, args.N)
    nu = basis.indices()
    size = nu.sum(axis=1)
    ks = parse_range(args.k) if args.k else dyadic_range(args.N)
    records, ok = [], True
    for k in ks:
        measured = band_opnorm(OperatorSpec(s, basis, "dyadic-block", k)).value
        shell = (size >= 2**k) & (size < 2 ** (k + 1))
        sup = float("nan")
        passed = True
        if not s.depends_on_x:
            sup = float(np.abs(s.at_multi_indices(nu[shell])).max())
            passed = abs(measured - sup) < args.tol
        ok &= passed
        records.append({"symbol": args.symbol, "k": k, "block_norm": measured,
                        "shell_sup": sup, "passed": passed})
    return records, None, ok


def cmd_hormander_norm(args):
    kind = args.kind
    if args.flavor.startswith("multilinear"):
        kind = "multilinear"
    s = _symbol(args, kind)
    ks = parse_range(args.k) if args.k else None
    rep = hormander_norm(s, args.flavor, args.s, args.mode, ks)
    records = [{"flavor": rep.flavor, "mode": rep.mode, "s": rep.s, "k": b["k"],
                "value": b["value"]} for b in rep.blocks]
    ok = all(math.isfinite(b["value"]) for b in rep.blocks)
    print(f"sup {rep.sup:.6g} at {rep.argsup}, tail slope {rep.tail_slope:.4f}", file=sys.stderr)
    return records, None, ok


def cmd_thresholds(args):
    if args.kind is None:
        raise ConfigError("--kind is required")
    needs_p = args.kind not in ("gamma-infty", "theta-infty")
    ps = parse_exponents(args.p) if args.p is not None else []
    if needs_p and not ps:
        raise ConfigError(f"--p is required for {args.kind}")
    if args.kind == "s-multilinear" and args.kappa is None:
        raise ConfigError("--kappa is required for s-multilinear")
    records = []
    for p in ps or [None]:
        val = th.s_threshold(args.kind, args.n, p, args.kappa, args.literal)
        row = {"n": args.n, "p": "" if p is None else exp_label(p), "value": float(val)}
        if args.exact:
            row["exact"] = str(val)
        records.append(row)
    return records, None, True


def cmd_karadzhov(args):
    ls = parse_range(args.l)
    p = float(th.as_exponent(args.p))
    if not 1 <= p <= 2:
        raise ConfigError("karadzhov needs 1 <= p <= 2")
    basis = build_basis(args.n, max(ls))
    records = []
    for l in ls:
        est = projection_opnorm_lower(l, p, basis, seed=args.seed)
        records.append({"seed": args.seed, "n": args.n, "p": p, "l": l, "value": est.value, "kind": est.kind})
    ok = True
    if p == 1 and len(ls) > 1:
        slope = acc.fit_slope(ls, [r["value"] for r in records])
        limit = float(th.delta(args.n, 1)) - 0.5 + args.tol
        ok = slope <= limit
        print(f"fitted slope {slope:+.4f} (limit {limit:.4f})", file=sys.stderr)
    return records, None, ok


def cmd_littlewood_paley(args):
    res = acc.criterion_littlewood_paley(seed=args.seed, N=args.N, count=args.count, n=args.n)
    m = res.measured
    records = [{"seed": args.seed, "draw": i, "ratio": r, "lower": m["frame_bound"], "upper": 1.0}
               for i, r in enumerate(m["ratios"])]
    return records, None, res.passed


def cmd_multilinear_demo(args):
    res = acc.criterion_multilinear(N=args.N)
    m = res.measured
    records = [{"check": key, "error": m[key], "passed": m[key] < 1e-8}
               for key in ("product_error", "general_error", "separable_error")]
    records.append({"check": "s_multilinear(2,2,1)", "error": 0.0 if m["s_multilinear_221"] == "13/2" else 1.0,
                    "passed": m["s_multilinear_221"] == "13/2"})
    return records, None, res.passed


def cmd_selftest(args):
    numbers = parse_range(args.only) if args.only else None
    if numbers and any(k not in acc.CRITERIA for k in numbers):
        raise ConfigError(f"criteria are numbered 1..{len(acc.CRITERIA)}")
    results = []
    for k in numbers or sorted(acc.CRITERIA):
        res = acc.run_criterion(k, args.seed)
        print(res.line(), file=sys.stderr, flush=True)
        results.append(res)
    records = [dict(r.record(), seed=args.seed) for r in results]
    return records, None, all(r.passed for r in results)


COMMANDS = {
    "asymptotics": cmd_asymptotics,
    "gamma-fit": cmd_gamma_fit,
    "lowerbound": cmd_lowerbound,
    "compactness": cmd_compactness,
    "lp-blocks": cmd_lp_blocks,
    "hormander-norm": cmd_hormander_norm,
    "thresholds": cmd_thresholds,
    "karadzhov": cmd_karadzhov,
    "littlewood-paley": cmd_littlewood_paley,
    "multilinear-demo": cmd_multilinear_demo,
    "selftest": cmd_selftest,
}


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file; command-line flags override it")
    common.add_argument("--seed", type=int, default=acc.DEFAULT_SEED)
    common.add_argument("--format", choices=FORMATS, default="csv")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--n", type=int, default=None, help="dimension (default 1; 2 for karadzhov)")

    parser = _Parser(prog="hermite-mult", description="Hermite multiplier experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("asymptotics", "fitted log-log slopes of ||phi_nu||_p")
    p.add_argument("--p", default="1,2,4,6,inf")
    p.add_argument("--nu", default="64..4096")
    p.add_argument("--points", type=int, default=13, help="log-spaced points for a..b ranges")
    p.add_argument("--tol", type=float, default=0.02)

    p = add("gamma-fit", "slopes of ||phi_nu||_p ||phi_nu||_p' against gamma(n, p)")
    p.add_argument("--p", default="3,6,inf")
    p.add_argument("--nu", default="64..4096")
    p.add_argument("--points", type=int, default=13)
    p.add_argument("--tol", type=float, default=0.02)

    p = add("lowerbound", "lower bounds for Lp operator norms of multipliers")
    p.add_argument("--symbol")
    p.add_argument("--kind", choices=KINDS, default="multiplier")
    p.add_argument("--p", default="2")
    p.add_argument("--q", default=None)
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--random", type=int, default=8, help="number of random test functions")
    p.add_argument("--tol", type=float, default=1e-6)

    p = add("compactness", "L2 norms of tails T - T_(k-1) against sup of the symbol")
    p.add_argument("--symbol")
    p.add_argument("--kind", choices=KINDS, default="multiplier")
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--k", default="2,4,8,16,32")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("lp-blocks", "L2 norms of dyadic blocks against shell sups")
    p.add_argument("--symbol")
    p.add_argument("--kind", choices=KINDS, default="multiplier")
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--k", default=None)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("hormander-norm", "per-block Hormander norms of a symbol")
    p.add_argument("--symbol")
    p.add_argument("--kind", choices=KINDS, default="multiplier")
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--flavor", choices=FLAVORS, default="FT")
    p.add_argument("--mode", choices=MODES, default=None)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--k", default=None)

    p = add("thresholds", "closed-form exponents and regularity thresholds")
    p.add_argument("--kind", choices=th.KINDS)
    p.add_argument("--p", default=None)
    p.add_argument("--kappa", type=int, default=None)
    p.add_argument("--literal", action="store_true", help="tabulated p < 2 formulas")
    p.add_argument("--exact", action="store_true", help="add the rational value")

    p = add("karadzhov", "spectral projection norms ||P_l||_(p -> p')")
    p.add_argument("--p", default="1")
    p.add_argument("--l", default="8..64")
    p.add_argument("--tol", type=float, default=0.1)

    p = add("littlewood-paley", "square-function ratios for random band-limited f")
    p.add_argument("--N", type=int, default=256)
    p.add_argument("--count", type=int, default=50)

    p = add("multilinear-demo", "bilinear operator consistency checks")
    p.add_argument("--N", type=int, default=48)

    p = add("selftest", "run the full acceptance suite")
    p.add_argument("--only", default=None, help="criterion numbers, e.g. 1,4,6")
    return parser


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        conf = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
        unknown = set(conf) - set(actions)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        # command-line values win: only fill options left at their defaults
        given = parser.parse_args(argv)
        for key, text in conf.items():
            action = actions[key]
            if getattr(given, key) != action.default:
                continue
            try:
                if isinstance(action, argparse._StoreTrueAction):
                    if text.lower() not in _TRUE | _FALSE:
                        raise ValueError(text)
                    value = text.lower() in _TRUE
                else:
                    value = action.type(text) if action.type else text
            except ValueError:
                raise ConfigError(f"bad value for {key}: {text!r}") from None
            if action.choices is not None and value not in action.choices:
                raise ConfigError(f"bad value for {key}: {text!r}")
            setattr(args, key, value)
    if args.n is None:
        args.n = 2 if args.command == "karadzhov" else 1
    if args.n < 1:
        raise ConfigError("--n must be positive")
    return args


def main(argv=None):
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        records, fields, ok = COMMANDS[args.command](args)
        if args.out:
            emit_report(records, args.format, args.out, fields)
        else:
            sys.stdout.write(render(records, args.format, fields))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (HermiteError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not ok:
        print("assertion failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
