"""Command-line entry point: ``laplace-carleson <subcommand> ...``.

Exit codes: 0 success, 2 malformed input, 3 unconverged computation,
4 hypothesis violation.  Every report is a JSON envelope holding the command,
the effective configuration, the library version, a timestamp and the result;
``--format csv`` writes the tabular part instead.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .errors import HypothesisError, LaplaceCarlesonError, QuadratureError

EXIT_OK, EXIT_MALFORMED, EXIT_UNCONVERGED, EXIT_HYPOTHESIS = 0, 2, 3, 4


class Malformed(Exception):
    """Input that cannot be parsed; the message names the offending field."""


def _timestamp():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def envelope(command, config, result):
    return {"command": command, "config": config, "version": __version__,
            "timestamp": _timestamp(), "result": result}


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def _emit(args, text):
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)


def _kv_csv(d):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("key", "value"))
    for k in sorted(d):
        v = d[k]
        w.writerow((k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v))
    return buf.getvalue()


def _read_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise Malformed(f"{what} file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise Malformed(f"malformed {what} JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _config_echo(args, skip=("func", "output")):
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# subcommands

def cmd_carleson(args):
    from .measures import carleson_sup, measure_from_json
    raw = _read_json(args.measure, "measure")
    try:
        mu = measure_from_json(raw)
    except ValueError as exc:
        raise Malformed(str(exc)) from None
    rep = carleson_sup(mu, args.beta, family=args.family)
    result = rep.to_dict()
    result["measure_kind"] = mu.kind
    if args.format == "csv":
        _emit(args, _kv_csv(result))
    else:
        _emit(args, dumps(envelope("carleson", _config_echo(args), result)))
    return EXIT_OK if rep.converged else EXIT_UNCONVERGED


def _list_theorems(args):
    from .theorems import id_table
    rows = id_table()
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("id", "name", "inequality", "hypotheses"))
        w.writerows(rows)
        _emit(args, buf.getvalue())
    else:
        width = max(len(r[0]) for r in rows)
        lines = [f"{r[0]:<{width}}  {r[1]}\n{'':<{width}}  {r[2]}\n{'':<{width}}  hypotheses: {r[3]}"
                 for r in rows]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _verify_config(args):
    """Merge the TOML config (if any) with explicit flags; flags win."""
    from .embeddings import _load_toml
    from .signals import function_from_json
    cfg = {}
    base = None
    if args.config:
        try:
            cfg = _load_toml(args.config)
        except FileNotFoundError:
            raise Malformed(f"config file not found: {args.config}") from None
        except Exception as exc:  # tomllib.TOMLDecodeError
            raise Malformed(f"malformed config TOML: {exc}") from None
        base = os.path.dirname(os.path.abspath(args.config))
    overrides = {}
    for key in ("p", "q", "alpha", "seed", "n", "tolerance", "dim"):
        if key in cfg:
            overrides[key] = cfg[key]
    if "coeff_len" in cfg:
        overrides["coeff_len"] = cfg["coeff_len"]
    if "levels" in cfg:
        lv = cfg["levels"]
        if not (isinstance(lv, list) and len(lv) == 2 and all(isinstance(x, int) for x in lv)):
            raise Malformed("field 'levels' must be a list of two integers")
        overrides["levels"] = tuple(lv)
    for key, flag in (("p", args.p), ("q", args.q), ("alpha", args.alpha), ("seed", args.seed),
                      ("n", args.n), ("tolerance", args.tolerance), ("dim", args.dim),
                      ("coeff_len", args.coeff_len)):
        if flag is not None:
            overrides[key] = flag
    if args.levels is not None:
        overrides["levels"] = tuple(args.levels)
    for key in ("p", "q", "alpha", "tolerance"):
        if key in overrides and not isinstance(overrides[key], (int, float)):
            raise Malformed(f"field {key!r} must be a number")
    measure = args.measure or cfg.get("measure")
    if measure is not None:
        from .measures import load_measure, measure_from_json
        try:
            if isinstance(measure, str):
                path = measure if base is None or os.path.isabs(measure) else os.path.join(base, measure)
                if not os.path.exists(path):
                    raise Malformed(f"measure file not found: {path}")
                overrides["measure"] = load_measure(path)
            else:
                overrides["measure"] = measure_from_json(measure)
        except ValueError as exc:
            raise Malformed(f"field 'measure': {exc}") from None
    if "functions" in cfg:
        try:
            overrides["family"] = [(d.get("id", f"f-{i:03d}"), function_from_json(d))
                                   for i, d in enumerate(cfg["functions"])]
        except (ValueError, AttributeError) as exc:
            raise Malformed(f"field 'functions': {exc}") from None
    return cfg, overrides


def cmd_verify(args):
    from .theorems import resolve, run_theorem
    if args.list:
        return _list_theorems(args)
    if args.theorem is None:
        raise Malformed("verify needs a theorem id (see --list)")
    try:
        entry = resolve(args.theorem)
    except KeyError as exc:
        raise Malformed(exc.args[0]) from None
    cfg, overrides = _verify_config(args)
    report, params = run_theorem(args.theorem, **overrides)
    result = report.to_dict()
    result["theorem"] = args.theorem
    if entry.alias_of:
        result["alias_of"] = entry.alias_of
    from .theorems import _echo
    config = {"flags": _config_echo(args), "toml": cfg, "effective": _echo(params)}
    if args.format == "csv":
        _emit(args, report.to_csv())
    else:
        _emit(args, dumps(envelope("verify", config, result)))
    return EXIT_OK if report.converged else EXIT_UNCONVERGED


def cmd_counterexample(args):
    from .counterexamples import FactorizationCandidate, audit_factorization, infeasibility_certificate
    cap0, cap1 = args.caps
    if not (cap0 > 0 and cap1 > 0):
        raise Malformed("field 'caps' must be positive")
    if args.n < 1:
        raise Malformed("field 'n' must be a positive integer")
    cert = infeasibility_certificate(args.n, cap0, cap1, search=not args.no_search, seed=args.seed)
    t = args.t if args.t is not None else 1.0
    if not t > 0:
        raise Malformed("field 't' must be positive")
    audit = audit_factorization(FactorizationCandidate.uniform(args.n, t), (cap0, cap1))
    result = {"N": args.n, "C0": audit.C0, "C1": audit.C1, "feasible": audit.feasible,
              "witness": audit.witness, "certificate": cert, "profile_t": t}
    if args.format == "csv":
        _emit(args, _kv_csv(result))
    else:
        _emit(args, dumps(envelope("counterexample", _config_echo(args), result)))
    return EXIT_OK


def _function_arg(text):
    from .signals import function_from_json
    if os.path.exists(text):
        d = _read_json(text, "function")
    else:
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise Malformed(f"field 'function': not a JSON object or file ({exc.msg})") from None
    try:
        return function_from_json(d)
    except ValueError as exc:
        raise Malformed(str(exc)) from None


def cmd_norms(args):
    from . import littlewood_paley as lp
    from .signals import lp_norm
    from .spaces import bergman_norm, disk_bergman_norm, hardy_norm, lq_mu_norm
    f = _function_arg(args.function)
    space = args.space
    p = args.p
    q = args.q if args.q is not None else p
    if space == "lp":
        nv = lp_norm(f, p, args.alpha)
    elif space == "hardy":
        nv = hardy_norm(f, p)
    elif space == "bergman":
        nv = bergman_norm(f, q, args.alpha, level=args.level)
    elif space == "disk-bergman":
        nv = disk_bergman_norm(f, q, args.alpha)
    elif space == "lqmu":
        if args.measure is None:
            raise Malformed("field 'measure' is required for the lqmu space")
        from .measures import measure_from_json
        try:
            mu = measure_from_json(_read_json(args.measure, "measure"))
        except ValueError as exc:
            raise Malformed(str(exc)) from None
        nv = lq_mu_norm(f, q, mu)
    elif space in ("besov", "triebel", "sobolev"):
        sig = f
        fam = lp.default_family(f.dim)
        hom = not args.nonhomogeneous
        if space == "besov":
            nv = lp.besov_norm(sig, fam, p, q, args.s, hom, strict=False)
        elif space == "triebel":
            nv = lp.triebel_norm(sig, fam, p, q, args.s, hom, strict=False)
        else:
            nv = lp.sobolev_norm(sig, fam, p, args.s, hom, strict=False)
    else:  # guarded by argparse choices
        raise Malformed(f"unknown space {space!r}")
    result = nv.to_dict()
    if args.format == "csv":
        _emit(args, _kv_csv(result))
    else:
        _emit(args, dumps(envelope("norms", _config_echo(args), result)))
    return EXIT_OK


def cmd_regions(args):
    from .theorems import region_grid
    if args.n < 1:
        raise Malformed("field 'n' must be a positive integer")
    rows = region_grid(args.n)
    if args.format == "json":
        result = {"n": args.n, "points": [{"inv_p": u, "inv_q": v, "region": r} for u, v, r in rows]}
        _emit(args, dumps(envelope("regions", _config_echo(args), result)))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("inv_p", "inv_q", "p", "q", "region"))
        for u, v, r in rows:
            w.writerow((repr(u), repr(v), repr(1.0 / u), repr(1.0 / v), r))
        _emit(args, buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    return v


def build_parser():
    ap = argparse.ArgumentParser(prog="laplace-carleson",
                                 description="Numerical checks of Laplace-Carleson embeddings "
                                             "and weighted Fourier inequalities.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt="json"):
        p.add_argument("--output", help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=fmt)

    c = sub.add_parser("carleson", help="Carleson box supremum of a measure")
    c.add_argument("measure", help="measure JSON file")
    c.add_argument("--beta", type=float, default=0.5)
    c.add_argument("--family", choices=("auto", "dyadic", "exhaustive"), default="auto")
    common(c)
    c.set_defaults(func=cmd_carleson)

    v = sub.add_parser("verify", help="run the campaign for a theorem id")
    v.add_argument("theorem", nargs="?")
    v.add_argument("--list", action="store_true", help="print the theorem id table")
    v.add_argument("--config", help="TOML campaign file")
    v.add_argument("--p", type=float)
    v.add_argument("--q", type=float)
    v.add_argument("--alpha", type=float)
    v.add_argument("--coeff-len", dest="coeff_len", type=_int)
    v.add_argument("--n", type=_int, help="family size")
    v.add_argument("--seed", type=_int)
    v.add_argument("--dim", type=_int)
    v.add_argument("--levels", type=_int, nargs=2)
    v.add_argument("--tolerance", type=float)
    v.add_argument("--measure", help="measure JSON file for L^q(mu) targets")
    common(v)
    v.set_defaults(func=cmd_verify)

    x = sub.add_parser("counterexample", help="factorization audit for sum delta_{n^2+i}")
    x.add_argument("--n", type=_int, required=True)
    x.add_argument("--caps", type=float, nargs=2, default=(1.0, 1.0))
    x.add_argument("--t", type=float, help="uniform profile value w1^2 c for the audit")
    x.add_argument("--seed", type=_int, default=0)
    x.add_argument("--no-search", dest="no_search", action="store_true")
    common(x)
    x.set_defaults(func=cmd_counterexample)

    n = sub.add_parser("norms", help="evaluate a single norm")
    n.add_argument("--function", required=True, help="test-function JSON (inline or file)")
    n.add_argument("--space", required=True,
                   choices=("lp", "hardy", "bergman", "disk-bergman", "lqmu", "besov", "triebel",
                            "sobolev"))
    n.add_argument("--p", type=float, default=2.0)
    n.add_argument("--q", type=float)
    n.add_argument("--s", type=float, default=0.0)
    n.add_argument("--alpha", type=float, default=0.0, help="weight exponent")
    n.add_argument("--level", type=_int, default=10)
    n.add_argument("--nonhomogeneous", action="store_true")
    n.add_argument("--measure", help="measure JSON file (lqmu)")
    common(n)
    n.set_defaults(func=cmd_norms)

    r = sub.add_parser("regions", help="region labels on a (1/p, 1/q) lattice")
    r.add_argument("--n", type=_int, default=99)
    common(r, fmt="csv")
    r.set_defaults(func=cmd_regions)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)   # argparse exits with 2 on bad flags
    try:
        return args.func(args)
    except Malformed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except HypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED
    except (LaplaceCarlesonError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
