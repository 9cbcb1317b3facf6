"""Command-line front end: ``qinvert {coeffs,asymptotics,qbig,formal,tuples}``.

Every command writes one JSON object ``{config, results, versions}`` (or a
CSV table with ``--csv``) to stdout or ``--out``.  Exit codes: 0 success,
2 configuration error, 3 domain error, 4 failed internal check.
"""
from __future__ import annotations

import argparse
import configparser
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import mpmath
import numpy as np

from . import __version__
from .arith import QLaurent, format_rational, parse_rational
from .errors import ConfigError, DomainError, InvalidQ
from .phi import parse_phi
from .serialize import csv_text, dumps, format_real

__all__ = ["main", "build_parser", "parse_q_grid"]


def parse_q_grid(text: str) -> list:
    """A single value, or ``a:b:step`` meaning a, a+step, ... up to b inclusive."""
    text = str(text).strip()
    if ":" not in text:
        return [parse_rational(text)]
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"q grid must look like a:b:step, got {text!r}")
    a, b, step = (parse_rational(p) for p in parts)
    if step <= 0:
        raise ConfigError("grid step must be positive")
    out = []
    x = a
    while x <= b:
        out.append(x)
        x += step
    if not out:
        raise ConfigError(f"empty q grid {text!r}")
    return out


def _qtext(q) -> str:
    return format_rational(q) if isinstance(q, Fraction) else format_real(q)


# -- per-cell workers (top level so that they pickle) ---------------------


def _coeffs_cell(phi_text, q, N, mode):
    from .inversion import right_inverse

    spec = parse_phi(phi_text)
    if mode == "auto":
        mode = "exact" if q is None and spec.is_exact else "numeric"
    if mode == "exact" and q is not None:
        raise ConfigError("exact mode keeps q formal; drop --q or use --mode numeric")
    res = right_inverse(spec, N + 1, mode=mode, q=None if q is None else float(q))
    return {"q": None if q is None else _qtext(q), "mode": mode, **res.to_json()}


def _v(v):
    from .serialize import value_to_json

    return value_to_json(v)


def _asym_cell(phi_text, q, N, tol_root, tol_tail, coeffwise_text):
    from .asymptotics import polynomial_case_limit, renewal_limit_check, theorem_main_report

    spec = parse_phi(phi_text)
    cw = parse_phi(coeffwise_text) if coeffwise_text else None
    rep = theorem_main_report(spec, float(q), N, coeffwise_spec=cw, tol_root=tol_root, tol_tail=tol_tail)
    out = {"q": _qtext(q), "report": rep.to_json()}
    base = spec.inner if spec.kind == "alternating" else spec
    if base.is_polynomial and base.nonnegative and not base.is_zero:
        lim = polynomial_case_limit(base, float(q), tol_tail)
        out["polynomial_limit"] = {"constant": lim.constant, "phi_prime_zeta": lim.phi_prime_zeta,
                                   "consistency_gap": lim.consistency_gap}
    if spec.is_exact:
        ren = renewal_limit_check(spec, min(N, 12))
        out["renewal"] = {"exact_ok": ren.exact_ok, "failures": ren.exact_failures,
                          "monotone": ren.monotone}
    return out


def _qbig_cell(phi_text, q, N, tol_root):
    from .qbig import qbig_residual, solve_qbig

    spec = parse_phi(phi_text)
    res = solve_qbig(spec, float(q), N, tol_root)
    out = {"q": _qtext(q), **res.to_json()}
    out["residual_max_relative"] = qbig_residual(spec, res.g, min(N, 40)).max_relative
    return out


def _run_cells(fn, cells, jobs):
    if jobs <= 1 or len(cells) <= 1:
        return [fn(*c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*cells)))


# -- commands -------------------------------------------------------------


def cmd_coeffs(args):
    spec = parse_phi(args.phi)
    if args.N < 0:
        raise ConfigError("-N must be nonnegative")
    grid = parse_q_grid(args.q) if args.q is not None else [None]
    cells = [(spec.describe(), q, args.N, args.mode) for q in grid]
    results = _run_cells(_coeffs_cell, cells, args.jobs)
    rows = []
    for r in results:
        for n in range(args.N + 1):
            rows.append((r["q"] or "", n, _cell_text(r["g"][n]), _cell_text(r["t"][n]), _cell_text(r["eps"][n])))
    return {"phi": spec.describe(), "N": args.N, "mode": args.mode,
            "q": [_qtext(q) for q in grid if q is not None]}, results, (["q", "n", "g", "t", "eps"], rows)


def _cell_text(v):
    if isinstance(v, dict) and "terms" in v:
        return str(QLaurent.from_json(v))
    return v


def cmd_asymptotics(args):
    spec = parse_phi(args.phi)
    if args.q is None:
        raise ConfigError("asymptotics needs --q")
    grid = parse_q_grid(args.q)
    for q in grid:
        if not 0 < q < 1:
            raise InvalidQ(f"the asymptotic regime needs 0 < q < 1, got {_qtext(q)}")
    if args.N < 1:
        raise ConfigError("-N must be at least 1")
    cells = [(spec.describe(), q, args.N, args.tol_root, args.tol_tail, args.coeffwise_phi) for q in grid]
    results = _run_cells(_asym_cell, cells, args.jobs)
    for r in results:
        rep = r["report"]
        dens = " ".join(f"d({k})={format_real(v)}" for k, v in rep["deviation_density"].items())
        print(f"q={r['q']} L={format_real(rep['L'])} liminf={format_real(rep['liminf_estimate'])} {dens}",
              file=sys.stderr)
    rows = []
    for r in results:
        rep = r["report"]
        for n, a in rep["sequence"]:
            rows.append((r["q"], n, a, rep["L"], abs(a - rep["L"])))
    config = {"phi": spec.describe(), "N": args.N, "q": [_qtext(q) for q in grid],
              "tol_root": args.tol_root, "tol_tail": args.tol_tail,
              "coeffwise_phi": args.coeffwise_phi or ""}
    return config, results, (["q", "n", "a_n", "L", "abs_dev"], rows)


def cmd_qbig(args):
    spec = parse_phi(args.phi)
    if args.q is None:
        raise ConfigError("qbig needs --q")
    grid = parse_q_grid(args.q)
    for q in grid:
        if not q > 1:
            raise InvalidQ(f"qbig needs q > 1, got {_qtext(q)}")
    if args.N < 2:
        raise ConfigError("-N must be at least 2")
    cells = [(spec.describe(), q, args.N, args.tol_root) for q in grid]
    results = _run_cells(_qbig_cell, cells, args.jobs)
    rows = [(r["q"], n, gn, c) for r in results for n, gn, c in r["ratio_trace"]]
    config = {"phi": spec.describe(), "N": args.N, "q": [_qtext(q) for q in grid], "tol_root": args.tol_root}
    return config, results, (["q", "n", "g_n", "g_n_eta_n"], rows)


def cmd_formal(args):
    from .formal import (divergent_h_recursion, format_polynomial, g_kappa, parse_polynomial,
                         q_extremal_zeros, verify_formal_solution)

    if args.f is None:
        raise ConfigError("formal needs --f")
    f = parse_polynomial(args.f)
    if args.q is None:
        raise ConfigError("formal needs --q")
    grid = parse_q_grid(args.q)
    N = args.N
    results = []
    rows = []
    for q in grid:
        zeros = q_extremal_zeros(f, q)
        kappas = [parse_rational(args.kappa)] if args.kappa is not None else \
            [z.kappa for z in zeros if z.extremal and isinstance(z.kappa, Fraction)]
        sols = []
        for kappa in kappas:
            g = g_kappa(f, kappa, q, N)
            res = verify_formal_solution(g, f)
            sols.append({"kappa": format_rational(kappa), "g": [_v(c) for c in g.coeffs],
                         "residual": [_v(c) for c in res.residual.coeffs],
                         "residual_zero": res.exactly_zero})
            rows.append((_qtext(q), format_rational(kappa), res.exactly_zero))
        cell = {"q": _qtext(q), "zeros": [z.to_json() for z in zeros], "solutions": sols}
        if args.phi:
            dh = divergent_h_recursion(parse_phi(args.phi), q, N)
            cell["divergent_h"] = dh.to_json()
        results.append(cell)
    config = {"f": format_polynomial(f), "q": [_qtext(q) for q in grid], "N": N,
              "kappa": args.kappa or "", "phi": args.phi or ""}
    return config, results, (["q", "kappa", "residual_zero"], rows)


def cmd_tuples(args):
    from .tuples import verify_min_lemmas

    if args.n is None or args.i is None:
        raise ConfigError("tuples needs --n and --i")
    if args.n < 0 or args.i < 1:
        raise ConfigError("need n >= 0 and i >= 1")
    rep = verify_min_lemmas(args.n, args.i, keep_table=True)
    if not rep.ok:
        raise AssertionError(f"lemma check failed for n={args.n}, i={args.i}")
    result = {"n": args.n, "i": args.i, "count": rep.count, "min": rep.min_value,
              "argmin": [list(c) for c in rep.argmin], "min_proper": rep.min_value_proper,
              "argmin_proper": [list(c) for c in rep.argmin_proper], "max": rep.max_value,
              "lower_bound_failures": [list(c) for c in rep.lower_bound_failures], "ok": rep.ok,
              "table": [[list(c), v] for c, v in rep.table]}
    print(f"min L = {rep.min_value} at {rep.argmin[0]}", file=sys.stderr)
    rows = [(" ".join(map(str, c)), v) for c, v in rep.table]
    return {"n": args.n, "i": args.i}, [result], (["composition", "L"], rows)


COMMANDS = {
    "coeffs": cmd_coeffs,
    "asymptotics": cmd_asymptotics,
    "qbig": cmd_qbig,
    "formal": cmd_formal,
    "tuples": cmd_tuples,
}


def _versions() -> dict:
    return {"qinvert": __version__, "numpy": np.__version__, "mpmath": mpmath.__version__}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qinvert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value file mirroring the flags")
        p.add_argument("--phi", default="catalan")
        p.add_argument("--f", default=None, help='polynomial f, e.g. "z-z^2"')
        p.add_argument("--q", default=None, help="value or a:b:step grid")
        p.add_argument("-N", type=int, default=10)
        p.add_argument("--mode", choices=("auto", "exact", "numeric"), default="auto")
        p.add_argument("--tol-root", type=float, default=1e-12)
        p.add_argument("--tol-tail", type=float, default=1e-12)
        p.add_argument("--coeffwise-phi", default=None,
                       help="rational-zeta spec for the coefficientwise table")
        p.add_argument("--kappa", default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--i", type=int, default=None)
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
        fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
        p.add_argument("--out", default=None)
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        p.set_defaults(fmt="json")
    return parser


def _apply_config(parser, argv):
    """Load --config values as defaults so explicit flags still win."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config or known.command not in COMMANDS:
        return
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        with open(known.config, encoding="utf-8") as fh:
            cp.read_string("[run]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {known.config}: {exc}") from exc
    subparser = parser._subparsers._group_actions[0].choices[known.command]
    types = {a.dest: a.type for a in subparser._actions}
    defaults = {}
    for key, value in cp["run"].items():
        dest = key.replace("-", "_")
        if dest not in types:
            raise ConfigError(f"unknown config key {key!r}")
        if dest == "fmt" and value not in ("json", "csv"):
            raise ConfigError("fmt must be json or csv")
        conv = types[dest]
        try:
            defaults[dest] = conv(value) if conv else value
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    subparser.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if args.jobs < 1:
            raise ConfigError("--jobs must be positive")
        config, results, (header, rows) = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: ConfigError: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except AssertionError as exc:
        print(f"error: AssertionError: {exc}", file=sys.stderr)
        return 4
    if args.fmt == "csv":
        text = csv_text(header, rows)
    else:
        text = dumps({"config": {"command": args.command, **config}, "results": results,
                      "versions": _versions()})
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
