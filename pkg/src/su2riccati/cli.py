"""Command-line front end.

    su2riccati list
    su2riccati run CASE [--param k=v ...] [--t-max T] [--steps N] [--format csv|json] [--out PATH]
    su2riccati verify CASE [...]
    su2riccati general-integral CASE --c0 2 --c0 1+1j [...]
    su2riccati custom CONFIG.json [--verify] [...]

Exit status: 0 success, 1 verification failure, 2 usage or configuration
error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys

from . import catalog
from .catalog import CaseError
from .exprdsl import DomainError, ExprError, ExprSyntaxError
from .oracle import IntegratorConfig
from .quad import DEFAULT_TOL, Grid
from .riccati import GeneralIntegral
from .trace import (SCHEMA_VERSION, sample_bundle, sample_family, write_family_csv,
                    write_family_json, write_trace)
from .verify import report, run_checks

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

CONFIG_KEYS = {"mode", "expressions", "parameters", "grid", "tolerances"}


class UsageError(Exception):
    pass


def _param(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k.strip(), float(v)
    except ValueError:
        return k.strip(), v.strip()


def _complex(text):
    s = text.strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _common(p, with_format=True):
    p.add_argument("--t-max", type=float, default=None, help="end of the interval (default 3/|omega|)")
    p.add_argument("--steps", type=int, default=1001, help="number of grid points")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="quadrature tolerance")
    p.add_argument("--rel-tol", type=float, default=1e-10, help="oracle relative tolerance")
    p.add_argument("--abs-tol", type=float, default=1e-12, help="oracle absolute tolerance")
    if with_format:
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default="-", help="output path, - for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="su2riccati",
                                     description="Exactly solvable two-level problems and their Riccati equations.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="print the catalog case names")
    for name, helptext in (("run", "write a trace of a catalog case"),
                           ("verify", "run the check suite for a catalog case")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("case")
        p.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE")
        _common(p, with_format=(name == "run"))
    p = sub.add_parser("general-integral", help="write the family of solutions for given constants")
    p.add_argument("case")
    p.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE")
    p.add_argument("--c0", action="append", type=_complex, required=True, metavar="C0")
    _common(p)
    p = sub.add_parser("custom", help="build from a JSON generator config")
    p.add_argument("config")
    p.add_argument("--verify", action="store_true", help="run the checks instead of writing a trace")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-")
    return parser


@contextlib.contextmanager
def _sink(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _check_grid(t_max, steps):
    if steps < 2:
        raise UsageError(f"--steps must be at least 2, got {steps}")
    if t_max is not None and not t_max > 0:
        raise UsageError(f"--t-max must be positive, got {t_max}")


def _cfg(rel_tol, abs_tol):
    try:
        return IntegratorConfig(rel_tol=rel_tol, abs_tol=abs_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _catalog_bundle(args):
    _check_grid(args.t_max, args.steps)
    return catalog.build_case(args.case, dict(args.param), tol=args.tol,
                              grid_points=args.steps, t_max=args.t_max)


def _emit(bundle, grid, fmt, out, tols):
    tr = sample_bundle(bundle, grid, tols.get("quadrature"))
    tr.metadata["tolerances"] = tols
    with _sink(out) as fh:
        write_trace(tr, fmt, fh)


def _verify(bundle, grid, cfg):
    checks = run_checks(bundle, grid, cfg)
    print(report(bundle.name, checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def _load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed config: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    for key in ("mode", "expressions"):
        if key not in cfg:
            raise UsageError(f"config is missing {key!r}")
    if not isinstance(cfg["expressions"], dict):
        raise UsageError("'expressions' must be an object")
    return cfg


def _custom(args):
    cfg = _load_config(args.config)
    grid_cfg = cfg.get("grid", {})
    tols = cfg.get("tolerances", {})
    t_max = float(grid_cfg.get("t_max", 3.0))
    steps = int(grid_cfg.get("steps", 1001))
    _check_grid(t_max, steps)
    quad_tol = float(tols.get("quadrature", DEFAULT_TOL))
    bundle = catalog.build_custom(cfg["mode"], cfg["expressions"], cfg.get("parameters", {}),
                                  t_max=t_max, grid_points=steps, tol=quad_tol)
    icfg = _cfg(float(tols.get("rel_tol", 1e-10)), float(tols.get("abs_tol", 1e-12)))
    grid = Grid(0.0, t_max, steps)
    if args.verify:
        return _verify(bundle, grid, icfg)
    _emit(bundle, grid, args.format, args.out,
          {"quadrature": quad_tol, "rel_tol": icfg.rel_tol, "abs_tol": icfg.abs_tol})
    return EXIT_OK


def _dispatch(args):
    if args.command == "list":
        for name in catalog.list_cases():
            print(name)
        return EXIT_OK
    if args.command == "custom":
        return _custom(args)
    bundle = _catalog_bundle(args)
    grid = Grid(0.0, bundle.t_max, args.steps)
    tols = {"quadrature": args.tol, "rel_tol": args.rel_tol, "abs_tol": args.abs_tol}
    if args.command == "run":
        _emit(bundle, grid, args.format, args.out, tols)
        return EXIT_OK
    if args.command == "verify":
        return _verify(bundle, grid, _cfg(args.rel_tol, args.abs_tol))
    gi = GeneralIntegral(bundle.dre, bundle.ubar, grid, args.tol)
    family = sample_family(gi, args.c0)
    with _sink(args.out) as fh:
        if args.format == "csv":
            write_family_csv(family, fh)
        else:
            meta = {"case": bundle.name, "parameters": bundle.params, "tolerances": tols,
                    "constants": [[c.real, c.imag] for c in args.c0],
                    "schema_version": SCHEMA_VERSION}
            write_family_json(family, meta, fh)
    for fam in family:
        for lo, hi, d in fam["poles"]:
            print(f"C0 = {fam['C0']}: pole near t in [{lo:.6g}, {hi:.6g}] "
                  f"(min |denominator| {d:.3e})", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return _dispatch(args)
    except ExprSyntaxError as exc:
        text = f" in {exc.text!r}" if exc.text else ""
        print(f"error: {exc}{text}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, CaseError, ExprError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
