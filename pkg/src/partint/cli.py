"""Command-line entry point: ``partint integrate|measure|decompose|verify``.

Exit codes: 0 success, 1 a check failed (or a numeric error), 2 usage or
parse error, 3 unconverged result under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .config import RunConfig, load_config
from .expr import DomainError
from .funcrep import NotNonnegative, OutsideDomain
from .geometry import INF, box_measure, format_rational
from .integrate import NotIntegrable, integrate_signed
from .intervals import precision
from .parser import ParseError, _Scanner, parse_function, parse_set

SCHEMA = "mimura-trace/1"
OK, CHECK_FAILED, USAGE, UNCONVERGED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _fmt(v) -> str:
    return format_rational(v)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _trace_text(kind: str, entries: list, path: str | None) -> str:
    """JSONL (default) or CSV when the path ends in ``.csv``."""
    if path is not None and path.endswith(".csv"):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "cells", "L", "U", "gap"])
        for t in entries:
            w.writerow([t.iteration, t.cells, _fmt(t.lower), _fmt(t.upper), _fmt(t.gap)])
        return buf.getvalue()
    lines = [_dumps({"schema": SCHEMA, "kind": kind})]
    for t in entries:
        lines.append(_dumps({"iteration": t.iteration, "cells": t.cells, "L": _fmt(t.lower),
                             "U": _fmt(t.upper), "gap": _fmt(t.gap)}))
    return "\n".join(lines) + "\n"


def _common(p: argparse.ArgumentParser, eps: bool = True):
    if eps:
        p.add_argument("--eps", help="target enclosure width (e.g. 1e-6, 1/1000, 1/2^20)")
    p.add_argument("--budget", type=int, help="maximum number of cells")
    p.add_argument("--config", help="key = value settings file (flags take precedence)")
    p.add_argument("--precision", type=int, help="working precision in bits (24 to 53)")
    p.add_argument("--strict", action="store_true", default=None,
                   help="unconverged or undecided results are errors")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="partint", description="Certified partition integrals and measures on dyadic boxes.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("integrate", help="enclose the integral of a function")
    p.add_argument("--f", required=True, help='function text, e.g. "x^2" or "f(s,t) = s*t"')
    p.add_argument("--domain", required=True, help='box union, e.g. "(0,1)" or "(0,1)x(0,1)"')
    p.add_argument("--scale", type=int, help="initial dyadic level of the base cells")
    p.add_argument("--window", help="half-width n of the window (-n,n)^d for unbounded domains")
    p.add_argument("--tail-bound", help="bound on the integral outside the window")
    p.add_argument("--trace", help="trace file (.jsonl or .csv)")
    _common(p)

    p = sub.add_parser("measure", help="inner and outer measure of a set")
    p.add_argument("--set", required=True, dest="set_text", help='set text, e.g. "box (0,1)x(0,1)"')
    _common(p)

    p = sub.add_parser("decompose", help="dyadic decomposition of an open box union")
    p.add_argument("--set", required=True, dest="set_text", help="box union to decompose")
    p.add_argument("--scale", type=int, help="side 2^-scale of the first stage")
    p.add_argument("--out", help="JSON lines output (default: standard output)")
    _common(p, eps=False)

    p = sub.add_parser("verify", help="run theorem check suites")
    p.add_argument("suite", choices=("all", "mct", "fatou", "dct", "tonelli", "layercake", "riemann",
                                     "subgraph", "caratheodory"))
    p.add_argument("--report", help="JSON report path")
    p.add_argument("--fixtures", help="Caratheodory fixture file")
    _common(p)
    return top


def _config(args) -> RunConfig:
    overrides = {}
    if getattr(args, "eps", None) is not None:
        overrides["eps"] = args.eps
    for key in ("budget", "scale", "precision", "strict"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    if getattr(args, "trace", None) is not None:
        overrides["trace"] = args.trace
    if "eps" in overrides:
        from .config import _eps

        overrides["eps"] = _eps(overrides["eps"])
    return load_config(args.config, **overrides)


def _domain(text: str):
    sc = _Scanner(text)
    dom = sc.boxes()
    if not sc.at_end():
        sc.fail("unexpected input in domain")
    return dom


def cmd_integrate(args, cfg: RunConfig) -> int:
    f = parse_function(args.f, _domain(args.domain))
    kw = {}
    if args.window is not None:
        kw["window"] = Fraction(args.window)
    if args.tail_bound is not None:
        kw["tail_bound"] = Fraction(args.tail_bound)
    if cfg.scale:
        kw["scale"] = cfg.scale
    enc = integrate_signed(f, eps=cfg.eps, budget=cfg.budget, **kw)
    if cfg.trace is not None:
        _write(cfg.trace, _trace_text("integrate", enc.trace, cfg.trace))
    status = "converged" if enc.converged else "unconverged"
    if enc.upper == INF:
        status = "unconverged: infinite upper bound"
    print(_dumps({"schema": SCHEMA, "lower": _fmt(enc.lower), "upper": _fmt(enc.upper),
                  "width": _fmt(enc.upper - enc.lower), "cells": enc.cells, "method": enc.method,
                  "status": status}))
    print(f"integral in [{float(enc.lower):.12g}, {float(enc.upper):.12g}] ({status})")
    return UNCONVERGED if cfg.strict and not enc.converged else OK


def cmd_measure(args, cfg: RunConfig) -> int:
    from .measure import measure_enclosure

    s = parse_set(args.set_text)
    eps = cfg.eps if args.eps is not None or args.config else Fraction(1, 10**3)
    enc = measure_enclosure(s, eps, cfg.budget)
    print(_dumps({"inner": _fmt(enc.inner), "outer": _fmt(enc.outer),
                  "converged": enc.converged}))
    return UNCONVERGED if cfg.strict and not enc.converged else OK


def cmd_decompose(args, cfg: RunConfig) -> int:
    from .partition import decompose_open

    target = _domain(args.set_text.removeprefix("box").strip())
    budget = cfg.budget if args.budget is not None or args.config else 1 << 16
    p = decompose_open(target, cfg.scale, budget)
    lines = []
    for cell, stage in zip(p.cells, p.stages):
        lines.append(_dumps({"cell": str(cell), "measure": _fmt(box_measure(cell)), "stage": stage}))
    remainder = p.remainder.bound if p.remainder is not None else Fraction(0)
    lines.append(_dumps({"summary": True, "schema": SCHEMA, "cells": len(p.cells),
                         "measure": _fmt(p.measure()), "target": _fmt(p.target.measure()),
                         "remainder": _fmt(remainder)}))
    _write(args.out, "\n".join(lines) + "\n")
    if args.out is not None:
        print(f"{len(p.cells)} cells, measure {_fmt(p.measure())}, remainder {_fmt(remainder)}")
    return UNCONVERGED if cfg.strict and remainder > 0 else OK


def cmd_verify(args, cfg: RunConfig) -> int:
    from .theoremlab import FAIL, UNDECIDED, run_suite, suite_report

    eps = cfg.eps if args.eps is not None else None
    checks = run_suite(args.suite, eps, args.fixtures)
    report = suite_report(checks, args.suite)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report, fh, sort_keys=True, indent=2)
            fh.write("\n")
    for c in checks:
        print(f"{c.status:9s} {c.name}")
    s = report["summary"]
    print(f"{s['PASS']} passed, {s['UNDECIDED']} undecided, {s['FAIL']} failed")
    failed = any(c.status == FAIL for c in checks)
    if cfg.strict:
        failed |= any(c.status == UNDECIDED for c in checks)
    return CHECK_FAILED if failed else OK


COMMANDS = {"integrate": cmd_integrate, "measure": cmd_measure, "decompose": cmd_decompose,
            "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
    except (ValueError, OSError) as exc:
        print(f"partint: error: {exc}", file=sys.stderr)
        return USAGE
    try:
        with precision(cfg.precision):
            return COMMANDS[args.command](args, cfg)
    except ParseError as exc:
        print(f"partint: parse error: {exc.render()}", file=sys.stderr)
        return USAGE
    except (NotIntegrable, NotNonnegative, DomainError, OutsideDomain) as exc:
        print(f"partint: {type(exc).__name__}: {exc}", file=sys.stderr)
        return CHECK_FAILED
    except ValueError as exc:
        print(f"partint: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
