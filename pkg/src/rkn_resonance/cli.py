"""Command-line interface: ``rkn-res <subcommand> [options]``.

Exit status is 0 on success, 2 on usage errors and 1 on computational
errors. Floats are printed with 12 significant digits.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .contractivity import contractivity_trace
from .errors import CatalogError, RknError, TableauError
from .resonance import Branch, critical_point, critical_step_size, wedge_boundary_numeric, wedge_halfwidth
from .simulate import integrate
from .stability import ChartSpec, classify, constant_step_limit, stability_chart
from .svg import amplitude_svg, chart_svg
from .tableau import RKN_CATALOG, builtin_rkn, resolve_method
from .transition import StepPattern

FORMATS = ("csv", "json", "svg", "table")


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.12g}") if math.isfinite(x) else fmt(x)
    return x


def _csv(columns, rows) -> str:
    lines = [",".join(columns)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json(columns, rows, meta) -> str:
    doc = {
        "meta": {"tool": "rkn-res", "version": __version__, **{k: _json_value(v) for k, v in meta.items()}},
        "rows": [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def _table(columns, rows) -> str:
    cells = [list(columns)] + [[fmt(v) if v is not None else "--" for v in row] for row in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(columns))]
    out = io.StringIO()
    for n, r in enumerate(cells):
        out.write(" | ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")
        if n == 0:
            out.write("-+-".join("-" * w for w in widths) + "\n")
    return out.getvalue()


def _emit(args, columns, rows, meta, svg=None):
    f = args.format
    if f == "csv":
        text = _csv(columns, rows)
    elif f == "json":
        text = _json(columns, rows, meta)
    elif f == "table":
        text = _table(columns, rows)
        if "method" in meta:
            text = f"method: {meta['method']}\n" + text
    elif f == "svg":
        if svg is None:
            raise UsageError(f"--format svg is not available for '{args.command}'")
        text = svg()
    else:
        raise UsageError(f"unknown format {f!r}")
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- argument parsing helpers ---------------------------------------------


def parse_range(text: str) -> tuple[float, float]:
    """``"a:b"`` -> ``(a, b)``."""
    try:
        a, b = text.split(":")
        return float(a), float(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def parse_periods(text: str) -> list[int]:
    """``"2..6"``, ``"3"`` or ``"2,4,6"``."""
    try:
        if ".." in text:
            a, b = text.split("..")
            out = list(range(int(a), int(b) + 1))
        else:
            out = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P, P1..P2 or P1,P2,..., got {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"periods must be positive integers, got {text!r}")
    return out


def parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _threads() -> int:
    raw = os.environ.get("RKN_RES_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"RKN_RES_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise UsageError("RKN_RES_THREADS must be nonnegative")
    return n if n > 0 else (os.cpu_count() or 1)


def _method(args):
    try:
        return resolve_method(args.method)
    except CatalogError as exc:
        raise UsageError(f"{exc} (or a path to a tableau file)") from None
    except (OSError, TableauError) as exc:
        raise UsageError(f"cannot read tableau file: {exc}") from None


# --- subcommands ------------------------------------------------------------


def cmd_methods(args):
    rows = []
    for name in RKN_CATALOG:
        tab = builtin_rkn(name)
        rows.append((name, tab.s, tab.explicit))
    _emit(args, ("name", "s", "explicit"), rows, {"command": "methods"})


def cmd_limit(args):
    tab = _method(args)
    lim = constant_step_limit(tab, args.h_cap, args.tol)
    label = classify(lim)
    if lim is None:
        label = f"R-stable up to h={fmt(args.h_cap)}"
    _emit(
        args,
        ("method", "limit", "classification"),
        [(tab.name, lim, label)],
        {"command": "limit", "method": tab.name, "h_cap": args.h_cap, "tol": args.tol},
    )


def cmd_chart(args):
    tab = _method(args)
    (h_min, h_max), (e_min, e_max) = args.h, args.eps
    try:
        spec = ChartSpec(args.p, h_min, h_max, e_min, e_max, args.nh, args.neps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = stability_chart(tab, spec, tol=args.tol, threads=_threads())
    meta = {
        "command": "chart", "method": tab.name, "p": args.p, "h_min": h_min, "h_max": h_max,
        "eps_min": e_min, "eps_max": e_max, "nh": args.nh, "neps": args.neps, "tol": args.tol,
    }  # fmt: skip
    title = f"Unstable cells: {tab.name}, p={args.p}"
    _emit(args, ("h", "eps", "stable", "growth"), list(res.cells()), meta, svg=lambda: chart_svg(res, title))


def _h1_text(cp):
    if cp.h1_minus is None:
        return None
    lo, hi = cp.h1_minus, cp.h1_plus
    if abs(lo + hi) <= 1e-9 * max(abs(hi), 1e-300):
        return "+-" + fmt(hi)
    return f"{fmt(lo)} .. {fmt(hi)}"


def cmd_critical(args):
    tab = _method(args)
    branches = [Branch.LOW, Branch.HIGH] if args.branch == "both" else [Branch(args.branch)]
    if min(args.p) < 2:
        raise UsageError("critical step sizes need p >= 2")
    points = [critical_point(tab, p, br, h_cap=args.h_cap) for p in args.p for br in branches]
    meta = {"command": "critical", "method": tab.name, "branch": args.branch, "h_cap": args.h_cap}
    if args.format == "table":
        rows = []
        for cp in points:
            h0 = cp.h0 if cp.h0 is not None else math.inf
            rows.append((cp.p, cp.branch.value, h0, _h1_text(cp), cp.note or None))
        _emit(args, ("p", "branch", "h0", "h1", "note"), rows, meta)
        return
    rows = [(cp.p, cp.branch.value, cp.h0, cp.h1_minus, cp.h1_plus) for cp in points]
    _emit(args, ("p", "branch", "h0", "h1_minus", "h1_plus"), rows, meta)


def cmd_wedge(args):
    tab = _method(args)
    h0 = args.h0
    if h0 is None:
        h0 = critical_step_size(tab, args.p, args.branch)
        if h0 is None:
            raise RknError(f"no {args.branch}-branch critical step size for p={args.p}")
    try:
        a_lo, a_hi = wedge_halfwidth(tab, args.p, h0)
    except RknError as exc:
        a_lo = a_hi = None
        sys.stderr.write(f"analytic wedge unavailable: {exc}\n")
    rows = []
    for eps in args.eps:
        num = wedge_boundary_numeric(tab, args.p, h0, eps)
        n_lo, n_hi = num if num is not None else (None, None)
        rows.append((args.p, h0, eps, a_lo, a_hi, n_lo, n_hi))
    cols = ("p", "h0", "eps", "analytic_minus", "analytic_plus", "numeric_minus", "numeric_plus")
    _emit(args, cols, rows, {"command": "wedge", "method": tab.name, "p": args.p})


def cmd_simulate(args):
    tab = _method(args)
    try:
        pat = StepPattern(args.h, args.eps, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if len(args.y0) != 2:
        raise UsageError("--y0 takes two numbers: x,xdot")
    tr = integrate(tab, pat, args.y0, args.steps)
    rows = [
        (n, tr.times[n], tr.steps[n - 1] if n else None, tr.states[n, 0], tr.states[n, 1], tr.amplitudes[n])
        for n in range(len(tr))
    ]
    meta = {"command": "simulate", "method": tab.name, "h": args.h, "eps": args.eps, "p": args.p,
            "steps": args.steps}  # fmt: skip
    title = f"Amplitude: {tab.name}, h={fmt(args.h)}, eps={fmt(args.eps)}, p={args.p}"
    _emit(
        args,
        ("n", "t", "h", "x", "xdot", "amplitude"),
        rows,
        meta,
        svg=lambda: amplitude_svg(tr.times, tr.amplitudes, title),
    )


def cmd_contractivity(args):
    tab = _method(args)
    if args.steps_file:
        try:
            with open(args.steps_file, encoding="utf-8") as fh:
                steps = [float(line) for line in fh if line.strip() and not line.startswith("#")]
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read steps file: {exc}") from None
        source = {"steps_file": args.steps_file}
    else:
        if args.random is None:
            raise UsageError("give --steps-file or --random N")
        rng = np.random.default_rng(args.seed)
        # uniform on (0, max_step]
        steps = list(args.max_step * (1.0 - rng.random(args.random)))
        source = {"random": args.random, "seed": args.seed, "max_step": args.max_step}
    if not steps or min(steps) <= 0:
        raise UsageError("steps must be positive")
    rep = contractivity_trace(tab, np.eye(2), args.y0, steps)
    rows = [(0, None, rep.norms[0])] + [(n + 1, steps[n], rep.norms[n + 1]) for n in range(len(steps))]
    meta = {"command": "contractivity", "method": tab.name, "weight": "identity",
            "increases": len(rep.increases), **source}  # fmt: skip
    _emit(args, ("n", "h", "norm"), rows, meta)
    if rep.increases:
        sys.stderr.write(f"norm increased at {len(rep.increases)} step(s); first at n={rep.increases[0] + 1}\n")


# --- parser -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rkn-res", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help, formats=("csv", "json", "table"), default="csv"):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("-o", "--output", help="output file (default stdout)")
        if name != "methods":
            p.add_argument("--method", default="central_difference", help="builtin name or tableau file")
        return p

    add("methods", cmd_methods, "list built-in methods", default="table")

    p = add("limit", cmd_limit, "constant-step stability limit", default="table")
    p.add_argument("--h-cap", type=float, default=1e3)
    p.add_argument("--tol", type=float, default=1e-12)

    p = add("chart", cmd_chart, "(h, eps) stability chart", formats=("csv", "json", "svg"))
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--h", type=parse_range, default=(0.0, 2.0), metavar="LO:HI")
    p.add_argument("--eps", type=parse_range, default=(0.0, 0.5), metavar="LO:HI")
    p.add_argument("--nh", type=int, default=400)
    p.add_argument("--neps", type=int, default=400)
    p.add_argument("--tol", type=float, default=1e-12)

    p = add("critical", cmd_critical, "critical step sizes and wedge slopes")
    p.add_argument("--p", type=parse_periods, default=parse_periods("2..6"), metavar="P1..P2")
    p.add_argument("--branch", choices=("low", "high", "both"), default="low")
    p.add_argument("--h-cap", type=float, default=1e3)

    p = add("wedge", cmd_wedge, "one wedge: analytic slopes and numeric boundary")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--h0", type=float, default=None, help="critical step (default: computed)")
    p.add_argument("--branch", choices=("low", "high"), default="low")
    p.add_argument("--eps", type=parse_floats, default=[1e-3, 1e-2], metavar="E1,E2,...")

    p = add("simulate", cmd_simulate, "integrate the model oscillator", formats=("csv", "json", "svg"))
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--y0", type=parse_floats, default=[1.0, 0.0], metavar="X,XDOT")

    p = add("contractivity", cmd_contractivity, "euclidean norms along a step sequence")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--steps-file")
    src.add_argument("--random", type=int, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-step", type=float, default=1e3)
    p.add_argument("--y0", type=parse_floats, default=[1.0, 0.0], metavar="X,XDOT")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"rkn-res: usage error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (RknError, TableauError, ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"rkn-res: error: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
