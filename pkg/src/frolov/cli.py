"""Command-line front end: ``frolov {basis,nodes,integrate,verify,study,bound}``."""
from __future__ import annotations

import argparse
import contextlib
import sys

from .analysis import convergence_study, fit_order, write_csv
from .core import Kind
from .cubature import Mode, build_rule, error_constant, integrate, theoretical_bound
from .errors import BudgetExceeded, FrolovError, InsufficientData
from .lattice import DEFAULT_BUDGET, build_basis, enumerate_nodes
from .testfunctions import parse_selector
from .verify import run_all

EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4

DEFAULT_STUDY_GRID = (4.0, 8.0, 16.0, 32.0)


class Formatter:
    def __init__(self, fmt):
        self.digits = 5 if fmt == "text" else 17

    def __call__(self, v) -> str:
        return format(float(v), f".{self.digits}g")


def _common(p):
    p.add_argument("-d", "--dimension", type=int, default=2)
    p.add_argument("-s", "--smoothness", type=int)
    p.add_argument("-a", "--scale", type=float, action="append")
    p.add_argument("--kind", choices=[k.value for k in Kind], default=Kind.STANDARD.value)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.VANISHING.value)
    p.add_argument("--function")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=["text", "csv"], default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frolov", description="Frolov lattice cubature toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("basis", "print roots and determinants of the generator"),
        ("nodes", "export the node set"),
        ("integrate", "integrate a corpus function"),
        ("verify", "run the seeded invariant suites"),
        ("study", "convergence study over a scale grid, CSV output"),
        ("bound", "print the explicit worst-case error bound"),
    ]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "study":
            p.add_argument("--timing", action="store_true",
                           help="record wall time (output is then not reproducible)")
    return parser


class ConfigError(Exception):
    pass


def _single_scale(args) -> float:
    if not args.scale or len(args.scale) != 1:
        raise ConfigError("exactly one --scale/-a value is required")
    return args.scale[0]


def _need_smoothness(args) -> int:
    if args.smoothness is None:
        raise ConfigError("--smoothness/-s is required")
    return args.smoothness


@contextlib.contextmanager
def _open_output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def cmd_basis(args, out, fmt):
    basis = build_basis(args.dimension, args.kind)
    print(f"d: {basis.d}", file=out)
    print(f"kind: {basis.kind.value}", file=out)
    print("roots: " + " ".join(fmt(r) for r in basis.roots.values), file=out)
    print(f"abs_det_T: {fmt(basis.abs_det_T)}", file=out)
    print(f"det_T: {fmt(basis.detT)}", file=out)
    print(f"residual: {fmt(basis.roots.residual)}", file=out)
    return 0


def cmd_nodes(args, out, fmt):
    basis = build_basis(args.dimension, args.kind)
    a = _single_scale(args)
    nodes = enumerate_nodes(basis, a, budget=args.budget)
    g = Formatter("csv")
    with _open_output(args.output) as fh:
        fh.write(f"# frolov d={basis.d} kind={basis.kind.value} a={g(a)} "
                 f"count={nodes.count} detT={g(basis.detT)}\n")
        for p in nodes.points:
            fh.write(" ".join(g(v) for v in p) + "\n")
    if args.output not in (None, "-"):
        print(f"wrote {nodes.count} nodes to {args.output}", file=out)
    return 0


def _function(args):
    if not args.function:
        raise ConfigError("--function is required")
    f = parse_selector(args.function, args.dimension)
    if f.d != args.dimension:
        raise ConfigError(f"function dimension {f.d} differs from --dimension {args.dimension}")
    return f


def cmd_integrate(args, out, fmt):
    basis = build_basis(args.dimension, args.kind)
    a = _single_scale(args)
    f = _function(args)
    mode = Mode.parse(args.mode)
    if mode is Mode.PERIODIZED:
        _need_smoothness(args)
    rule = build_rule(basis, a, mode=mode, s=args.smoothness, budget=args.budget)
    value = integrate(rule, f)
    print(f"estimate: {fmt(value)}", file=out)
    print(f"nodes: {rule.count}", file=out)
    print(f"exact: {fmt(f.exact_integral)}", file=out)
    if args.smoothness is not None:
        print(f"bound: {fmt(theoretical_bound(args.smoothness, basis.d, a))}", file=out)
    return 0


def cmd_verify(args, out, fmt):
    basis = build_basis(args.dimension, args.kind)
    results = run_all(basis, seed=args.seed, budget=args.budget)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  {r.detail}", file=out)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed", file=out)
    return 0 if not failed else EXIT_VERIFY


def cmd_study(args, out, fmt):
    basis = build_basis(args.dimension, args.kind)
    s = _need_smoothness(args)
    f = _function(args)
    grid = args.scale or list(DEFAULT_STUDY_GRID)
    records = convergence_study(basis, f, s, grid, mode=args.mode, timed=args.timing,
                                budget=args.budget)
    with _open_output(args.output) as fh:
        write_csv(records, fh)
    try:
        order = f"order: {fmt(fit_order(records))}"
    except InsufficientData as exc:
        order = f"order: unavailable ({exc})"
    print(order, file=out if args.output not in (None, "-") else sys.stderr)
    return 0


def cmd_bound(args, out, fmt):
    s = _need_smoothness(args)
    a = _single_scale(args)
    print(f"bound: {fmt(theoretical_bound(s, args.dimension, a))}", file=out)
    print(f"c_sd: {fmt(error_constant(s, args.dimension))}", file=out)
    return 0


COMMANDS = {
    "basis": cmd_basis,
    "nodes": cmd_nodes,
    "integrate": cmd_integrate,
    "verify": cmd_verify,
    "study": cmd_study,
    "bound": cmd_bound,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = Formatter(args.format)
    try:
        return COMMANDS[args.command](args, sys.stdout, fmt)
    except BudgetExceeded as exc:
        print(f"frolov: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, FrolovError) as exc:
        print(f"frolov: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
