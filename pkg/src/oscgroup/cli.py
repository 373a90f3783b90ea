"""Command-line interface.

Exit codes: 0 success, 1 failed checks, 2 usage or parse error,
3 runtime error (singular time, domain error, integration failure).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from .characteristic import solve_characteristic
from .coefficients import DEFAULT_DOMAIN, NAMES
from .errors import OscGroupError, ParseError
from .kernel import QUAD_TOL, TRIVIAL, FundamentalSolution, general_solution
from .scenario import (build_coefficients, load_scenario, normalize, parse_grid, parse_init,
                       parse_real, sample_times)
from .states import (GridState, grid_points, green_function, norm, propagate,
                     write_grid_csv)
from .transforms import PRIMITIVES, ansatz, apply, invert, named_equation
from .verify import SpaceTimeBlock, autonomous_solution, exact_solution, pde_residual, run_suite

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3
DOMAIN_PAD = 0.1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _real(text):
    try:
        return parse_real(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text):
    try:
        return parse_grid(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _domain(text):
    parts = normalize(text).split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("domain must have the form lo:hi")
    return tuple(_real(p) for p in parts)


def _add_common(p, grid=False):
    p.add_argument("--preset", default="free",
                   help="free, oscillator, driven or driven(<expr>) (default: free)")
    for name in NAMES:
        p.add_argument(f"--{name}", metavar="EXPR", help=f"override coefficient {name}(t)")
    p.add_argument("--c0", type=int, choices=(0, 1), default=0,
                   help="0 for the Riccati-type, 1 for the Ermakov-type system")
    p.add_argument("--domain", type=_domain, default=None,
                   help="time domain lo:hi (default: -2:2, widened to cover the requested times)")
    p.add_argument("--init", default=None, help='initial data, e.g. "mu=1,alpha=0.3,beta=1.2"')
    p.add_argument("--trivial-init", action="store_true",
                   help="use mu=beta=1 and all other parameters 0 (the default)")
    p.add_argument("--tol", type=float, default=QUAD_TOL, help="quadrature tolerance")
    p.add_argument("--out", default=None, help="output file (default: standard output)")
    if grid:
        p.add_argument("--grid", type=_grid, default=(-8.0, 8.0, 1.0 / 64.0),
                       help="spatial grid start:stop:step (default -8:8:1/64)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oscgroup", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="parameter trajectory as CSV")
    _add_common(p)
    p.add_argument("--t0", type=_real, default=0.0)
    p.add_argument("--t1", type=_real, default=1.0)
    p.add_argument("--step", type=_real, default=0.01)

    p = sub.add_parser("wavefunction", help="dynamic oscillator state on a grid")
    _add_common(p, grid=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--t", type=_real, default=0.0)

    p = sub.add_parser("green", help="Green function G(x, y, t) for fixed y")
    _add_common(p, grid=True)
    p.add_argument("--t", type=_real, required=True)
    p.add_argument("--y", type=_real, default=0.0)

    p = sub.add_parser("propagate", help="propagate the t=0 state with the Green function")
    _add_common(p, grid=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--t", type=_real, required=True)

    p = sub.add_parser("transform", help="apply a group element to a Hermite-Gauss solution")
    _add_common(p, grid=True)
    p.add_argument("--element", required=True, choices=sorted(PRIMITIVES) + ["ansatz"])
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="element parameter (V, x0, t0, phase, l, m, shift); repeatable")
    p.add_argument("--invert", action="store_true", help="apply the inverse element")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--t", type=_real, required=True)
    p.add_argument("--residual", action="store_true",
                   help="also print the PDE residual of the image against its equation")

    p = sub.add_parser("density", help="|psi|^2 time series")
    _add_common(p, grid=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--times", type=_grid, required=True, help="t0:t1:step")

    p = sub.add_parser("verify", help="run a scenario check suite")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", default=None, help="CSV report file")
    return parser


# -- helpers ------------------------------------------------------------------


def _coefficients(args, *times):
    exprs = {k: getattr(args, k) for k in NAMES if getattr(args, k) is not None}
    domain = args.domain
    if domain is None:
        lo, hi = DEFAULT_DOMAIN
        domain = (min([lo] + [t - DOMAIN_PAD for t in times]),
                  max([hi] + [t + DOMAIN_PAD for t in times]))
    return build_coefficients(args.preset, exprs, args.c0, domain)


def _init(args):
    if args.init is not None and args.trivial_init:
        raise ParseError("--init and --trivial-init are mutually exclusive", 0, "one of them")
    return TRIVIAL if args.init is None else parse_init(args.init)


def _fundamental(args, cs):
    return FundamentalSolution(solve_characteristic(cs), quad_tol=args.tol)


def _emit(path, text):
    # written only after the whole table is computed: no partial files on errors
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)


def _write_grid(args, x, values):
    buf = io.StringIO()
    write_grid_csv(buf, x, values)
    _emit(args.out, buf.getvalue())


def _state(args, cs, init, n, fs=None):
    """psi_n(x, t): the ansatz image of the n-th Hermite-Gauss solution."""
    trajectory = general_solution(cs, init, fs or _fundamental(args, cs))
    te = ansatz(cs, trajectory)
    chi = autonomous_solution(cs.c0, n)
    return lambda x, t: apply(te, chi, x, t)


# -- subcommands --------------------------------------------------------------


def cmd_solve(args):
    cs = _coefficients(args, args.t0, args.t1)
    trajectory = general_solution(cs, _init(args), _fundamental(args, cs))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "mu", "alpha", "beta", "gamma", "delta", "epsilon", "kappa"])
    for t in sample_times(args.t0, args.t1, args.step):
        p = trajectory(t)
        writer.writerow([repr(float(t))] + [repr(float(v)) for v in p.values()])
    _emit(args.out, buf.getvalue())
    return EXIT_OK


def cmd_wavefunction(args):
    cs = _coefficients(args, args.t)
    psi = _state(args, cs, _init(args), args.n)
    x = grid_points(*args.grid)
    values = psi(x, args.t)
    _write_grid(args, x, values)
    print(f"norm {norm(GridState(float(x[0]), args.grid[2], values))!r}", file=sys.stderr)
    return EXIT_OK


def cmd_green(args):
    cs = _coefficients(args, args.t)
    fp = _fundamental(args, cs)(args.t)
    x = grid_points(*args.grid)
    _write_grid(args, x, green_function(fp, x, args.y))
    return EXIT_OK


def cmd_propagate(args):
    cs = _coefficients(args, 0.0, args.t)
    fs = _fundamental(args, cs)
    psi = _state(args, cs, _init(args), args.n, fs)
    x = grid_points(*args.grid)
    initial = GridState(float(x[0]), args.grid[2], psi(x, 0.0))
    out = propagate(fs(args.t), initial, x)
    _write_grid(args, x, out.values)
    deviation = float(np.max(np.abs(out.values - psi(x, args.t))))
    print(f"max deviation from the closed form {deviation!r}", file=sys.stderr)
    return EXIT_OK


def _element(args):
    params = {}
    for item in args.param:
        name, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"bad --param {item!r}", 0, "NAME=VALUE")
        params[name.strip()] = parse_real(value)
    if args.element == "ansatz":
        cs = _coefficients(args, args.t)
        te = ansatz(cs, general_solution(cs, _init(args), _fundamental(args, cs)))
    else:
        try:
            te = PRIMITIVES[args.element](**params)
        except TypeError as exc:
            raise ParseError(f"{args.element}: {exc}", 0, "element parameters") from None
    return invert(te) if args.invert else te


def cmd_transform(args):
    te = _element(args)
    name = named_equation(te.target)
    if name is not None:
        chi = exact_solution(name, args.n)
    else:
        # the inverse ansatz consumes solutions of the coefficient set itself
        cs = te.target
        chi = _state(args, cs, _init(args), args.n)
    x = grid_points(*args.grid)
    _write_grid(args, x, apply(te, chi, x, args.t))
    if args.residual:
        block = SpaceTimeBlock.sample(te(chi), args.grid, args.t, 1e-3)
        print(f"pde residual {pde_residual(te.source, block)!r}", file=sys.stderr)
    return EXIT_OK


def cmd_density(args):
    cs = _coefficients(args, args.times[0], args.times[1])
    psi = _state(args, cs, _init(args), args.n)
    x = grid_points(*args.grid)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "x", "abs2"])
    for t in sample_times(*args.times):
        dens = np.abs(psi(x, t)) ** 2
        for xi, v in zip(x, dens):
            writer.writerow([repr(float(t)), repr(float(xi)), repr(float(v))])
    _emit(args.out, buf.getvalue())
    return EXIT_OK


def cmd_verify(args):
    report = run_suite(load_scenario(args.scenario))
    sys.stdout.write(report.to_text())
    if args.out is not None:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    return EXIT_OK if report.passed else EXIT_CHECK


COMMANDS = {
    "solve": cmd_solve,
    "wavefunction": cmd_wavefunction,
    "green": cmd_green,
    "propagate": cmd_propagate,
    "transform": cmd_transform,
    "density": cmd_density,
    "verify": cmd_verify,
}


_FLAGS = {"--trivial-init", "--invert", "--residual", "--help"}


def _attach_negative_values(argv):
    """Turn ``--grid -8:8:1/64`` into ``--grid=-8:8:1/64``.

    argparse would otherwise read a value starting with '-' as an option.
    """
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and tok not in _FLAGS
                and i + 1 < len(argv) and argv[i + 1].startswith("-")
                and not argv[i + 1].startswith("--")):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_attach_negative_values(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"oscgroup: parse error at byte {exc.offset}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"oscgroup: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OscGroupError, ArithmeticError) as exc:
        print(f"oscgroup: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"oscgroup: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
