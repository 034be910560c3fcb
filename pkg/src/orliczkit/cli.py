"""Command-line entry point.

Exit codes: 0 success, 1 hypothesis not met or property violated, 2 usage error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from ._numerics import fmt
from .bergman import QuadConfig, TestFunction, lux_norm, witness_embedding
from .classification import AnalysisError, classify, matuszewska_indices
from .diagram import phase_diagram_svg
from .embedding import (EmbeddingParams, MonotonicityError, TDomain, beta_star, boundary_sweep,
                        cmin, member_E, member_F, verify_E_convexity, verify_F_logconvexity)
from .growth import (DEFAULT_GRID, GRAMMAR, DomainError, SpecDomainError,
                     SpecSyntaxError, format_spec, parse_spec)
from .interpolation import check_type_propagation, interp_ratio_preservation
from .suite import run_suite

EXIT_OK, EXIT_PROPERTY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_THETAS = (0.25, 0.5, 0.75)
DEFAULT_FAMILY = tuple(k / 10 for k in range(10))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


class _Formatter(argparse.RawDescriptionHelpFormatter):
    pass


def _annotate_defaults(parser):
    for action in parser._actions:
        if action.help and action.default not in (None, argparse.SUPPRESS) \
                and "default" not in action.help:
            action.help += " (default: %(default)s)"


@dataclass
class RunResult:
    code: int
    stdout: str
    stderr: str = ""
    files: set = field(default_factory=set)


def _spec(text):
    try:
        return parse_spec(text)
    except SpecSyntaxError as exc:
        raise UsageError(f"bad function spec {text!r} at offset {exc.offset}: {exc}") from exc
    except SpecDomainError as exc:
        raise UsageError(f"bad function spec {text!r}: {exc}") from exc


def _alpha_range(text):
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError("expected lo:hi:n") from None


def _grid(args):
    cfg = DEFAULT_GRID
    kw = {}
    if args.t_min is not None:
        kw["x_min"] = math.log(args.t_min)
    if args.t_max is not None:
        kw["x_max"] = math.log(args.t_max)
    if args.grid is not None:
        kw["n_points"] = args.grid
    try:
        return replace(cfg, **kw) if kw else cfg
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _quad(args):
    try:
        return QuadConfig(args.quad, args.quad)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _kv(out, key, value):
    out.write(f"{key} = {value}\n")


def _grid_options(p):
    g = p.add_argument_group("grid")
    g.add_argument("--t-min", type=float, default=None,
                   help=f"smallest t sampled (default: t = {math.exp(DEFAULT_GRID.x_min):g})")
    g.add_argument("--t-max", type=float, default=None,
                   help=f"largest t sampled (default: t = {math.exp(DEFAULT_GRID.x_max):g})")
    g.add_argument("--grid", type=int, default=None,
                   help=f"grid points (default: {DEFAULT_GRID.n_points})")
    g.add_argument("--workers", type=int, default=1, help="worker threads; output is unchanged")


def _domain_option(p, default):
    p.add_argument("--t-domain", choices=[d.value for d in TDomain], default=default.value,
                   help="t > 0 (all-positive) or t >= 1 (from-one)")


def build_parser():
    top = _Parser(prog="orliczkit", formatter_class=_Formatter, epilog=GRAMMAR,
                  description="Growth-function calculus and embedding criteria.")
    sub = top.add_subparsers(dest="command", metavar="command", required=True)

    def cmd(name, help_, nspecs):
        p = sub.add_parser(name, help=help_, description=help_, formatter_class=_Formatter,
                           epilog=GRAMMAR)
        p.set_defaults(nspecs=nspecs)
        for i in range(nspecs):
            p.add_argument(f"spec{i}", metavar=_SPEC_NAMES[nspecs][i], help="function spec")
        return p

    p = cmd("classify", "classification report of one growth function", 1)
    _grid_options(p)
    p = cmd("indices", "Matuszewska-Orlicz indices with edge diagnostics", 1)
    _grid_options(p)

    for name, help_, dom in (("cmin", "minimal constant of the embedding criterion",
                              TDomain.FROM_ONE),
                             ("member", "membership with and without K", TDomain.ALL_POSITIVE)):
        p = cmd(name, help_, 2)
        p.add_argument("--alpha", type=float, default=0.0, help="source weight exponent")
        p.add_argument("--beta", type=float, default=0.0, help="target weight exponent")
        _domain_option(p, dom)
        _grid_options(p)

    p = cmd("beta-star", "boundary value beta*(alpha)", 2)
    p.add_argument("--alpha", type=float, default=0.0, help="source weight exponent")
    _domain_option(p, TDomain.FROM_ONE)
    _grid_options(p)

    for name, help_ in (("boundary", "sweep beta*(alpha) and write CSV"),
                        ("diagram", "sweep beta*(alpha) and write CSV and SVG")):
        p = cmd(name, help_, 2)
        p.add_argument("--alpha-range", type=_alpha_range, default=(0.0, 2.0, 21),
                       metavar="LO:HI:N", help="alpha samples")
        p.add_argument("--out", default="boundary.csv", help="CSV output path")
        if name == "diagram":
            p.add_argument("--svg", default="diagram.svg", help="SVG output path")
        _domain_option(p, TDomain.FROM_ONE)
        _grid_options(p)

    p = cmd("interp-check", "type propagation and ratio preservation along geodesics", 4)
    p.add_argument("--theta", type=float, action="append", default=None,
                   help=f"interpolation parameter, repeatable (default: {DEFAULT_THETAS})")
    _grid_options(p)

    p = cmd("verify-e", "convexity of the criterion set between two (alpha, beta) points", 2)
    p.add_argument("--alpha", type=float, action="append", default=None,
                   help="alpha of pair0 then pair1 (default: 0 and 2)")
    p.add_argument("--beta", type=float, action="append", default=None,
                   help="beta of pair0 then pair1 (default: 2 and 6)")
    p.add_argument("--theta", type=float, action="append", default=None,
                   help="interpolation parameter, repeatable (default: 0.1, ..., 0.9)")
    _domain_option(p, TDomain.ALL_POSITIVE)
    _grid_options(p)

    p = cmd("verify-f", "inverse log-convexity of the K-free criterion set", 4)
    p.add_argument("--alpha", type=float, default=0.0, help="source weight exponent")
    p.add_argument("--beta", type=float, default=2.0, help="target weight exponent")
    p.add_argument("--theta", type=float, action="append", default=None,
                   help=f"interpolation parameter, repeatable (default: {DEFAULT_THETAS})")
    _domain_option(p, TDomain.FROM_ONE)
    _grid_options(p)

    p = cmd("lux", "Luxembourg norm of k(1-z)^(-c) on the weighted disk", 1)
    p.add_argument("--alpha", type=float, default=0.0, help="weight exponent (> -1)")
    p.add_argument("--c", type=float, default=0.0, help="singularity strength")
    p.add_argument("--k", type=float, default=1.0, help="scale")
    p.add_argument("--quad", type=int, default=512, help="quadrature nodes per coordinate")
    _grid_options(p)

    p = cmd("witness", "norm ratios over the test family k(1-z)^(-c)", 2)
    p.add_argument("--alpha", type=float, default=0.0, help="source weight exponent (> -1)")
    p.add_argument("--beta", type=float, default=2.0, help="target weight exponent (> -1)")
    p.add_argument("--c", type=float, action="append", default=None,
                   help="singularity strength, repeatable (default: 0, 0.1, ..., 0.9)")
    p.add_argument("--quad", type=int, default=512, help="quadrature nodes per coordinate")
    p.add_argument("--out", default=None, help="optional CSV output path (default: none)")
    _grid_options(p)

    p = cmd("verify-all", "run the built-in verification suite", 0)
    p.add_argument("--quad", type=int, default=512, help="quadrature nodes per coordinate")
    _grid_options(p)
    for p in sub.choices.values():
        _annotate_defaults(p)
    return top


_SPEC_NAMES = {0: (), 1: ("SPEC",), 2: ("PHI", "PSI"), 4: ("PHI0", "PSI0", "PHI1", "PSI1")}


# -- command handlers: each writes to ``out`` and returns (code, files) -------------------

def _classify(a, specs, cfg, out):
    out.write(classify(specs[0], cfg).to_text())
    return EXIT_OK, set()


def _indices(a, specs, cfg, out):
    r = matuszewska_indices(specs[0], cfg)
    for k, v in (("spec", format_spec(specs[0])), ("a_index", fmt(r.a)), ("b_index", fmt(r.b)),
                 ("a_at_log_t", fmt(r.a_at)), ("b_at_log_t", fmt(r.b_at)),
                 ("left_edge_slope", fmt(r.left_slope)), ("right_edge_slope", fmt(r.right_slope)),
                 ("sampled_x_min", fmt(r.x_range[0])), ("sampled_x_max", fmt(r.x_range[1])),
                 ("clipped", fmt(r.clipped))):
        _kv(out, k, v)
    return EXIT_OK, set()


def _params(a, beta=None):
    try:
        return EmbeddingParams(a.alpha, a.beta if beta is None else beta, a.t_domain)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _cmin(a, specs, cfg, out):
    p = _params(a)
    r = cmin(*specs, p, cfg, workers=a.workers)
    _kv(out, "t_domain", p.t_domain.value)
    out.write(r.to_text())
    return EXIT_OK, set()


def _member(a, specs, cfg, out):
    p = _params(a)
    f_ok, f_res = member_F(*specs, p, cfg)
    e = member_E(*specs, p, cfg)
    for k, v in (("t_domain", p.t_domain.value), ("member_F", fmt(f_ok)),
                 ("member_F_C", fmt(f_res.value)), ("member_E", fmt(e.member)),
                 ("member_E_C", fmt(e.C)), ("member_E_K", fmt(e.K))):
        _kv(out, k, v)
    out.write(f_res.to_text(prefix="F."))
    return EXIT_OK, set()


def _beta_star(a, specs, cfg, out):
    if not a.alpha >= -1:
        raise UsageError("alpha must be >= -1")
    r = beta_star(*specs, a.alpha, cfg, a.t_domain)
    _kv(out, "t_domain", a.t_domain)
    _kv(out, "beta_star", fmt(r.beta))
    _kv(out, "iterations", fmt(r.iterations))
    _kv(out, "residual", fmt(r.residual))
    return EXIT_OK, set()


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8", newline="\n")
    return str(path)


def _sweep(a, specs, cfg, out):
    lo, hi, n = a.alpha_range
    try:
        curve = boundary_sweep(*specs, lo, hi, n, cfg, a.t_domain, workers=a.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    files = {_write(a.out, curve.to_csv())}
    if a.command == "diagram":
        files.add(_write(a.svg, phase_diagram_svg(curve)))
    out.write(curve.to_text())
    for f in sorted(files):
        _kv(out, "wrote", f)
    if curve.failures:
        return EXIT_NUMERIC, files
    return (EXIT_OK if curve.passed else EXIT_PROPERTY), files


def _interp_check(a, specs, cfg, out):
    thetas = sorted(a.theta) if a.theta else list(DEFAULT_THETAS)
    if any(not 0 <= t <= 1 for t in thetas):
        raise UsageError("theta must lie in [0, 1]")
    phi0, psi0, phi1, psi1 = specs
    ok = True
    for label, (l, r) in (("phi", (phi0, phi1)), ("psi", (psi0, psi1))):
        for t in thetas:
            rep = check_type_propagation(l, r, t, cfg)
            for line in rep.to_text().splitlines():
                out.write(f"type.{label}.{line}\n")
            ok &= rep.passed
    rep = interp_ratio_preservation(phi0, psi0, phi1, psi1, thetas, cfg, a.workers)
    for line in rep.to_text().splitlines():
        out.write(f"ratio.{line}\n")
    ok &= rep.passed
    _kv(out, "passed", fmt(ok))
    return (EXIT_OK if ok else EXIT_PROPERTY), set()


def _verify_e(a, specs, cfg, out):
    alphas = a.alpha or [0.0, 2.0]
    betas = a.beta or [2.0, 6.0]
    if len(alphas) != 2 or len(betas) != 2:
        raise UsageError("verify-e takes --alpha and --beta exactly twice each")
    thetas = sorted(a.theta) if a.theta else [k / 10 for k in range(1, 10)]
    try:
        EmbeddingParams(alphas[0], betas[0]), EmbeddingParams(alphas[1], betas[1])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rep = verify_E_convexity(*specs, (alphas[0], betas[0]), (alphas[1], betas[1]), thetas,
                             cfg, a.t_domain, workers=a.workers)
    out.write(rep.to_text())
    return (EXIT_OK if rep.passed else EXIT_PROPERTY), set()


def _verify_f(a, specs, cfg, out):
    thetas = sorted(a.theta) if a.theta else list(DEFAULT_THETAS)
    rep = verify_F_logconvexity(*specs, _params(a), thetas, cfg, workers=a.workers)
    out.write(rep.to_text())
    return (EXIT_OK if rep.passed else EXIT_PROPERTY), set()


def _lux(a, specs, cfg, out):
    try:
        f = TestFunction(a.c, a.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not a.alpha > -1:
        raise UsageError("alpha must be > -1")
    r = lux_norm(f, specs[0], a.alpha, _quad(a), cfg, workers=a.workers)
    for k, v in (("spec", format_spec(specs[0])), ("alpha", fmt(a.alpha)), ("c", fmt(a.c)),
                 ("k", fmt(a.k)), ("nodes", f"{a.quad}x{a.quad}")):
        _kv(out, k, v)
    out.write(r.to_text())
    return EXIT_OK, set()


def _witness(a, specs, cfg, out):
    cs = a.c if a.c else list(DEFAULT_FAMILY)
    try:
        fam = [TestFunction(c, 1.0) for c in cs]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not (a.alpha > -1 and a.beta > -1):
        raise UsageError("alpha and beta must be > -1")
    rep = witness_embedding(*specs, a.alpha, a.beta, fam, _quad(a), cfg, a.workers)
    out.write(rep.to_csv())
    out.write(rep.to_text())
    files = set()
    if a.out:
        files.add(_write(a.out, rep.to_csv()))
        _kv(out, "wrote", a.out)
    return (EXIT_OK if rep.bounded else EXIT_PROPERTY), files


def _verify_all(a, specs, cfg, out):
    ok = True
    for check in run_suite(cfg, _quad(a), a.workers):
        out.write(check.line() + "\n")
        ok &= check.passed
    return (EXIT_OK if ok else EXIT_PROPERTY), set()


HANDLERS = {
    "classify": _classify, "indices": _indices, "cmin": _cmin, "member": _member,
    "beta-star": _beta_star, "boundary": _sweep, "diagram": _sweep,
    "interp-check": _interp_check, "verify-e": _verify_e, "verify-f": _verify_f,
    "lux": _lux, "witness": _witness, "verify-all": _verify_all,
}


def run(argv) -> RunResult:
    """Execute one command; returns the exit code, captured stdout/stderr and written files."""
    out, err = io.StringIO(), io.StringIO()
    parser = build_parser()
    try:
        try:
            with contextlib.redirect_stdout(out):
                args = parser.parse_args(list(argv))
        except SystemExit as exc:        # --help
            return RunResult(int(exc.code or 0), out.getvalue(), err.getvalue())
        specs = [_spec(getattr(args, f"spec{i}")) for i in range(args.nspecs)]
        cfg = _grid(args)
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        code, files = HANDLERS[args.command](args, specs, cfg, out)
        return RunResult(code, out.getvalue(), err.getvalue(), files)
    except UsageError as exc:
        err.write(f"{exc}\n\n{GRAMMAR}\n")
        return RunResult(EXIT_USAGE, out.getvalue(), err.getvalue())
    except MonotonicityError as exc:
        err.write(f"property violation: {exc}\n")
        return RunResult(EXIT_PROPERTY, out.getvalue(), err.getvalue())
    except (ArithmeticError, AnalysisError, DomainError) as exc:
        err.write(f"numeric failure: {exc}\n")
        return RunResult(EXIT_NUMERIC, out.getvalue(), err.getvalue())


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    res = run(argv)
    sys.stdout.write(res.stdout)
    sys.stderr.write(res.stderr)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
