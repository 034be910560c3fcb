"""Built-in verification suite over the shipped catalog.

Each check returns a :class:`Check` with a one-line detail string; ``run_suite`` yields
them in a fixed order so the output is reproducible line for line.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from ._numerics import fmt
from .bergman import QuadConfig, TestFunction, lux_norm, weighted_integral, witness_embedding
from .classification import classify, duality_check, matuszewska_indices
from .embedding import (EmbeddingParams, TDomain, boundary_sweep, cmin, verify_E_convexity,
                        verify_F_logconvexity)
from .growth import DEFAULT_GRID, InverseView, InvGeo, format_spec, make_view, parse_spec
from .interpolation import check_type_propagation, interp_ratio_preservation, ratio_monotonicity

CATALOG = tuple(parse_spec(s) for s in (
    "pow:0.5", "pow:1", "pow:2", "pow:3", "pow:4", "pow:6", "pow:7",
    "powlog:2:1", "expm1", "dexp",
))

CRITERION_PAIRS = tuple((parse_spec(a), parse_spec(b)) for a, b in (
    ("pow:2", "pow:4"), ("pow:3", "pow:6"), ("expm1", "pow:1"),
))

THETAS = (0.25, 0.5, 0.75)
WIDE_X_MAX = 2000.0


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def check_power_criterion(cfg=DEFAULT_GRID):
    P = parse_spec
    r = cmin(P("pow:2"), P("pow:4"), EmbeddingParams(0, 2, TDomain.FROM_ONE), cfg)
    below = cmin(P("pow:2"), P("pow:4"), EmbeddingParams(0, 2 - 1e-2, TDomain.FROM_ONE), cfg)
    ok = r.finite and abs(r.value - 1.0) <= 1e-9 and not below.finite
    return Check("power-criterion", ok,
                 f"cmin={fmt(r.value)} member_below={fmt(below.finite)}")


def check_boundary(cfg=DEFAULT_GRID, workers=1):
    P = parse_spec
    curve = boundary_sweep(P("pow:2"), P("pow:4"), 0.0, 2.0, 21, cfg, workers=workers)
    err = max((abs(s.beta_star - (2 * s.alpha + 2)) if s.ok else math.inf)
              for s in curve.samples)
    return Check("boundary-line", curve.passed and err <= 1e-3,
                 f"max_error={fmt(err)} violations={len(curve.violations)}")


def check_E_convexity(cfg=DEFAULT_GRID, workers=1):
    P = parse_spec
    rep = verify_E_convexity(P("pow:2"), P("pow:4"), (0.0, 2.0), (2.0, 6.0),
                             [k / 10 for k in range(1, 10)], cfg, workers=workers)
    worst = max(c.C for c in rep.checks)
    ok = rep.passed and worst <= 1 + 1e-6
    return Check("E-convexity", ok, f"max_C={fmt(worst)} hypothesis={fmt(rep.hypothesis_met)}")


def check_F_logconvexity(cfg=DEFAULT_GRID, workers=1):
    params = EmbeddingParams(0.0, 2.0, TDomain.FROM_ONE)
    n = bad = 0
    for (p0, s0), (p1, s1) in itertools.product(CRITERION_PAIRS, repeat=2):
        rep = verify_F_logconvexity(p0, s0, p1, s1, params, THETAS, cfg, workers=workers)
        n += 1
        bad += not rep.passed
    return Check("F-logconvexity", bad == 0, f"pair_combinations={n} failed={bad}")


def check_type_propagation_suite(cfg=DEFAULT_GRID):
    P = parse_spec
    worst_pow = 0.0
    for a, b in (("pow:2", "pow:4"), ("pow:0.5", "pow:1"), ("pow:3", "pow:7")):
        for th in THETAS:
            r = check_type_propagation(P(a), P(b), th, cfg)
            worst_pow = max(worst_pow, r.q_error, r.p_error)
    mix_ok = True
    for a, b in (("powlog:2:1", "pow:4"), ("pow:2", "powlog:2:1")):
        for th in THETAS:
            mix_ok &= check_type_propagation(P(a), P(b), th, cfg).passed
    return Check("type-propagation", worst_pow <= 1e-9 and mix_ok,
                 f"power_error={fmt(worst_pow)} mixes={fmt(mix_ok)}")


def check_duality(cfg=DEFAULT_GRID):
    names = ("pow:0.5", "pow:3", "expm1", "powlog:2:1", "dexp")
    failed = [n for n in names if not duality_check(parse_spec(n), cfg).passed]
    return Check("dlog-duality", not failed, f"failed={','.join(failed) or 'none'}")


def check_verdicts(cfg=DEFAULT_GRID):
    P = parse_spec
    out = []
    for p in ("pow:0.5", "pow:2", "pow:7"):
        r = classify(P(p), cfg)
        out.append(r.dlog_minus_C == 1.0 and r.dlog_plus_C == 1.0)
    out.append(classify(P("expm1"), cfg).dlog_minus_C <= 1 + 1e-6)
    out.append(math.isfinite(classify(P("powlog:2:1"), cfg).dlog_plus_C))
    out.append(math.isfinite(classify(P("dexp"), cfg).dlog_minus_C))
    return Check("example-verdicts", all(out), f"verdicts={sum(out)}/{len(out)}")


def check_indices(cfg=DEFAULT_GRID):
    P = parse_spec
    pw = max(max(abs(a - p), abs(b - p)) for p in (0.5, 1.0, 2.0, 7.0)
             for a, b in [matuszewska_indices(P(f"pow:{p}"), cfg)])
    # the elasticity of t^2 log(1+t) decays to 2 only like 1/log t, so the lower
    # index needs a grid reaching far beyond the default t = 1e12
    a, b = matuszewska_indices(P("powlog:2:1"), replace(cfg, x_max=WIDE_X_MAX))
    pl = max(abs(a - 2.0), abs(b - 3.0))
    dual = 0.0
    for spec in CATALOG:
        b_phi = matuszewska_indices(spec, cfg).b
        if math.isfinite(b_phi):
            dual = max(dual, abs(matuszewska_indices(InverseView(spec), cfg).a * b_phi - 1.0))
    ok = pw <= 1e-9 and pl <= 1e-3 and dual <= 1e-6
    return Check("indices", ok, f"power={fmt(pw)} powlog={fmt(pl)} inverse={fmt(dual)}")


def hypothesis_pairs(cfg=DEFAULT_GRID):
    """Catalog pairs (phi, psi) with a_psi >= b_phi."""
    return [(phi, psi) for phi, psi in itertools.product(CATALOG, repeat=2)
            if ratio_monotonicity(phi, psi, cfg).hypothesis_met]


def check_ratio_monotonicity(cfg=DEFAULT_GRID, workers=1):
    pairs = hypothesis_pairs(cfg)
    bad = [p for p in pairs if not ratio_monotonicity(*p, cfg).passed]
    # each pair is interpolated against the reference power pair and its successor
    ref = CRITERION_PAIRS[0]
    combos = [(p, ref) for p in pairs] + [(p, pairs[(i + 1) % len(pairs)])
                                         for i, p in enumerate(pairs)]
    bad_interp = [c for c in combos
                  if not interp_ratio_preservation(*c[0], *c[1], THETAS, cfg, workers).passed]
    return Check("ratio-monotonicity", not bad and not bad_interp,
                 f"pairs={len(pairs)} combinations={len(combos)} "
                 f"failed={len(bad) + len(bad_interp)}")


def check_lux(quad=QuadConfig(), cfg=DEFAULT_GRID):
    P = parse_spec
    const = 0.0
    for name, k, alpha in (("pow:2", 3.0, 0.0), ("expm1", 1.0, 0.0), ("dexp", 2.0, 1.0),
                           ("powlog:2:1", 0.5, 2.5)):
        lam = lux_norm(TestFunction(0.0, k), P(name), alpha, quad, cfg).lam
        exact = k / math.exp(make_view(P(name), cfg).g(np.array([0.0]))[0])
        const = max(const, abs(lam - exact) / exact)
    norm = max(abs(weighted_integral(TestFunction(0.0, 2.0), P("pow:1"), a, 2.0, quad, cfg) - 1.0)
               for a in (0.0, 1.0, 2.5))
    drift = 0.0
    for c, name, alpha in ((0.5, "pow:2", 0.0), (0.9, "pow:4", 2.0)):
        f = TestFunction(c, 1.0)
        a = lux_norm(f, P(name), alpha, quad, cfg).lam
        b = lux_norm(f, P(name), alpha, quad.doubled(), cfg).lam
        drift = max(drift, abs(b - a) / abs(b))
    ok = const <= 1e-8 and norm <= 1e-10 and drift < 1e-4
    return Check("luxembourg", ok,
                 f"constant={fmt(const)} normalization={fmt(norm)} doubling={fmt(drift)}")


def check_witness(quad=QuadConfig(), cfg=DEFAULT_GRID, workers=1):
    P = parse_spec
    fam = [TestFunction(c / 10, 1.0) for c in range(10)]
    phi = InvGeo(P("pow:2"), P("pow:3"), 0.5)
    psi = InvGeo(P("pow:4"), P("pow:6"), 0.5)
    a = witness_embedding(phi, psi, 0.0, 2.0, fam, quad, cfg, workers)
    b = witness_embedding(phi, psi, 0.0, 2.0, fam, quad.doubled(), cfg, workers)
    drift = abs(b.max_ratio - a.max_ratio) / abs(b.max_ratio)
    ok = a.bounded and drift < 1e-3
    return Check("witness", ok, f"max_ratio={fmt(a.max_ratio)} excluded={len(a.excluded)} "
                                f"drift={fmt(drift)} ({format_spec(phi)} -> {format_spec(psi)})")


def run_suite(cfg=DEFAULT_GRID, quad=QuadConfig(), workers=1):
    yield check_power_criterion(cfg)
    yield check_boundary(cfg, workers)
    yield check_E_convexity(cfg, workers)
    yield check_F_logconvexity(cfg, workers)
    yield check_type_propagation_suite(cfg)
    yield check_duality(cfg)
    yield check_verdicts(cfg)
    yield check_indices(cfg)
    yield check_ratio_monotonicity(cfg, workers)
    yield check_lux(quad, cfg)
    yield check_witness(quad, cfg, workers)
