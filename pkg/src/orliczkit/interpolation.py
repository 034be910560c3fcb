"""Geodesic interpolation of growth-function pairs and the properties it preserves.

Two interpolations are supported:

* value geodesic: ``log Phi_th = (1-th) log Phi_0 + th log Phi_1``;
* inverse geodesic: ``log Phi_th^-1 = (1-th) log Phi_0^-1 + th log Phi_1^-1``.

The checks here sample the relevant log-ratios on the grid and decide monotonicity
with an adjacent-sample tolerance of ``slope_tol * dx``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._numerics import fmt, worst_decrease
from .classification import matuszewska_indices, type_exponents
from .growth import DEFAULT_GRID, FunctionSpec, Geo, GridConfig, InvGeo, format_spec, make_view


class Mode(str, Enum):
    VALUE = "value-geodesic"
    INVERSE = "inverse-geodesic"


@dataclass(frozen=True)
class InterpFamily:
    left: FunctionSpec
    right: FunctionSpec
    mode: Mode = Mode.INVERSE
    thetas: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        ts = tuple(float(t) for t in self.thetas)
        if any(not 0.0 <= t <= 1.0 for t in ts):
            raise ValueError("thetas must lie in [0, 1]")
        if list(ts) != sorted(ts):
            raise ValueError("thetas must be sorted")
        object.__setattr__(self, "thetas", ts)

    def members(self):
        return [interpolate(self, t) for t in self.thetas]


def interpolate(family: InterpFamily, theta: float) -> FunctionSpec:
    """Interpolant at ``theta``; the endpoints themselves at theta 0 and 1."""
    theta = float(theta)
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta!r}")
    if theta == 0.0:
        return family.left
    if theta == 1.0:
        return family.right
    cls = Geo if family.mode is Mode.VALUE else InvGeo
    return cls(family.left, family.right, theta)


def _verdict(applicable, ok):
    if not applicable:
        return "n/a"
    return "ok" if ok else "fail"


def _kv(rows):
    return "".join(f"{k} = {v}\n" for k, v in rows)


@dataclass(frozen=True)
class TypePropagationReport:
    theta: float
    q_expected: float
    q_measured: float
    p_expected: float
    p_measured: float
    C_upper: float
    C_upper_bound: float
    C_lower: float
    C_lower_bound: float
    upper_applicable: bool
    lower_applicable: bool
    upper_ok: bool
    lower_ok: bool

    @property
    def passed(self):
        return self.upper_ok and self.lower_ok

    @property
    def q_error(self):
        return abs(self.q_measured - self.q_expected) / abs(self.q_expected)

    @property
    def p_error(self):
        return abs(self.p_measured - self.p_expected) / abs(self.p_expected)

    def to_text(self):
        return _kv([
            ("theta", fmt(self.theta)),
            ("q_expected", fmt(self.q_expected)), ("q_measured", fmt(self.q_measured)),
            ("p_expected", fmt(self.p_expected)), ("p_measured", fmt(self.p_measured)),
            ("C_upper", fmt(self.C_upper)), ("C_upper_bound", fmt(self.C_upper_bound)),
            ("C_lower", fmt(self.C_lower)), ("C_lower_bound", fmt(self.C_lower_bound)),
            ("upper", _verdict(self.upper_applicable, self.upper_ok)),
            ("lower", _verdict(self.lower_applicable, self.lower_ok)),
            ("passed", fmt(self.passed)),
        ])


def check_type_propagation(left: FunctionSpec, right: FunctionSpec, theta: float,
                           cfg: GridConfig = DEFAULT_GRID, rel_tol=1e-3) -> TypePropagationReport:
    """Classify the value geodesic and compare its type exponents with the affine prediction.

    An endpoint with an infinite upper exponent makes the upper check not applicable;
    a not-applicable check counts as passing.
    """
    t0, t1 = type_exponents(left, cfg), type_exponents(right, cfg)
    tt = type_exponents(Geo(left, right, theta), cfg)
    w0, w1 = 1.0 - theta, theta

    q0, c0 = t0.upper
    q1, c1 = t1.upper
    upper_app = math.isfinite(q0) and math.isfinite(q1)
    q_exp = w0 * q0 + w1 * q1 if upper_app else math.inf
    cu_bound = c0 ** w0 * c1 ** w1 if upper_app else math.nan
    upper_ok = (not upper_app) or (
        abs(tt.upper[0] - q_exp) <= rel_tol * abs(q_exp)
        and tt.upper[1] <= cu_bound * (1 + 1e-6))

    p0, d0 = t0.lower
    p1, d1 = t1.lower
    lower_app = math.isfinite(p0) and math.isfinite(p1) and (p0 > 0 or p1 > 0)
    p_exp = w0 * p0 + w1 * p1
    cl_bound = d0 ** w0 * d1 ** w1
    lower_ok = (not lower_app) or (
        abs(tt.lower[0] - p_exp) <= rel_tol * abs(p_exp)
        and tt.lower[1] <= cl_bound * (1 + 1e-6))

    return TypePropagationReport(
        theta=theta, q_expected=q_exp, q_measured=tt.upper[0], p_expected=p_exp,
        p_measured=tt.lower[0], C_upper=tt.upper[1], C_upper_bound=cu_bound,
        C_lower=tt.lower[1], C_lower_bound=cl_bound, upper_applicable=upper_app,
        lower_applicable=lower_app, upper_ok=upper_ok, lower_ok=lower_ok,
    )


@dataclass(frozen=True)
class RatioReport:
    """Monotonicity of Psi/Phi and Phi^-1/Psi^-1 on the grid.

    ``worst_*`` is the largest adjacent decrease beyond tolerance (nonpositive means
    nondecreasing). ``hypothesis_met`` records whether a_Psi >= b_Phi held.
    """

    phi: FunctionSpec
    psi: FunctionSpec
    a_psi: float
    b_phi: float
    hypothesis_met: bool
    worst_forward: float
    worst_inverse: float

    @property
    def forward_ok(self):
        return self.worst_forward <= 0.0

    @property
    def inverse_ok(self):
        return self.worst_inverse <= 0.0

    @property
    def passed(self):
        return self.hypothesis_met and self.forward_ok and self.inverse_ok

    def to_text(self):
        return _kv([
            ("phi", format_spec(self.phi)), ("psi", format_spec(self.psi)),
            ("a_psi", fmt(self.a_psi)), ("b_phi", fmt(self.b_phi)),
            ("hypothesis", "met" if self.hypothesis_met else "not-met"),
            ("psi_over_phi_nondecreasing", fmt(self.forward_ok)),
            ("phi_inv_over_psi_inv_nondecreasing", fmt(self.inverse_ok)),
            ("worst_forward_violation", fmt(self.worst_forward)),
            ("worst_inverse_violation", fmt(self.worst_inverse)),
            ("passed", fmt(self.passed)),
        ])


def _forward_ratio(phi_view, psi_view, cfg):
    lo = max(phi_view.domain[0], psi_view.domain[0])
    hi = min(phi_view.domain[1], psi_view.domain[1])
    x, _ = cfg.grid(lo, hi)
    return x, psi_view.f(x) - phi_view.f(x)


def _inverse_ratio(phi_view, psi_view, cfg):
    lo = max(phi_view.range[0], psi_view.range[0])
    hi = min(phi_view.range[1], psi_view.range[1])
    y, _ = cfg.grid(lo, hi)
    return y, phi_view.g(y) - psi_view.g(y)


def hypothesis_holds(phi, psi, cfg=DEFAULT_GRID):
    a_psi = matuszewska_indices(psi, cfg).a
    b_phi = matuszewska_indices(phi, cfg).b
    return a_psi, b_phi, a_psi >= b_phi - cfg.slope_tol


def ratio_monotonicity(phi: FunctionSpec, psi: FunctionSpec,
                       cfg: GridConfig = DEFAULT_GRID) -> RatioReport:
    """Sample log(Psi/Phi) and log(Phi^-1/Psi^-1) and test both for nondecrease.

    When a_Psi < b_Phi the report is marked hypothesis-not-met; the ratios are still
    sampled and reported.
    """
    a_psi, b_phi, met = hypothesis_holds(phi, psi, cfg)
    pv, sv = make_view(phi, cfg), make_view(psi, cfg)
    x, fwd = _forward_ratio(pv, sv, cfg)
    y, inv = _inverse_ratio(pv, sv, cfg)
    return RatioReport(
        phi=phi, psi=psi, a_psi=a_psi, b_phi=b_phi, hypothesis_met=met,
        worst_forward=worst_decrease(x, fwd, cfg.slope_tol)[0],
        worst_inverse=worst_decrease(y, inv, cfg.slope_tol)[0],
    )


@dataclass(frozen=True)
class ThetaRatioCheck:
    theta: float
    worst_inverse: float        # Phi_th^-1 / Psi_th^-1, the pass/fail orientation
    worst_forward: float        # Psi_th / Phi_th
    statement_orientation_nondecreasing: bool   # Psi_th^-1 / Phi_th^-1, reported only
    identity_error: float       # log-space transitivity identity residual

    @property
    def passed(self):
        return self.worst_inverse <= 0.0 and self.worst_forward <= 0.0 and self.identity_error <= 1e-12


@dataclass(frozen=True)
class PreservationReport:
    pairs: tuple
    hypotheses: tuple           # ((a_psi, b_phi, met), ...) for both endpoint pairs
    checks: tuple = field(default=())

    @property
    def hypothesis_met(self):
        return all(h[2] for h in self.hypotheses)

    @property
    def passed(self):
        return self.hypothesis_met and all(c.passed for c in self.checks)

    def to_text(self):
        rows = []
        for i, ((phi, psi), (a, b, met)) in enumerate(zip(self.pairs, self.hypotheses)):
            rows += [(f"pair{i}", f"{format_spec(phi)} {format_spec(psi)}"),
                     (f"pair{i}_a_psi", fmt(a)), (f"pair{i}_b_phi", fmt(b)),
                     (f"pair{i}_hypothesis", "met" if met else "not-met")]
        for c in self.checks:
            tag = f"theta[{fmt(c.theta)}]"
            rows += [(f"{tag}.phi_inv_over_psi_inv_worst", fmt(c.worst_inverse)),
                     (f"{tag}.psi_over_phi_worst", fmt(c.worst_forward)),
                     (f"{tag}.statement_orientation_nondecreasing",
                      fmt(c.statement_orientation_nondecreasing)),
                     (f"{tag}.identity_error", fmt(c.identity_error)),
                     (f"{tag}.passed", fmt(c.passed))]
        rows.append(("passed", fmt(self.passed)))
        return _kv(rows)


def _theta_check(phi0, psi0, phi1, psi1, theta, cfg):
    phit = make_view(InvGeo(phi0, phi1, theta), cfg)
    psit = make_view(InvGeo(psi0, psi1, theta), cfg)
    y, inv = _inverse_ratio(phit, psit, cfg)
    x, fwd = _forward_ratio(phit, psit, cfg)

    r0 = make_view(phi0, cfg).g(y) - make_view(psi0, cfg).g(y)
    r1 = make_view(phi1, cfg).g(y) - make_view(psi1, cfg).g(y)
    combo = (1.0 - theta) * r0 + theta * r1
    ident = float(np.max(np.abs(inv - combo) / (1.0 + np.abs(combo))))

    return ThetaRatioCheck(
        theta=theta,
        worst_inverse=worst_decrease(y, inv, cfg.slope_tol)[0],
        worst_forward=worst_decrease(x, fwd, cfg.slope_tol)[0],
        statement_orientation_nondecreasing=worst_decrease(y, -inv, cfg.slope_tol)[0] <= 0.0,
        identity_error=ident,
    )


def interp_ratio_preservation(phi0: FunctionSpec, psi0: FunctionSpec, phi1: FunctionSpec,
                              psi1: FunctionSpec, thetas, cfg: GridConfig = DEFAULT_GRID,
                              workers: int = 1) -> PreservationReport:
    """Check that inverse-geodesic interpolation keeps both ratios nondecreasing.

    For each theta, Phi_th^-1/Psi_th^-1 is sampled directly from the closed-form
    interpolated inverses; Psi_th/Phi_th needs numeric inversion. The reciprocal
    orientation Psi_th^-1/Phi_th^-1 is reported but never asserted.
    """
    hyps = (hypothesis_holds(phi0, psi0, cfg), hypothesis_holds(phi1, psi1, cfg))
    thetas = [float(t) for t in thetas]

    def run(t):
        return _theta_check(phi0, psi0, phi1, psi1, t, cfg)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            checks = tuple(pool.map(run, thetas))
    else:
        checks = tuple(run(t) for t in thetas)
    return PreservationReport(pairs=((phi0, psi0), (phi1, psi1)), hypotheses=hyps, checks=checks)
