"""Embedding criterion: minimal constants, set membership and the boundary beta*(alpha).

The criterion for a pair (Phi, Psi) at exponents (alpha, beta) compares inverse
functions, ``Phi^-1(t^(2+alpha)) <= C Psi^-1(K t^(2+beta))``. In log coordinates the
log-ratio is

    g(x) = L_Phi^-1((2+alpha) x) - L_Psi^-1((2+beta) x + log K),

and the minimal constant is ``exp(sup g)``. Whether that supremum is finite is decided
from least-squares slopes of g over the outermost decade of the grid.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._numerics import InversionError, edge_slope, fmt, refine_extremum
from .classification import dlog_constants
from .growth import (DEFAULT_GRID, DomainError, FunctionSpec, GridConfig, InverseView, InvGeo,
                     format_spec, make_view)

K_GRID = np.logspace(-10.0, 10.0, 81)
BETA_START = 8.0
BETA_CAP = 1e6
BETA_TOL = 1e-4
REL_SLACK = 1e-6


class TDomain(str, Enum):
    ALL_POSITIVE = "all-positive"
    FROM_ONE = "from-one"


class EvaluationError(ArithmeticError):
    """The log-ratio could not be evaluated at some grid point ``x``."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class MonotonicityError(ArithmeticError):
    """Membership in beta was found not to be upward closed."""

    def __init__(self, message, member_beta, nonmember_beta):
        super().__init__(message)
        self.member_beta = member_beta
        self.nonmember_beta = nonmember_beta


@dataclass(frozen=True)
class EmbeddingParams:
    alpha: float
    beta: float
    t_domain: TDomain = TDomain.ALL_POSITIVE

    def __post_init__(self):
        object.__setattr__(self, "t_domain", TDomain(self.t_domain))
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= -1.0):
                raise ValueError(f"{name} must be a finite real >= -1, got {v!r}")


@dataclass(frozen=True)
class CminResult:
    value: float
    arg_x: float
    left_slope: float
    right_slope: float
    finite: bool
    x_range: tuple = (math.nan, math.nan)
    log_K: float = 0.0

    def to_text(self, prefix=""):
        rows = [("cmin", self.value), ("finite", self.finite), ("arg_log_t", self.arg_x),
                ("left_slope", self.left_slope), ("right_slope", self.right_slope),
                ("log_t_min", self.x_range[0]), ("log_t_max", self.x_range[1])]
        return "".join(f"{prefix}{k} = {fmt(v)}\n" for k, v in rows)


def _x_window(phi_view, psi_view, params, cfg, log_k):
    a, b = 2.0 + params.alpha, 2.0 + params.beta
    lo = 0.0 if params.t_domain is TDomain.FROM_ONE else -np.inf
    hi = np.inf
    r0, r1 = phi_view.range
    lo, hi = max(lo, r0 / a), min(hi, r1 / a)
    s0, s1 = psi_view.range
    lo, hi = max(lo, (s0 - log_k) / b), min(hi, (s1 - log_k) / b)
    return lo, hi


def _log_ratio(phi_view, psi_view, params, log_k, x):
    a, b = 2.0 + params.alpha, 2.0 + params.beta
    with np.errstate(all="ignore"):
        return phi_view.g(a * x) - psi_view.g(b * x + log_k)


def cmin(phi: FunctionSpec, psi: FunctionSpec, params: EmbeddingParams,
         cfg: GridConfig = DEFAULT_GRID, K: float = 1.0, workers: int = 1) -> CminResult:
    """Minimal constant C in ``Phi^-1(t^(2+a)) <= C Psi^-1(K t^(2+b))`` over the t-domain.

    Only inverse evaluations are used. ``workers > 1`` evaluates the grid in
    contiguous chunks on a thread pool; the result does not depend on the split.
    """
    if not K > 0:
        raise ValueError("K must be positive")
    pv, sv = make_view(phi, cfg), make_view(psi, cfg)
    log_k = math.log(K)
    lo, hi = _x_window(pv, sv, params, cfg, log_k)
    try:
        x, _ = cfg.grid(lo, hi)
    except DomainError as exc:
        raise EvaluationError(str(exc)) from exc

    def evaluate(xs):
        try:
            return _log_ratio(pv, sv, params, log_k, xs)
        except (InversionError, DomainError) as exc:
            raise EvaluationError(f"log-ratio failed near log t = {xs[0]!r}: {exc}",
                                  x=float(xs[0])) from exc

    if workers > 1:
        parts = np.array_split(x, workers)
        with ThreadPoolExecutor(workers) as pool:
            g = np.concatenate(list(pool.map(evaluate, parts)))
    else:
        g = evaluate(x)
    bad = ~np.isfinite(g)
    if bad.any():
        xb = float(x[bad][0])
        raise EvaluationError(f"log-ratio is not finite at log t = {xb!r}", x=xb)

    left = edge_slope(x, g, "left")
    right = edge_slope(x, g, "right")
    finite = right <= cfg.slope_tol and (
        params.t_domain is TDomain.FROM_ONE or left >= -cfg.slope_tol)
    arg, top = refine_extremum(lambda s: _log_ratio(pv, sv, params, log_k, s), x, g)
    value = math.exp(top) if finite and top < 709.0 else math.inf
    return CminResult(value=value, arg_x=arg, left_slope=left, right_slope=right,
                      finite=bool(finite and math.isfinite(value)),
                      x_range=(float(x[0]), float(x[-1])), log_K=log_k)


def member_F(phi, psi, params: EmbeddingParams, cfg: GridConfig = DEFAULT_GRID):
    """Membership without a K (the K = 1 instance); returns ``(member, certificate)``."""
    res = cmin(phi, psi, params, cfg)
    return res.finite, res


@dataclass(frozen=True)
class MemberE:
    member: bool
    C: float
    K: float
    certificate: CminResult | None = field(default=None, repr=False)

    def __iter__(self):
        yield self.member
        yield self.C
        yield self.K


def _k_order():
    # K = 1 first, then outward in |log K|; smaller K first on ties
    return sorted(range(len(K_GRID)), key=lambda i: (abs(math.log10(K_GRID[i])), K_GRID[i]))


def member_E(phi, psi, params: EmbeddingParams, cfg: GridConfig = DEFAULT_GRID) -> MemberE:
    """Membership with some K from the 81-point grid on [1e-10, 1e10].

    The reported K is the grid value closest to 1 (in log) that yields a finite
    constant, so a pair satisfying the K-free condition reports K = 1 with the
    same C. Non-members report C = inf and K = nan.
    """
    for i in _k_order():
        k = float(K_GRID[i])
        if abs(math.log10(k)) < 1e-12:
            k = 1.0
        res = cmin(phi, psi, params, cfg, K=k)
        if res.finite:
            return MemberE(True, res.value, k, res)
    return MemberE(False, math.inf, math.nan, None)


# -- boundary --------------------------------------------------------------------------

@dataclass(frozen=True)
class BetaStar:
    beta: float
    iterations: int
    residual: float

    def __iter__(self):
        yield self.beta
        yield self.iterations
        yield self.residual


def _margin(res: CminResult, t_domain):
    if t_domain is TDomain.FROM_ONE:
        return res.right_slope
    return max(res.right_slope, -res.left_slope)


def beta_star(phi, psi, alpha: float, cfg: GridConfig = DEFAULT_GRID,
              t_domain=TDomain.FROM_ONE) -> BetaStar:
    """Infimal beta for which (phi, psi, alpha, beta) satisfies the criterion for some K.

    Membership is assumed upward closed in beta: the upper bracket grows from 8 by
    doubling (capped at 1e6, beyond which beta* is reported as inf), then bisection
    runs to width 1e-4. The returned beta is the member end of the final bracket and
    ``residual`` is its edge-slope margin. Upward closure is spot-checked between the
    returned beta and the initial member bracket.
    """
    t_domain = TDomain(t_domain)

    def member(b):
        return member_E(phi, psi, EmbeddingParams(alpha, b, t_domain), cfg)

    lo = -1.0
    first = member(lo)
    if first.member:
        return BetaStar(lo, 0, _margin(first.certificate, t_domain))

    hi = BETA_START
    it = 0
    cert = member(hi)
    while not cert.member:
        it += 1
        lo = hi
        if hi >= BETA_CAP:
            return BetaStar(math.inf, it, math.inf)
        hi = min(2.0 * hi, BETA_CAP)
        cert = member(hi)
    top = hi

    while hi - lo > BETA_TOL:
        it += 1
        mid = 0.5 * (lo + hi)
        m = member(mid)
        if m.member:
            hi, cert = mid, m
        else:
            lo = mid

    for frac in (0.25, 0.5, 0.75):
        b = hi + frac * (top - hi)
        if not member(b).member:
            raise MonotonicityError(
                f"membership not upward closed: beta={hi!r} is a member but {b!r} is not",
                member_beta=hi, nonmember_beta=b)
    return BetaStar(hi, it, _margin(cert.certificate, t_domain))


@dataclass(frozen=True)
class BoundarySample:
    alpha: float
    beta_star: float
    iterations: int
    residual: float
    error: str | None = None

    @property
    def ok(self):
        return self.error is None


@dataclass(frozen=True)
class BoundaryCurve:
    samples: tuple
    phi: FunctionSpec
    psi: FunctionSpec
    t_domain: TDomain
    violations: tuple = ()

    @property
    def valid(self):
        return [s for s in self.samples if s.ok]

    @property
    def failures(self):
        return [s for s in self.samples if not s.ok]

    @property
    def passed(self):
        return not self.violations and not self.failures

    def to_csv(self):
        rows = ["alpha,beta_star,iterations,residual"]
        for s in self.samples:
            rows.append(",".join([fmt(s.alpha), fmt(s.beta_star if s.ok else math.nan),
                                  str(s.iterations), fmt(s.residual if s.ok else math.nan)]))
        return "\n".join(rows) + "\n"

    def to_text(self):
        lines = [f"phi = {format_spec(self.phi)}", f"psi = {format_spec(self.psi)}",
                 f"t_domain = {self.t_domain.value}", f"samples = {len(self.samples)}",
                 f"failed = {len(self.failures)}"]
        lines += [f"failure[{i}] = alpha {fmt(s.alpha)}: {s.error}"
                  for i, s in enumerate(self.samples) if not s.ok]
        lines += [f"violation = {v}" for v in self.violations]
        lines.append(f"passed = {fmt(self.passed)}")
        return "\n".join(lines) + "\n"


def curve_violations(samples, convex_tol=1e-3):
    """Monotonicity and discrete-convexity violations among finite samples, by index."""
    out = []
    idx = [i for i, s in enumerate(samples) if s.ok and math.isfinite(s.beta_star)]
    for i, j in zip(idx, idx[1:]):
        if samples[j].beta_star < samples[i].beta_star - BETA_TOL:
            out.append(f"decrease at samples {i},{j}")
    for i in range(1, len(samples) - 1):
        trip = samples[i - 1:i + 2]
        if all(s.ok and math.isfinite(s.beta_star) for s in trip):
            d2 = trip[0].beta_star - 2.0 * trip[1].beta_star + trip[2].beta_star
            if d2 < -convex_tol:
                out.append(f"concavity at samples {i - 1},{i},{i + 1} (second difference {fmt(d2)})")
    # infinite values may only trail finite ones
    seen_inf = False
    for i, s in enumerate(samples):
        if s.ok and math.isinf(s.beta_star):
            seen_inf = True
        elif s.ok and seen_inf:
            out.append(f"finite sample {i} after an infinite one")
    return tuple(out)


def boundary_sweep(phi, psi, alpha_min: float, alpha_max: float, n: int,
                   cfg: GridConfig = DEFAULT_GRID, t_domain=TDomain.FROM_ONE,
                   workers: int = 1) -> BoundaryCurve:
    """beta* at ``n`` uniform alphas; failures are recorded per sample, not raised."""
    if not -1.0 <= alpha_min < alpha_max:
        raise ValueError("need -1 <= alpha_min < alpha_max")
    if n < 3:
        raise ValueError("need at least 3 samples")
    t_domain = TDomain(t_domain)
    alphas = [float(a) for a in np.linspace(alpha_min, alpha_max, n)]

    def one(a):
        try:
            b = beta_star(phi, psi, a, cfg, t_domain)
            return BoundarySample(a, b.beta, b.iterations, b.residual)
        except (ArithmeticError, ValueError) as exc:
            return BoundarySample(a, math.nan, 0, math.nan, error=f"{type(exc).__name__}: {exc}")

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            samples = tuple(pool.map(one, alphas))
    else:
        samples = tuple(one(a) for a in alphas)
    return BoundaryCurve(samples, phi, psi, t_domain, curve_violations(samples))


# -- convexity of the criterion sets ---------------------------------------------------

@dataclass(frozen=True)
class ThetaE:
    theta: float
    alpha: float
    beta: float
    K: float
    C: float
    bound: float
    member: bool

    @property
    def passed(self):
        return self.member and (math.isnan(self.bound) or self.C <= self.bound * (1 + REL_SLACK))


@dataclass(frozen=True)
class ConvexityReport:
    phi: FunctionSpec
    psi: FunctionSpec
    t_domain: TDomain
    C1: float                    # log-convexity constant of Phi^-1
    C2: float                    # log-concavity constant of Psi^-1
    endpoints: tuple             # (MemberE, MemberE)
    checks: tuple

    @property
    def hypothesis_met(self):
        return math.isfinite(self.C1) and math.isfinite(self.C2)

    @property
    def endpoints_ok(self):
        return all(e.member for e in self.endpoints)

    @property
    def passed(self):
        return self.hypothesis_met and self.endpoints_ok and all(c.passed for c in self.checks)

    def to_text(self):
        rows = [("phi", format_spec(self.phi)), ("psi", format_spec(self.psi)),
                ("t_domain", self.t_domain.value),
                ("phi_inv_dlog_minus_C", fmt(self.C1)), ("psi_inv_dlog_plus_C", fmt(self.C2)),
                ("hypothesis", "met" if self.hypothesis_met else "not-met")]
        for i, e in enumerate(self.endpoints):
            rows += [(f"pair{i}_member", fmt(e.member)), (f"pair{i}_C", fmt(e.C)),
                     (f"pair{i}_K", fmt(e.K))]
        for c in self.checks:
            tag = f"theta[{fmt(c.theta)}]"
            rows += [(f"{tag}.alpha", fmt(c.alpha)), (f"{tag}.beta", fmt(c.beta)),
                     (f"{tag}.K", fmt(c.K)), (f"{tag}.C", fmt(c.C)),
                     (f"{tag}.bound", fmt(c.bound)), (f"{tag}.member", fmt(c.member)),
                     (f"{tag}.passed", fmt(c.passed))]
        rows.append(("passed", fmt(self.passed)))
        return "".join(f"{k} = {v}\n" for k, v in rows)


def _pmap(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return tuple(pool.map(fn, items))
    return tuple(fn(i) for i in items)


def verify_E_convexity(phi, psi, pair0, pair1, thetas, cfg: GridConfig = DEFAULT_GRID,
                       t_domain=TDomain.ALL_POSITIVE, workers: int = 1) -> ConvexityReport:
    """Check that the criterion set is convex along the segment between two member pairs.

    With endpoint certificates (M_i, K_i), C1 the log-convexity constant of Phi^-1 and
    C2 the log-concavity constant of Psi^-1, the point at theta must satisfy the
    criterion with ``K = C2^(th(1-th)) K0^(1-th) K1^th`` and constant at most
    ``M0^(1-th) M1^th C1^(th(1-th))``. When C1 or C2 is infinite the hypothesis is
    reported as not met and membership at theta is tested by the K search instead.
    """
    t_domain = TDomain(t_domain)
    C1 = dlog_constants(InverseView(phi), cfg).C_minus
    C2 = dlog_constants(InverseView(psi), cfg).C_plus
    e0 = member_E(phi, psi, EmbeddingParams(*pair0, t_domain), cfg)
    e1 = member_E(phi, psi, EmbeddingParams(*pair1, t_domain), cfg)
    hyp = math.isfinite(C1) and math.isfinite(C2)

    def one(theta):
        w0, w1 = 1.0 - theta, theta
        p = EmbeddingParams(w0 * pair0[0] + w1 * pair1[0],
                            w0 * pair0[1] + w1 * pair1[1], t_domain)
        if hyp and e0.member and e1.member:
            k = C2 ** (theta * w0) * e0.K ** w0 * e1.K ** w1
            bound = e0.C ** w0 * e1.C ** w1 * C1 ** (theta * w0)
            res = cmin(phi, psi, p, cfg, K=k)
            return ThetaE(theta, p.alpha, p.beta, k, res.value, bound, res.finite)
        m = member_E(phi, psi, p, cfg)
        return ThetaE(theta, p.alpha, p.beta, m.K, m.C, math.nan, m.member)

    checks = _pmap(one, [float(t) for t in thetas], workers)
    return ConvexityReport(phi, psi, t_domain, C1, C2, (e0, e1), checks)


@dataclass(frozen=True)
class ThetaF:
    theta: float
    phi: FunctionSpec
    psi: FunctionSpec
    result: CminResult
    bound: float

    @property
    def passed(self):
        return self.result.finite and self.result.value <= self.bound * (1 + REL_SLACK)


@dataclass(frozen=True)
class LogConvexityReport:
    pairs: tuple
    params: EmbeddingParams
    endpoints: tuple             # (CminResult, CminResult)
    checks: tuple

    @property
    def endpoints_ok(self):
        return all(e.finite for e in self.endpoints)

    @property
    def passed(self):
        return self.endpoints_ok and all(c.passed for c in self.checks)

    def to_text(self):
        rows = [("alpha", fmt(self.params.alpha)), ("beta", fmt(self.params.beta)),
                ("t_domain", self.params.t_domain.value)]
        for i, ((phi, psi), e) in enumerate(zip(self.pairs, self.endpoints)):
            rows += [(f"pair{i}", f"{format_spec(phi)} {format_spec(psi)}"),
                     (f"pair{i}_cmin", fmt(e.value)), (f"pair{i}_member", fmt(e.finite))]
        for c in self.checks:
            tag = f"theta[{fmt(c.theta)}]"
            rows += [(f"{tag}.cmin", fmt(c.result.value)), (f"{tag}.bound", fmt(c.bound)),
                     (f"{tag}.member", fmt(c.result.finite)), (f"{tag}.passed", fmt(c.passed))]
        rows.append(("passed", fmt(self.passed)))
        return "".join(f"{k} = {v}\n" for k, v in rows)


def verify_F_logconvexity(phi0, psi0, phi1, psi1, params: EmbeddingParams, thetas,
                          cfg: GridConfig = DEFAULT_GRID, workers: int = 1) -> LogConvexityReport:
    """Check membership and the multiplicative C_min bound along inverse geodesics."""
    r0 = cmin(phi0, psi0, params, cfg)
    r1 = cmin(phi1, psi1, params, cfg)

    def one(theta):
        ph, ps = InvGeo(phi0, phi1, theta), InvGeo(psi0, psi1, theta)
        res = cmin(ph, ps, params, cfg)
        bound = r0.value ** (1.0 - theta) * r1.value ** theta
        return ThetaF(theta, ph, ps, res, bound)

    checks = _pmap(one, [float(t) for t in thetas], workers) if r0.finite and r1.finite else ()
    return LogConvexityReport(((phi0, psi0), (phi1, psi1)), params, (r0, r1), checks)


__all__ = [
    "K_GRID", "TDomain", "EvaluationError", "MonotonicityError", "EmbeddingParams",
    "CminResult", "cmin", "member_F", "MemberE", "member_E", "BetaStar", "beta_star",
    "BoundarySample", "BoundaryCurve", "curve_violations", "boundary_sweep",
    "ThetaE", "ConvexityReport", "verify_E_convexity", "ThetaF", "LogConvexityReport",
    "verify_F_logconvexity",
]
