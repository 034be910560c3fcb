"""Luxembourg norms on the weighted unit disk and a finite-family embedding witness.

The measure is ``dnu_a = (a+1)/pi (1-|z|^2)^a dA``, a probability measure for a > -1.
Test functions ``f(z) = k (1-z)^(-c)`` are singular only at z = 1, so the quadrature
works in polar coordinates centred there:

    z = 1 - rho e^(i phi),  |phi| < pi/2,  0 < rho < 2 cos(phi).

With ``rho = 2 cos(phi) v`` the disk becomes the square ``(v, phi) in (0,1) x (0, pi/2)``
(doubled by symmetry), and ``1 - |z|^2 = 4 cos^2(phi) v (1-v)``. Both coordinates use
Gauss-Legendre nodes under power gradings: ``v = u^m / 2`` and ``1 - v = u^m / 2`` on
the two radial halves, and ``phi = pi/2 (1 - (1-w)^m)``, which clusters nodes at the
singular point and along the boundary arc. Every quantity is carried as a logarithm until the final sum.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize

from ._numerics import fmt
from .growth import DEFAULT_GRID, FunctionSpec, GridConfig, format_spec, make_view

LAMBDA_CAP = 1e30
DIVERGENCE_TOL = 1e-2


class QuadratureOverflow(ArithmeticError):
    """The integrand overflowed at a quadrature node even in log space."""

    def __init__(self, message, node):
        super().__init__(message)
        self.node = node


@dataclass(frozen=True)
class TestFunction:
    c: float = 0.0
    k: float = 1.0

    __test__ = False    # not a pytest class

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c >= 0):
            raise ValueError("singularity strength c must be >= 0")
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError("scale k must be positive")

    def abs_at(self, z):
        """|f(z)| at points of the open disk."""
        return self.k * np.abs(1.0 - np.asarray(z, dtype=complex)) ** (-self.c)


@dataclass(frozen=True)
class QuadConfig:
    n_radial: int = 512
    n_angular: int = 512
    lux_tol: float = 1e-8
    lux_max_iter: int = 200
    grading: int = 12

    def __post_init__(self):
        if self.n_radial < 8 or self.n_angular < 8:
            raise ValueError("node counts must be at least 8")
        if not (self.lux_tol > 0 and self.lux_max_iter > 0 and self.grading >= 1):
            raise ValueError("tolerances, iteration cap and grading must be positive")

    def doubled(self):
        return QuadConfig(2 * self.n_radial, 2 * self.n_angular, self.lux_tol,
                          self.lux_max_iter, self.grading)

    def halved(self):
        return QuadConfig(max(8, self.n_radial // 2), max(8, self.n_angular // 2),
                          self.lux_tol, self.lux_max_iter, self.grading)


@dataclass(frozen=True)
class _Rule:
    log_rho: np.ndarray      # log |1 - z| per node, flattened
    log_w: np.ndarray        # log of the nu_a weight per node
    v: np.ndarray
    phi: np.ndarray


def _graded(n, m):
    u, w = np.polynomial.legendre.leggauss(n)
    u, w = 0.5 * (u + 1.0), 0.5 * w
    return u, w, m


@lru_cache(maxsize=32)
def _rule(n_radial, n_angular, grading, alpha) -> _Rule:
    m = float(grading)
    # v in (0, 1/2] graded towards the singular point, v in [1/2, 1) towards the
    # boundary arc, where (1 - v)^alpha is singular for fractional alpha
    n_in = n_radial // 2
    u, wu, _ = _graded(n_in, m)
    log_half = m * np.log(u) - math.log(2.0)
    log_jh = math.log(0.5 * m) + (m - 1.0) * np.log(u) + np.log(wu)
    u2, wu2, _ = _graded(n_radial - n_in, m)
    log_half2 = m * np.log(u2) - math.log(2.0)
    log_v = np.concatenate([log_half, np.log1p(-np.exp(log_half2))[::-1]])
    log_1mv = np.concatenate([np.log1p(-np.exp(log_half)), log_half2[::-1]])
    log_jv = np.concatenate([log_jh, (math.log(0.5 * m) + (m - 1.0) * np.log(u2)
                                      + np.log(wu2))[::-1]])

    w, ww, _ = _graded(n_angular, m)
    s = (1.0 - w) ** m
    phi = 0.5 * np.pi * (1.0 - s)
    log_cos = np.log(np.sin(0.5 * np.pi * s))
    log_jp = math.log(0.5 * np.pi * m) + (m - 1.0) * np.log1p(-w) + np.log(ww)

    LV, LC = log_v[:, None], log_cos[None, :]
    log_rho = math.log(2.0) + LC + LV
    log_w = (math.log((alpha + 1.0) / np.pi)
             + alpha * (math.log(4.0) + 2.0 * LC + LV + log_1mv[:, None])
             + 2.0 * (math.log(2.0) + LC) + LV          # rho d rho = (2 cos)^2 v dv
             + log_jv[:, None] + log_jp[None, :] + math.log(2.0))
    return _Rule(log_rho.ravel(), log_w.ravel(),
                 np.repeat(np.exp(log_v), n_angular), np.tile(phi, n_radial))


def pairwise_sum(values):
    """Sum along a fixed balanced binary tree (zero-padded to a power of two)."""
    a = np.asarray(values, dtype=float).ravel()
    if a.size == 0:
        return 0.0
    n = 1 << (a.size - 1).bit_length()
    a = np.concatenate([a, np.zeros(n - a.size)])
    while a.size > 1:
        a = a[0::2] + a[1::2]
    return float(a[0])


def _check_alpha(alpha):
    if not (math.isfinite(alpha) and alpha > -1.0):
        raise ValueError(f"alpha must be > -1, got {alpha!r}")


def _node(rule, i):
    v, phi = float(rule.v[i]), float(rule.phi[i])
    rho = 2.0 * math.cos(phi) * v
    return complex(1.0 - rho * math.cos(phi), -rho * math.sin(phi))


def _terms(view, f, rule, log_lambda, workers):
    arg = math.log(f.k) - f.c * rule.log_rho - log_lambda

    def part(sl):
        with np.errstate(over="ignore"):
            return np.exp(view.f(arg[sl]) + rule.log_w[sl])

    if workers > 1:
        bounds = np.linspace(0, arg.size, workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(part, [slice(a, b) for a, b in zip(bounds, bounds[1:])]))
        return np.concatenate(chunks)
    return part(slice(None))


def weighted_integral(f: TestFunction, phi: FunctionSpec, alpha: float, lam: float,
                      quad: QuadConfig = QuadConfig(), cfg: GridConfig = DEFAULT_GRID,
                      workers: int = 1) -> float:
    """Quadrature value of the modular ``int Phi(|f|/lam) dnu_alpha``.

    Raises QuadratureOverflow, naming the offending node, if a term is not finite.
    """
    _check_alpha(alpha)
    if not lam > 0:
        raise ValueError("lambda must be positive")
    view = make_view(phi, cfg)
    rule = _rule(quad.n_radial, quad.n_angular, quad.grading, float(alpha))
    terms = _terms(view, f, rule, math.log(lam), workers)
    bad = ~np.isfinite(terms)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        z = _node(rule, i)
        raise QuadratureOverflow(f"integrand overflow at node z = {z!r}", node=z)
    total = pairwise_sum(terms)
    if not math.isfinite(total):
        raise QuadratureOverflow("sum of quadrature terms overflowed", node=None)
    return total


@dataclass(frozen=True)
class RefinementStudy:
    """Modular values under successive doubling of both node counts."""

    nodes: tuple
    values: tuple

    @property
    def relative_changes(self):
        v = self.values
        return tuple(abs(b - a) / abs(b) if math.isfinite(b) and b else math.inf
                     for a, b in zip(v, v[1:]))

    @property
    def converged(self):
        ch = self.relative_changes
        return bool(ch) and ch[-1] < DIVERGENCE_TOL


def refinement_study(f, phi, alpha, lam, quad: QuadConfig = QuadConfig(), levels=4,
                     cfg: GridConfig = DEFAULT_GRID) -> RefinementStudy:
    nodes, values = [], []
    q = quad
    for _ in range(levels):
        try:
            val = weighted_integral(f, phi, alpha, lam, q, cfg)
        except QuadratureOverflow:
            val = math.inf
        nodes.append((q.n_radial, q.n_angular))
        values.append(val)
        q = q.doubled()
    return RefinementStudy(tuple(nodes), tuple(values))


@dataclass(frozen=True)
class LuxResult:
    lam: float
    integral_at_lambda: float
    converged: bool
    divergent: bool = False
    iterations: int = 0

    def to_text(self):
        return (f"lux_norm = {fmt(self.lam)}\n"
                f"residual = {fmt(self.integral_at_lambda)}\n"
                f"converged = {fmt(self.converged)}\n"
                f"divergent = {fmt(self.divergent)}\n")


def _modular(view, f, rule, log_lambda, workers):
    terms = _terms(view, f, rule, log_lambda, workers)
    if not np.isfinite(terms).all():
        return math.inf
    return pairwise_sum(terms)


def lux_norm(f: TestFunction, phi: FunctionSpec, alpha: float,
             quad: QuadConfig = QuadConfig(), cfg: GridConfig = DEFAULT_GRID,
             workers: int = 1) -> LuxResult:
    """Luxembourg quasi-norm ``inf{lam > 0 : int Phi(|f|/lam) dnu_alpha <= 1}``.

    The bracket in log lam grows geometrically from log k until the modular crosses 1
    (giving up above lam = 1e30), then Brent's method locates the crossing. The
    modular is recomputed with half the nodes at the solution: a relative change above
    1e-2 means the modular is not resolved (the function is not in the space) and the
    norm is reported as inf.
    """
    _check_alpha(alpha)
    view = make_view(phi, cfg)
    rule = _rule(quad.n_radial, quad.n_angular, quad.grading, float(alpha))

    def h(s):
        return _modular(view, f, rule, s, workers) - 1.0

    cap = math.log(LAMBDA_CAP)
    start = math.log(f.k)
    lo = hi = start
    h_lo = h_hi = h(start)
    step = 1.0
    it = 0
    while h_hi > 0:
        it += 1
        lo, h_lo = hi, h_hi
        if hi >= cap or it > quad.lux_max_iter:
            return LuxResult(math.inf, math.nan, False, True, it)
        hi = min(hi + step, cap)
        step *= 2.0
        h_hi = h(hi)
    while h_lo <= 0:
        it += 1
        hi, h_hi = lo, h_lo
        if it > quad.lux_max_iter:
            return LuxResult(math.nan, math.nan, False, False, it)
        lo -= step
        step *= 2.0
        h_lo = h(lo)
    if h_hi == 0:
        s = hi
    else:
        s, info = optimize.brentq(h, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                                  maxiter=quad.lux_max_iter, full_output=True, disp=False)
        it += info.iterations
    residual = h(s)
    half = quad.halved()
    coarse = _modular(view, f, _rule(half.n_radial, half.n_angular, half.grading, float(alpha)),
                      s, workers)
    if not math.isfinite(coarse) or abs(coarse - (residual + 1.0)) > DIVERGENCE_TOL:
        return LuxResult(math.inf, residual, False, True, it)
    return LuxResult(math.exp(s), residual, abs(residual) <= 10 * quad.lux_tol, False, it)


@dataclass(frozen=True)
class WitnessRow:
    c: float
    k: float
    src: LuxResult
    dst: LuxResult

    @property
    def included(self):
        return math.isfinite(self.src.lam)

    @property
    def ratio(self):
        if not self.included:
            return math.nan
        return self.dst.lam / self.src.lam


@dataclass(frozen=True)
class WitnessReport:
    phi: FunctionSpec
    psi: FunctionSpec
    alpha: float
    beta: float
    rows: tuple
    quad: QuadConfig = field(default_factory=QuadConfig)

    @property
    def included(self):
        return [r for r in self.rows if r.included]

    @property
    def excluded(self):
        return [r for r in self.rows if not r.included]

    @property
    def max_ratio(self):
        vals = [r.ratio for r in self.included]
        return max(vals) if vals else math.nan

    @property
    def bounded(self):
        return bool(self.included) and math.isfinite(self.max_ratio)

    def to_csv(self):
        lines = ["c,k,src_norm,dst_norm,ratio"]
        for r in self.rows:
            ratio = r.ratio if r.included else math.inf
            lines.append(",".join(fmt(v) for v in (r.c, r.k, r.src.lam, r.dst.lam, ratio)))
        return "\n".join(lines) + "\n"

    def to_text(self):
        lines = [f"phi = {format_spec(self.phi)}", f"psi = {format_spec(self.psi)}",
                 f"alpha = {fmt(self.alpha)}", f"beta = {fmt(self.beta)}",
                 f"nodes = {self.quad.n_radial}x{self.quad.n_angular}",
                 f"members = {len(self.rows)}", f"excluded = {len(self.excluded)}"]
        lines += [f"excluded_c = {fmt(r.c)}" for r in self.excluded]
        lines += [f"max_ratio = {fmt(self.max_ratio)}", f"bounded = {fmt(self.bounded)}",
                  "note = finite-family evidence of boundedness, not a proof"]
        return "\n".join(lines) + "\n"


def witness_embedding(phi: FunctionSpec, psi: FunctionSpec, alpha: float, beta: float,
                      family, quad: QuadConfig = QuadConfig(), cfg: GridConfig = DEFAULT_GRID,
                      workers: int = 1) -> WitnessReport:
    """Norm ratios ``|f|_(psi,beta) / |f|_(phi,alpha)`` over a test family.

    Members whose source norm is infinite are kept in the rows but excluded from the
    maximum. Rows follow the family order regardless of ``workers``.
    """
    _check_alpha(alpha)
    _check_alpha(beta)
    family = list(family)

    def one(f):
        src = lux_norm(f, phi, alpha, quad, cfg)
        dst = lux_norm(f, psi, beta, quad, cfg)
        return WitnessRow(f.c, f.k, src, dst)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = tuple(pool.map(one, family))
    else:
        rows = tuple(one(f) for f in family)
    return WitnessReport(phi, psi, alpha, beta, rows, quad)


__all__ = [
    "TestFunction", "QuadConfig", "QuadratureOverflow", "pairwise_sum", "weighted_integral",
    "RefinementStudy", "refinement_study", "LuxResult", "lux_norm", "WitnessRow",
    "WitnessReport", "witness_embedding",
]
