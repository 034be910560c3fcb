"""Class membership estimates for growth functions.

Everything here is a grid estimate over ``t in [e^x_min, e^x_max]``: elasticity
indices, upper/lower type exponents with their constants, and the constants of
log-convexity (``dlog_minus``) and log-concavity (``dlog_plus``) up to a factor.

Inverse views are sampled on the image of the inner function's grid, so that a
function and its inverse are always probed over the same set of underlying
``(t, Phi(t))`` pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import EPS, LN10, edge_slope, fmt, refine_extremum
from .growth import DEFAULT_GRID, FunctionSpec, GridConfig, InverseView, format_spec, make_view

THETAS = tuple(k / 10 for k in range(1, 10))
N_PAIR = 64
N_SCALE = 64


@dataclass(frozen=True)
class SampleGrid:
    x: np.ndarray          # coordinates of the view itself
    base: np.ndarray       # uniform parameter the grid was generated from
    clipped: bool


def sample_grid(spec: FunctionSpec, cfg: GridConfig = DEFAULT_GRID) -> SampleGrid:
    if isinstance(spec, InverseView):
        if isinstance(spec.inner, InverseView):
            return sample_grid(spec.inner.inner, cfg)
        inner = sample_grid(spec.inner, cfg)
        y = make_view(spec.inner, cfg).f(inner.x)
        return SampleGrid(np.asarray(y, dtype=float), inner.base, inner.clipped)
    view = make_view(spec, cfg)
    x, clipped = cfg.grid(*view.domain)
    return SampleGrid(x, x, clipped)


@dataclass(frozen=True)
class IndexEstimate:
    """Grid estimate of the Matuszewska-Orlicz indices.

    ``b`` is reported as ``inf`` when the maximum sits on a grid edge and the
    elasticity is still growing outward faster than ``edge_growth_tol`` per unit of
    log t; ``a`` is reported as ``0`` in the mirror situation.
    """

    a: float
    b: float
    a_at: float
    b_at: float
    left_slope: float
    right_slope: float
    x_range: tuple
    clipped: bool

    def __iter__(self):
        yield self.a
        yield self.b


def matuszewska_indices(spec: FunctionSpec, cfg: GridConfig = DEFAULT_GRID) -> IndexEstimate:
    view = make_view(spec, cfg)
    grid = sample_grid(spec, cfg)
    x = grid.x
    d = np.asarray(view.df(x), dtype=float)
    a_at, a = refine_extremum(view.df, x, d, maximize=False)
    b_at, b = refine_extremum(view.df, x, d, maximize=True)

    logd = np.log(d)
    out_left = (logd[0] - logd[1]) / (grid.base[1] - grid.base[0])
    out_right = (logd[-1] - logd[-2]) / (grid.base[-1] - grid.base[-2])
    tol = cfg.edge_growth_tol
    imax, imin = int(np.argmax(d)), int(np.argmin(d))
    if (imax == len(x) - 1 and out_right > tol) or (imax == 0 and out_left > tol):
        b = math.inf
    if (imin == len(x) - 1 and out_right < -tol) or (imin == 0 and out_left < -tol):
        a = 0.0
    return IndexEstimate(
        a=float(a), b=float(b), a_at=a_at, b_at=b_at,
        left_slope=edge_slope(x, d, "left"), right_slope=edge_slope(x, d, "right"),
        x_range=(float(x[0]), float(x[-1])), clipped=grid.clipped,
    )


def _clean(excess, scale):
    """Zero out excesses indistinguishable from rounding in their operands."""
    return np.where(excess > 16.0 * EPS * (scale + 1.0), excess, 0.0)


def _type_constant(view, x, exponent, upward, slope_tol):
    lo, hi = x[0], x[-1]
    span = hi - lo
    sig = np.linspace(0.0, span, N_SCALE) if upward else np.linspace(-span, 0.0, N_SCALE)
    fx = view.f(x)
    best = np.full(N_SCALE, -np.inf)
    for k, s in enumerate(sig):
        shifted = x + s
        ok = (shifted <= hi) if upward else (shifted >= lo)
        if not ok.any():
            continue
        fs = view.f(shifted[ok])
        excess = fs - fx[ok] - exponent * s
        excess = _clean(excess, np.abs(fs) + np.abs(fx[ok]) + abs(exponent * s))
        best[k] = excess.max()
    valid = np.isfinite(best)
    log_c = max(0.0, float(best[valid].max()))
    # outward direction is increasing |s|
    sv, bv = np.abs(sig[valid]), best[valid]
    order = np.argsort(sv)
    if edge_slope(sv[order], bv[order], "right", width=span / 4) > slope_tol:
        return math.inf
    return math.exp(log_c)


@dataclass(frozen=True)
class TypeExponents:
    upper: tuple   # (q, C); C is nan when q is infinite
    lower: tuple   # (p, C)


def type_exponents(spec: FunctionSpec, cfg: GridConfig = DEFAULT_GRID,
                   indices: IndexEstimate | None = None) -> TypeExponents:
    """Upper and lower type exponents (q, C), (p, C).

    The candidate exponents are the index estimates; the defining inequality
    ``Phi(st) <= C s^q Phi(t)`` is then scanned over 64 scales ``s`` and the whole grid
    of ``t`` to estimate ``C``.
    """
    idx = indices or matuszewska_indices(spec, cfg)
    view = make_view(spec, cfg)
    x = sample_grid(spec, cfg).x
    if math.isinf(idx.b):
        upper = (math.inf, math.nan)
    else:
        upper = (idx.b, _type_constant(view, x, idx.b, True, cfg.slope_tol))
    lower = (idx.a, _type_constant(view, x, idx.a, False, cfg.slope_tol))
    return TypeExponents(upper, lower)


@dataclass(frozen=True)
class DlogConstants:
    C_minus: float
    C_plus: float

    def __iter__(self):
        yield self.C_minus
        yield self.C_plus


def _sup_excess(view, xs, plus):
    """Per-theta matrices of the normalised Delta_log excess, max-reduced over theta."""
    fx = view.f(xs)
    out = np.full((len(xs), len(xs)), -np.inf)
    for th in THETAS:
        m = th * xs[:, None] + (1.0 - th) * xs[None, :]
        target = th * fx[:, None] + (1.0 - th) * fx[None, :]
        # operand magnitudes bound the rounding even when m or target cancels to ~0
        mag_m = th * np.abs(xs)[:, None] + (1.0 - th) * np.abs(xs)[None, :]
        mag_t = th * np.abs(fx)[:, None] + (1.0 - th) * np.abs(fx)[None, :]
        if plus:
            gm = view.g(target)
            excess = gm - m
            scale = np.abs(gm) + mag_m + mag_t * np.abs(view.dg(target))
        else:
            fm = view.f(m)
            excess = fm - target
            scale = np.abs(fm) + mag_t + mag_m * np.abs(view.df(m))
        out = np.maximum(out, _clean(excess, scale) / (th * (1.0 - th)))
    return out


def _dlog_constant(view, grid, plus, slope_tol):
    pick = np.round(np.linspace(0, len(grid.x) - 1, N_PAIR)).astype(int)
    xs, base = grid.x[pick], grid.base[pick]
    excess = _sup_excess(view, xs, plus)
    s_full = float(excess.max())
    inner = (base >= base[0] + LN10) & (base <= base[-1] - LN10)
    if inner.sum() >= 4:
        s_inner = float(excess[np.ix_(inner, inner)].max())
        if (s_full - s_inner) / LN10 > slope_tol:
            return math.inf
    return max(1.0, math.exp(s_full))


def dlog_constants(spec: FunctionSpec, cfg: GridConfig = DEFAULT_GRID) -> DlogConstants:
    """Constants C of log-convexity (minus) and log-concavity (plus) up to a factor.

    In log coordinates the minus condition reads
    ``L(th x + (1-th) y) <= th L(x) + (1-th) L(y) + th(1-th) log C`` and the plus
    condition shifts the argument: ``L(th x + (1-th) y + th(1-th) log C) >= ...``.
    The minimal shift is read off the inverse view directly. ``inf`` is reported when
    the supremum keeps growing as the outermost decade is added to the sample box.
    """
    view = make_view(spec, cfg)
    grid = sample_grid(spec, cfg)
    return DlogConstants(
        C_minus=_dlog_constant(view, grid, False, cfg.slope_tol),
        C_plus=_dlog_constant(view, grid, True, cfg.slope_tol),
    )


def _rel_gap(u, v):
    if math.isinf(u) and math.isinf(v):
        return 0.0
    if math.isinf(u) or math.isinf(v):
        return math.inf
    return abs(u - v) / max(u, v)


@dataclass(frozen=True)
class DualityReport:
    spec: FunctionSpec
    C_minus: float
    C_plus_of_inverse: float
    C_plus: float
    C_minus_of_inverse: float
    discrepancy: float
    passed: bool
    tolerance: float = 0.05

    def to_text(self):
        rows = [
            ("spec", format_spec(self.spec)),
            ("C_minus", fmt(self.C_minus)),
            ("C_plus_of_inverse", fmt(self.C_plus_of_inverse)),
            ("C_plus", fmt(self.C_plus)),
            ("C_minus_of_inverse", fmt(self.C_minus_of_inverse)),
            ("discrepancy", fmt(self.discrepancy)),
            ("passed", fmt(self.passed)),
        ]
        return "\n".join(f"{k} = {v}" for k, v in rows) + "\n"


def duality_check(spec: FunctionSpec, cfg: GridConfig = DEFAULT_GRID, tolerance=0.05) -> DualityReport:
    """Compare the log-convexity constant of Phi with the log-concavity constant of Phi^-1.

    Both directions are checked; the report passes when each pair agrees within
    ``tolerance`` relative or both members are infinite.
    """
    own = dlog_constants(spec, cfg)
    dual = dlog_constants(InverseView(spec), cfg)
    gap = max(_rel_gap(own.C_minus, dual.C_plus), _rel_gap(own.C_plus, dual.C_minus))
    return DualityReport(spec, own.C_minus, dual.C_plus, own.C_plus, dual.C_minus,
                         gap, gap <= tolerance, tolerance)


@dataclass(frozen=True)
class ClassReport:
    spec: FunctionSpec
    a_index: float
    b_index: float
    upper_type: tuple
    lower_type: tuple
    ratio_nondecreasing: bool
    ratio_nonincreasing: bool
    dlog_minus_C: float
    dlog_plus_C: float
    grid: GridConfig = field(repr=False)
    x_range: tuple = (math.nan, math.nan)
    clipped: bool = False

    def items(self):
        g = self.grid
        return [
            ("spec", format_spec(self.spec)),
            ("a_index", fmt(self.a_index)),
            ("b_index", fmt(self.b_index)),
            ("upper_type_q", fmt(self.upper_type[0])),
            ("upper_type_C", fmt(self.upper_type[1])),
            ("lower_type_p", fmt(self.lower_type[0])),
            ("lower_type_C", fmt(self.lower_type[1])),
            ("ratio_nondecreasing", fmt(self.ratio_nondecreasing)),
            ("ratio_nonincreasing", fmt(self.ratio_nonincreasing)),
            ("dlog_minus_C", fmt(self.dlog_minus_C)),
            ("dlog_plus_C", fmt(self.dlog_plus_C)),
            ("grid_x_min", fmt(g.x_min)),
            ("grid_x_max", fmt(g.x_max)),
            ("grid_n_points", fmt(g.n_points)),
            ("grid_slope_tol", fmt(g.slope_tol)),
            ("sampled_x_min", fmt(self.x_range[0])),
            ("sampled_x_max", fmt(self.x_range[1])),
            ("clipped", fmt(self.clipped)),
        ]

    def to_text(self):
        return "".join(f"{k} = {v}\n" for k, v in self.items())


class AnalysisError(RuntimeError):
    """A sub-analysis of :func:`classify` failed; ``stage`` names it."""

    def __init__(self, stage, spec, cause):
        super().__init__(f"{stage} failed for {format_spec(spec)}: {cause}")
        self.stage = stage


def _stage(name, spec, fn):
    try:
        return fn()
    except (ArithmeticError, ValueError) as exc:
        raise AnalysisError(name, spec, exc) from exc


def classify(spec: FunctionSpec, cfg: GridConfig = DEFAULT_GRID) -> ClassReport:
    idx = _stage("matuszewska_indices", spec, lambda: matuszewska_indices(spec, cfg))
    types = _stage("type_exponents", spec, lambda: type_exponents(spec, cfg, indices=idx))
    dlog = _stage("dlog_constants", spec, lambda: dlog_constants(spec, cfg))
    return ClassReport(
        spec=spec,
        a_index=idx.a,
        b_index=idx.b,
        upper_type=types.upper,
        lower_type=types.lower,
        ratio_nondecreasing=idx.a >= 1.0 - cfg.slope_tol,
        ratio_nonincreasing=idx.b <= 1.0 + cfg.slope_tol,
        dlog_minus_C=dlog.C_minus,
        dlog_plus_C=dlog.C_plus,
        grid=cfg,
        x_range=idx.x_range,
        clipped=idx.clipped,
    )
