"""Shared numeric kernels: monotone inversion, extremum refinement, edge slopes."""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize, special

EPS = np.finfo(float).eps
LN10 = math.log(10.0)
EXPAND_MAX = 1100     # doublings from 1 cover the whole float range


class InversionError(ArithmeticError):
    """Numeric inversion of a monotone map failed to bracket or converge."""

    def __init__(self, message, bracket=None, residual=None):
        super().__init__(message)
        self.bracket = bracket
        self.residual = residual


# -- elementary log-space functions -------------------------------------------------

def softplus(x):
    """log(1 + e^x) without overflow."""
    return np.logaddexp(0.0, x)


def log_softplus(x):
    """log(log(1 + e^x)), accurate for very negative x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        tail = x - 0.5 * np.exp(np.minimum(x, -30.0))
        body = np.log(softplus(np.maximum(x, -30.0)))
    return np.where(x < -30.0, tail, body)


def expit_over_softplus(x):
    """e^x / ((1 + e^x) log(1 + e^x)), i.e. t/((1+t) log(1+t)) at t = e^x."""
    x = np.asarray(x, dtype=float)
    log_expit = -softplus(-x)
    return np.exp(log_expit - log_softplus(x))


def exprel(x):
    return special.exprel(x)


# -- inversion ----------------------------------------------------------------------

def invert_monotone(f, y, lo_bound=-np.inf, hi_bound=np.inf, guess=0.0,
                    rel_tol=1e-10, max_iter=200, df=None):
    """Solve f(x) = y for an increasing vectorised ``f``.

    Brackets are grown geometrically (factor 2, first step ``max(1, |guess|/2)``) from
    ``guess`` until the target is straddled, then bisected until the width is below
    ``rel_tol * (1 + |x|)``; a final secant step inside the bracket removes the
    residual bisection error. When the derivative ``df`` is supplied, Newton steps
    replace bisection wherever they stay inside the bracket, and iteration stops once
    a step is below the same tolerance. Infinite targets map to the matching bound.
    """
    y = np.asarray(y, dtype=float)
    shape = y.shape
    y = y.ravel().copy()
    out = np.empty_like(y)

    pos_inf = y == np.inf
    neg_inf = y == -np.inf
    out[pos_inf] = hi_bound
    out[neg_inf] = lo_bound
    if np.isnan(y).any():
        raise InversionError("cannot invert NaN target")
    work = ~(pos_inf | neg_inf)
    if not work.any():
        return out.reshape(shape)
    yt = y[work]

    x0 = np.clip(np.broadcast_to(np.asarray(guess, dtype=float), shape).ravel()[work],
                 lo_bound, hi_bound)
    lo = x0.copy()
    hi = x0.copy()
    with np.errstate(all="ignore"):
        flo = f(lo)
        fhi = flo.copy()

        step = np.maximum(1.0, 0.5 * np.abs(x0))
        need = flo > yt
        for _ in range(EXPAND_MAX):
            if not need.any():
                break
            at_bound = lo[need] <= lo_bound
            if at_bound.any():
                idx = np.flatnonzero(need)[at_bound][0]
                raise InversionError(
                    f"target {yt[idx]!r} below the reachable range",
                    bracket=(lo[idx], hi[idx]), residual=flo[idx] - yt[idx])
            hi[need] = lo[need]
            fhi[need] = flo[need]
            lo[need] = np.maximum(lo[need] - step[need], lo_bound)
            step[need] *= 2.0
            flo[need] = f(lo[need])
            need = flo > yt
        else:
            if need.any():
                raise InversionError("bracket expansion (down) did not converge")

        step = np.maximum(1.0, 0.5 * np.abs(x0))
        need = fhi < yt
        for _ in range(EXPAND_MAX):
            if not need.any():
                break
            at_bound = hi[need] >= hi_bound
            if at_bound.any():
                idx = np.flatnonzero(need)[at_bound][0]
                raise InversionError(
                    f"target {yt[idx]!r} above the reachable range",
                    bracket=(lo[idx], hi[idx]), residual=fhi[idx] - yt[idx])
            lo[need] = hi[need]
            flo[need] = fhi[need]
            hi[need] = np.minimum(hi[need] + step[need], hi_bound)
            step[need] *= 2.0
            fhi[need] = f(hi[need])
            need = fhi < yt
        else:
            if need.any():
                raise InversionError("bracket expansion (up) did not converge")

        if df is not None:
            x = _newton_polish(f, df, yt, lo, hi, flo, fhi, rel_tol, max_iter)
            out[work] = x
            return out.reshape(shape)

        active = (hi - lo) > rel_tol * (1.0 + np.abs(lo) + np.abs(hi))
        for _ in range(max_iter):
            if not active.any():
                break
            mid = 0.5 * (lo[active] + hi[active])
            fm = f(mid)
            if np.isnan(fm).any():
                raise InversionError("function returned NaN inside bracket")
            up = fm < yt[active]
            idx = np.flatnonzero(active)
            lo[idx[up]] = mid[up]
            flo[idx[up]] = fm[up]
            hi[idx[~up]] = mid[~up]
            fhi[idx[~up]] = fm[~up]
            active = (hi - lo) > rel_tol * (1.0 + np.abs(lo) + np.abs(hi))
        else:
            if active.any():
                i = np.flatnonzero(active)[0]
                raise InversionError(
                    "bisection did not reach tolerance",
                    bracket=(lo[i], hi[i]), residual=fhi[i] - flo[i])

        span = fhi - flo
        frac = np.where(span > 0, (yt - flo) / np.where(span > 0, span, 1.0), 0.5)
        x = lo + np.clip(frac, 0.0, 1.0) * (hi - lo)
        x = np.where(np.isfinite(x), x, 0.5 * (lo + hi))
    out[work] = x
    return out.reshape(shape)


def _newton_polish(f, df, yt, lo, hi, flo, fhi, rel_tol, max_iter):
    """Safeguarded Newton inside established brackets (modified in place)."""
    x = 0.5 * (lo + hi)
    active = (hi - lo) > rel_tol * (1.0 + np.abs(lo) + np.abs(hi))
    for _ in range(max_iter):
        if not active.any():
            return x
        idx = np.flatnonzero(active)
        xa = x[idx]
        fa = f(xa)
        if np.isnan(fa).any():
            raise InversionError("function returned NaN inside bracket")
        ya = yt[idx]
        up = fa < ya
        lo[idx[up]] = xa[up]
        flo[idx[up]] = fa[up]
        hi[idx[~up]] = xa[~up]
        fhi[idx[~up]] = fa[~up]
        newton = xa - (fa - ya) / df(xa)
        inside = np.isfinite(newton) & (newton >= lo[idx]) & (newton <= hi[idx])
        xn = np.where(inside, newton, 0.5 * (lo[idx] + hi[idx]))
        x[idx] = xn
        tiny = inside & (np.abs(xn - xa) <= rel_tol * (1.0 + np.abs(xa)))
        narrow = (hi[idx] - lo[idx]) <= rel_tol * (1.0 + np.abs(lo[idx]) + np.abs(hi[idx]))
        active[idx] = ~(tiny | narrow | (fa == ya))
        x[idx[fa == ya]] = xa[fa == ya]
    if active.any():
        i = int(np.flatnonzero(active)[0])
        raise InversionError("Newton iteration did not reach tolerance",
                             bracket=(lo[i], hi[i]), residual=fhi[i] - flo[i])
    return x


# -- grid utilities -----------------------------------------------------------------

def refine_extremum(func, x, values, maximize=True):
    """Grid argmax/argmin refined by bounded golden-section search in the adjacent cells.

    Returns ``(location, value)``. The refined value never falls behind the grid value.
    """
    values = np.asarray(values, dtype=float)
    i = int(np.argmax(values) if maximize else np.argmin(values))
    best_x, best_v = float(x[i]), float(values[i])
    if 0 < i < len(x) - 1:
        sign = -1.0 if maximize else 1.0

        def objective(s):
            return sign * float(func(np.array([s]))[0])

        res = optimize.minimize_scalar(objective, bounds=(float(x[i - 1]), float(x[i + 1])),
                                       method="bounded", options={"xatol": 1e-12})
        v = sign * res.fun
        if np.isfinite(v) and ((v > best_v) if maximize else (v < best_v)):
            best_x, best_v = float(res.x), float(v)
    return best_x, best_v


def edge_slope(x, values, side, width=LN10, min_points=3):
    """Least-squares slope of ``values`` against ``x`` over the outermost ``width`` of the grid."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    if side == "right":
        mask = x >= x[-1] - width
        if mask.sum() < min_points:
            mask = np.zeros_like(mask)
            mask[-min_points:] = True
    else:
        mask = x <= x[0] + width
        if mask.sum() < min_points:
            mask = np.zeros_like(mask)
            mask[:min_points] = True
    xs, vs = x[mask], v[mask]
    xc = xs - xs.mean()
    denom = float(np.dot(xc, xc))
    if denom == 0.0:
        return 0.0
    return float(np.dot(xc, vs - vs.mean()) / denom)


def worst_decrease(x, values, slope_tol):
    """Largest adjacent-sample decrease beyond ``slope_tol * dx``; ``(amount, index)``.

    A nonpositive amount means the sampled sequence is nondecreasing within tolerance.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(values, dtype=float)
    excess = -(np.diff(v)) - slope_tol * np.diff(x)
    if excess.size == 0:
        return 0.0, -1
    i = int(np.argmax(excess))
    return float(excess[i]), i


def fmt(value):
    """Render a number at 9 significant digits; +inf as ``inf``."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return "nan"
    return format(float(value), "#.9g")
