"""Growth functions in logarithmic coordinates.

A growth function Phi is handled through its log-log view

    L(x) = log Phi(e^x),    L^{-1}(y) = log Phi^{-1}(e^y),

together with the elasticity L'(x) = t Phi'(t) / Phi(t) at t = e^x. Working in these
coordinates keeps every catalog family representable far past the point where Phi
itself overflows.

Functions are described declaratively by a small tree of spec objects, written in a
one-line grammar::

    spec    := atom | interp | "inv(" spec ")"
    atom    := "pow:" num | "powlog:" num ":" num | "expm1" | "dexp"
    interp  := ("geo" | "invgeo") "(" spec "," spec "," num ")"

``geo`` interpolates log Phi affinely (value geodesic); ``invgeo`` interpolates
log Phi^{-1} affinely (inverse geodesic); ``inv`` is the inverse function.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from ._numerics import (
    InversionError,
    exprel,
    expit_over_softplus,
    invert_monotone,
    log_softplus,
    softplus,
)

GRAMMAR = """\
function grammar:
  spec    := atom | interp | "inv(" spec ")"
  atom    := "pow:" num | "powlog:" num ":" num | "expm1" | "dexp"
  interp  := ("geo" | "invgeo") "(" spec "," spec "," num ")"
  num     := decimal literal, optional sign and exponent
  pow:p          t^p                       (p > 0)
  powlog:p:a     t^p log^a(1+t)            (p > 0, a > 0)
  expm1          e^t - 1
  dexp           exp(exp(t)) - e
  geo(F,G,th)    log Phi = (1-th) log F + th log G
  invgeo(F,G,th) log Phi^-1 = (1-th) log F^-1 + th log G^-1
  inv(F)         inverse function F^-1"""


class SpecSyntaxError(ValueError):
    """Malformed function spec; ``offset`` is the byte offset of the failure."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class SpecDomainError(ValueError):
    """Parameter outside the growth-function contract (p <= 0, a <= 0, theta not in [0,1])."""


class DomainError(ValueError):
    """Evaluation requested outside a view's representable interval."""


# -- spec tree ------------------------------------------------------------------------

def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise SpecDomainError(f"{name} must be a positive finite real, got {value!r}")


def _unit(value):
    if not (isinstance(value, (int, float)) and 0.0 <= value <= 1.0):
        raise SpecDomainError(f"theta must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class Pow:
    p: float

    def __post_init__(self):
        _positive("p", self.p)


@dataclass(frozen=True)
class PowLog:
    p: float
    a: float

    def __post_init__(self):
        _positive("p", self.p)
        _positive("a", self.a)


@dataclass(frozen=True)
class ExpM1:
    pass


@dataclass(frozen=True)
class DExp:
    pass


@dataclass(frozen=True)
class Geo:
    left: "FunctionSpec"
    right: "FunctionSpec"
    theta: float

    def __post_init__(self):
        _unit(self.theta)


@dataclass(frozen=True)
class InvGeo:
    left: "FunctionSpec"
    right: "FunctionSpec"
    theta: float

    def __post_init__(self):
        _unit(self.theta)


@dataclass(frozen=True)
class InverseView:
    inner: "FunctionSpec"


FunctionSpec = Union[Pow, PowLog, ExpM1, DExp, Geo, InvGeo, InverseView]


# -- grammar --------------------------------------------------------------------------

_NUM = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def fail(self, message):
        raise SpecSyntaxError(message, len(self.text[: self.pos].encode()))

    def accept(self, token):
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token):
        if not self.accept(token):
            self.fail(f"expected {token!r}")

    def number(self):
        m = _NUM.match(self.text, self.pos)
        if not m:
            self.fail("expected a number")
        self.pos = m.end()
        return float(m.group())

    def spec(self):
        if self.accept("inv("):
            inner = self.spec()
            self.expect(")")
            return InverseView(inner)
        for word, cls in (("invgeo(", InvGeo), ("geo(", Geo)):
            if self.accept(word):
                left = self.spec()
                self.expect(",")
                right = self.spec()
                self.expect(",")
                theta = self.number()
                self.expect(")")
                return cls(left, right, theta)
        if self.accept("powlog:"):
            p = self.number()
            self.expect(":")
            return PowLog(p, self.number())
        if self.accept("pow:"):
            return Pow(self.number())
        if self.accept("expm1"):
            return ExpM1()
        if self.accept("dexp"):
            return DExp()
        self.fail("expected a function spec")


def parse_spec(text: str) -> FunctionSpec:
    """Parse a function spec string, e.g. ``"invgeo(pow:2,pow:4,0.5)"``."""
    parser = _Parser(text)
    spec = parser.spec()
    if parser.pos != len(text):
        parser.fail("unexpected trailing input")
    return spec


def _num(x):
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 1e15 else repr(x)


def format_spec(spec: FunctionSpec) -> str:
    """Inverse of :func:`parse_spec`."""
    if isinstance(spec, Pow):
        return f"pow:{_num(spec.p)}"
    if isinstance(spec, PowLog):
        return f"powlog:{_num(spec.p)}:{_num(spec.a)}"
    if isinstance(spec, ExpM1):
        return "expm1"
    if isinstance(spec, DExp):
        return "dexp"
    if isinstance(spec, InverseView):
        return f"inv({format_spec(spec.inner)})"
    name = "geo" if isinstance(spec, Geo) else "invgeo"
    return f"{name}({format_spec(spec.left)},{format_spec(spec.right)},{_num(spec.theta)})"


# -- grid configuration ---------------------------------------------------------------

@dataclass(frozen=True)
class GridConfig:
    """Sampling and tolerance settings shared by every numeric analysis.

    ``x`` is log t. ``edge_growth_tol`` bounds the outward log-slope of the elasticity
    at a grid edge beyond which an index is declared unbounded.
    """

    x_min: float = math.log(1e-6)
    x_max: float = math.log(1e12)
    n_points: int = 2048
    inv_rel_tol: float = 1e-10
    inv_max_iter: int = 200
    slope_tol: float = 1e-6
    fd_step: float = 1e-4
    edge_growth_tol: float = 0.05

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be below x_max")
        if self.n_points < 16:
            raise ValueError("n_points must be at least 16")
        for name in ("inv_rel_tol", "slope_tol", "fd_step", "edge_growth_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.inv_max_iter < 1:
            raise ValueError("inv_max_iter must be positive")

    def grid(self, lo=-np.inf, hi=np.inf):
        """Uniform x grid clipped to ``[lo, hi]``; returns ``(x, clipped)``."""
        a, b = max(self.x_min, lo), min(self.x_max, hi)
        if not a < b:
            raise DomainError(f"grid [{self.x_min}, {self.x_max}] misses domain [{lo}, {hi}]")
        return np.linspace(a, b, self.n_points), (a, b) != (self.x_min, self.x_max)


DEFAULT_GRID = GridConfig()


# -- log views ------------------------------------------------------------------------

Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class LogView:
    """Log-log evaluator of a growth function.

    ``domain`` bounds where ``eval`` is representable; ``range`` bounds where ``inv``
    is. ``slope`` is set when L is exactly linear (power functions and their
    interpolants), in which case both directions are closed form.
    """

    spec: FunctionSpec
    f: Fn = field(repr=False)
    df: Fn = field(repr=False)
    g: Fn = field(repr=False)
    dg: Fn = field(repr=False)
    domain: tuple = (-np.inf, np.inf)
    range: tuple = (-np.inf, np.inf)
    slope: float | None = None

    @staticmethod
    def _check(x, bounds, what):
        x = np.asarray(x, dtype=float)
        lo, hi = bounds
        bad = ~((x >= lo) & (x <= hi))
        if bad.any():
            first = x[bad].flat[0] if x.ndim else float(x)
            raise DomainError(f"{what} argument {first!r} outside [{lo}, {hi}]")
        return x

    def eval(self, x):
        return self.f(self._check(x, self.domain, "eval"))

    def logderiv(self, x):
        return self.df(self._check(x, self.domain, "logderiv"))

    def inv(self, y):
        return self.g(self._check(y, self.range, "inv"))

    def invderiv(self, y):
        return self.dg(self._check(y, self.range, "invderiv"))

    @property
    def domain_hint(self):
        return self.domain


def _asf(x):
    return np.asarray(x, dtype=float)


def _linear_view(spec, slope):
    return LogView(
        spec,
        f=lambda x: _asf(x) * slope,
        df=lambda x: np.full_like(_asf(x), slope),
        g=lambda y: _asf(y) / slope,
        dg=lambda y: np.full_like(_asf(y), 1.0 / slope),
        slope=slope,
    )


def _expm1_view(spec):
    def f(x):
        x = _asf(x)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            s = np.exp(x)
            big = s + np.log1p(-np.exp(-s))
            small = x + np.log(exprel(np.minimum(s, 30.0)))
        return np.where(s > 30.0, big, small)

    def df(x):
        with np.errstate(over="ignore"):
            return 1.0 / exprel(-np.exp(_asf(x)))

    def dg(y):
        return expit_over_softplus(y)

    hi = math.log(1e300)
    domain = (-np.inf, hi)
    return LogView(spec, f, df, log_softplus, dg, domain=domain, range=_image(f, domain))


def _dexp_view(spec):
    def f(x):
        x = _asf(x)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            t = np.exp(x)
            body = np.exp(t) + np.log(-np.expm1(-np.expm1(t)))
        return np.where(x < -30.0, 1.0 + x + np.exp(np.minimum(x, -30.0)), body)

    def df(x):
        x = _asf(x)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            t = np.exp(x)
            body = t * np.exp(t) / -np.expm1(-np.expm1(t))
        return np.where(x < -30.0, 1.0 + np.exp(np.minimum(x, -30.0)), body)

    def g(y):
        z = _asf(y) - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            body = np.log(np.log1p(softplus(np.maximum(z, -30.0))))
        return np.where(z < -30.0, z - np.exp(np.minimum(z, -30.0)), body)

    def dg(y):
        return 1.0 / df(g(y))

    domain = (-np.inf, math.log(700.0))
    return LogView(spec, f, df, g, dg, domain=domain, range=_image(f, domain))


def _powlog_view(spec, cfg):
    p, a = float(spec.p), float(spec.a)

    def f(x):
        x = _asf(x)
        return p * x + a * log_softplus(x)

    def df(x):
        return p + a * expit_over_softplus(x)

    def g(y):
        y = _asf(y)
        return invert_monotone(f, y, guess=y / (p + a), rel_tol=cfg.inv_rel_tol,
                               max_iter=cfg.inv_max_iter, df=df)

    def dg(y):
        return 1.0 / df(g(y))

    return LogView(spec, f, df, g, dg)


def _image(fn, bounds):
    with np.errstate(all="ignore"):
        lo, hi = bounds
        flo = -np.inf if lo == -np.inf else float(fn(np.array([lo]))[0])
        fhi = np.inf if hi == np.inf else float(fn(np.array([hi]))[0])
    return flo, fhi


def _geo_view(spec, cfg):
    left, right = make_view(spec.left, cfg), make_view(spec.right, cfg)
    th = float(spec.theta)
    if left.slope is not None and right.slope is not None:
        return _linear_view(spec, (1.0 - th) * left.slope + th * right.slope)
    domain = (max(left.domain[0], right.domain[0]), min(left.domain[1], right.domain[1]))

    def f(x):
        return (1.0 - th) * left.f(x) + th * right.f(x)

    def df(x):
        return (1.0 - th) * left.df(x) + th * right.df(x)

    def g(y):
        return invert_monotone(f, y, *domain, rel_tol=cfg.inv_rel_tol,
                               max_iter=cfg.inv_max_iter, df=df)

    def dg(y):
        return 1.0 / df(g(y))

    return LogView(spec, f, df, g, dg, domain=domain, range=_image(f, domain))


def _invgeo_view(spec, cfg):
    left, right = make_view(spec.left, cfg), make_view(spec.right, cfg)
    th = float(spec.theta)
    if left.slope is not None and right.slope is not None:
        return _linear_view(spec, 1.0 / ((1.0 - th) / left.slope + th / right.slope))
    rng = (max(left.range[0], right.range[0]), min(left.range[1], right.range[1]))

    def g(y):
        return (1.0 - th) * left.g(y) + th * right.g(y)

    def dg(y):
        return (1.0 - th) * left.dg(y) + th * right.dg(y)

    def f(x):
        return invert_monotone(g, x, *rng, rel_tol=cfg.inv_rel_tol,
                               max_iter=cfg.inv_max_iter, df=dg)

    def df(x):
        return 1.0 / dg(f(x))

    return LogView(spec, f, df, g, dg, domain=_image(g, rng), range=rng)


@functools.lru_cache(maxsize=512)
def make_view(spec: FunctionSpec, cfg: GridConfig = DEFAULT_GRID) -> LogView:
    """Build the log-log evaluator of ``spec``.

    Closed forms are used wherever the family has one; the other direction falls back
    to bracketed bisection. Interpolants at theta in {0, 1} return the endpoint view.
    """
    if isinstance(spec, Pow):
        return _linear_view(spec, float(spec.p))
    if isinstance(spec, PowLog):
        return _powlog_view(spec, cfg)
    if isinstance(spec, ExpM1):
        return _expm1_view(spec)
    if isinstance(spec, DExp):
        return _dexp_view(spec)
    if isinstance(spec, (Geo, InvGeo)):
        if spec.theta == 0:
            return make_view(spec.left, cfg)
        if spec.theta == 1:
            return make_view(spec.right, cfg)
        return _geo_view(spec, cfg) if isinstance(spec, Geo) else _invgeo_view(spec, cfg)
    if isinstance(spec, InverseView):
        if isinstance(spec.inner, InverseView):
            return make_view(spec.inner.inner, cfg)
        v = make_view(spec.inner, cfg)
        return LogView(spec, v.g, v.dg, v.f, v.df, domain=v.range, range=v.domain,
                       slope=None if v.slope is None else 1.0 / v.slope)
    raise TypeError(f"not a function spec: {spec!r}")


def log_derivative(view: LogView, x, cfg: GridConfig = DEFAULT_GRID, method="auto"):
    """Elasticity L'(x) = t Phi'(t)/Phi(t) at t = e^x.

    ``method="fd"`` forces a central difference with step ``cfg.fd_step``.
    """
    x = view._check(x, view.domain, "logderiv")
    if method == "auto":
        return view.df(x)
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")
    h = cfg.fd_step
    lo, hi = view.domain
    if np.any(x - h < lo) or np.any(x + h > hi):
        raise DomainError("finite-difference stencil leaves the domain")
    return (view.f(x + h) - view.f(x - h)) / (2.0 * h)


__all__ = [
    "GRAMMAR", "SpecSyntaxError", "SpecDomainError", "DomainError", "InversionError",
    "Pow", "PowLog", "ExpM1", "DExp", "Geo", "InvGeo", "InverseView", "FunctionSpec",
    "parse_spec", "format_spec", "GridConfig", "DEFAULT_GRID", "LogView", "make_view",
    "log_derivative",
]
