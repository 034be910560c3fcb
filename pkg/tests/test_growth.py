import math

import mpmath as mp
import numpy as np
import pytest

from orliczkit.growth import (DEFAULT_GRID, DExp, DomainError, ExpM1, Geo, GridConfig,
                              InverseView, InvGeo, Pow, PowLog, SpecDomainError, SpecSyntaxError,
                              format_spec, log_derivative, make_view, parse_spec)

CATALOG = ["pow:0.5", "pow:2", "pow:7", "powlog:2:1", "powlog:0.5:0.25", "expm1", "dexp",
           "geo(expm1,pow:2,0.3)", "invgeo(expm1,pow:4,0.5)", "inv(powlog:2:1)", "inv(dexp)"]

mp.mp.dps = 40


def mp_log_phi(name, t):
    """High-precision log Phi(t) straight from the closed-form definitions."""
    t = mp.mpf(t)
    if name.startswith("pow:"):
        return mp.mpf(name[4:]) * mp.log(t)
    if name.startswith("powlog:"):
        p, a = map(mp.mpf, name[7:].split(":"))
        return p * mp.log(t) + a * mp.log(mp.log1p(t))
    if name == "expm1":
        return mp.log(mp.expm1(t))
    if name == "dexp":
        # log(e^u - e) with u = e^t, written so e^u is never formed; the correction
        # term is below 1e-40 once u > 100
        u = mp.exp(t)
        return u if u > 100 else u + mp.log(-mp.expm1(1 - u))
    raise ValueError(name)


class TestParser:
    def test_literals(self):
        assert parse_spec("pow:2") == Pow(2.0)
        assert parse_spec("invgeo(pow:2,pow:4,0.5)") == InvGeo(Pow(2.0), Pow(4.0), 0.5)
        assert parse_spec("inv(powlog:2:1)") == InverseView(PowLog(2.0, 1.0))
        assert parse_spec("geo(expm1,dexp,1e-1)") == Geo(ExpM1(), DExp(), 0.1)

    def test_domain_errors(self):
        for text in ("pow:-1", "pow:0", "powlog:2:0", "geo(pow:1,pow:2,1.5)"):
            with pytest.raises(SpecDomainError):
                parse_spec(text)

    @pytest.mark.parametrize("text,offset", [
        ("pow:", 4), ("pow:x", 4), ("expm2", 0), ("geo(pow:1,pow:2)", 15),
        ("pow:2 ", 5), ("inv(pow:2", 9),
    ])
    def test_syntax_error_offsets(self, text, offset):
        with pytest.raises(SpecSyntaxError) as info:
            parse_spec(text)
        assert info.value.offset == offset

    @pytest.mark.parametrize("text", CATALOG)
    def test_format_round_trip(self, text):
        spec = parse_spec(text)
        assert parse_spec(format_spec(spec)) == spec


class TestViews:
    def test_spec_examples(self):
        assert make_view(Pow(2)).eval(1.0) == 2.0
        assert make_view(Geo(Pow(2), Pow(4), 0.5)).eval(1.0) == 3.0
        assert make_view(InvGeo(Pow(2), Pow(4), 0.5)).inv(1.0) == pytest.approx(0.375, abs=1e-15)
        assert make_view(ExpM1()).inv(0.0) == pytest.approx(math.log(math.log(2.0)), rel=1e-14)

    @pytest.mark.parametrize("name", ["pow:0.5", "pow:7", "powlog:2:1", "powlog:0.5:0.25",
                                      "expm1", "dexp"])
    def test_forward_matches_high_precision(self, name):
        view = make_view(parse_spec(name))
        hi = min(25.0, view.domain[1] - 0.5)
        x = np.linspace(-12.0, hi, 41)
        got = view.eval(x)
        want = np.array([float(mp_log_phi(name, mp.exp(v))) for v in x])
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)

    def test_closed_form_inverses(self):
        y = np.linspace(-20.0, 40.0, 61)
        # Phi^-1(s) = log(1+s) and log log(s+e), viewed in log-log coordinates
        want_e = np.array([float(mp.log(mp.log1p(mp.exp(v)))) for v in y])
        want_d = np.array([float(mp.log(mp.log(mp.log(mp.exp(v) + mp.e)))) for v in y])
        np.testing.assert_allclose(make_view(ExpM1()).inv(y), want_e, rtol=1e-13, atol=1e-14)
        np.testing.assert_allclose(make_view(DExp()).inv(y), want_d, rtol=1e-13, atol=1e-14)

    @pytest.mark.parametrize("text", CATALOG)
    def test_round_trip(self, text):
        view = make_view(parse_spec(text))
        lo = max(view.domain[0], DEFAULT_GRID.x_min)
        hi = min(view.domain[1], DEFAULT_GRID.x_max)
        x = np.linspace(lo, hi, 256)[1:-1]
        assert np.all(np.abs(view.inv(view.eval(x)) - x) <= 1e-8 * (1 + np.abs(x)))

    @pytest.mark.parametrize("text", CATALOG)
    def test_strictly_increasing(self, text):
        view = make_view(parse_spec(text))
        lo = max(view.domain[0], DEFAULT_GRID.x_min)
        hi = min(view.domain[1], DEFAULT_GRID.x_max)
        x = np.linspace(lo, hi, 2048)
        assert np.all(np.diff(view.eval(x)) > 0)
        assert np.all(view.logderiv(x) > 0)

    @pytest.mark.parametrize("text", CATALOG)
    def test_double_inverse_is_identity(self, text):
        s = parse_spec(text)
        a, b = make_view(s), make_view(InverseView(InverseView(s)))
        x = np.linspace(-10.0, min(a.domain[1], 20.0) - 0.1, 200)
        np.testing.assert_allclose(b.eval(x), a.eval(x), rtol=0, atol=1e-12)

    @pytest.mark.parametrize("cls", [Geo, InvGeo])
    def test_endpoint_degeneracy_bitwise(self, cls):
        left, right = PowLog(2.0, 1.0), ExpM1()
        x = np.linspace(-10.0, 5.0, 101)
        assert np.array_equal(make_view(cls(left, right, 0.0)).eval(x), make_view(left).eval(x))
        assert np.array_equal(make_view(cls(left, right, 1.0)).eval(x), make_view(right).eval(x))

    def test_domain_errors(self):
        view = make_view(DExp())
        with pytest.raises(DomainError):
            view.eval(10.0)
        assert math.isfinite(float(view.inv(1e6)))


class TestLogDerivative:
    def test_power_is_exact(self):
        x = np.linspace(-13.0, 27.0, 64)
        assert np.all(make_view(Pow(3.0)).logderiv(x) == 3.0)

    def test_limits(self):
        assert log_derivative(make_view(PowLog(2, 1)), -30.0) == pytest.approx(3.0, abs=1e-12)
        assert log_derivative(make_view(ExpM1()), -30.0) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("name", ["pow:0.5", "powlog:2:1", "powlog:0.5:0.25", "expm1",
                                      "dexp"])
    def test_analytic_matches_high_precision(self, name):
        view = make_view(parse_spec(name))
        x = np.linspace(-10.0, min(20.0, view.domain[1] - 0.5), 31)
        want = [float(mp.diff(lambda u: mp_log_phi(name, mp.exp(u)), mp.mpf(v))) for v in x]
        np.testing.assert_allclose(view.logderiv(x), want, rtol=1e-11)

    @pytest.mark.parametrize("text", CATALOG)
    def test_analytic_matches_finite_difference(self, text):
        view = make_view(parse_spec(text))
        x = np.linspace(-10.0, min(8.0, view.domain[1] - 0.5), 50)
        fd = log_derivative(view, x, method="fd")
        half = log_derivative(view, x, GridConfig(fd_step=5e-5), method="fd")
        # step halving estimates the O(h^2) truncation error of the coarse stencil
        truncation = 4.0 / 3.0 * np.abs(fd - half)
        assert np.all(np.abs(view.logderiv(x) - fd) <= 1e-7 * np.abs(fd) + 2 * truncation)

    def test_powlog_closed_form(self):
        x = np.linspace(-10.0, 20.0, 31)
        t = np.exp(x)
        want = 2.0 + t / ((1 + t) * np.log1p(t))
        np.testing.assert_allclose(make_view(PowLog(2, 1)).logderiv(x), want, rtol=1e-12)


class TestGridConfig:
    def test_defaults(self):
        g = GridConfig()
        assert g.x_min == pytest.approx(math.log(1e-6))
        assert g.x_max == pytest.approx(math.log(1e12))
        assert (g.n_points, g.inv_rel_tol, g.inv_max_iter) == (2048, 1e-10, 200)
        assert (g.slope_tol, g.fd_step) == (1e-6, 1e-4)

    def test_invalid(self):
        with pytest.raises(ValueError):
            GridConfig(x_min=1.0, x_max=0.0)
        with pytest.raises(ValueError):
            GridConfig(n_points=8)
        with pytest.raises(ValueError):
            GridConfig(slope_tol=0.0)

    def test_clipping(self):
        x, clipped = DEFAULT_GRID.grid(-1.0, 3.0)
        assert clipped and x[0] == -1.0 and x[-1] == 3.0 and len(x) == 2048
