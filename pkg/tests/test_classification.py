import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orliczkit.classification import (_sup_excess, classify, dlog_constants, duality_check,
                                      matuszewska_indices, type_exponents)
from orliczkit.growth import (DEFAULT_GRID, Geo, GridConfig, InverseView, Pow, PowLog,
                              make_view, parse_spec)

CATALOG = ["pow:0.5", "pow:1", "pow:2", "pow:7", "powlog:2:1", "powlog:0.5:0.25", "expm1",
           "dexp"]

exponents = st.floats(min_value=0.2, max_value=9.0, allow_nan=False)


def powlog_elasticity(p, a, t):
    return p + a * t / ((1 + t) * np.log1p(t))


def brute_dlog_minus(lam, x, thetas):
    """max over a grid of [lam(mid) - th lam(x) - (1-th) lam(y)] / (th (1-th))."""
    best = -np.inf
    lx = lam(x)
    for th in thetas:
        mid = th * x[:, None] + (1 - th) * x[None, :]
        chord = th * lx[:, None] + (1 - th) * lx[None, :]
        best = max(best, float(np.max(lam(mid) - chord)) / (th * (1 - th)))
    return math.exp(max(best, 0.0))


class TestIndices:
    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 7.0])
    def test_power_exact(self, p):
        a, b = matuszewska_indices(Pow(p))
        assert abs(a - p) <= 1e-9 and abs(b - p) <= 1e-9

    def test_powlog_matches_dense_oracle(self):
        t = np.logspace(-6, 12, 1_000_001)
        e = powlog_elasticity(2.0, 1.0, t)
        a, b = matuszewska_indices(PowLog(2.0, 1.0))
        assert a == pytest.approx(e.min(), abs=1e-7)
        assert b == pytest.approx(e.max(), abs=1e-7)
        assert b == pytest.approx(3.0, abs=1e-6)

    def test_powlog_lower_index_approaches_two_on_wide_grid(self):
        a, _ = matuszewska_indices(PowLog(2.0, 1.0), GridConfig(x_max=2000.0))
        assert abs(a - 2.0) <= 1e-3

    def test_inverse_power(self):
        a, b = matuszewska_indices(InverseView(Pow(4.0)))
        assert a == pytest.approx(0.25, abs=1e-12) and b == pytest.approx(0.25, abs=1e-12)

    @pytest.mark.parametrize("text", CATALOG)
    def test_index_duality(self, text):
        spec = parse_spec(text)
        a, b = matuszewska_indices(spec)
        ai, bi = matuszewska_indices(InverseView(spec))
        if math.isfinite(b):
            assert ai * b == pytest.approx(1.0, rel=1e-6)
        if a > 0 and math.isfinite(bi):
            assert bi * a == pytest.approx(1.0, rel=1e-6)

    @pytest.mark.parametrize("text", ["expm1", "dexp"])
    def test_unbounded_elasticity_is_infinite(self, text):
        idx = matuszewska_indices(parse_spec(text))
        assert idx.b == math.inf and idx.right_slope > 0

    def test_clipped_range_is_reported(self):
        idx = matuszewska_indices(parse_spec("dexp"))
        assert idx.clipped and idx.x_range[1] == pytest.approx(math.log(700.0))

    @settings(max_examples=25, deadline=None)
    @given(exponents)
    def test_power_property(self, p):
        a, b = matuszewska_indices(Pow(p))
        assert abs(a - p) <= 1e-9 * max(1, p) and abs(b - p) <= 1e-9 * max(1, p)


class TestTypes:
    def test_power_equality_case(self):
        t = type_exponents(Pow(2.0))
        assert t.upper == (pytest.approx(2.0), 1.0) and t.lower == (pytest.approx(2.0), 1.0)

    def test_expm1_has_no_upper_type(self):
        q, c = type_exponents(parse_spec("expm1")).upper
        assert q == math.inf and math.isnan(c)

    def test_powlog_lower_constant_against_brute_force(self):
        spec = PowLog(0.5, 0.25)
        p, C = type_exponents(spec).lower
        assert p == pytest.approx(0.5, abs=0.02) and math.isfinite(C) and C >= 1.0
        # independent check of Phi(st) <= C s^p Phi(t) for s <= 1 on a coarse sample
        x = np.linspace(DEFAULT_GRID.x_min, DEFAULT_GRID.x_max, 300)

        def lam(u):
            return 0.5 * u + 0.25 * np.log(np.log1p(np.exp(u)))
        s = x[:, None] - x[None, :]
        excess = np.where(s <= 0, lam(x)[:, None] - lam(x)[None, :] - p * s, -np.inf)
        assert math.exp(max(float(excess.max()), 0.0)) <= C * (1 + 1e-9)

    @settings(max_examples=15, deadline=None)
    @given(exponents, st.floats(min_value=0.05, max_value=3.0))
    def test_powlog_constants_at_least_one(self, p, a):
        t = type_exponents(PowLog(p, a))
        assert t.lower[1] >= 1.0
        assert t.upper[1] >= 1.0


class TestDlog:
    @pytest.mark.parametrize("p", [0.5, 2.0, 7.0])
    def test_powers_are_exact(self, p):
        assert tuple(dlog_constants(Pow(p))) == (1.0, 1.0)

    def test_examples(self):
        assert dlog_constants(parse_spec("expm1")).C_minus <= 1 + 1e-6
        assert dlog_constants(parse_spec("powlog:2:1")).C_plus == 1.0
        assert math.isfinite(dlog_constants(parse_spec("dexp")).C_minus)

    def test_expm1_minus_against_brute_force(self):
        cfg = GridConfig(x_min=-5.0, x_max=4.0, n_points=256)
        x = np.linspace(-5.0, 4.0, 120)
        oracle = brute_dlog_minus(lambda u: np.log(np.expm1(np.exp(u))), x,
                                  [k / 10 for k in range(1, 10)])
        assert dlog_constants(parse_spec("expm1"), cfg).C_minus == pytest.approx(oracle, abs=1e-9)

    def test_nonconvex_box_supremum_against_brute_force(self):
        # t^2 log(1+t) is log-concave at large t: the box supremum exceeds 1 and keeps
        # growing with the box, so the reported constant is infinite
        x = np.linspace(-3.0, 3.0, 64)
        oracle = brute_dlog_minus(lambda u: 2 * u + np.log(np.log1p(np.exp(u))), x,
                                  [k / 10 for k in range(1, 10)])
        box = _sup_excess(make_view(PowLog(2.0, 1.0)), x, plus=False)
        assert oracle > 1.0
        assert math.exp(box.max()) == pytest.approx(oracle, rel=1e-9)
        assert dlog_constants(PowLog(2.0, 1.0)).C_minus == math.inf

    @pytest.mark.parametrize("text", ["expm1", "powlog:2:1", "pow:3"])
    def test_self_interpolation_is_identity(self, text):
        f = parse_spec(text)
        a = dlog_constants(f)
        b = dlog_constants(Geo(f, f, 0.3))
        for u, v in zip(a, b):
            assert (math.isinf(u) and math.isinf(v)) or abs(u - v) <= 1e-9

    @pytest.mark.parametrize("text", CATALOG)
    def test_at_least_one(self, text):
        assert all(c >= 1.0 for c in dlog_constants(parse_spec(text)))


class TestDuality:
    @pytest.mark.parametrize("text", ["pow:0.5", "pow:3", "expm1", "powlog:2:1", "dexp",
                                      "powlog:0.5:0.25", "geo(expm1,pow:2,0.5)"])
    def test_passes(self, text):
        rep = duality_check(parse_spec(text))
        assert rep.passed, rep.to_text()

    def test_power_discrepancy_is_zero(self):
        rep = duality_check(Pow(3.0))
        assert rep.discrepancy == 0.0 and rep.C_minus == 1.0 and rep.C_plus_of_inverse == 1.0


class TestClassify:
    def test_linear(self):
        r = classify(Pow(1.0))
        assert r.a_index == pytest.approx(1.0) and r.b_index == pytest.approx(1.0)
        assert r.ratio_nondecreasing and r.ratio_nonincreasing

    def test_powlog_flags(self):
        r = classify(PowLog(2.0, 1.0))
        assert r.ratio_nondecreasing and not r.ratio_nonincreasing

    def test_expm1(self):
        r = classify(parse_spec("expm1"))
        assert r.upper_type[0] == math.inf and r.a_index == pytest.approx(1.0, abs=1e-5)
        assert r.ratio_nondecreasing

    @pytest.mark.parametrize("text", CATALOG)
    def test_invariants_and_purity(self, text):
        spec = parse_spec(text)
        r = classify(spec)
        assert r.a_index <= r.b_index
        assert r.ratio_nondecreasing == (r.a_index >= 1 - r.grid.slope_tol)
        assert r.ratio_nonincreasing == (r.b_index <= 1 + r.grid.slope_tol)
        assert classify(spec).to_text() == r.to_text()

    def test_text_block(self):
        text = classify(parse_spec("expm1")).to_text()
        assert "b_index = inf\n" in text
        keys = [line.split(" = ")[0] for line in text.splitlines()]
        for k in ("a_index", "b_index", "upper_type_q", "lower_type_C", "dlog_minus_C",
                  "dlog_plus_C", "ratio_nondecreasing"):
            assert k in keys
