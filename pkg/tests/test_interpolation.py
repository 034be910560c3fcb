import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from orliczkit.growth import ExpM1, Geo, InvGeo, Pow, PowLog, make_view, parse_spec
from orliczkit.interpolation import (InterpFamily, Mode, check_type_propagation,
                                     interp_ratio_preservation, interpolate, ratio_monotonicity)

X = np.linspace(-12.0, 25.0, 301)
exponents = st.floats(min_value=0.3, max_value=8.0, allow_nan=False)
thetas = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


class TestInterpolate:
    def test_inverse_geodesic_example(self):
        spec = interpolate(InterpFamily(Pow(2), Pow(4)), 0.5)
        # inverse t^(3/8), so Phi(t) = t^(8/3)
        np.testing.assert_allclose(make_view(spec).g(X), 0.375 * X, rtol=0, atol=1e-12)

    def test_value_geodesic_example(self):
        spec = interpolate(InterpFamily(Pow(2), Pow(4), Mode.VALUE), 0.25)
        np.testing.assert_allclose(make_view(spec).f(X), make_view(Pow(2.5)).f(X),
                                   rtol=0, atol=1e-12)

    @pytest.mark.parametrize("mode", list(Mode))
    def test_endpoints_are_the_specs_themselves(self, mode):
        fam = InterpFamily(PowLog(2, 1), ExpM1(), mode)
        assert interpolate(fam, 0.0) is fam.left
        assert interpolate(fam, 1.0) is fam.right

    def test_family_validation(self):
        with pytest.raises(ValueError):
            InterpFamily(Pow(1), Pow(2), thetas=(0.5, 0.2))
        with pytest.raises(ValueError):
            InterpFamily(Pow(1), Pow(2), thetas=(0.5, 1.2))
        with pytest.raises(ValueError):
            interpolate(InterpFamily(Pow(1), Pow(2)), -0.1)
        fam = InterpFamily(Pow(1), Pow(2), "value-geodesic", (0.0, 0.5, 1.0))
        assert fam.mode is Mode.VALUE
        assert fam.members() == [Pow(1), Geo(Pow(1), Pow(2), 0.5), Pow(2)]

    @settings(max_examples=40, deadline=None)
    @given(exponents, exponents, thetas)
    def test_power_closure(self, p0, p1, th):
        p_th = 1.0 / ((1 - th) / p0 + th / p1)
        got = make_view(InvGeo(Pow(p0), Pow(p1), th)).f(X)
        assert np.all(np.abs(got - p_th * X) <= 1e-12 * (1 + np.abs(p_th * X)))

    @settings(max_examples=30, deadline=None)
    @given(thetas)
    def test_geo_is_log_affine(self, th):
        a, b = PowLog(2, 1), ExpM1()
        x = np.linspace(-10, 5, 61)
        want = (1 - th) * make_view(a).f(x) + th * make_view(b).f(x)
        np.testing.assert_allclose(make_view(Geo(a, b, th)).f(x), want, rtol=1e-14, atol=1e-14)


class TestTypePropagation:
    def test_power_upper(self):
        r = check_type_propagation(Pow(2), Pow(4), 0.5)
        assert r.passed and r.q_measured == pytest.approx(3.0, abs=1e-9)

    def test_power_lower(self):
        r = check_type_propagation(Pow(0.5), Pow(1), 0.5)
        assert r.passed and r.p_measured == pytest.approx(0.75, abs=1e-9)

    def test_powlog_mix(self):
        r = check_type_propagation(PowLog(2, 1), Pow(4), 0.5)
        assert r.passed
        assert r.q_measured == pytest.approx(3.5, rel=1e-3)

    def test_infinite_exponent_is_not_applicable(self):
        r = check_type_propagation(ExpM1(), Pow(2), 0.5)
        assert not r.upper_applicable and r.upper_ok
        assert "upper = n/a" in r.to_text()

    @settings(max_examples=15, deadline=None)
    @given(exponents, exponents, st.floats(min_value=0.05, max_value=0.95))
    def test_power_pairs_exact(self, p0, p1, th):
        r = check_type_propagation(Pow(p0), Pow(p1), th)
        assert r.passed and r.q_error <= 1e-9 and r.p_error <= 1e-9


class TestRatioMonotonicity:
    def test_power_pair(self):
        r = ratio_monotonicity(Pow(2), Pow(4))
        assert r.hypothesis_met and r.passed

    def test_expm1_over_linear(self):
        r = ratio_monotonicity(Pow(1), ExpM1())
        assert r.hypothesis_met and r.passed

    def test_hypothesis_not_met(self):
        r = ratio_monotonicity(Pow(4), Pow(2))
        assert not r.hypothesis_met and not r.passed
        assert "hypothesis = not-met" in r.to_text()
        # the ratios are still measured: t^-2 is strictly decreasing
        assert r.worst_forward > 0 and r.worst_inverse > 0


class TestPreservation:
    def test_power_pairs(self):
        rep = interp_ratio_preservation(Pow(2), Pow(4), Pow(3), Pow(6), [0.5])
        assert rep.passed
        c = rep.checks[0]
        assert c.identity_error <= 1e-12
        # the reciprocal orientation is strictly decreasing for these powers
        assert not c.statement_orientation_nondecreasing

    def test_mixed_pairs(self):
        rep = interp_ratio_preservation(Pow(1), ExpM1(), Pow(2), Pow(4), [0.25, 0.5, 0.75])
        assert rep.passed, rep.to_text()

    def test_theta_zero_reduces_to_left_pair(self):
        rep = interp_ratio_preservation(Pow(2), Pow(4), Pow(3), Pow(6), [0.0])
        base = ratio_monotonicity(Pow(2), Pow(4))
        assert rep.checks[0].worst_inverse == pytest.approx(base.worst_inverse, abs=1e-12)
        assert rep.checks[0].worst_forward == pytest.approx(base.worst_forward, abs=1e-12)

    def test_hypothesis_failure_reported(self):
        rep = interp_ratio_preservation(Pow(4), Pow(2), Pow(3), Pow(6), [0.5])
        assert not rep.hypothesis_met and not rep.passed
        assert "pair0_hypothesis = not-met" in rep.to_text()

    def test_workers_do_not_change_output(self):
        args = (parse_spec("pow:1"), parse_spec("expm1"), Pow(2), Pow(4), [0.25, 0.5, 0.75])
        assert (interp_ratio_preservation(*args).to_text()
                == interp_ratio_preservation(*args, workers=3).to_text())

    @settings(max_examples=10, deadline=None)
    @given(exponents, exponents, exponents, exponents, st.floats(min_value=0.05, max_value=0.95))
    def test_power_pairs_property(self, a0, b0, a1, b1, th):
        # pairs (Pow(p), Pow(q)) with q >= p satisfy the hypothesis
        p0, q0 = sorted((a0, b0))
        p1, q1 = sorted((a1, b1))
        assume(q0 - p0 > 1e-3 and q1 - p1 > 1e-3)
        rep = interp_ratio_preservation(Pow(p0), Pow(q0), Pow(p1), Pow(q1), [th])
        assert rep.passed
        assert math.isfinite(rep.checks[0].identity_error)
