"""Quadrature checks against the closed form

    int |1-z|^(-s) dnu_a = 2F1(s/2, s/2; a+2; 1) = G(a+2) G(a+2-s) / G(a+2-s/2)^2,

obtained by expanding (1-z)^(-s/2) in monomials, which are orthogonal for nu_a.
The integral is finite exactly when s < a + 2.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orliczkit.bergman import (QuadConfig, QuadratureOverflow, TestFunction, lux_norm,
                               pairwise_sum, refinement_study, weighted_integral,
                               witness_embedding)
from orliczkit.growth import InvGeo, Pow, make_view, parse_spec

P = parse_spec
SMALL = QuadConfig(128, 128)


def modular_oracle(s, alpha):
    return math.gamma(alpha + 2) * math.gamma(alpha + 2 - s) / math.gamma(alpha + 2 - s / 2) ** 2


class TestFunctionType:
    def test_validation(self):
        with pytest.raises(ValueError):
            TestFunction(-0.1, 1.0)
        with pytest.raises(ValueError):
            TestFunction(0.5, 0.0)

    def test_modulus(self):
        f = TestFunction(0.5, 2.0)
        z = 0.3 * np.exp(1j * np.linspace(0, 6, 7))
        np.testing.assert_allclose(f.abs_at(z), 2.0 * (1 - 0.6 * np.cos(np.angle(z)) + 0.09) ** -0.25)


class TestWeightedIntegral:
    @pytest.mark.parametrize("p,c,alpha", [(2, 0.5, 0.0), (4, 0.9, 2.0), (2, 0.9, 0.0),
                                           (1, 0.3, 2.5), (3, 0.6, 1.0)])
    def test_power_modular_closed_form(self, p, c, alpha):
        got = weighted_integral(TestFunction(c, 1.0), Pow(p), alpha, 1.0)
        assert got == pytest.approx(modular_oracle(p * c, alpha), rel=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(min_value=-0.5, max_value=2.5), st.floats(min_value=0.5, max_value=4.0),
           st.floats(min_value=0.0, max_value=1.0))
    def test_power_modular_property(self, alpha, p, frac):
        # keep s = p c at least 0.3 below the divergence threshold a + 2
        c = frac * (alpha + 1.7) / p
        got = weighted_integral(TestFunction(c, 1.0), Pow(p), alpha, 1.0)
        assert got == pytest.approx(modular_oracle(p * c, alpha), rel=1e-8)

    @pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5, 1.0, 2.5])
    def test_probability_normalization(self, alpha):
        got = weighted_integral(TestFunction(0.0, 2.0), Pow(1), alpha, 2.0)
        assert abs(got - 1.0) <= 1e-10

    def test_constant_function_any_phi(self):
        for name in ("expm1", "powlog:2:1", "dexp"):
            lam = 1.7
            want = math.exp(make_view(P(name)).f(math.log(3.0 / lam)))
            got = weighted_integral(TestFunction(0.0, 3.0), P(name), 1.0, lam)
            assert got == pytest.approx(want, rel=1e-12)

    def test_strictly_decreasing_in_lambda(self):
        f = TestFunction(0.6, 1.0)
        vals = [weighted_integral(f, P("powlog:2:1"), 1.0, lam) for lam in np.geomspace(0.1, 10, 8)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_worker_partition_is_invisible(self):
        f = TestFunction(0.7, 1.3)
        one = weighted_integral(f, P("powlog:2:1"), 0.5, 2.0)
        assert all(weighted_integral(f, P("powlog:2:1"), 0.5, 2.0, workers=w) == one
                   for w in (2, 3, 8))

    def test_divergent_case_refines_without_bound(self):
        study = refinement_study(TestFunction(2.0, 1.0), Pow(2), 0.0, 1.0, SMALL, levels=4)
        assert all(b > 1.5 * a for a, b in zip(study.values, study.values[1:]))
        assert not study.converged

    def test_convergent_case_refinement(self):
        study = refinement_study(TestFunction(0.5, 1.0), Pow(2), 0.0, 1.0, SMALL, levels=3)
        assert study.converged and study.values[-1] == pytest.approx(4 / math.pi, rel=1e-9)

    def test_overflow_names_the_node(self):
        with pytest.raises(QuadratureOverflow) as info:
            weighted_integral(TestFunction(0.5, 1.0), P("dexp"), 0.0, 1e-3, SMALL)
        z = info.value.node
        assert abs(z) <= 1 and abs(1 - z) < 0.1

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            weighted_integral(TestFunction(), Pow(2), -1.0, 1.0)
        with pytest.raises(ValueError):
            weighted_integral(TestFunction(), Pow(2), 0.0, 0.0)
        with pytest.raises(ValueError):
            QuadConfig(4, 512)


class TestPairwiseSum:
    def test_matches_exact_sum(self):
        x = np.random.default_rng(3).random(1000)
        assert pairwise_sum(x) == pytest.approx(math.fsum(x), rel=1e-14)
        assert pairwise_sum([]) == 0.0 and pairwise_sum([2.5]) == 2.5


class TestLuxNorm:
    @pytest.mark.parametrize("name,k", [("pow:2", 3.0), ("expm1", 1.0), ("dexp", 2.0),
                                        ("powlog:2:1", 0.5)])
    def test_constant_function(self, name, k):
        inv_one = math.exp(make_view(P(name)).g(0.0))
        r = lux_norm(TestFunction(0.0, k), P(name), 1.0)
        assert r.converged and r.lam == pytest.approx(k / inv_one, rel=1e-8)

    def test_expm1_unit_constant(self):
        assert lux_norm(TestFunction(), P("expm1"), 0.0).lam == pytest.approx(1 / math.log(2), rel=1e-8)

    @pytest.mark.parametrize("p,c,alpha", [(2, 0.5, 0.0), (4, 0.9, 2.0), (3, 0.6, 1.0)])
    def test_power_norm_closed_form(self, p, c, alpha):
        r = lux_norm(TestFunction(c, 1.0), Pow(p), alpha)
        assert r.converged and abs(r.integral_at_lambda) <= 10 * QuadConfig().lux_tol
        assert r.lam == pytest.approx(modular_oracle(p * c, alpha) ** (1 / p), rel=1e-8)

    @settings(max_examples=10, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_homogeneity(self, k):
        base = lux_norm(TestFunction(0.5, 1.0), Pow(3), 1.0, SMALL).lam
        scaled = lux_norm(TestFunction(0.5, k), Pow(3), 1.0, SMALL).lam
        assert scaled == pytest.approx(k * base, rel=1e-8)

    def test_divergent_function_is_infinite(self):
        r = lux_norm(TestFunction(2.0, 1.0), Pow(2), 0.0)
        assert r.lam == math.inf and r.divergent and not r.converged
        assert "lux_norm = inf" in r.to_text()

    @pytest.mark.parametrize("c,name,alpha", [(0.5, "pow:2", 0.0), (0.9, "pow:4", 2.0),
                                              (0.9, "powlog:2:1", 1.0)])
    def test_doubling_stability(self, c, name, alpha):
        f = TestFunction(c, 1.0)
        a = lux_norm(f, P(name), alpha).lam
        b = lux_norm(f, P(name), alpha, QuadConfig().doubled()).lam
        assert abs(b - a) / b < 1e-4


class TestWitness:
    def test_constant_family(self):
        rep = witness_embedding(P("expm1"), Pow(2), 0.0, 1.0, [TestFunction()], SMALL)
        assert rep.max_ratio == pytest.approx(math.log(2.0), rel=1e-8)

    def test_power_family(self):
        fam = [TestFunction(c / 10, 1.0) for c in range(0, 10, 2)]
        rep = witness_embedding(Pow(2), Pow(4), 0.0, 2.0, fam, SMALL)
        assert rep.bounded and not rep.excluded
        # both norms are closed-form for powers
        for r in rep.rows:
            want = modular_oracle(4 * r.c, 2.0) ** 0.25 / modular_oracle(2 * r.c, 0.0) ** 0.5
            assert r.ratio == pytest.approx(want, rel=1e-6)
        assert "not a proof" in rep.to_text()

    def test_infinite_source_is_excluded(self):
        fam = [TestFunction(0.2, 1.0), TestFunction(0.9, 1.0)]
        rep = witness_embedding(Pow(4), Pow(4), 0.0, 2.0, fam, SMALL)
        assert [r.c for r in rep.excluded] == [0.9] and rep.bounded
        lines = rep.to_csv().splitlines()
        assert lines[0] == "c,k,src_norm,dst_norm,ratio"
        assert lines[2].split(",")[2] == "inf" and lines[2].endswith(",inf")

    def test_interpolated_pair_and_workers(self):
        fam = [TestFunction(c / 10, 1.0) for c in range(10)]
        phi = InvGeo(Pow(2), Pow(3), 0.5)
        psi = InvGeo(Pow(4), Pow(6), 0.5)
        a = witness_embedding(phi, psi, 0.0, 2.0, fam, SMALL)
        b = witness_embedding(phi, psi, 0.0, 2.0, fam, SMALL, workers=4)
        assert a.bounded and a.to_csv() == b.to_csv()
