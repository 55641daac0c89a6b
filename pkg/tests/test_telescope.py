import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dirichlet_cauchy.errors import CapacityError
from dirichlet_cauchy.kernel import cauchy_mean_2q
from dirichlet_cauchy.poly import DirichletPoly
from dirichlet_cauchy.telescope import (Regime, TelescopeWeights, cauchy_mean_2_telescope,
                                        cauchy_mean_4_telescope, cauchy_mean_telescope,
                                        lemma_x_bound, regime_of, telescope_tuple_sum)

from strategies import polys


def P(*c, sigma=0.0):
    return DirichletPoly(np.array(c, dtype=complex), sigma)


class TestWeights:
    @given(st.floats(1e-3, 5.0), st.integers(1, 10_000))
    def test_telescoping_total(self, s, J):
        w = TelescopeWeights(s, J)
        assert math.fsum(w.weights) == pytest.approx(J ** (2 * s), rel=1e-12)
        assert w.total() == pytest.approx(J ** (2 * s), rel=1e-12)

    @given(st.floats(1e-4, 5.0), st.integers(1, 2000))
    def test_positive(self, s, J):
        assert np.all(TelescopeWeights(s, J).weights > 0)

    def test_small_s_accuracy(self):
        # j^{2s} - (j-1)^{2s} ~ 2s j^{2s-1}; naive subtraction would lose all digits here
        s, J = 1e-9, 10 ** 6
        w = TelescopeWeights(s, J).weights
        j = float(J)
        exact = math.expm1(2 * s * math.log(j)) - math.expm1(2 * s * math.log(j - 1))
        assert w[-1] == pytest.approx(exact, rel=1e-6)


class TestExamples:
    def test_single(self):
        for s in (0.1, 1.0, 9.0):
            assert cauchy_mean_2_telescope(P(1), s).value == pytest.approx(1.0)
            assert cauchy_mean_4_telescope(P(1), s).value == pytest.approx(1.0)

    def test_two_terms(self):
        expect = (1 + 2 ** -0.5) ** 2 + (2 - 1) * (2 ** -0.5) ** 2
        assert cauchy_mean_2_telescope(P(1, 1), 0.5).value == pytest.approx(expect, rel=1e-14)
        assert expect == pytest.approx(3.414214, abs=1e-6)

    def test_three_terms(self):
        assert cauchy_mean_2_telescope(P(1, 1, 1), 0.5).value == pytest.approx(7.201908, abs=1e-6)

    def test_fourth_two_terms(self):
        a = cauchy_mean_4_telescope(P(1, 1), 0.5).value
        assert a == pytest.approx(cauchy_mean_2q(P(1, 1), 0.5, 2).value, rel=1e-10)

    def test_rejects_nonpositive_s(self):
        with pytest.raises(ValueError):
            cauchy_mean_2_telescope(P(1, 1), 0.0)

    def test_overflow_guard(self):
        with pytest.raises(CapacityError):
            cauchy_mean_telescope(DirichletPoly.unit(10 ** 7), 1.0, 3)


class TestEquivalence:
    @given(polys(200), st.floats(0.1, 5.0))
    def test_q1_matches_kernel(self, p, s):
        a = cauchy_mean_2_telescope(p, s).value
        b = cauchy_mean_2q(p, s, 1).value
        assert abs(a - b) <= 1e-10 * b + 1e-14 * p.abs_sum() ** 2

    @given(polys(60), st.floats(0.1, 5.0))
    def test_q2_matches_kernel(self, p, s):
        a = cauchy_mean_4_telescope(p, s).value
        b = cauchy_mean_2q(p, s, 2).value
        assert abs(a - b) <= 1e-9 * b + 1e-14 * p.abs_sum() ** 4

    @given(polys(12), st.floats(0.1, 3.0), st.integers(1, 3))
    def test_literal_tuple_sum(self, p, s, q):
        # the j = 1 .. N^q form with empty tail values in the gaps
        a = telescope_tuple_sum(p, s, q)
        b = cauchy_mean_2q(p, s, q).value
        assert abs(a - b) <= 1e-10 * b + 1e-13 * p.abs_sum() ** (2 * q)

    def test_fourth_moment_law(self):
        ratios = []
        for j in range(5, 11):
            N = 2 ** j
            J = cauchy_mean_4_telescope(DirichletPoly(1 / np.arange(1, N + 1)), 0.5).value
            ratios.append(J / math.log(N) ** 3)
        assert max(ratios) / min(ratios) < 1.2


class TestLemmaX:
    def test_regimes(self):
        assert regime_of(0.1) is Regime.SMALL
        assert regime_of(0.25) is Regime.CRITICAL
        assert regime_of(0.7) is Regime.LARGE

    def test_point_mass(self):
        b = lemma_x_bound([1.0, 0, 0, 0], 0.8)
        assert (b.lhs, b.rhs, b.ratio) == pytest.approx((1.0, 1.0, 1.0))

    def test_rhs_forms(self):
        x = np.array([0.0, 1.0, 2.0])
        mu = np.arange(1, 4)
        assert lemma_x_bound(x, 0.1).rhs == pytest.approx(np.sum(x ** 2 * mu ** 1.3))
        assert lemma_x_bound(x, 0.25).rhs == pytest.approx(np.sum(x ** 2 * mu * np.log(mu)))
        assert lemma_x_bound(x, 2.0).rhs == pytest.approx(np.sum(x ** 2 * mu))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            lemma_x_bound([1.0, -1.0], 0.5)

    def test_zero_rhs(self):
        # a point mass at mu = 1 has zero mu log mu weight
        assert lemma_x_bound([1.0], 0.25).ratio == math.inf
        assert lemma_x_bound([0.0, 0.0], 0.25).ratio == 0.0

    @pytest.mark.parametrize("s,bound", [(0.1, 2.0), (0.2, 2.0), (0.25, 1.5), (0.5, 2.0),
                                         (1.0, 2.0)])
    def test_ratios_bounded_across_N(self, s, bound):
        rng = np.random.default_rng(11)
        for j in range(4, 15):
            N = 2 ** j
            x = rng.random(N) / np.sqrt(np.arange(1, N + 1))
            assert lemma_x_bound(x, s).ratio <= bound
            assert lemma_x_bound(np.ones(N), s).ratio <= bound

    def test_half_constant_stable(self):
        rng = np.random.default_rng(5)
        cs = []
        for j in range(4, 15):
            N = 2 ** j
            z = rng.random(N)
            cs.append(lemma_x_bound(z / np.sqrt(np.arange(1, N + 1)), 0.5).lhs / np.sum(z * z))
        assert max(cs) <= 2.0
        assert max(cs[3:]) / min(cs[3:]) < 1.2
