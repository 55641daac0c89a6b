import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from dirichlet_cauchy.errors import CapacityError
from dirichlet_cauchy.kernel import cauchy_mean_2q, limit_s_infinity
from dirichlet_cauchy.poly import DirichletPoly
from dirichlet_cauchy.quadrature import finite_mean_value
from dirichlet_cauchy.random_model import (SkDistribution, SkSampler, YDistribution, _merge,
                                           c0_closed_form, c0_constant, char_identity_check,
                                           exp_abs_sym_charfn, exp_abs_sym_exact,
                                           finite_t_relation, self_convolution,
                                           theorem_sk_estimate, variance_limit, variance_ytilde)


class TestY:
    @given(st.floats(0.0, 0.999), st.integers(1, 2000))
    def test_pmf(self, sigma, N):
        y = YDistribution(sigma, N)
        assert math.fsum(y.pmf) == pytest.approx(1.0, abs=1e-12)
        assert np.all(y.pmf > 0) and np.all(np.diff(y.atoms) > 0)

    def test_rejects(self):
        with pytest.raises(ValueError):
            YDistribution(1.0, 5)
        with pytest.raises(ValueError):
            YDistribution(0.5, 0)


class TestSk:
    @pytest.mark.parametrize("sigma,N,k", [(0.0, 4, 3), (0.5, 6, 2), (0.9, 3, 4), (0.2, 1, 5)])
    def test_matches_self_convolution(self, sigma, N, k):
        y = YDistribution(sigma, N)
        law = SkDistribution.from_model(y, k)
        ref = self_convolution(y, k)
        assert sorted(ref) == law.keys.tolist()
        np.testing.assert_allclose(law.probs, [ref[m] for m in law.keys.tolist()],
                                   rtol=1e-12, atol=1e-15)
        assert math.fsum(law.probs) == pytest.approx(1.0, abs=1e-10)
        assert law.keys.size <= N ** k


class TestIdentities:
    def test_char_trivial(self):
        assert char_identity_check(0.3, 1, 4, 1.0, np.linspace(-9, 9, 19)) == 0.0

    def test_char_examples(self):
        t = np.linspace(-40, 40, 161)
        assert char_identity_check(0.0, 2, 1, 1.0, t) <= 1e-12
        assert char_identity_check(0.5, 3, 2, 0.5, t) <= 1e-10

    def test_exp_abs_examples(self):
        assert exp_abs_sym_exact(0.3, 5, 2, 0.0) == 1.0
        assert exp_abs_sym_exact(0.0, 2, 1, 0.5) == pytest.approx((2 + math.sqrt(2)) / 4, rel=1e-14)

    def test_exp_abs_large_s(self):
        y = YDistribution(0.4, 4)
        limit = limit_s_infinity(DirichletPoly.unit(4, 0.4), 3) / y.L ** 6
        assert exp_abs_sym_exact(0.4, 4, 3, 500.0) == pytest.approx(limit, rel=1e-12)
        law = SkDistribution.from_model(y, 3)
        assert limit == pytest.approx(float(np.sum(law.probs ** 2)), rel=1e-12)

    @given(st.floats(0.0, 0.99), st.integers(1, 8), st.integers(1, 4), st.floats(0.05, 3.0))
    def test_rm1_equality(self, sigma, N, k, s):
        y = YDistribution(sigma, N)
        lhs = y.L ** (2 * k) * exp_abs_sym_exact(sigma, N, k, s)
        rhs = cauchy_mean_2q(DirichletPoly.unit(N, sigma), s, k).value
        assert lhs == pytest.approx(rhs, rel=1e-10)

    @pytest.mark.parametrize("sigma,N,k,s,T", [(0.0, 2, 1, 1.0, 10.0), (0.5, 3, 2, 0.5, 7.0),
                                               (0.25, 4, 2, 1.0, 50.0)])
    def test_finite_T(self, sigma, N, k, s, T):
        lhs = finite_mean_value(DirichletPoly.unit(N, sigma), k, T, s=s)
        assert lhs == pytest.approx(finite_t_relation(sigma, N, k, s, T), rel=1e-10)

    def test_finite_T_two_atoms_closed_form(self):
        # (1/2T) int |1 + 2^{-it}|^2 = 2 + 2 sin(T log 2)/(T log 2)
        T = 13.0
        v = finite_t_relation(0.0, 2, 1, 1.0, T)
        assert v == pytest.approx(2 + 2 * math.sin(T * math.log(2)) / (T * math.log(2)), rel=1e-13)

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            finite_t_relation(0.0, 100, 3, 1.0, 1.0)

    @pytest.mark.parametrize("k", [200, 800, 3000])
    def test_charfn_route(self, k):
        # the characteristic-function integral against the exact pair sum where both fit
        sigma, N = 0.2, 12
        s = 1 / math.sqrt(k * variance_ytilde(sigma, N))
        got = exp_abs_sym_charfn(sigma, N, k, s)
        # with s ~ 1/s_k the integral is close to its Gaussian limit
        assert got == pytest.approx(c0_closed_form(), abs=5e-3)

    def test_charfn_exact_small(self):
        # small k is outside the intended range: the cut-off ignores recurrences of |phi|,
        # so agreement is loose but must improve as k grows
        gaps = []
        for k in (4, 6):
            s = 1 / math.sqrt(k * variance_ytilde(0.0, 5))
            gaps.append(abs(exp_abs_sym_charfn(0.0, 5, k, s) - exp_abs_sym_exact(0.0, 5, k, s)))
        assert gaps[1] < gaps[0] < 1e-3


class TestVariance:
    def test_single_atom(self):
        assert variance_ytilde(0.3, 1) == 0.0

    def test_direct_sum(self):
        N, sigma = 50, 0.4
        n = np.arange(1, N + 1)
        p = n ** -sigma / np.sum(n ** -sigma)
        lg = np.log(n)
        assert variance_ytilde(sigma, N) == pytest.approx(2 * (p @ lg ** 2 - (p @ lg) ** 2),
                                                          rel=1e-12)

    @pytest.mark.parametrize("sigma", [0.0, 0.25, 0.5, 0.75])
    def test_approaches_limit(self, sigma):
        gaps = [abs(variance_ytilde(sigma, N) - variance_limit(sigma)) for N in (10 ** 3, 10 ** 5)]
        assert gaps[1] < gaps[0]

    def test_sigma_half_large_N(self):
        assert abs(variance_ytilde(0.5, 10 ** 6) - 8.0) < 0.35


class TestC0:
    def test_value(self):
        assert 0.52 < c0_constant() < 0.53

    def test_closed_form(self):
        assert c0_constant() == pytest.approx(c0_closed_form(), abs=1e-12)

    def test_dominance(self):
        half = math.exp(0.125) * math.erfc(0.5 / math.sqrt(2))  # E e^{-|g|/2}
        assert c0_constant() < half

    def test_against_sampling(self):
        g = np.random.default_rng(0).standard_normal(400_000)
        v = np.exp(-np.abs(g))
        assert abs(v.mean() - c0_constant()) < 4 * v.std() / math.sqrt(g.size)


class TestSampler:
    def test_y_law(self):
        y = YDistribution(0.6, 7)
        sampler = SkSampler(y, 1, seed=12)
        draws = sampler.sample_y(200_000)
        idx = np.rint(np.exp(draws)).astype(int)
        counts = np.bincount(idx, minlength=8)[1:]
        res = stats.chisquare(counts, y.pmf * draws.size)
        assert res.pvalue > 1e-4

    @pytest.mark.parametrize("block", [1, 2, 3])
    def test_sk_law(self, block):
        y = YDistribution(0.3, 4)
        law = SkSampler(y, 5, seed=99, block=block)
        draws = law.sample(200_000)
        exact = SkDistribution.from_model(y, 5)
        keys = np.rint(np.exp(draws)).astype(np.int64)
        pos = np.searchsorted(exact.keys, keys)
        assert np.all(exact.keys[pos] == keys)
        counts = np.bincount(pos, minlength=exact.keys.size)
        keep = exact.probs * draws.size >= 5
        obs, exp = counts[keep], exact.probs[keep] * draws.size
        if not keep.all():
            obs = np.r_[obs, counts[~keep].sum()]
            exp = np.r_[exp, exact.probs[~keep].sum() * draws.size]
        assert stats.chisquare(obs, exp).pvalue > 1e-4

    def test_block_sum_matches_individual_draws_in_mean(self):
        y = YDistribution(0.0, 30)
        s = SkSampler(y, 9, seed=1).sample(100_000)
        assert np.mean(s) == pytest.approx(9 * y.mean, rel=2e-3)
        assert np.var(s) == pytest.approx(9 * y.variance, rel=2e-2)

    def test_reproducible(self):
        y = YDistribution(0.1, 20)
        a = SkSampler(y, 7, seed=5).sample(1000)
        b = SkSampler(y, 7, seed=5).sample(1000)
        c = SkSampler(y, 7, seed=6).sample(1000)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_auto_block(self):
        assert SkSampler(YDistribution(0.0, 100), 2500).block == 3
        assert SkSampler(YDistribution(0.0, 100), 2).block == 2


class TestMonteCarlo:
    def test_degenerate(self):
        r = theorem_sk_estimate(0.0, 1, 50, 1000, seed=3)
        assert r.estimate == 1.0 and r.stderr == 0.0

    def test_unbiased(self):
        # N = 2, k = 1: S~ in {0, +-log 2} and s_1 = log 2 / sqrt(2)
        exact = 0.5 + 0.5 * math.exp(-math.sqrt(2))
        assert exp_abs_sym_exact(0.0, 2, 1, math.sqrt(2) / math.log(2)) == pytest.approx(exact)
        hits = 0
        for seed in range(30):
            r = theorem_sk_estimate(0.0, 2, 1, 20_000, seed=seed)
            hits += abs(r.estimate - exact) <= 3 * r.stderr
        assert hits == 30

    def test_matches_charfn_oracle(self):
        r = theorem_sk_estimate(0.0, 50, 300, 200_000, seed=11)
        exact = exp_abs_sym_charfn(0.0, 50, 300, 1 / r.s_k)
        assert abs(r.estimate - exact) <= 4 * r.stderr

    def test_workers_do_not_change_result(self):
        a = theorem_sk_estimate(0.2, 30, 40, 20_000, seed=8, shards=5, workers=1)
        b = theorem_sk_estimate(0.2, 30, 40, 20_000, seed=8, shards=5, workers=3)
        assert a == b

    def test_shards_change_stream(self):
        a = theorem_sk_estimate(0.2, 30, 40, 20_000, seed=8, shards=4)
        b = theorem_sk_estimate(0.2, 30, 40, 20_000, seed=8, shards=5)
        assert a.estimate != b.estimate

    def test_report_fields(self):
        d = theorem_sk_estimate(0.0, 10, 20, 1000, seed=1).as_dict()
        assert set(d) == {"sigma", "N", "k", "M", "seed", "shards", "estimate", "stderr", "c0",
                          "abs_error"}

    @settings(max_examples=40)
    @given(st.lists(st.lists(st.floats(-10, 10), min_size=0, max_size=20), min_size=1,
                    max_size=6))
    def test_merge_matches_pooled(self, chunks):
        stats_ = []
        for c in chunks:
            a = np.asarray(c, dtype=float)
            m = float(a.mean()) if a.size else 0.0
            stats_.append((a.size, m, float(np.sum((a - m) ** 2)) if a.size else 0.0))
        n, mean, m2 = _merge(stats_)
        pooled = np.concatenate([np.asarray(c, dtype=float) for c in chunks])
        assert n == pooled.size
        if n:
            assert mean == pytest.approx(pooled.mean(), abs=1e-9)
            assert m2 == pytest.approx(np.sum((pooled - pooled.mean()) ** 2), abs=1e-7)
