"""End-to-end acceptance criteria, each with its tolerance and wall-clock budget.

Every test records one ``ACn PASS|FAIL`` line, printed together at the end
of the pytest run.
"""
import math
import time

import numpy as np
import pytest

from dirichlet_cauchy.kernel import cauchy_mean_2q, wilf_bilinear
from dirichlet_cauchy.mult_kernel import CMFunction, f1_check
from dirichlet_cauchy.poly import DirichletPoly
from dirichlet_cauchy.quadrature import (cauchy_mean_quadrature, finite_mean_value,
                                         log_kernel_identity_check, lubinsky_scaling_check)
from dirichlet_cauchy.random_model import YDistribution, exp_abs_sym_exact, theorem_sk_estimate
from dirichlet_cauchy.suites import (random_instance, sweep_acz, sweep_fourth, sweep_theorem_sk,
                                     sweep_variance, sweep_wilf2)
from dirichlet_cauchy.telescope import cauchy_mean_telescope

pytestmark = pytest.mark.acceptance


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def record(log, n, ok, detail, seconds, budget):
    fast = seconds < budget
    status = "PASS" if ok and fast else "FAIL"
    log(f"AC{n} {status}  {detail}  [{seconds:.1f}s / {budget:.0f}s]")
    assert ok, detail
    assert fast, f"took {seconds:.1f}s, budget {budget}s"


def test_ac1_method_equivalence(acceptance_log):
    rng = np.random.default_rng(2024)
    worst_tele = worst_quad = 0.0
    with Timer() as t:
        for i in range(200):
            q = 1 + i % 2
            poly, s = random_instance(rng, q)
            exact = cauchy_mean_2q(poly, s, q).value
            tele = cauchy_mean_telescope(poly, s, q).value
            quad = cauchy_mean_quadrature(poly, s, q).value
            worst_tele = max(worst_tele, abs(tele - exact) / exact)
            worst_quad = max(worst_quad, abs(quad - exact) / exact, abs(quad - tele) / tele)
    ok = worst_tele <= 1e-10 and worst_quad <= 1e-8
    record(acceptance_log, 1, ok,
           f"kernel/telescope rel {worst_tele:.2e} (<=1e-10), quadrature rel {worst_quad:.2e} "
           f"(<=1e-8)", t.seconds, 120)


def test_ac2_large_s_limit(acceptance_log):
    with Timer() as t:
        v = cauchy_mean_2q(DirichletPoly.unit(2), 200.0, 2).value
    record(acceptance_log, 2, abs(v - 6.0) <= 1e-3, f"value {v:.9f} vs 6 +- 1e-3", t.seconds, 1)


def test_ac3_wilf_bound(acceptance_log):
    rng = np.random.default_rng(3)
    violations, worst = 0, 0.0
    with Timer() as t:
        for i in range(1000):
            N = int(rng.integers(1, 501))
            x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
            if i % 2:
                x = np.abs(x)
            ratio = wilf_bilinear(x) / float(np.sum(np.abs(x) ** 2))
            worst = max(worst, ratio)
            violations += ratio > 4.0
    record(acceptance_log, 3, violations == 0,
           f"{violations} violations, max ratio {worst:.4f} (bound 4)", t.seconds, 30)


def test_ac4_log_law(acceptance_log):
    with Timer() as t:
        sw = sweep_wilf2(2 ** 4, 2 ** 16)
    s = sw.summary
    record(acceptance_log, 4, s["pass"],
           f"W/logN in [{s['min']:.3f}, {s['max']:.3f}] within {s['bracket']}, "
           f"max/min {s['max_over_min']:.3f} (<2)", t.seconds, 60)


def test_ac5_fourth_moment(acceptance_log):
    with Timer() as t:
        sw = sweep_fourth(2 ** 5, 2 ** 12)
    s = sw.summary
    record(acceptance_log, 5, s["pass"] and s["max_over_min"] < 4,
           f"J/log^3N in [{s['min']:.3f}, {s['max']:.3f}], max/min {s['max_over_min']:.3f} (<4)",
           t.seconds, 120)


def test_ac6_acz(acceptance_log, tmp_path, monkeypatch):
    monkeypatch.setenv("DIRICHLET_CAUCHY_CACHE", str(tmp_path))
    with Timer() as t:
        sw = sweep_acz(256, 3000)
    s = sw.summary
    record(acceptance_log, 6, s["relative_error"] <= 0.1,
           f"a = {s['a']:.5f} vs 12/pi^2 = {s['target']:.5f} (rel {s['relative_error']:.3%}, "
           f"<=10%)", t.seconds, 180)


def test_ac7_variance(acceptance_log):
    with Timer() as t:
        sweeps = [sweep_variance(sigma, 1e3, 1e6, 7) for sigma in (0.0, 0.25, 0.5, 0.75)]
    worst = max(sw.summary["max_K"] for sw in sweeps)
    pinned = sweeps[0].summary["pinned_K"]
    record(acceptance_log, 7, all(sw.summary["pass"] for sw in sweeps),
           f"max |c - 2/(1-s)^2| / (N^(s-1) log^2 N) = {worst:.3f} <= K = {pinned}",
           t.seconds, 60)


def test_ac8_theorem_sk(acceptance_log):
    with Timer() as t:
        est = theorem_sk_estimate(0.0, 100, 2500, 1_000_000, seed=7)
        sw = sweep_theorem_sk(0.0, 100, 100, 6400, factor=4, samples=1_000_000, seed=7)
    errs = ", ".join(f"{row[2]}:{row[-1]:.1e}" for row in sw.rows)
    ok = est.abs_error <= 0.05 and sw.summary["trend_ok"]
    record(acceptance_log, 8, ok,
           f"k=2500 estimate {est.estimate:.5f} +- {est.stderr:.1e}, |err| {est.abs_error:.1e} "
           f"(<=0.05); |err| by k {errs}", t.seconds, 120)


def rm1_pairs(limit=10 ** 4, k_single=13):
    for N in range(2, limit + 1):
        k = 1
        while N ** k <= limit:
            yield N, k
            k += 1
    for k in range(1, k_single + 1):  # N = 1 satisfies N^k <= limit for every k
        yield 1, k


def test_ac9_rm1_exact(acceptance_log):
    worst, count = 0.0, 0
    with Timer() as t:
        for N, k in rm1_pairs():
            sigma = round(0.99 * ((N * 0.6180339887) % 1.0), 4)
            y = YDistribution(sigma, N)
            poly = DirichletPoly.unit(N, sigma)
            for s in (0.1, 0.5, 1.0, 2.0):
                lhs = y.L ** (2 * k) * exp_abs_sym_exact(sigma, N, k, s)
                rhs = cauchy_mean_2q(poly, s, k).value
                worst = max(worst, abs(lhs - rhs) / rhs)
                count += 1
    record(acceptance_log, 9, worst <= 1e-10,
           f"{count} (N,k,s) cases, max rel deviation {worst:.2e} (<=1e-10)", t.seconds, 60)


LUBINSKY_GRID = [((1.0,), 0.0, 1.0, 1), ((1.0, 1.0), 0.0, 1.0, 1), ((1.0, 1.0, 1.0), 0.0, 2.0, 1),
                 ((1.0, 0.5, -0.25), 0.3, 0.5, 2)]
LOG_KERNEL_GRID = [((1.0,), 1.0, 2.0, 1), ((1.0, 1.0), 1.0, math.sqrt(2), 1),
                   ((1.0, 1j, 0.5), 0.7, 1.5, 2)]


def test_ac10_bridges(acceptance_log):
    with Timer() as t:
        lub = max(abs(l - r) for l, r in (lubinsky_scaling_check(DirichletPoly(x, sg), q, s)
                                          for x, sg, s, q in LUBINSKY_GRID))
        logk = max(abs(l - r) for l, r in (log_kernel_identity_check(DirichletPoly(x), q, S, T)
                                           for x, S, T, q in LOG_KERNEL_GRID))
        closed = 0.0
        for T in (10.0, 100.0, 1000.0):
            v = finite_mean_value(DirichletPoly.unit(2), 1, T)
            u = T * math.log(2)
            closed = max(closed, abs(v - (2 + 2 * math.sin(u) / u)))
    ok = lub <= 1e-5 and logk <= 1e-5 and closed <= 1e-10
    record(acceptance_log, 10, ok,
           f"lubinsky {lub:.1e}, log kernel {logk:.1e} (<=1e-5); closed form {closed:.1e} "
           f"(<=1e-10)", t.seconds, 60)


def test_ac11_f1(acceptance_log):
    with Timer() as t:
        checks = [f1_check(CMFunction.liouville(), 1.0, t_) for t_ in (0.0, 1.0)]
    detail = "; ".join(f"t={c.t:g}: |lhs-rhs| {c.difference:.1e} <= budget {c.budget:.1e}"
                       for c in checks)
    ok = all(c.passed and c.budget <= 1e-2 for c in checks)
    record(acceptance_log, 11, ok, detail + " (target <=1e-2)", t.seconds, 120)
