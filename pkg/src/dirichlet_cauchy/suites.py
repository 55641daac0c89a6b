"""Named verification suites and asymptotic sweeps.

Each suite draws its cases from ``numpy.random.default_rng(seed)`` so a
``(suite, seed, cases)`` triple always produces the same report.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .arithmetic import acz_fit
from .kernel import cauchy_mean_2q, wilf2_value, wilf_bilinear
from .mult_kernel import CMFunction, f1_check
from .parallel import default_workers
from .poly import DirichletPoly
from .quadrature import log_kernel_identity_check, resummation_bracket
from .random_model import (YDistribution, char_identity_check, exp_abs_sym_exact,
                           theorem_sk_estimate, variance_limit, variance_ytilde)
from .report import LE, REL, ABS, VerificationReport
from .telescope import Regime, cauchy_mean_telescope, lemma_x_bound

# Regression bounds frozen from an empirical sweep (N = 2^4 .. 2^14, random and
# unit coefficients); the printed constants carry a margin over the largest
# observed ratio.
LEMMA_X_BOUNDS = {Regime.SMALL: 2.0, Regime.CRITICAL: 1.5, Regime.LARGE: 2.0}
#: lhs / sum z_j^2 for x_j = z_j / sqrt(j), z_j in [0, 1], s = 1/2
LEMMA_X_HALF_CONSTANT = 2.0
WILF2_BRACKET = (2.5, 4.0)
FOURTH_BRACKET = (2.5, 3.5)
VARIANCE_K = 3.0
RESUM_BRACKET = (0.3, 3.0)


def random_disk(rng: np.random.Generator, N: int) -> np.ndarray:
    """``N`` points uniform in the closed unit disk."""
    r = np.sqrt(rng.random(N))
    return r * np.exp(2j * np.pi * rng.random(N))


def random_instance(rng: np.random.Generator, q: int) -> tuple[DirichletPoly, float]:
    N = int(rng.integers(1, (200 if q == 1 else 60) + 1))
    sigma = float(rng.random())
    s = float(rng.uniform(0.1, 5.0))
    return DirichletPoly(random_disk(rng, N), sigma), s


# ----------------------------------------------------------------------------------------
# verification suites


def _suite_telescope(rep: VerificationReport, rng, cases: int) -> None:
    for i in range(cases):
        q = 1 if i % 2 == 0 else 2
        poly, s = random_instance(rng, q)
        exact = cauchy_mean_2q(poly, s, q).value
        tele = cauchy_mean_telescope(poly, s, q).value
        rep.add({"N": poly.N, "q": q, "sigma": poly.sigma, "s": s}, tele, exact,
                1e-10 if q == 1 else 1e-9, REL)


def _suite_wilf(rep: VerificationReport, rng, cases: int) -> None:
    for _ in range(cases):
        N = int(rng.integers(1, 501))
        x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        if rng.random() < 0.5:
            x = np.abs(x)  # nonnegative vectors come closest to the bound
        rep.add({"N": N}, wilf_bilinear(x), 4.0 * float(np.sum(np.abs(x) ** 2)), 0.0, LE)


def _suite_lemma_x(rep: VerificationReport, rng, cases: int) -> None:
    for i in range(cases):
        N = int(2 ** rng.integers(4, 13))
        s = float([0.1, 0.2, 0.25, 0.5, 1.0][i % 5])
        z = rng.random(N)
        x = z / np.sqrt(np.arange(1, N + 1))
        b = lemma_x_bound(x, s)
        rep.add({"N": N, "s": s, "regime": b.regime.value}, b.ratio,
                LEMMA_X_BOUNDS[b.regime], 0.0, LE)
        if s == 0.5:
            rep.add({"N": N, "s": s, "form": "lhs/sum z^2"}, b.lhs / float(np.sum(z * z)),
                    LEMMA_X_HALF_CONSTANT, 0.0, LE)


def _suite_logkernel(rep: VerificationReport, rng, cases: int) -> None:
    for _ in range(cases):
        N = int(rng.integers(1, 6))
        q = int(rng.integers(1, 3))
        S = float(rng.uniform(0.5, 2.0))
        T = float(rng.uniform(0.5, 3.0))
        poly = DirichletPoly(random_disk(rng, N), float(rng.random()))
        lhs, rhs = log_kernel_identity_check(poly, q, S, T)
        rep.add({"N": N, "q": q, "S": S, "T": T}, lhs, rhs, 1e-5 * max(1.0, abs(rhs)), ABS)


def _suite_resum(rep: VerificationReport, rng, cases: int) -> None:
    lo, hi = RESUM_BRACKET
    for _ in range(cases):
        N = int(rng.integers(1, 6))
        q = int(rng.integers(1, 3))
        s = float(rng.uniform(0.5, 2.0))
        poly = DirichletPoly(np.abs(random_disk(rng, N)), float(rng.random()))
        b = resummation_bracket(poly, None, s, q, J_max=1000)
        # bracket as |ratio - mid| <= half width
        rep.add({"N": N, "q": q, "s": s, "bracket": [lo, hi]}, b.ratio, 0.5 * (lo + hi),
                0.5 * (hi - lo), ABS)


def _suite_f1(rep: VerificationReport, rng, cases: int) -> None:
    grid = [(f, sig, t) for f in ("liouville", "power_damped") for sig in (1.0, 1.25)
            for t in (0.0, 1.0)]
    for name, sigma, t in grid[:max(1, cases)]:
        f = CMFunction.liouville() if name == "liouville" else CMFunction.power_damped(0.25)
        c = f1_check(f, sigma, t)
        rep.add({"f": name, "sigma": sigma, "t": t, "lhs_tail": c.lhs_tail,
                 "rhs_drift": c.rhs_drift}, c.lhs, c.rhs, c.budget, ABS)


def _suite_char(rep: VerificationReport, rng, cases: int) -> None:
    for _ in range(cases):
        N = int(rng.integers(1, 7))
        k = int(rng.integers(1, 4))
        sigma = float(rng.uniform(0.0, 0.99))
        s = float(rng.uniform(0.1, 2.0))
        t = rng.uniform(-50, 50, 64)
        dev = char_identity_check(sigma, N, k, s, t)
        rep.add({"N": N, "k": k, "sigma": sigma, "s": s}, dev, 0.0, 1e-10, ABS)


def _suite_rm1(rep: VerificationReport, rng, cases: int) -> None:
    for _ in range(cases):
        N = int(rng.integers(1, 11))
        k_max = max(1, int(math.floor(math.log(1e4) / math.log(N)))) if N > 1 else 6
        k = int(rng.integers(1, k_max + 1))
        sigma = float(rng.uniform(0.0, 0.99))
        s = float(rng.choice([0.1, 0.5, 1.0, 2.0]))
        y = YDistribution(sigma, N)
        lhs = y.L ** (2 * k) * exp_abs_sym_exact(sigma, N, k, s)
        rhs = cauchy_mean_2q(DirichletPoly.unit(N, sigma), s, k).value
        rep.add({"N": N, "k": k, "sigma": sigma, "s": s}, lhs, rhs, 1e-10, REL)


SUITES: dict[str, Callable] = {
    "wilf": _suite_wilf,
    "lemma-x": _suite_lemma_x,
    "telescope": _suite_telescope,
    "logkernel": _suite_logkernel,
    "resum": _suite_resum,
    "f1": _suite_f1,
    "char": _suite_char,
    "rm1": _suite_rm1,
}


def run_suite(name: str, seed: int = 0, cases: int = 20) -> VerificationReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if cases < 1:
        raise ValueError("cases must be >= 1")
    rep = VerificationReport(name, seed=seed, version=__version__, workers=default_workers())
    start = time.perf_counter()
    SUITES[name](rep, np.random.default_rng(seed), cases)
    rep.elapsed_ms = 1000.0 * (time.perf_counter() - start)
    return rep


# ----------------------------------------------------------------------------------------
# asymptotic sweeps


@dataclass
class Sweep:
    which: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def geometric_grid(lo: float, hi: float, points: int) -> list[int]:
    if not 1 <= lo <= hi:
        raise ValueError("need 1 <= lo <= hi")
    if points < 2 or lo == hi:
        return [int(round(lo))]
    return sorted({int(round(v)) for v in np.geomspace(lo, hi, points)})


def powers_of_two(lo: float, hi: float) -> list[int]:
    a, b = math.ceil(math.log2(lo)), math.floor(math.log2(hi))
    if a > b:
        raise ValueError("range contains no power of two")
    return [2 ** j for j in range(a, b + 1)]


def sweep_wilf2(N_lo: float = 16, N_hi: float = 65536) -> Sweep:
    sw = Sweep("wilf2", ["N", "W", "W_over_logN"])
    ratios = []
    for N in powers_of_two(N_lo, N_hi):
        W = wilf2_value(N)
        ratios.append(W / math.log(N))
        sw.rows.append([N, W, ratios[-1]])
    lo, hi = WILF2_BRACKET
    sw.summary = {"min": min(ratios), "max": max(ratios), "max_over_min": max(ratios) / min(ratios),
                  "bracket": list(WILF2_BRACKET),
                  "pass": lo <= min(ratios) and max(ratios) <= hi and max(ratios) / min(ratios) < 2}
    return sw


def fourth_moment(N: int) -> float:
    """``J(N)``: fourth Cauchy moment of ``sum n^{-1} n^{-it/2}``."""
    poly = DirichletPoly(1.0 / np.arange(1, N + 1, dtype=float))
    return cauchy_mean_telescope(poly, 0.5, 2).value


def sweep_fourth(N_lo: float = 32, N_hi: float = 4096) -> Sweep:
    sw = Sweep("fourth", ["N", "J", "J_over_log3N"])
    ratios = []
    for N in powers_of_two(N_lo, N_hi):
        J = fourth_moment(N)
        ratios.append(J / math.log(N) ** 3)
        sw.rows.append([N, J, ratios[-1]])
    lo, hi = FOURTH_BRACKET
    sw.summary = {"min": min(ratios), "max": max(ratios), "max_over_min": max(ratios) / min(ratios),
                  "bracket": list(FOURTH_BRACKET),
                  "pass": lo <= min(ratios) and max(ratios) <= hi
                  and max(ratios) / min(ratios) < 4}
    return sw


def sweep_acz(N_lo: float = 256, N_hi: float = 3000, points: int = 12) -> Sweep:
    fit = acz_fit(int(N_lo), int(N_hi))
    sw = Sweep("acz", ["N", "count", "count_over_N2logN"])
    wanted = set(geometric_grid(N_lo, N_hi, points))
    for N, c in zip(fit.N, fit.counts):
        if int(N) in wanted:
            sw.rows.append([int(N), int(c), float(c / (N * N * math.log(N)))])
    target = fit.leading_target
    sw.summary = {"a": fit.a, "b": fit.b, "target": target,
                  "relative_error": abs(fit.a - target) / target,
                  "pass": abs(fit.a - target) <= 0.1 * target}
    return sw


def sweep_variance(sigma: float = 0.5, N_lo: float = 1e3, N_hi: float = 1e6,
                   points: int = 7) -> Sweep:
    sw = Sweep("variance", ["sigma", "N", "c_sigma_N", "limit", "abs_diff", "K"])
    worst = 0.0
    for N in geometric_grid(N_lo, N_hi, points):
        c = variance_ytilde(sigma, N)
        lim = variance_limit(sigma)
        K = abs(c - lim) / (N ** (sigma - 1) * math.log(N) ** 2)
        worst = max(worst, K)
        sw.rows.append([sigma, N, c, lim, abs(c - lim), K])
    sw.summary = {"max_K": worst, "pinned_K": VARIANCE_K, "pass": worst <= VARIANCE_K}
    return sw


def trend_ok(errors: list[float], stderrs: list[float]) -> bool:
    """Errors do not grow by more than twice the combined standard error."""
    return all(abs(errors[i + 1]) <= abs(errors[i]) + 2.0 * math.hypot(stderrs[i], stderrs[i + 1])
               for i in range(len(errors) - 1))


def sweep_theorem_sk(sigma: float = 0.0, N: int = 100, k_lo: float = 100,
                     k_hi: float = 6400, factor: int = 4, samples: int = 1_000_000,
                     seed: int = 7, workers: int | None = None) -> Sweep:
    ks, k = [], int(k_lo)
    while k <= k_hi:
        ks.append(k)
        k *= factor
    sw = Sweep("theorem-sk", ["sigma", "N", "k", "M", "seed", "shards", "estimate", "stderr",
                              "c0", "abs_error"])
    errs, ses = [], []
    for k in ks:
        est = theorem_sk_estimate(sigma, N, k, samples, seed, workers=workers)
        d = est.as_dict()
        sw.rows.append([d[c] for c in sw.columns])
        errs.append(est.estimate - est.c0)
        ses.append(est.stderr)
    sw.summary = {"trend_ok": trend_ok(errs, ses), "max_abs_error": max(abs(e) for e in errs),
                  "pass": trend_ok(errs, ses)}
    return sw
