"""Telescoping representation of Cauchy means.

The Cauchy mean of ``|D(st)|^2`` is ``sum_j w_j |sum_{mu>=j} y_mu mu^-s|^2``
with increments ``w_j = j^(2s) - (j-1)^(2s)`` (the variances of Brownian
increments over ``[(j-1)^(2s), j^(2s)]``).  For higher moments the same
formula runs over the product support, where tails are piecewise constant.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._numerics import decayed_suffix
from .kernel import CauchyMeanResult, Method
from .poly import DirichletPoly, convolution_power


def _increment_fraction(ratio_log: np.ndarray, s: float) -> np.ndarray:
    """``1 - exp(-2 s * ratio_log)`` without cancellation."""
    return -np.expm1(-2.0 * s * ratio_log)


@dataclass(frozen=True)
class TelescopeWeights:
    s: float
    J: int

    @property
    def weights(self) -> np.ndarray:
        j = np.arange(1, self.J + 1, dtype=float)
        # j^(2s) (1 - (1 - 1/j)^(2s)); log1p keeps large j accurate
        frac = np.ones(self.J)
        frac[1:] = _increment_fraction(-np.log1p(-1.0 / j[1:]), self.s)
        return j ** (2 * self.s) * frac

    def total(self) -> float:
        return float(math.fsum(self.weights))


def _support_sum(keys: np.ndarray, vals: np.ndarray, s: float) -> float:
    """``sum_k (p_k^(2s) - p_(k-1)^(2s)) |sum_{i>=k} b_i p_i^-s|^2`` with ``p_0 = 0``.

    Each term is rewritten as ``(1 - (p_(k-1)/p_k)^(2s)) |sum_{i>=k} b_i (p_k/p_i)^s|^2``.
    """
    lg = np.log(keys.astype(float))
    tails = vals + decayed_suffix(vals, lg, s)
    frac = np.ones(keys.size)
    frac[1:] = _increment_fraction(lg[1:] - lg[:-1], s)
    return float(np.sum(frac * np.abs(tails) ** 2))


def cauchy_mean_2_telescope(poly: DirichletPoly, s: float) -> CauchyMeanResult:
    """Second moment via ``sum_{j<=N} w_j |sum_{mu>=j} y_mu / mu^s|^2`` in O(N)."""
    if not s > 0:
        raise ValueError("telescoping needs s > 0")
    y = poly.weighted()
    keys = np.arange(1, poly.N + 1, dtype=np.int64)
    return CauchyMeanResult(_support_sum(keys, y, float(s)), Method.TELESCOPE, cost=poly.N)


def cauchy_mean_telescope(poly: DirichletPoly, s: float, q: int = 1) -> CauchyMeanResult:
    """``2q``-th moment by telescoping over the sorted product support."""
    if q == 1:
        return cauchy_mean_2_telescope(poly, s)
    if not s > 0:
        raise ValueError("telescoping needs s > 0")
    cc = convolution_power(poly, q, weighted=True)
    value = _support_sum(cc.keys, cc.values, float(s))
    return CauchyMeanResult(value, Method.TELESCOPE, cost=len(cc))


def cauchy_mean_4_telescope(poly: DirichletPoly, s: float) -> CauchyMeanResult:
    return cauchy_mean_telescope(poly, s, q=2)


def telescope_tuple_sum(poly: DirichletPoly, s: float, q: int) -> float:
    """Literal ``sum_{j=1}^{N^q} w_j |sum_{prod >= j} ...|^2`` over every j (small N only)."""
    cc = convolution_power(poly, q, weighted=True)
    J = int(cc.keys[-1])
    dense = np.zeros(J, dtype=np.complex128)
    dense[cc.keys - 1] = cc.values * cc.keys.astype(float) ** (-s)
    tails = np.cumsum(dense[::-1])[::-1]
    w = TelescopeWeights(s, J).weights
    return float(np.sum(w * np.abs(tails) ** 2))


class Regime(enum.Enum):
    SMALL = "0<s<1/4"
    CRITICAL = "s=1/4"
    LARGE = "s>1/4"


def regime_of(s: float) -> Regime:
    if math.isclose(s, 0.25, rel_tol=0.0, abs_tol=1e-12):
        return Regime.CRITICAL
    return Regime.SMALL if s < 0.25 else Regime.LARGE


@dataclass(frozen=True)
class LemmaXBound:
    lhs: float
    rhs: float
    regime: Regime

    @property
    def ratio(self) -> float:
        if self.rhs == 0.0:
            return math.inf if self.lhs > 0 else 0.0
        return self.lhs / self.rhs


def lemma_x_bound(x, s: float) -> LemmaXBound:
    """Telescoped sum of ``x_mu / mu^s`` tails against its regime majorant (no constant)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("coefficients must be nonnegative")
    if not s > 0:
        raise ValueError("s must be > 0")
    lhs = cauchy_mean_2_telescope(DirichletPoly(x), s).value
    mu = np.arange(1, x.size + 1, dtype=float)
    reg = regime_of(s)
    if reg is Regime.SMALL:
        rhs = np.sum(x ** 2 * mu ** (1.5 - 2 * s))
    elif reg is Regime.CRITICAL:
        rhs = np.sum(x ** 2 * mu * np.log(mu))
    else:
        rhs = np.sum(x ** 2 * mu)
    return LemmaXBound(lhs, float(rhs), reg)
