"""Cauchy means as bilinear kernel sums over the convolution support.

For ``g(t) = |sum_n x_n n^(-sigma - i s t)|^(2q)`` the Cauchy mean
``int g(t) dt / (pi (1 + t^2))`` equals the exact finite sum
``sum_{j,k} conj(a_j) a_k (min(j,k)/max(j,k))^s`` over the convolution
coefficients ``a`` of the sigma-weighted polynomial.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._numerics import decayed_prefix
from .poly import MAX_INVERSE, ConvolutionCoeffs, DirichletPoly, KernelSpec, convolution_power


class Method(enum.Enum):
    KERNEL_SUM = "kernel"
    TELESCOPE = "telescope"
    QUADRATURE = "quadrature"
    RANDOM_MODEL_EXACT = "random_model_exact"


@dataclass(frozen=True)
class CauchyMeanResult:
    value: float
    method: Method
    cost: int
    error_bound: float = 0.0

    def __float__(self):
        return self.value

    def as_dict(self) -> dict:
        return {"value": self.value, "method": self.method.value,
                "cost": self.cost, "error_bound": self.error_bound}


def kernel_sum(coeffs: ConvolutionCoeffs, s: float) -> float:
    """``sum_{j,k} conj(a_j) a_k exp(-s |log j - log k|)`` in O(support)."""
    a = coeffs.values
    lg = coeffs.logs()
    diag = float(np.sum(np.abs(a) ** 2))
    if a.size == 1:
        return diag
    r = decayed_prefix(a, lg, s)
    return diag + 2.0 * float(np.real(np.sum(a * np.conj(r))))


def kernel_sum_pairwise(coeffs: ConvolutionCoeffs, s: float, block: int = 2048) -> float:
    """Direct double sum with kernel factors ``exp(s (log min - log max))``."""
    a = coeffs.values
    lg = coeffs.logs()
    total = 0.0 + 0.0j
    for i in range(0, a.size, block):
        li = lg[i:i + block]
        k = np.exp(-s * np.abs(li[:, None] - lg[None, :]))
        total += np.conj(a[i:i + block]) @ (k @ a)
    return float(total.real)


def cauchy_mean_2q(poly: DirichletPoly, s: float, q: int = 1) -> CauchyMeanResult:
    """Exact Cauchy mean of ``|D(st)|^(2q)`` by the kernel sum."""
    if not np.isfinite(s) or s < 0:
        raise ValueError("s must be a finite real >= 0")
    cc = convolution_power(poly, q, weighted=True)
    value = max(kernel_sum(cc, float(s)), 0.0)
    return CauchyMeanResult(value, Method.KERNEL_SUM, cost=len(cc), error_bound=0.0)


def limit_s_infinity(poly: DirichletPoly, q: int = 1) -> float:
    """``lim_{s->inf}`` of the Cauchy mean: the sum of ``|a_j|^2`` over coincident products."""
    cc = convolution_power(poly, q, weighted=True)
    return float(np.sum(np.abs(cc.values) ** 2))


def off_diagonal_ratio(poly: DirichletPoly, q: int = 1) -> float:
    """Largest ratio ``min/max`` over distinct products in the support (``< 1``)."""
    cc = convolution_power(poly, q, weighted=True)
    if len(cc) < 2:
        return 0.0
    k = cc.keys.astype(float)
    return float(np.max(k[:-1] / k[1:]))


def wilf_bilinear(x, kernel: KernelSpec = MAX_INVERSE) -> float:
    """``sum_{n,m} conj(x_n) K(n, m) x_m`` for ``K = 1/max``, in O(N)."""
    if kernel.kind is not MAX_INVERSE.kind:
        raise ValueError(f"unsupported kernel {kernel.kind}")
    x = np.asarray(x.coeffs if isinstance(x, DirichletPoly) else x, dtype=np.complex128)
    m = np.arange(1, x.size + 1, dtype=float)
    prev = np.concatenate(([0.0], np.cumsum(x)[:-1]))
    diag = np.sum(np.abs(x) ** 2 / m)
    cross = 2.0 * np.real(np.sum(np.conj(prev) * x / m))
    return float(diag + cross)


def wilf_bilinear_dense(x, kernel: KernelSpec = MAX_INVERSE) -> float:
    x = np.asarray(x, dtype=np.complex128)
    n = np.arange(1, x.size + 1, dtype=float)
    K = kernel(n[:, None], n[None, :])
    return float(np.real(np.conj(x) @ K @ x))


def wilf2_value(N: int) -> float:
    """``W(N) = sum_{m,n<=N} min(m,n)^(-1/2) max(m,n)^(-3/2)`` via suffix sums."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(1, N + 1, dtype=float)
    tail = np.cumsum((n ** -1.5)[::-1])[::-1]  # sum_{m>=n} m^-3/2
    strict = tail - n ** -1.5
    return float(np.sum(n ** -2.0) + 2.0 * np.sum(n ** -0.5 * strict))
