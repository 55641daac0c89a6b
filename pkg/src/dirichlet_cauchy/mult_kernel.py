"""Max-kernel identity for completely multiplicative ``f``.

For real completely multiplicative ``f`` and ``x_n = f(n) n^{-sigma-it}``
the bilinear form ``sum_{d,e} conj(x_d) x_e / max(d, e)`` regroups by
``m = de`` into

    sum_m f(m) m^{-sigma-it} sum_{d | m} d^{2it} / max(d, m/d).

Both sides are truncated (the bilinear form at ``d, e <= N``, the divisor
series at ``m <= M``); the left truncation is bounded rigorously and the
right one is tracked by doubling ``N``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import MultiplicativeTable
from .kernel import wilf_bilinear, wilf_bilinear_dense


class CMKind(enum.Enum):
    LIOUVILLE = "liouville"
    POWER_DAMPED = "power_damped"


@dataclass(frozen=True)
class CMFunction:
    """Completely multiplicative ``f``: Liouville ``lambda(n)`` or ``n^{-eps}``."""

    kind: CMKind
    eps: float = 0.0
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def liouville(cls) -> "CMFunction":
        return cls(CMKind.LIOUVILLE)

    @classmethod
    def power_damped(cls, eps: float) -> "CMFunction":
        if not eps >= 0:
            raise ValueError("eps must be >= 0")
        return cls(CMKind.POWER_DAMPED, float(eps))

    @property
    def decay(self) -> float:
        """``a`` with ``|f(n)| <= n^{-a}``."""
        return self.eps if self.kind is CMKind.POWER_DAMPED else 0.0

    @property
    def min_sigma(self) -> float:
        # sum |f(m)| m^{-sigma_0} converges for some sigma_0 > 1, and sigma >= sigma_0 - 1/2
        return 0.5

    def values(self, limit: int) -> np.ndarray:
        """``f(0..limit)`` with a 0 placeholder at index 0."""
        cached = self._cache.get("values")
        if cached is not None and cached.size > limit:
            return cached[: limit + 1]
        if self.kind is CMKind.LIOUVILLE:
            vals = MultiplicativeTable(max(limit, 1)).liouville.astype(float)
        else:
            n = np.arange(limit + 1, dtype=float)
            vals = np.zeros(limit + 1)
            vals[1:] = n[1:] ** -self.eps
        self._cache["values"] = vals
        return vals

    def __call__(self, n):
        n = np.asarray(n, dtype=np.int64)
        return self.values(int(n.max()))[n]

    def check_sigma(self, sigma: float) -> None:
        if not sigma > self.min_sigma:
            raise ValueError(f"sigma must exceed {self.min_sigma} for absolute convergence")


def _zeta_tail(E: np.ndarray | float, b: float) -> np.ndarray | float:
    """Upper bound for ``sum_{e >= E} e^{-b}`` (``E >= 1``, ``b > 1``)."""
    E = np.asarray(E, dtype=float)
    return E ** -b + E ** (1.0 - b) / (b - 1.0)


@dataclass(frozen=True)
class F1Lhs:
    value: complex
    tail_bound: float
    M: int


def lhs_tail_bound(a: float, M: int) -> float:
    """Bound for ``sum_{de > M} (de)^{-a} / max(d, e)`` (needs ``a > 1/2``).

    Ordered pairs are at most twice the pairs with ``d <= e``; for each ``d``
    the ``e``-sum starts at ``max(d, M // d + 1)``.
    """
    if not a > 0.5:
        raise ValueError("tail bound needs an effective exponent > 1/2")
    D = math.isqrt(M)
    d = np.arange(1, D + 1, dtype=float)
    start = np.maximum(d, np.floor(M / d) + 1)
    near = float(np.sum(d ** -a * _zeta_tail(start, a + 1)))
    far = float(_zeta_tail(D + 1, 2 * a + 1) + _zeta_tail(D + 1, 2 * a) / a)
    return 2.0 * (near + far)


def f1_lhs(f: CMFunction, sigma: float, t: float, M: int) -> F1Lhs:
    """``sum_{m <= M} f(m) m^{-sigma-it} sum_{d|m} d^{2it} / max(d, m/d)`` with a tail bound.

    Enumerated as pairs ``d <= e`` with ``de <= M``: the pair and its mirror
    contribute ``f(de) (de)^{-sigma} 2 cos(t log(e/d)) / e``.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    f.check_sigma(sigma)
    fv = f.values(M)
    parts = []
    for d in range(1, math.isqrt(M) + 1):
        e = np.arange(d, M // d + 1, dtype=np.int64)
        m = d * e
        w = fv[m] * np.exp(-sigma * np.log(m.astype(float))) / e
        phase = 2.0 * np.cos(t * np.log(e / d))
        phase[0] = 1.0  # e = d
        parts.append(float(np.dot(w, phase)))
    return F1Lhs(complex(math.fsum(parts)), lhs_tail_bound(sigma + f.decay, M), M)


def f1_coefficients(f: CMFunction, sigma: float, t: float, N: int) -> np.ndarray:
    n = np.arange(1, N + 1, dtype=float)
    return f.values(N)[1:] * np.exp(-(sigma + 1j * t) * np.log(n))


def f1_rhs(f: CMFunction, sigma: float, t: float, N: int) -> float:
    """Bilinear form ``sum_{n,m <= N} conj(x_n) x_m / max(n, m)``, ``x_n = f(n) n^{-sigma-it}``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    f.check_sigma(sigma)
    return wilf_bilinear(f1_coefficients(f, sigma, t, N))


def f1_rhs_history(f: CMFunction, sigma: float, t: float, N: int,
                   levels: int = 4) -> list[tuple[int, float]]:
    """``f1_rhs`` at ``N / 2^j`` for ``j = levels-1 .. 0``, in increasing ``N``."""
    sizes = sorted({max(1, N >> j) for j in range(levels)})
    return [(n, f1_rhs(f, sigma, t, n)) for n in sizes]


@dataclass(frozen=True)
class F1Check:
    sigma: float
    t: float
    lhs: float
    lhs_tail: float
    rhs: float
    rhs_drift: float
    history: list

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def budget(self) -> float:
        return self.lhs_tail + self.rhs_drift

    @property
    def passed(self) -> bool:
        return self.difference <= self.budget


def f1_check(f: CMFunction, sigma: float, t: float, M: int = 400_000,
             N: int = 100_000) -> F1Check:
    """Reconcile both truncations: pass iff ``|lhs - rhs| <= tail(M) + |rhs(N) - rhs(N/2)|``."""
    lhs = f1_lhs(f, sigma, t, M)
    hist = f1_rhs_history(f, sigma, t, N)
    drift = abs(hist[-1][1] - hist[-2][1]) if len(hist) > 1 else 0.0
    return F1Check(sigma, t, lhs.value.real, lhs.tail_bound, hist[-1][1], drift, hist)


def f2_regrouping(f: CMFunction, sigma: float, t: float, N: int) -> tuple[float, complex]:
    """The finite bilinear form two ways: as a dense quadratic form, and grouped by ``nu = de``.

    The grouped form is ``sum_nu f(nu) nu^{-sigma-it} sum_{d | nu, nu/N <= d <= N}
    d^{2it} / max(d, nu/d)``.
    """
    f.check_sigma(sigma)
    dense = wilf_bilinear_dense(f1_coefficients(f, sigma, t, N))
    d = np.repeat(np.arange(1, N + 1, dtype=np.int64), N)
    e = np.tile(np.arange(1, N + 1, dtype=np.int64), N)
    nu = d * e
    inner = np.exp(2j * t * np.log(d.astype(float))) / np.maximum(d, e)
    by_nu = np.bincount(nu, weights=inner.real) + 1j * np.bincount(nu, weights=inner.imag)
    idx = np.flatnonzero(by_nu)
    fv = f.values(N * N)
    outer = fv[idx] * np.exp(-(sigma + 1j * t) * np.log(idx.astype(float)))
    return dense, complex(np.sum(outer * by_nu[idx]))


def divisors(n: int) -> np.ndarray:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    large = [n // d for d in reversed(small) if d * d != n]
    return np.array(small + large, dtype=np.int64)


def inner_sum(m: int, t: float) -> complex:
    """``sum_{d | m} d^{2it} / max(d, m/d)``."""
    d = divisors(m)
    return complex(np.sum(np.exp(2j * t * np.log(d.astype(float))) / np.maximum(d, m // d)))


def inner_sum_bound_check(ms, t: float) -> float:
    """Largest ``|inner(m)| - d(m)/sqrt(m)`` over ``ms``; nonpositive when the bound holds."""
    worst = -math.inf
    for m in ms:
        m = int(m)
        worst = max(worst, abs(inner_sum(m, t)) - divisors(m).size / math.sqrt(m))
    return worst
