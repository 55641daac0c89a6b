"""Arithmetic backend: sieves, product-representation counts and their asymptotics."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import CapacityError
from .poly import delta_counts

#: default cap on N for the dense pair-product sieve (N^2 32-bit counters)
ACZ_MAX_N = 4096
_CACHE_ENV = "DIRICHLET_CAUCHY_CACHE"


# ----------------------------------------------------------------------------------------
# on-disk table cache


def _cache_dir(cache_dir: str | Path | None) -> Path | None:
    if cache_dir is None:
        cache_dir = os.environ.get(_CACHE_ENV)
    return Path(cache_dir) if cache_dir else None


def cache_path(cache_dir: str | Path, kind: str, limit: int) -> Path:
    return Path(cache_dir) / f"{kind}-{limit}.bin"


def write_table(path: str | Path, values: np.ndarray) -> None:
    """Little-endian ``uint64`` element count followed by ``uint32`` counters."""
    arr = np.ascontiguousarray(values, dtype="<u4")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(np.array([arr.size], dtype="<u8").tobytes())
        fh.write(arr.tobytes())
    os.replace(tmp, path)


def read_table(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise ValueError(f"{path}: truncated table header")
    (n,) = np.frombuffer(raw[:8], dtype="<u8")
    body = np.frombuffer(raw[8:], dtype="<u4")
    if body.size != n:
        raise ValueError(f"{path}: expected {n} counters, found {body.size}")
    return body.astype(np.uint32)


# ----------------------------------------------------------------------------------------
# multiplicative functions


def smallest_prime_factor(limit: int) -> np.ndarray:
    """``spf[n]`` for ``0 <= n <= limit`` (with ``spf[0] = 0``, ``spf[1] = 1``)."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    return spf


@dataclass(frozen=True)
class MultiplicativeTable:
    """Sieve-derived tables of ``d(n)``, ``Omega(n)`` and ``lambda(n)`` for ``n <= limit``.

    Index 0 is a placeholder in every table.
    """

    limit: int
    spf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "spf", smallest_prime_factor(self.limit))

    @cached_property
    def _factor_stats(self) -> tuple[np.ndarray, np.ndarray]:
        n = np.arange(self.limit + 1, dtype=np.int64)
        rest = n.copy()
        rest[0] = 1
        omega = np.zeros(self.limit + 1, dtype=np.int64)
        divisors = np.ones(self.limit + 1, dtype=np.int64)
        exponent = np.zeros(self.limit + 1, dtype=np.int64)
        last = np.zeros(self.limit + 1, dtype=np.int64)
        active = np.flatnonzero(rest > 1)
        while active.size:
            p = self.spf[rest[active]]
            same = p == last[active]
            new = active[~same]
            divisors[new] *= exponent[new] + 1
            exponent[new] = 1
            last[new] = p[~same]
            exponent[active[same]] += 1
            omega[active] += 1
            rest[active] //= p
            active = active[rest[active] > 1]
        divisors *= exponent + 1
        divisors[0] = 0
        return omega, divisors

    @property
    def big_omega(self) -> np.ndarray:
        return self._factor_stats[0]

    @property
    def divisor_count(self) -> np.ndarray:
        return self._factor_stats[1]

    @cached_property
    def liouville(self) -> np.ndarray:
        lam = np.where(self.big_omega % 2 == 0, 1, -1).astype(np.int64)
        lam[0] = 0
        return lam

    def factorize(self, n: int) -> dict[int, int]:
        if not 1 <= n <= self.limit:
            raise ValueError("n outside the sieve range")
        out: dict[int, int] = {}
        while n > 1:
            p = int(self.spf[n])
            out[p] = out.get(p, 0) + 1
            n //= p
        return out


# ----------------------------------------------------------------------------------------
# product counts


def delta_kN(k: int, N: int) -> dict[int, int]:
    """``m -> #{(n_1..n_k) in [1, N]^k : n_1 ... n_k = m}``."""
    keys, counts = delta_counts(k, N)
    return dict(zip(keys.tolist(), counts.tolist()))


def mean_value_divisor_sum(k: int, N: int, sigma: float) -> float:
    """``sum_m d_{k,N}(m)^2 / m^(2 sigma)``: the long-run mean of ``|sum n^{-sigma-it}|^(2k)``."""
    keys, counts = delta_counts(k, N)
    c = counts.astype(float)
    return math.fsum(c * c * np.exp(-2.0 * sigma * np.log(keys.astype(float))))


def pair_product_counts(N: int, max_N: int = ACZ_MAX_N,
                        cache_dir: str | Path | None = None) -> np.ndarray:
    """Dense ``c[p] = #{(a, b) in [1, N]^2 : ab = p}`` for ``0 <= p <= N^2``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > max_N:
        raise CapacityError(f"N={N} exceeds the pair-product sieve cap {max_N}")
    directory = _cache_dir(cache_dir)
    if directory is not None:
        path = cache_path(directory, "pairprod", N)
        if path.exists():
            table = read_table(path)
            if table.size == N * N + 1:
                return table
    c = np.zeros(N * N + 1, dtype=np.uint32)
    for a in range(1, N + 1):
        c[a:a * N + 1:a] += 1
    if directory is not None:
        write_table(cache_path(directory, "pairprod", N), c)
    return c


def acz_count(N: int, max_N: int = ACZ_MAX_N, cache_dir: str | Path | None = None) -> int:
    """Exact ``#{(mu, nu, m, n) in [1, N]^4 : n nu = m mu}`` as ``sum_p c_p^2``."""
    c = pair_product_counts(N, max_N, cache_dir).astype(np.int64)
    return int(np.dot(c, c))


def acz_sweep(N_max: int, max_N: int = ACZ_MAX_N,
              cache_dir: str | Path | None = None) -> np.ndarray:
    """``out[N] = acz_count(N)`` for every ``0 <= N <= N_max`` (``out[0] = 0``).

    Moving from ``N - 1`` to ``N`` adds the pairs with a coordinate equal to
    ``N``: products ``N b`` gain 2 for ``b < N`` and ``N^2`` gains 1, so each
    step is an ``O(N)`` update of ``sum c_p^2``.
    """
    if N_max > max_N:
        raise CapacityError(f"N={N_max} exceeds the pair-product sieve cap {max_N}")
    directory = _cache_dir(cache_dir)
    if directory is not None:
        path = cache_path(directory, "acz", N_max)
        if path.exists():
            table = read_table(path)
            if table.size == 2 * (N_max + 1):
                return table.view(np.uint64).astype(np.int64)
    c = np.zeros(N_max * N_max + 1, dtype=np.int64)
    out = np.zeros(N_max + 1, dtype=np.int64)
    total = 0
    for N in range(1, N_max + 1):
        idx = N * np.arange(1, N, dtype=np.int64)
        old = c[idx]
        total += int(np.sum(4 * old + 4))  # (c+2)^2 - c^2
        c[idx] = old + 2
        sq = N * N
        total += 2 * int(c[sq]) + 1
        c[sq] += 1
        out[N] = total
    if directory is not None:
        write_table(cache_path(directory, "acz", N_max), out.astype("<u8").view("<u4"))
    return out


@dataclass(frozen=True)
class ACZFit:
    a: float
    b: float
    N: np.ndarray
    counts: np.ndarray

    @property
    def residuals(self) -> np.ndarray:
        N = self.N.astype(float)
        return self.counts - (self.a * N * N * np.log(N) + self.b * N * N)

    @property
    def leading_target(self) -> float:
        return 12.0 / math.pi ** 2


def acz_fit(N_min: int = 256, N_max: int = 3000, max_N: int = ACZ_MAX_N,
            cache_dir: str | Path | None = None) -> ACZFit:
    """Least-squares fit of ``a N^2 log N + b N^2`` to the exact counts on ``[N_min, N_max]``.

    Each point is scaled by ``N^2`` so the fit is of ``count/N^2 = a log N + b``.
    """
    if not 2 <= N_min < N_max:
        raise ValueError("need 2 <= N_min < N_max")
    counts = acz_sweep(N_max, max_N, cache_dir)[N_min:]
    N = np.arange(N_min, N_max + 1)
    y = counts / (N.astype(float) ** 2)
    A = np.column_stack([np.log(N), np.ones(N.size)])
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    return ACZFit(float(a), float(b), N, counts.astype(float))


