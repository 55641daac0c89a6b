"""Discrete random model behind the Cauchy means of ``sum n^{-sigma-ist}``.

``Y`` takes the value ``log n`` with probability ``n^{-sigma} / L_N``, and
``S_k`` is a sum of ``k`` independent copies, so that
``|sum n^{-sigma-ist}|^(2k) = L_N^(2k) |E e^{ist S_k}|^2``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np
from scipy import integrate, special

from ._numerics import panel_rule
from .errors import CapacityError
from .kernel import kernel_sum
from .parallel import default_workers
from .poly import MAX_PRODUCT_CELLS, ConvolutionCoeffs, delta_counts

#: largest alias table used for block sums of ``Y``
MAX_ALIAS_ATOMS = 1 << 16
DEFAULT_SHARDS = 16


@dataclass(frozen=True)
class YDistribution:
    sigma: float
    N: int

    def __post_init__(self):
        if not 0.0 <= self.sigma < 1.0:
            raise ValueError("sigma must lie in [0, 1)")
        if self.N < 1:
            raise ValueError("N must be >= 1")

    @cached_property
    def atoms(self) -> np.ndarray:
        return np.log(np.arange(1, self.N + 1, dtype=float))

    @cached_property
    def L(self) -> float:
        return math.fsum(np.exp(-self.sigma * self.atoms))

    @cached_property
    def pmf(self) -> np.ndarray:
        return np.exp(-self.sigma * self.atoms) / self.L

    @property
    def mean(self) -> float:
        return float(self.pmf @ self.atoms)

    @property
    def variance(self) -> float:
        centred = self.atoms - self.mean
        return float(self.pmf @ (centred * centred))

    def characteristic(self, u) -> np.ndarray:
        """``E exp(i u Y)`` for an array of ``u``."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty(u.size, dtype=complex)
        step = max(1, 4_000_000 // self.N)
        for i in range(0, u.size, step):
            out[i:i + step] = np.exp(1j * np.outer(u[i:i + step], self.atoms)) @ self.pmf
        return out


@dataclass(frozen=True)
class SkDistribution:
    """Exact law of ``S_k``: atoms ``log m`` with ``P = delta_{k,N}(m) / (m^sigma L_N^k)``."""

    k: int
    y: YDistribution
    keys: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_model(cls, y: YDistribution, k: int) -> "SkDistribution":
        if k < 1:
            raise ValueError("k must be >= 1")
        keys, counts = delta_counts(k, y.N)
        logs = np.log(keys.astype(float))
        probs = np.exp(np.log(counts.astype(float)) - y.sigma * logs - k * math.log(y.L))
        return cls(k, y, keys, probs)

    @property
    def atoms(self) -> np.ndarray:
        return np.log(self.keys.astype(float))

    def as_coeffs(self) -> ConvolutionCoeffs:
        return ConvolutionCoeffs(self.k, self.keys, self.probs.astype(complex), self.y.N)

    def characteristic(self, u) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        atoms = self.atoms
        out = np.empty(u.size, dtype=complex)
        step = max(1, 4_000_000 // atoms.size)
        for i in range(0, u.size, step):
            out[i:i + step] = np.exp(1j * np.outer(u[i:i + step], atoms)) @ self.probs
        return out


def self_convolution(y: YDistribution, k: int) -> dict[int, float]:
    """``k``-fold convolution of the law of ``Y`` built by repeated pairwise products.

    Independent of :func:`delta_counts`; used to cross-check :class:`SkDistribution`.
    """
    base = {n: float(p) for n, p in zip(range(1, y.N + 1), y.pmf)}
    law = dict(base)
    for _ in range(k - 1):
        nxt: dict[int, float] = {}
        for m, pm in law.items():
            for n, pn in base.items():
                nxt[m * n] = nxt.get(m * n, 0.0) + pm * pn
        law = nxt
    return law


# ----------------------------------------------------------------------------------------
# sampling


@numba.njit(cache=True)
def _build_alias(p):
    n = p.size
    prob = np.empty(n)
    alias = np.zeros(n, dtype=np.int64)
    scaled = p * n / p.sum()
    small = np.empty(n, dtype=np.int64)
    large = np.empty(n, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(n):
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        g = large[nl - 1]
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            nl -= 1
            small[ns] = g
            ns += 1
    for i in range(nl):
        prob[large[i]] = 1.0
        alias[large[i]] = large[i]
    for i in range(ns):
        prob[small[i]] = 1.0
        alias[small[i]] = small[i]
    return prob, alias


@numba.njit(cache=True, nogil=True)
def _alias_sums(rng, n_samples, table, reps, table2, reps2, out):
    """Each sample sums ``reps`` draws from ``table`` and ``reps2`` from ``table2``.

    Table rows are ``(threshold, value, alias value)``; the select is
    arithmetic so unpredictable comparisons do not stall the loop.
    """
    n1 = table.shape[0]
    n2 = table2.shape[0]
    for i in range(n_samples):
        acc = 0.0
        for _ in range(reps):
            x = rng.random() * n1
            j = int(x)
            keep = (x - j) < table[j, 0]
            acc += keep * table[j, 1] + (1 - keep) * table[j, 2]
        for _ in range(reps2):
            x = rng.random() * n2
            j = int(x)
            keep = (x - j) < table2[j, 0]
            acc += keep * table2[j, 1] + (1 - keep) * table2[j, 2]
        out[i] = acc


def _alias_table(values: np.ndarray, probs: np.ndarray) -> np.ndarray:
    prob, alias = _build_alias(np.ascontiguousarray(probs, dtype=float))
    values = np.asarray(values, dtype=float)
    return np.ascontiguousarray(np.column_stack([prob, values, values[alias]]))


class SkSampler:
    """Exact sampler of ``S_k`` by alias tables.

    ``S_k`` is drawn as a sum of ``k // b`` independent block sums ``S_b``
    (plus one ``S_r`` block for the remainder), each from the exact table of
    its law.  ``b`` is the largest block whose support fits
    ``MAX_ALIAS_ATOMS``; with ``b = 1`` this is plain summation of ``k``
    alias draws of ``Y``.
    """

    def __init__(self, y: YDistribution, k: int, seed: int | None = None,
                 block: int | None = None):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.y, self.k, self.seed = y, k, seed
        self.block = min(block or self._auto_block(y.N, k), k)
        self._tables: dict[int, np.ndarray] = {}
        self.y_table = self._table(1)
        self.main = self._table(self.block)
        rem = k % self.block
        self.rest = self._table(rem) if rem else None
        self.reps = k // self.block
        self.draws_per_sample = self.reps + (1 if rem else 0)

    @staticmethod
    def _auto_block(N: int, k: int) -> int:
        b = 1
        while b < k and N ** (b + 1) <= MAX_PRODUCT_CELLS:
            keys, _ = delta_counts(b + 1, N)
            if keys.size > MAX_ALIAS_ATOMS:
                break
            b += 1
        return b

    def _table(self, b: int) -> np.ndarray:
        if b not in self._tables:
            law = SkDistribution.from_model(self.y, b)
            self._tables[b] = _alias_table(law.atoms, law.probs)
        return self._tables[b]

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))

    def sample(self, size: int, rng: np.random.Generator | None = None) -> np.ndarray:
        """``size`` independent draws of ``S_k``."""
        rng = rng if rng is not None else self.generator()
        out = np.empty(size)
        rest = self.rest if self.rest is not None else self.main
        _alias_sums(rng, size, self.main, self.reps, rest, 0 if self.rest is None else 1, out)
        return out

    def sample_y(self, size: int, rng: np.random.Generator | None = None) -> np.ndarray:
        """Individual draws of ``Y`` from its alias table."""
        rng = rng if rng is not None else self.generator()
        out = np.empty(size)
        _alias_sums(rng, size, self.y_table, 1, self.y_table, 0, out)
        return out


# ----------------------------------------------------------------------------------------
# exact identities


def char_identity_check(sigma: float, N: int, k: int, s: float, t_samples) -> float:
    """Largest ``|lhs - rhs| / L^(2k)`` over ``t`` of
    ``|sum n^{-sigma-ist}|^(2k) = L^(2k) E exp(ist S~_k)``,
    with ``E exp(iu S~_k) = |E exp(iu S_k)|^2`` from the exact law of ``S_k``.
    """
    y = YDistribution(sigma, N)
    law = SkDistribution.from_model(y, k)
    t = np.atleast_1d(np.asarray(t_samples, dtype=float))
    n = np.arange(1, N + 1, dtype=float)
    D = np.exp(-1j * s * np.outer(t, np.log(n))) @ (n ** -sigma)
    lhs = np.abs(D) ** (2 * k)
    Lk = y.L ** (2 * k)
    rhs = Lk * np.abs(law.characteristic(s * t)) ** 2
    return float(np.max(np.abs(lhs - rhs)) / Lk)


def exp_abs_sym_exact(sigma: float, N: int, k: int, s: float) -> float:
    """``E exp(-s |S~_k|) = sum_{m,m'} P(m) P(m') (min/max)^s``, in ``O(support)``."""
    if s < 0:
        raise ValueError("s must be >= 0")
    y = YDistribution(sigma, N)
    law = SkDistribution.from_model(y, k)
    if law.keys.size > MAX_PRODUCT_CELLS:
        raise CapacityError("support of S_k exceeds the capacity budget")
    if s == 0:
        return 1.0
    return kernel_sum(law.as_coeffs(), s)


def exp_abs_sym_charfn(sigma: float, N: int, k: int, s: float, width: float = 14.0,
                       order: int = 64) -> float:
    """``int |phi_Y(su)|^(2k) du / (pi(1+u^2))`` as a second route to ``E exp(-s|S~_k|)``.

    The integrand is cut at ``|su| = width / sqrt(k Var Y)``, beyond which
    ``|phi_Y|^(2k)`` is negligible for the moderate ``N`` used in checks
    (verified by the callers on a grid, not proved).  Feasible for any ``k``.
    """
    y = YDistribution(sigma, N)
    if N == 1:
        return 1.0
    U = width / math.sqrt(k * y.variance)  # in the variable v = s u
    edges = np.linspace(0.0, U, 257)
    v, w = panel_rule(edges, order)
    mod2 = np.abs(y.characteristic(v)) ** 2
    f = np.exp(k * np.log(mod2)) * s / (math.pi * (s * s + v * v))
    return float(2.0 * np.dot(w, f))


def variance_ytilde(sigma: float, N: int) -> float:
    """``c_{sigma,N} = E Y~^2 = 2 Var Y``."""
    return 2.0 * YDistribution(sigma, N).variance


def variance_limit(sigma: float) -> float:
    return 2.0 / (1.0 - sigma) ** 2


def c0_constant() -> float:
    """``E exp(-|g|)``, ``g`` standard Gaussian, by adaptive quadrature."""
    val, _ = integrate.quad(lambda x: 2.0 * math.exp(-x - 0.5 * x * x) / math.sqrt(2 * math.pi),
                            0.0, math.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def c0_closed_form() -> float:
    """``2 e^{1/2} Phi(-1)``."""
    return float(math.exp(0.5) * special.erfc(1.0 / math.sqrt(2.0)))


def finite_t_relation(sigma: float, N: int, k: int, s: float, T: float) -> float:
    """``L^(2k) E[sin(sT S~_k) / (sT S~_k)]``, the exact finite-``T`` mean value.

    Equals ``(1/2T) int_{-T}^{T} |sum n^{-sigma-ist}|^(2k) dt``; pairs of atoms
    with equal values contribute 1.
    """
    y = YDistribution(sigma, N)
    law = SkDistribution.from_model(y, k)
    a, p = law.atoms, law.probs
    if a.size ** 2 > MAX_PRODUCT_CELLS:
        raise CapacityError("support too large for the pairwise sinc sum")
    diff = s * T * (a[:, None] - a[None, :])
    return y.L ** (2 * k) * float(p @ np.sinc(diff / math.pi) @ p)


# ----------------------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class SkEstimate:
    sigma: float
    N: int
    k: int
    M: int
    seed: int
    shards: int
    estimate: float
    stderr: float
    c0: float
    s_k: float

    @property
    def abs_error(self) -> float:
        return abs(self.estimate - self.c0)

    def as_dict(self) -> dict:
        return {"sigma": self.sigma, "N": self.N, "k": self.k, "M": self.M, "seed": self.seed,
                "shards": self.shards, "estimate": self.estimate, "stderr": self.stderr,
                "c0": self.c0, "abs_error": self.abs_error}


def _merge(stats):
    """Chan et al. pairwise merge of ``(count, mean, M2)`` triples, in order."""
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in stats:
        if nb == 0:
            continue
        tot = n + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
    return n, mean, m2


def theorem_sk_estimate(sigma: float, N: int, k: int, samples: int, seed: int,
                        shards: int = DEFAULT_SHARDS, workers: int | None = None) -> SkEstimate:
    """Monte Carlo estimate of ``E exp(-|S~_k| / s_k)`` with ``s_k^2 = k c_{sigma,N}``.

    ``samples`` independent pairs ``(S_k, S_k')`` are split over ``shards``
    substreams spawned from ``seed``; results depend on ``(seed, samples,
    shards)`` only, never on ``workers``.
    """
    if samples < 1 or k < 1 or shards < 1:
        raise ValueError("samples, k and shards must be positive")
    c0 = c0_closed_form()
    y = YDistribution(sigma, N)
    if N == 1:
        return SkEstimate(sigma, N, k, samples, seed, shards, 1.0, 0.0, c0, 0.0)
    s_k = math.sqrt(k * variance_ytilde(sigma, N))
    sampler = SkSampler(y, k)
    sizes = [samples // shards + (1 if i < samples % shards else 0) for i in range(shards)]
    seqs = np.random.SeedSequence(seed).spawn(shards)

    def run(i):
        if sizes[i] == 0:
            return 0, 0.0, 0.0
        rng = np.random.Generator(np.random.PCG64(seqs[i]))
        draws = sampler.sample(2 * sizes[i], rng)
        vals = np.exp(-np.abs(draws[0::2] - draws[1::2]) / s_k)
        mean = float(np.mean(vals))
        return vals.size, mean, float(np.sum((vals - mean) ** 2))

    workers = workers or default_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(run, range(shards)))
    else:
        stats = [run(i) for i in range(shards)]
    n, mean, m2 = _merge(stats)
    stderr = math.sqrt(m2 / (n - 1) / n) if n > 1 else math.inf
    return SkEstimate(sigma, N, k, samples, seed, shards, mean, stderr, c0, s_k)
