"""Dirichlet polynomials and their multiplicative convolution powers.

A :class:`DirichletPoly` holds coefficients ``x_1..x_N`` and an exponent
offset ``sigma``; it represents ``D(t) = sum_n x_n n^(-sigma - i s t)``.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapacityError

#: largest product key we accept; keys are stored as int64
MAX_EXACT_KEY = np.iinfo(np.int64).max
#: refuse to materialise more than this many (key, coefficient) products at once
MAX_PRODUCT_CELLS = 60_000_000


@dataclass(frozen=True)
class DirichletPoly:
    coeffs: np.ndarray
    sigma: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).ravel()
        if c.size < 1:
            raise ValueError("a Dirichlet polynomial needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError("sigma must be a finite real >= 0")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "sigma", float(self.sigma))

    @classmethod
    def unit(cls, N: int, sigma: float = 0.0) -> "DirichletPoly":
        """The approximating polynomial ``sum_{n<=N} n^(-sigma-ist)``."""
        return cls(np.ones(int(N)), sigma)

    @property
    def N(self) -> int:
        return self.coeffs.size

    def weighted(self) -> np.ndarray:
        """Coefficients with the sigma weights absorbed: ``x_n n^-sigma``."""
        if self.sigma == 0.0:
            return self.coeffs.copy()
        n = np.arange(1, self.N + 1, dtype=float)
        return self.coeffs * n ** (-self.sigma)

    def abs_sum(self) -> float:
        """``sum |x_n| n^-sigma``, the sup-norm bound of ``D``."""
        return float(np.abs(self.weighted()).sum())

    def with_sigma(self, sigma: float) -> "DirichletPoly":
        return DirichletPoly(self.coeffs, sigma)


def evaluate(poly: DirichletPoly, s: float, t) -> np.ndarray | complex:
    """Evaluate ``sum_n x_n n^-sigma exp(-i s t log n)`` at scalar or array ``t``."""
    t_arr = np.asarray(t, dtype=float)
    logs = np.log(np.arange(1, poly.N + 1, dtype=float))
    w = poly.weighted()
    flat = t_arr.ravel()
    out = np.empty(flat.size, dtype=np.complex128)
    step = max(1, 4_000_000 // poly.N)
    for i in range(0, flat.size, step):
        ph = np.exp(-1j * s * np.outer(flat[i:i + step], logs))
        out[i:i + step] = ph @ w
    if t_arr.ndim == 0:
        return complex(out[0])
    return out.reshape(t_arr.shape)


@dataclass(frozen=True)
class ConvolutionCoeffs:
    """Sparse coefficients ``a_j = sum_{n_1...n_q = j} x_{n_1}...x_{n_q}``.

    ``keys`` is strictly increasing (exact int64), ``values`` aligned with it.
    """

    q: int
    keys: np.ndarray
    values: np.ndarray
    N: int = field(default=0)

    def __len__(self):
        return self.keys.size

    def as_dict(self) -> dict[int, complex]:
        return {int(k): complex(v) for k, v in zip(self.keys, self.values)}

    def total(self) -> complex:
        return complex(self.values.sum())

    def logs(self) -> np.ndarray:
        return np.log(self.keys.astype(float))


def _check_range(N: int, q: int) -> None:
    if q < 1:
        raise ValueError("q must be a positive integer")
    # exact integer comparison; N**q is a Python int
    if N ** q > MAX_EXACT_KEY:
        raise CapacityError(f"N^q = {N}^{q} exceeds the exact int64 key range")


def _mult_convolve(keys: np.ndarray, vals: np.ndarray, base: np.ndarray):
    """One sparse multiplicative convolution of ``(keys, vals)`` with ``base`` on 1..N."""
    N = base.size
    if keys.size * N > MAX_PRODUCT_CELLS:
        raise CapacityError(
            f"convolution needs {keys.size * N} product cells (budget {MAX_PRODUCT_CELLS})")
    n = np.arange(1, N + 1, dtype=np.int64)
    nz = base != 0
    prod_keys = (keys[:, None] * n[None, nz]).ravel()
    prod_vals = (vals[:, None] * base[None, nz]).ravel()
    uniq, inv = np.unique(prod_keys, return_inverse=True)
    if np.iscomplexobj(prod_vals):
        acc = (np.bincount(inv, weights=prod_vals.real, minlength=uniq.size)
               + 1j * np.bincount(inv, weights=prod_vals.imag, minlength=uniq.size))
    else:
        acc = np.bincount(inv, weights=prod_vals, minlength=uniq.size)
    return uniq, acc


def convolution_power(poly: DirichletPoly, q: int, weighted: bool = False) -> ConvolutionCoeffs:
    """Coefficients of ``(sum_n x_n n^-z)^q`` as a sparse map ``j -> a_j``.

    With ``weighted=True`` the sigma weights are absorbed first, so the result
    holds ``a_j j^-sigma``.  Built by ``q - 1`` sparse convolutions; zero
    coefficients of the base are skipped but zero sums that arise from
    cancellation are kept (the support is combinatorial, not numeric).
    """
    q = int(q)
    _check_range(poly.N, q)
    base = poly.weighted() if weighted else poly.coeffs.copy()
    nz = np.flatnonzero(base != 0)
    keys = (nz + 1).astype(np.int64)
    vals = base[nz].astype(np.complex128)
    if keys.size == 0:
        keys, vals = np.array([1], dtype=np.int64), np.zeros(1, dtype=np.complex128)
    for _ in range(q - 1):
        keys, vals = _mult_convolve(keys, vals, base)
    return ConvolutionCoeffs(q, keys, vals, poly.N)


def delta_counts(k: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact integer counts of ordered k-tuples in [1, N]^k with a given product."""
    _check_range(N, k)
    n = np.arange(1, N + 1, dtype=np.int64)
    keys, counts = n.copy(), np.ones(N, dtype=np.int64)
    for _ in range(k - 1):
        if keys.size * N > MAX_PRODUCT_CELLS:
            raise CapacityError("delta table exceeds the product-cell budget")
        prod_keys = (keys[:, None] * n[None, :]).ravel()
        prod_cnt = np.repeat(counts, N)
        order = np.argsort(prod_keys, kind="stable")
        prod_keys, prod_cnt = prod_keys[order], prod_cnt[order]
        starts = np.flatnonzero(np.r_[True, prod_keys[1:] != prod_keys[:-1]])
        keys, counts = prod_keys[starts], np.add.reduceat(prod_cnt, starts)
    return keys, counts


class KernelKind(enum.Enum):
    MAX_INVERSE = "max_inverse"


@dataclass(frozen=True)
class KernelSpec:
    """Homogeneous degree -1 kernel; only ``K(x, y) = 1/max(x, y)`` is built in."""

    kind: KernelKind = KernelKind.MAX_INVERSE

    @property
    def mellin_at_half(self) -> float:
        # F(s) = 1/s + 1/(1-s) at s = 1/2
        return 4.0

    def __call__(self, x, y):
        return 1.0 / np.maximum(x, y)

    def mellin(self, z: complex) -> complex:
        return 1.0 / z + 1.0 / (1.0 - z)


MAX_INVERSE = KernelSpec()


def read_coeffs_csv(path: str | Path, sigma: float = 0.0) -> DirichletPoly:
    """Read rows ``n,re,im`` (header optional, n = 1..N contiguous)."""
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            if i == 0:
                try:
                    int(row[0])
                except ValueError:
                    continue  # header
            if len(row) < 2:
                raise ValueError(f"{path}: row {i + 1} needs at least n,re")
            n = int(row[0])
            re = float(row[1])
            im = float(row[2]) if len(row) > 2 and row[2].strip() else 0.0
            rows.append((n, complex(re, im)))
    if not rows:
        raise ValueError(f"{path}: no coefficient rows")
    ns = [n for n, _ in rows]
    if ns != list(range(1, len(ns) + 1)):
        raise ValueError(f"{path}: n must be 1-based and contiguous")
    return DirichletPoly(np.array([c for _, c in rows]), sigma)


def write_coeffs_csv(poly: DirichletPoly, path: str | Path, header: bool = True) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(["n", "re", "im"])
        for n, c in enumerate(poly.coeffs, start=1):
            w.writerow([n, repr(float(c.real)), repr(float(c.imag))])
