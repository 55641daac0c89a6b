"""Small numerical kernels shared by the exact methods."""
from __future__ import annotations

import numpy as np

# keep exp(s * span) well inside double range inside one block
_MAX_SPAN = 600.0


def decayed_prefix(values: np.ndarray, logs: np.ndarray, s: float) -> np.ndarray:
    """``R_i = sum_{l<i} v_l exp(-s (logs_i - logs_l))`` for nondecreasing ``logs``.

    Evaluated blockwise with rescaled cumulative sums so that no exponential
    overflows; the rounding error of each ``R_i`` is relative to the absolute
    sum of its own terms.
    """
    v = np.asarray(values)
    lg = np.asarray(logs, dtype=float)
    n = v.size
    out = np.zeros(n, dtype=np.result_type(v.dtype, np.float64))
    if n <= 1 or s == 0.0:
        if s == 0.0 and n > 1:
            out[1:] = np.cumsum(v)[:-1]
        return out
    start = 0
    carry = 0.0  # R at index `start`
    while start < n:
        limit = lg[start] + _MAX_SPAN / s
        stop = int(np.searchsorted(lg, limit, side="right"))
        stop = max(stop, start + 1)
        seg_lg = lg[start:stop] - lg[start]
        up = np.exp(s * seg_lg)
        csum = np.cumsum(v[start:stop] * up)
        down = np.exp(-s * seg_lg)
        local = np.empty(stop - start, dtype=out.dtype)
        local[0] = 0.0
        local[1:] = csum[:-1] * down[1:]
        out[start:stop] = carry * down + local
        if stop < n:
            last = stop - 1
            carry = (out[last] + v[last]) * np.exp(-s * (lg[stop] - lg[last]))
        start = stop
    return out


def decayed_suffix(values: np.ndarray, logs: np.ndarray, s: float) -> np.ndarray:
    """``S_i = sum_{l>i} v_l exp(-s (logs_l - logs_i))`` for nondecreasing ``logs``."""
    v = np.asarray(values)[::-1]
    lg = -np.asarray(logs, dtype=float)[::-1]
    return decayed_prefix(v, lg, s)[::-1]


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_rule(edges: np.ndarray, order: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights over consecutive ``edges``."""
    x, w = gauss_legendre(order)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights
