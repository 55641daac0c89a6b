"""Numerical-integration oracle for Cauchy means and finite mean values.

Nothing here uses the Fourier identity ``int e^{iwt} dt/(pi(1+t^2)) = e^{-|w|}``
or the convolution coefficients: integrands are evaluated directly from
the polynomial.

Infinite-range integrals ``int g(t) w(t) dt`` with ``g = |D|^(2q)`` use a
windowed trapezoid rule.  ``g`` is a trigonometric polynomial whose
nonzero frequencies are at least ``s log(M/(M-1))`` apart from zero
(``M = N^q``), so the weight is split with a smooth erf window ``chi``:
the windowed part ``w chi`` is integrated directly, and the remaining tail
mass ``int w (1 - chi)`` multiplies a windowed estimate of the mean of
``g``.  The rounded window edges make both errors decay like
``exp(-(gap * width)^2 / 4)``.  The trapezoid rule is spectrally accurate
for the smooth, compactly concentrated product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from ._numerics import panel_rule
from .errors import NonConvergence
from .kernel import CauchyMeanResult, Method, cauchy_mean_2q
from .poly import DirichletPoly


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    t_max: float | None = None
    max_subdivisions: int = 200_000
    #: "window" (default) or "bound" (plain truncation at t_max plus the Cauchy-tail bound)
    tail: str = "window"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.tail not in ("window", "bound"):
            raise ValueError("tail must be 'window' or 'bound'")

    def target(self, value: float) -> float:
        return self.abs_tol + self.rel_tol * abs(value)


DEFAULT_CONFIG = QuadratureConfig()

# window shape, in units of the edge width
_GAP_WIDTHS = 8.0      # gap * width: errors ~ exp(-16)
_PLATEAU = 6.0         # plateau half-length / width
_EDGE = 6.5            # grid stops this many widths past the plateau
_ALIAS_MARGIN = 40.0   # strip * (Nyquist - top frequency)
_BLOCK = 1024
_MAX_POINTS = 400_000_000


def frequency_gap(N: int, q: int) -> float:
    """Lower bound on ``|log(j/k)|`` for distinct integers ``j, k <= N^q``."""
    M = N ** q
    if M < 2:
        return math.inf
    return math.log1p(1.0 / (M - 1))


class _PowerOnGrid:
    """``|D(scale * t)|^(2q)`` on the symmetric grid ``t = k h``, evaluated blockwise by GEMM."""

    def __init__(self, poly: DirichletPoly, scale: float, q: int):
        y = poly.weighted()
        keep = np.flatnonzero(y != 0)
        self.y = y[keep]
        self.freq = scale * np.log(keep + 1.0)
        self.q = q
        self.real = bool(np.all(self.y.imag == 0))
        self.points = 0

    def blocks(self, h: float, K: int):
        """Yield ``(k_start, g(+t), g(-t))`` for ``k = 0..K`` in blocks of ``_BLOCK``."""
        j = np.arange(_BLOCK)
        P = np.exp(-1j * np.outer(self.freq, j * h))
        nblocks = K // _BLOCK + 1
        batch = max(1, 2_000_000 // (_BLOCK * 2))
        for b0 in range(0, nblocks, batch):
            bs = np.arange(b0, min(nblocks, b0 + batch))
            t0 = bs * (_BLOCK * h)
            E = np.exp(-1j * np.outer(t0, self.freq))
            if self.real:
                Dp = (E * self.y) @ P
                Dm = np.conj(Dp)
            else:
                Dp = (E * self.y) @ P
                Dm = (E * np.conj(self.y)) @ P
            gp = (Dp.real ** 2 + Dp.imag ** 2) ** self.q
            gm = (Dm.real ** 2 + Dm.imag ** 2) ** self.q
            self.points += 2 * gp.size
            for r, b in enumerate(bs):
                yield b * _BLOCK, gp[r], gm[r]


def _gauss_mean(f: Callable[[np.ndarray], np.ndarray], var: float, order: int = 96) -> float:
    """``E f(U)`` for ``U ~ N(0, var)`` by Gauss-Hermite quadrature."""
    x, w = np.polynomial.hermite_e.hermegauss(order)
    return float(np.dot(w, f(math.sqrt(var) * x)) / math.sqrt(2 * math.pi))


@dataclass(frozen=True)
class _Weight:
    """An even weight with analytic strip ``|Im t| < strip`` and right tail mass."""

    density: Callable[[np.ndarray], np.ndarray]
    tail: Callable[[np.ndarray], np.ndarray]  # int_x^inf density, any real x
    strip: float
    mass: float


def cauchy_weight(scale: float = 1.0) -> _Weight:
    c = float(scale)
    return _Weight(
        density=lambda t: c / (math.pi * (c * c + t * t)),
        tail=lambda x: np.arctan2(c, x) / math.pi,
        strip=c,
        mass=1.0,
    )


def log_kernel_weight(S: float, T: float) -> _Weight:
    """``(1/2pi) log(1 + T^2/(theta^2 + S^2))``."""
    a, b = float(S), math.hypot(S, T)

    def density(th):
        return np.log1p((T * T) / (th * th + a * a)) / (2 * math.pi)

    def tail(x):
        x = np.asarray(x, dtype=float)
        v = (2 * b * np.arctan2(b, x) - 2 * a * np.arctan2(a, x)
             - x * np.log1p((T * T) / (x * x + a * a)))
        return v / (2 * math.pi)

    return _Weight(density, tail, strip=a, mass=b - a)


@dataclass(frozen=True)
class WindowPlan:
    h: float
    K: int
    plateau: float
    width: float
    tail_mass: float
    error_factor: float  # multiply by sup|g| for the a-priori error bound

    @property
    def points(self) -> int:
        return 2 * self.K + 1


def plan_window(weight: _Weight, omega_max: float, omega_gap: float,
                gap_widths: float = _GAP_WIDTHS) -> WindowPlan:
    strip = weight.strip
    if math.isinf(omega_gap):
        width = strip
    else:
        width = gap_widths / omega_gap
    plateau = max(_PLATEAU * width, 40.0 * strip)
    L = plateau + _EDGE * width
    h = 2 * math.pi / (omega_max + _ALIAS_MARGIN / strip)
    K = int(math.ceil(L / h))
    var = width * width / 2.0
    m_tail = _gauss_mean(lambda u: weight.tail(plateau + u) + weight.tail(plateau - u), var)
    m_tail = max(m_tail, 0.0)
    # a-priori bounds, in units of sup|g|
    gauss = math.exp(-(min(gap_widths, 40.0) ** 2) / 4.0) if not math.isinf(omega_gap) else 0.0
    w_edge = float(weight.density(np.array([plateau]))[0])
    gap = omega_gap if not math.isinf(omega_gap) else 1.0
    window = 4.0 * gauss * (2.0 * w_edge / gap + m_tail / (gap * plateau) + w_edge * width)
    residue = 2.0 * weight.mass * special.erfc(plateau / width)
    alias = 2.0 * weight.mass * math.exp(-_ALIAS_MARGIN) / (-math.expm1(-2 * math.pi * strip / h))
    trunc = 2.0 * (weight.mass + m_tail) * special.erfc(_EDGE)
    return WindowPlan(h, K, plateau, width, m_tail, window + residue + alias + trunc)


def _check_budget(plan: WindowPlan, cfg: QuadratureConfig) -> None:
    if plan.points > _MAX_POINTS or plan.points // _BLOCK > cfg.max_subdivisions:
        raise NonConvergence(f"window grid needs {plan.points} points (budget exceeded)")


def windowed_integral(poly: DirichletPoly, scale: float, q: int, weight: _Weight,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """``int |D(scale t)|^(2q) weight(t) dt`` over the real line, with an error bound."""
    value, err, _ = _windowed(poly, scale, q, weight, cfg)
    return value, err


def _windowed(poly, scale, q, weight, cfg) -> tuple[float, float, int]:
    """``windowed_integral`` plus the number of integrand evaluations spent."""
    sup = poly.abs_sum() ** (2 * q)
    if poly.N == 1 or sup == 0.0:
        return sup * weight.mass, 0.0, 0
    evaluator = _PowerOnGrid(poly, scale, q)
    omega_max = 2 * q * float(np.max(evaluator.freq)) if evaluator.freq.size else 0.0
    omega_gap = scale * frequency_gap(poly.N, q)
    # a coarse pass fixes the scale of the answer, then the window is sized to the tolerance
    coarse = plan_window(weight, omega_max, omega_gap, 3.0)
    _check_budget(coarse, cfg)
    rough, _ = _trapezoid(evaluator, weight, coarse)
    goal = 0.25 * cfg.target(rough)
    gap_widths = _GAP_WIDTHS
    while gap_widths < 14.0 and sup * plan_window(weight, omega_max, omega_gap,
                                                  gap_widths).error_factor > goal:
        gap_widths += 0.5
    plan = plan_window(weight, omega_max, omega_gap, gap_widths)
    _check_budget(plan, cfg)
    value, rounding = _trapezoid(evaluator, weight, plan)
    err = sup * plan.error_factor + rounding
    if err > cfg.target(value):
        raise NonConvergence(f"error bound {err:.3g} exceeds tolerance {cfg.target(value):.3g}")
    return float(value), float(err), evaluator.points


_U = np.finfo(float).eps


def _trapezoid(evaluator: _PowerOnGrid, weight: _Weight, plan: WindowPlan) -> tuple[float, float]:
    """Trapezoid sum and a rounding estimate derived from the sampled ``|D|``."""
    h, K, q = plan.h, plan.K, evaluator.q
    mean_density = plan.tail_mass / (2.0 * plan.plateau)
    # per-sample error of |D|: accumulated dot-product rounding
    d_err = _U * (evaluator.y.size + 4) * float(np.sum(np.abs(evaluator.y)))
    parts, err_parts = [], []
    for k0, gp, gm in evaluator.blocks(h, K):
        k = np.arange(k0, k0 + gp.size)
        valid = k <= K
        t = k[valid] * h
        chi = 0.5 * (special.erf((plan.plateau + t) / plan.width)
                     + special.erf((plan.plateau - t) / plan.width))
        wt = (weight.density(t) + mean_density) * chi
        g = gp[valid] + gm[valid]
        contrib = g * wt
        # |d(|D|^2q)| <= 2q |D|^(2q-1) d|D|, summed over both signs of t
        sens = (gp[valid] ** ((2 * q - 1) / (2 * q)) + gm[valid] ** ((2 * q - 1) / (2 * q))) * wt
        if k0 == 0:
            contrib[0] *= 0.5
            sens[0] *= 0.5
        parts.append(float(np.sum(contrib)))
        err_parts.append(float(np.sum(sens)))
    value = h * math.fsum(parts)
    rounding = 2 * q * d_err * h * math.fsum(err_parts) + 64 * _U * abs(value)
    return value, rounding


# ----------------------------------------------------------------------------------------
# compact intervals


def adaptive_gl(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                abs_tol: float, rel_tol: float, max_subdivisions: int = 200_000,
                panel_width: float | None = None, order: int = 20) -> tuple[float, float]:
    """Adaptive composite Gauss-Legendre with step-doubling error estimates.

    ``f`` must accept arrays.  Panels are refined (bisected) until each meets
    its share of ``abs_tol + rel_tol |I|``; exhausting ``max_subdivisions``
    raises :class:`NonConvergence`.
    """
    if b == a:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    n0 = 1 if not panel_width else max(1, int(math.ceil((b - a) / panel_width)))
    edges = np.linspace(a, b, n0 + 1)
    lo, hi = edges[:-1], edges[1:]
    done_val, done_err = [], []
    total_panels = lo.size
    while lo.size:
        coarse = _gl_panels(f, lo, hi, order)
        mid = 0.5 * (lo + hi)
        fine = _gl_panels(f, lo, mid, order) + _gl_panels(f, mid, hi, order)
        err = np.abs(fine - coarse)
        estimate = math.fsum(done_val) + float(np.sum(fine))
        tol = max(abs_tol, rel_tol * abs(estimate))
        share = tol * (hi - lo) / (b - a)
        ok = err <= share
        done_val.extend(fine[ok].tolist())
        done_err.extend(err[ok].tolist())
        bad = ~ok
        if not bad.any():
            break
        total_panels += int(bad.sum())
        if total_panels > max_subdivisions:
            raise NonConvergence(
                f"adaptive quadrature exhausted {max_subdivisions} subdivisions")
        lo = np.concatenate([lo[bad], mid[bad]])
        hi = np.concatenate([mid[bad], hi[bad]])
        order_idx = np.argsort(lo, kind="stable")
        lo, hi = lo[order_idx], hi[order_idx]
    return sign * math.fsum(done_val), math.fsum(done_err)


def _gl_panels(f, lo, hi, order):
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (hi - lo)
    nodes = 0.5 * (lo + hi)[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(nodes.ravel())).reshape(nodes.shape)
    return (vals @ w) * half


def _power_fn(poly: DirichletPoly, scale: float, q: int):
    y = poly.weighted()
    keep = np.flatnonzero(y != 0)
    yk, freq = y[keep], scale * np.log(keep + 1.0)

    def g(t):
        t = np.asarray(t, dtype=float)
        out = np.empty(t.size)
        step = max(1, 2_000_000 // max(1, yk.size))
        for i in range(0, t.size, step):
            D = np.exp(-1j * np.outer(t[i:i + step], freq)) @ yk
            out[i:i + step] = (D.real ** 2 + D.imag ** 2) ** q
        return out

    top = 2 * q * float(freq.max()) if freq.size else 0.0
    return g, top


def _panel_width(top_freq: float) -> float:
    return 6.0 / top_freq if top_freq > 0 else math.inf


# ----------------------------------------------------------------------------------------
# public operations


def _tail_bound_t_max(sup: float, abs_tol: float) -> float:
    # sup * (1 - (2/pi) arctan(t)) <= abs_tol / 2
    eps = abs_tol / (2.0 * sup)
    if eps >= 1.0:
        return 0.0
    return math.tan(0.5 * math.pi * (1.0 - eps))


def cauchy_mean_quadrature(poly: DirichletPoly, s: float, q: int = 1,
                           cfg: QuadratureConfig = DEFAULT_CONFIG) -> CauchyMeanResult:
    """``int |D(st)|^(2q) dt / (pi(1+t^2))`` by direct numerical integration."""
    if not (np.isfinite(s) and s >= 0):
        raise ValueError("s must be a finite real >= 0")
    sup = poly.abs_sum() ** (2 * q)
    if s == 0.0:
        v = abs(complex(np.sum(poly.weighted()))) ** (2 * q)
        return CauchyMeanResult(v, Method.QUADRATURE, cost=1, error_bound=0.0)
    if cfg.tail == "bound":
        t_max = cfg.t_max if cfg.t_max is not None else _tail_bound_t_max(sup, cfg.abs_tol)
        tail = sup * (1.0 - 2.0 / math.pi * math.atan(t_max))
        if tail > cfg.abs_tol / 2 * (1 + 1e-9):
            raise ValueError("t_max too small for the requested abs_tol (tail bound violated)")
        g, top = _power_fn(poly, s, q)
        dens = cauchy_weight().density
        width = _panel_width(top)
        if width != math.inf and 2 * t_max / width > cfg.max_subdivisions:
            raise NonConvergence(f"t_max={t_max:.3g} needs more than {cfg.max_subdivisions} panels")
        calls = []

        def integrand(t):
            calls.append(np.size(t))
            return g(t) * dens(t)

        val, err = adaptive_gl(integrand, -t_max, t_max, cfg.abs_tol / 2, cfg.rel_tol,
                               cfg.max_subdivisions, panel_width=min(width, max(t_max / 8, 1.0)))
        return CauchyMeanResult(val, Method.QUADRATURE, cost=sum(calls), error_bound=err + tail)
    val, err, points = _windowed(poly, s, q, cauchy_weight(), cfg)
    return CauchyMeanResult(val, Method.QUADRATURE, cost=points, error_bound=err)


def finite_mean_value(poly: DirichletPoly, q: int, T: float,
                      cfg: QuadratureConfig = DEFAULT_CONFIG, s: float = 1.0) -> float:
    """``(1/2T) int_{-T}^{T} |D(s t)|^(2q) dt``."""
    if not T > 0:
        raise ValueError("T must be > 0")
    g, top = _power_fn(poly, s, q)
    val, _ = adaptive_gl(g, -T, T, cfg.abs_tol * 2 * T, cfg.rel_tol, cfg.max_subdivisions,
                         panel_width=_panel_width(top))
    return val / (2 * T)


def mean_value_profile(poly: DirichletPoly, q: int, v_max: float, s: float = 1.0,
                       order: int = 24):
    """Gauss nodes ``v`` on ``(0, v_max]`` with exact-to-rounding ``M(v) = (1/2v) int_{-v}^{v} g``.

    Returns ``(v, M(v), panel_weights)`` so that ``sum(wts * F(v))`` integrates
    any smooth ``F`` over ``[0, v_max]``.
    """
    g, top = _power_fn(poly, s, q)
    width = min(_panel_width(top), 2.0)
    n = int(math.ceil(v_max / width))
    edges = np.linspace(0.0, v_max, n + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (lo + hi)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    wts = half[:, None] * w[None, :]
    # cumulative integral of g(t) + g(-t) from 0 to each node
    full = (_gl_panels(lambda t: g(t) + g(-t), lo, hi, order))
    before = np.concatenate(([0.0], np.cumsum(full)[:-1]))
    # partial panel integrals [lo, node] with a mapped rule
    a = lo[:, None]
    sub_half = 0.5 * (nodes - a)
    sub_mid = 0.5 * (nodes + a)
    sub_nodes = sub_mid[..., None] + sub_half[..., None] * x
    gv = g(sub_nodes.ravel()) + g(-sub_nodes.ravel())
    partial = (gv.reshape(sub_nodes.shape) @ w) * sub_half
    G = before[:, None] + partial
    M = G / (2.0 * nodes)
    return nodes.ravel(), M.ravel(), wts.ravel()


def lubinsky_scaling_check(poly: DirichletPoly, q: int, s: float,
                           cfg: QuadratureConfig = DEFAULT_CONFIG,
                           u_max: float = 1e4) -> tuple[float, float]:
    """Both sides of ``int g(st) dt/(pi(1+t^2)) = 4 int_0^inf M(su) u^2/(pi(1+u^2)^2) du``.

    The left side is a Cauchy-mean quadrature; the right side integrates the
    running mean ``M`` numerically on ``[0, u_max]`` and closes the remaining
    tail with the analytic mass of ``u^2/(1+u^2)^2`` times ``M(s u_max)``.
    """
    lhs = cauchy_mean_quadrature(poly, s, q, cfg).value
    v, M, wts = mean_value_profile(poly, q, s * u_max, s=1.0)
    u = v / s
    kern = 4.0 * u ** 2 / (math.pi * (1 + u ** 2) ** 2)
    near = float(np.sum(wts / s * kern * M))
    # int_U^inf u^2/(1+u^2)^2 du = (1/2)(arctan(1/U) + U/(1+U^2))
    U = u_max
    mass = 4.0 / math.pi * 0.5 * (math.atan(1.0 / U) + U / (1 + U * U))
    return lhs, near + mass * float(M[-1])


def log_kernel_identity_check(poly: DirichletPoly, q: int, S: float, T: float,
                              cfg: QuadratureConfig = DEFAULT_CONFIG,
                              order: int = 40) -> tuple[float, float]:
    """``int_S^{sqrt(S^2+T^2)} C(s) ds`` vs ``(1/2pi) int |D(theta)|^(2q) log(1 + T^2/(theta^2+S^2))``.

    ``C(s)`` is the exact kernel-sum Cauchy mean, integrated in ``s`` by
    Gauss-Legendre; the right side uses the windowed oracle.
    """
    if not (S > 0 and T > 0):
        raise ValueError("S and T must be positive")
    upper = math.hypot(S, T)
    edges = np.linspace(S, upper, 5)
    nodes, wts = panel_rule(edges, order)
    lhs = math.fsum(w * cauchy_mean_2q(poly, float(x), q).value for x, w in zip(nodes, wts))
    rhs, _ = windowed_integral(poly, 1.0, q, log_kernel_weight(S, T), cfg)
    return lhs, rhs


def sup_bound_check(poly: DirichletPoly, q: int, S: float, samples: int = 64,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> tuple[float, float]:
    """``(1/S) int_0^S |D|^(2q)`` against ``(2pi/log 2) sup_{S<=s<=2S} C(s)``."""
    g, top = _power_fn(poly, 1.0, q)
    val, _ = adaptive_gl(g, 0.0, S, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions,
                         panel_width=_panel_width(top))
    grid = np.linspace(S, 2 * S, samples)
    sup = max(cauchy_mean_2q(poly, float(x), q).value for x in grid)
    return val / S, 2 * math.pi / math.log(2) * sup


@dataclass(frozen=True)
class ResummationBracket:
    series: float
    integral: float
    J_max: int
    tail_bound: float

    @property
    def ratio(self) -> float:
        return self.integral / self.series


def resummation_bracket(poly: DirichletPoly, sigma: float | None, s: float, q: int = 1,
                        J_max: int = 2000,
                        cfg: QuadratureConfig = DEFAULT_CONFIG) -> ResummationBracket:
    """Truncated ``sum_{j<=J} M_j / j^2`` against the exact Cauchy mean.

    ``M_j = (1/2j) int_{-j}^{j} |D(st)|^(2q) dt``; the omitted tail is at most
    ``sup|D|^(2q) / J``.
    """
    if sigma is not None:
        poly = poly.with_sigma(sigma)
    g, top = _power_fn(poly, s, q)
    order = 32
    per_unit = max(1, int(math.ceil(1.0 / _panel_width(top))) if top > 0 else 1)
    edges = np.linspace(0.0, float(J_max), J_max * per_unit + 1)
    sym = lambda t: g(t) + g(-t)  # noqa: E731
    pos = _gl_panels(sym, edges[:-1], edges[1:], order)
    check = _gl_panels(sym, edges[:-1], edges[1:], order - 8)
    drift = float(np.max(np.abs(np.cumsum(pos - check))))
    if drift > cfg.target(float(np.sum(pos))):
        raise NonConvergence(f"running-mean quadrature drift {drift:.3g} exceeds tolerance")
    G = np.cumsum(pos.reshape(J_max, per_unit).sum(axis=1))  # int_{-j}^{j}
    j = np.arange(1, J_max + 1, dtype=float)
    Mj = G / (2 * j)
    series = math.fsum(Mj / j ** 2)
    integral = cauchy_mean_2q(poly, s, q).value
    tail = poly.abs_sum() ** (2 * q) / J_max
    return ResummationBracket(series, integral, J_max, tail)


