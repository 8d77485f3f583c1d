"""Deterministic rate tables and bound ingredients.

theoretical_rate / corollary_rate reproduce the piecewise Wasserstein and
Kolmogorov exponent tables in exact rational arithmetic.  a_n evaluates the
deterministic perturbation majorant; min_integral computes the two-variable
min-power integral against the heavy-tail intensity ds C |x|^(-1-beta) dx
whose decay in n certifies the rate regimes; gamma12_proxy evaluates the
quadruple overlap-sum majorant of the first two second-order terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import AccuracyError, InputError, ParameterError
from .kernels import (
    DiscreteMA,
    KernelSpec,
    OuExponential,
    PowerLaw,
    kernel_eval,
)
from .quadrature import adaptive_gk

__all__ = [
    "RateClass",
    "BoundRate",
    "IntensityMeasure",
    "theoretical_rate",
    "corollary_rate",
    "min_integral_rate",
    "LfsnExample",
    "FlnExample",
    "ArimaExample",
    "OuExample",
    "CorollaryRates",
    "a_n",
    "a_n2",
    "min_integral",
    "gamma12_proxy",
]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(float(x))


@dataclass(frozen=True)
class BoundRate:
    """A power-of-n rate n^exponent (log n)^log_power, unrestricted exponent."""

    exponent: Fraction
    log_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "exponent", _as_fraction(self.exponent))
        if self.log_power not in (0, 1):
            raise ParameterError("log_power must be 0 or 1")

    @property
    def exponent_float(self) -> float:
        return float(self.exponent)

    def describe(self) -> str:
        s = f"n^({self.exponent})"
        return s + (" log(n)" if self.log_power else "")


@dataclass(frozen=True)
class RateClass(BoundRate):
    """Main-table rate: exponent in [-1/2, 0), log factor only at boundaries."""

    def __post_init__(self):
        super().__post_init__()
        if not (Fraction(-1, 2) <= self.exponent < 0):
            raise ParameterError(
                f"rate exponent must lie in [-1/2, 0), got {self.exponent}")
        if self.log_power and self.exponent != Fraction(-1, 2):
            raise ParameterError("log factor only occurs at the -1/2 boundary")


@dataclass(frozen=True)
class IntensityMeasure:
    """Jump intensity ds * C_kappa |x|^(-1-beta) dx on the plane."""

    beta: float
    C_kappa: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.beta < 2.0):
            raise ParameterError("intensity tail index must be in (0, 2)")
        if self.C_kappa <= 0:
            raise ParameterError("intensity constant must be > 0")


# ---------------------------------------------------------------------------
# Rate exponent tables
# ---------------------------------------------------------------------------

def theoretical_rate(alpha_beta, metric: str) -> RateClass:
    """Piecewise rate for d_W / d_K as a function of alpha*beta."""
    ab = _as_fraction(alpha_beta)
    if ab <= 2:
        raise ParameterError("rate tables require alpha*beta > 2")
    metric = metric.lower()
    if metric in ("wasserstein", "dw", "w"):
        if ab > 3:
            return RateClass(Fraction(-1, 2), 0)
        if ab == 3:
            return RateClass(Fraction(-1, 2), 1)
        return RateClass((2 - ab) / 2, 0)
    if metric in ("kolmogorov", "dk", "k"):
        if ab > 4:
            return RateClass(Fraction(-1, 2), 0)
        if ab == 4:
            return RateClass(Fraction(-1, 2), 1)
        return RateClass((2 - ab) / 4, 0)
    raise ParameterError(f"unknown metric {metric!r}")


def min_integral_rate(alpha_beta, q) -> BoundRate:
    """Decay regime of the min-power integral for exponent pair (p, q)."""
    ab = _as_fraction(alpha_beta)
    qq = _as_fraction(q)
    if ab <= 2:
        raise ParameterError("min-integral regimes require alpha*beta > 2")
    if ab > qq:
        return BoundRate(1 - qq / 2, 0)
    if ab == qq:
        return BoundRate(1 - qq / 2, 1)
    return BoundRate((2 - ab) / 2, 0)


@dataclass(frozen=True)
class LfsnExample:
    H: Fraction
    beta: Fraction


@dataclass(frozen=True)
class FlnExample:
    rho: Fraction
    eps: Fraction


@dataclass(frozen=True)
class ArimaExample:
    d: Fraction
    beta: Fraction


@dataclass(frozen=True)
class OuExample:
    pass


@dataclass(frozen=True)
class CorollaryRates:
    wasserstein: RateClass
    kolmogorov: RateClass


def corollary_rate(example) -> CorollaryRates:
    """Named-example rates, checked for consistency with the main table."""
    if isinstance(example, LfsnExample):
        h, beta = _as_fraction(example.H), _as_fraction(example.beta)
        if not (1 < beta < 2):
            raise ParameterError("linear fractional stable noise requires beta in (1, 2)")
        if not (0 < h < 1 - 1 / beta):
            raise ParameterError(
                "linear fractional stable noise requires 0 < H < 1 - 1/beta")
        w_exp = (1 + beta * (h - 1)) / 2
        k_exp = (1 + beta * (h - 1)) / 4
        ab = beta * (1 - h) + 1          # alpha = 1 - H + 1/beta
        rates = CorollaryRates(RateClass(w_exp, 0), RateClass(k_exp, 0))
        assert theoretical_rate(ab, "wasserstein") == rates.wasserstein
        assert theoretical_rate(ab, "kolmogorov") == rates.kolmogorov
        return rates

    if isinstance(example, FlnExample):
        rho, eps = _as_fraction(example.rho), _as_fraction(example.eps)
        if rho <= 0:
            raise ParameterError("fractional Levy noise requires rho > 0")
        if eps <= 0 or eps >= rho / 2:
            raise ParameterError("eps must lie in (0, rho/2)")
        alpha = rho + 1
        if rho > Fraction(1, 2):
            w = RateClass(Fraction(-1, 2), 0)
        else:
            w = RateClass(-rho + eps, 0)
            beta_w = (2 + 2 * rho - 2 * eps) / alpha
            assert 0 < beta_w < 2
            assert theoretical_rate(alpha * beta_w, "wasserstein") == w
        if rho > 1:
            k = RateClass(Fraction(-1, 2), 0)
        else:
            k = RateClass(-rho / 2 + eps, 0)
            beta_k = (2 + 2 * rho - 4 * eps) / alpha
            assert 0 < beta_k < 2
            assert theoretical_rate(alpha * beta_k, "kolmogorov") == k
        return CorollaryRates(w, k)

    if isinstance(example, ArimaExample):
        d, beta = _as_fraction(example.d), _as_fraction(example.beta)
        if not (0 < beta < 2):
            raise ParameterError("stable index beta must be in (0, 2)")
        if d >= 1 - 2 / beta:
            raise ParameterError("fractional order requires d < 1 - 2/beta")
        if d == int(d):
            raise ParameterError("fractional order d must not be an integer")
        ab = (1 - d) * beta              # alpha = 1 - d
        rates = CorollaryRates(theoretical_rate(ab, "wasserstein"),
                               theoretical_rate(ab, "kolmogorov"))
        # printed corollary form for the slow branches
        if 1 - 3 / beta < d:
            assert rates.wasserstein.exponent == 1 - (1 - d) * beta / 2
        if 1 - 4 / beta < d:
            assert rates.kolmogorov.exponent == (1 - (1 - d) * beta / 2) / 2
        return rates

    if isinstance(example, OuExample):
        return CorollaryRates(RateClass(Fraction(-1, 2), 0),
                              RateClass(Fraction(-1, 2), 0))

    raise ParameterError(f"unknown corollary example {example!r}")


# ---------------------------------------------------------------------------
# A_n and its integrals
# ---------------------------------------------------------------------------

def a_n(z, kernel: KernelSpec, n: int) -> float:
    """n^(-1/2) sum_{t=1..n} min(1, |x g(t - s)|)."""
    x, s = float(z[0]), float(z[1])
    if n < 1:
        raise ParameterError("n must be >= 1")
    t = np.arange(1, n + 1, dtype=float)
    g = np.abs(kernel_eval(kernel, t - s))
    return float(np.minimum(1.0, abs(x) * g).sum() / math.sqrt(n))


def a_n2(z1, z2, kernel: KernelSpec, n: int) -> float:
    """Product form n^(-1/2) sum_t min(1,|x1 g(t-s1)|) min(1,|x2 g(t-s2)|)."""
    x1, s1 = float(z1[0]), float(z1[1])
    x2, s2 = float(z2[0]), float(z2[1])
    if n < 1:
        raise ParameterError("n must be >= 1")
    t = np.arange(1, n + 1, dtype=float)
    m1 = np.minimum(1.0, abs(x1) * np.abs(kernel_eval(kernel, t - s1)))
    m2 = np.minimum(1.0, abs(x2) * np.abs(kernel_eval(kernel, t - s2)))
    return float((m1 * m2).sum() / math.sqrt(n))


def _tail_envelope(kernel: KernelSpec, u: float) -> float:
    """inf over [1, u] of |g| (tails are monotone except for step kernels)."""
    if isinstance(kernel, DiscreteMA):
        if u >= len(kernel.b):
            return 0.0
        top = min(int(math.floor(u)), len(kernel.b) - 1)
        if top < 1:
            return abs(kernel.b[0])
        return min(abs(v) for v in kernel.b[1:top + 1])
    return abs(float(kernel_eval(kernel, u)))


def saturation_reach(kernel: KernelSpec, x: float) -> float:
    """Largest u >= 1 with x |g| >= 1 on all of [1, u] (1 when none)."""
    if x <= 0:
        return 1.0
    if isinstance(kernel, PowerLaw):
        v = (kernel.K * x) ** (1.0 / kernel.alpha)
        return max(1.0, v) if kernel.K * x >= 1 else 1.0
    if isinstance(kernel, OuExponential):
        return max(1.0, math.log(max(x, 1e-300)) / kernel.lam)
    if isinstance(kernel, DiscreteMA):
        reach = 1.0
        run_min = math.inf
        for j in range(1, len(kernel.b)):
            run_min = min(run_min, abs(kernel.b[j]))
            if x * run_min >= 1.0:
                reach = j + 1.0
            else:
                break
        return reach
    # monotone singular-tail kernels: bisect x |g(u)| = 1 on (1, big)
    lo, hi = 1.0 + 1e-12, 1.0 + 1e-9
    if x * _tail_envelope(kernel, lo) < 1.0:
        return 1.0
    while x * _tail_envelope(kernel, hi) >= 1.0 and hi < 1e30:
        hi *= 4.0
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if x * _tail_envelope(kernel, mid) >= 1.0:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-12:
            break
    return lo


def _gl_nodes(k: int):
    x, w = np.polynomial.legendre.leggauss(k)
    return (x + 1.0) / 2.0, w / 2.0


class _AnComb:
    """Vectorised A_n evaluation on the unit-cell comb.

    For s = j + theta in [0, n) the majorant sum is the cumulative comb
    C_m(theta) = sum_{l<=m} min(1, x |g(l - theta)|) at m = n - j; for
    s = -v < 0 with v = j' + theta' it is a difference of two comb rows.
    One kernel matrix |g(l - theta)| serves every x.
    """

    def __init__(self, kernel: KernelSpec, n: int, order: int = 16):
        self.n = n
        self.jc = n
        t_hi, w_hi = _gl_nodes(order)
        t_lo, w_lo = _gl_nodes(order // 2)
        self.k_hi = t_hi.size
        self.theta = np.concatenate([t_hi, t_lo])
        self.w_hi = w_hi
        self.w_lo = w_lo
        rows = np.arange(1, n + self.jc + 2, dtype=float)
        self.G = np.abs(np.asarray(
            kernel_eval(kernel, rows[:, None] - self.theta[None, :]), dtype=float))

    def parts(self, x: float, fmin, with_neg: bool = True):
        """Comb integrals (hi, lo) for s in [0, n) and optionally s in (-jc, 0).

        Returns (pos_hi, pos_lo, neg_hi, neg_lo); the negative part is zero
        when with_neg is False (deep-saturation x handle it analytically).
        """
        n, jc, kh = self.n, self.jc, self.k_hi
        h = np.minimum(1.0, x * self.G)
        c = np.cumsum(h, axis=0)
        root = 1.0 / math.sqrt(n)
        vals1 = fmin(c[:n] * root)
        pos_hi = float((vals1[:, :kh] @ self.w_hi).sum())
        pos_lo = float((vals1[:, kh:] @ self.w_lo).sum())
        if not with_neg:
            return pos_hi, pos_lo, 0.0, 0.0
        vals2 = fmin((c[n:n + jc] - c[:jc]) * root)
        neg_hi = float((vals2[:, :kh] @ self.w_hi).sum())
        neg_lo = float((vals2[:, kh:] @ self.w_lo).sum())
        return pos_hi, pos_lo, neg_hi, neg_lo


def _an_direct(kernel: KernelSpec, n: int, x: float, v: np.ndarray) -> np.ndarray:
    """A_n(x, -v) for an array of v >= 0, direct O(n) sums."""
    i = np.arange(1, n + 1, dtype=float)
    g = np.abs(np.asarray(kernel_eval(kernel, i[None, :] + v[:, None]), dtype=float))
    return np.minimum(1.0, x * g).sum(axis=1) / math.sqrt(n)


def min_integral(p: float, q: float, n: int, kernel: KernelSpec,
                 measure: IntensityMeasure, tol: float = 1e-4,
                 max_outer_cells: int = 220) -> float:
    """Integral of min(A_n^p, A_n^q) against ds C |x|^(-1-beta) dx.

    The x-domain splits at 1 and at the deep-saturation point (the proof's
    three-piece decomposition); the s-integral runs on the unit-cell comb
    with the plateau of fully saturated s handled exactly and the far tail
    by a 1/v transform.  The achieved error combines the outer GK bound
    with the difference of the two comb quadrature orders.
    """
    if not (0.0 <= p <= 2.0):
        raise ParameterError("p must be in [0, 2]")
    if q <= 2.0 or q <= p:
        raise ParameterError("q must exceed max(2, p)")
    if n < 1:
        raise ParameterError("n must be >= 1")
    beta = measure.beta
    alpha = kernel.decay_alpha()
    if alpha != math.inf and alpha * beta <= 2.0:
        raise ParameterError("min-integral regimes require alpha*beta > 2")

    def fmin(a):
        ap = a ** p if p != 0 else np.ones_like(a)
        return np.minimum(ap, a ** q)

    comb = _AnComb(kernel, n)
    root_n = math.sqrt(n)
    f_sat = float(min(root_n ** p, root_n ** q))
    inner_tol = max(tol * 0.1, 1e-7)

    def inner(x: float) -> tuple[float, float, float]:
        """(value, low-order replica, extra error) of the s-integral for one x."""
        reach = saturation_reach(kernel, x)
        j0 = max(0, int(math.floor(reach - n)))
        if j0 == 0:
            p_hi, p_lo, n_hi, n_lo = comb.parts(x, fmin, with_neg=True)
            # far tail v >= jc: substitute v = jc - 1 + 1/u
            def tail_f(us):
                us = np.asarray(us, dtype=float)
                v = comb.jc - 1.0 + 1.0 / us
                return fmin(_an_direct(kernel, n, x, v)) / us ** 2
            tv, terr, _ = adaptive_gk(tail_f, 1e-12, 1.0, inner_tol, max_cells=64)
            return p_hi + n_hi + tv, p_lo + n_lo + tv, terr
        # deep saturation: exact plateau + direct quadrature on the edge + tail
        plateau = j0 * f_sat

        def edge_f(vs):
            return fmin(_an_direct(kernel, n, x, np.asarray(vs, dtype=float)))
        ev, eerr, _ = adaptive_gk(edge_f, float(j0), float(j0 + 2 * n),
                                  inner_tol, max_cells=96)

        def tail_f(us):
            us = np.asarray(us, dtype=float)
            v = j0 + 2.0 * n - 1.0 + 1.0 / us
            return fmin(_an_direct(kernel, n, x, v)) / us ** 2
        tv, terr, _ = adaptive_gk(tail_f, 1e-12, 1.0, inner_tol, max_cells=64)
        # the comb still owns s in [0, n)
        p_hi, p_lo, _, _ = comb.parts(x, fmin, with_neg=False)
        neg = plateau + ev + tv
        return p_hi + neg, p_lo + neg, eerr + terr

    def outer_integrand(xs):
        xs = np.asarray(xs, dtype=float)
        out = np.empty((xs.size, 3))
        for i, x in enumerate(xs):
            hi, lo, ierr = inner(float(x))
            w = x ** (-1.0 - beta)
            out[i, 0] = hi * w
            out[i, 1] = lo * w
            out[i, 2] = ierr * w
        return out

    # piece boundaries: [x_lo, 1], [1, x_big], tail beyond x_big
    tail_n = _tail_envelope(kernel, float(n + 1))
    x_big = (1.0 / tail_n) if tail_n > 0 else None

    total = np.zeros(3)
    err = 0.0
    # x in (0, 1]: integrand ~ x^(q-1-beta) near 0, regular since q > 2 > beta
    v, e, _ = _gk_multi(outer_integrand, 1e-9, 1.0, tol, max_outer_cells)
    total += v
    err += e
    if x_big is not None and x_big > 1.0:
        edges = np.geomspace(1.0, x_big, max(2, int(math.log10(x_big)) + 2))
        for a, b in zip(edges[:-1], edges[1:]):
            v, e, _ = _gk_multi(outer_integrand, float(a), float(b), tol,
                                max_outer_cells)
            total += v
            err += e

    # deep tail: x = x0 / u
    x0 = x_big if x_big is not None else 1.0

    def tail_outer(us):
        us = np.asarray(us, dtype=float)
        xs = x0 / us
        vals = outer_integrand(xs)
        return vals * (x0 / us ** 2)[:, None]

    if alpha == math.inf:
        v, e, _ = _gk_multi(tail_outer, 1e-9, 1.0, tol, max_outer_cells)
        total += v
        err += e
    else:
        # integrand ~ u^(beta - 1/alpha - 1) near u = 0: regularise if singular
        expo = beta - 1.0 / alpha - 1.0
        if expo <= -1.0:
            raise ParameterError("outer tail diverges: alpha*beta <= 1")
        if expo < 0.0:
            s = 1.0 / (expo + 1.0)

            def tail_reg(ws):
                ws = np.asarray(ws, dtype=float)
                us = ws ** s
                return tail_outer(us) * (s * ws ** (s - 1.0))[:, None]
            v, e, _ = _gk_multi(tail_reg, 1e-12, 1.0, tol, max_outer_cells)
        else:
            v, e, _ = _gk_multi(tail_outer, 1e-12, 1.0, tol, max_outer_cells)
        total += v
        err += e

    value_hi = 2.0 * measure.C_kappa * total[0]
    value_lo = 2.0 * measure.C_kappa * total[1]
    comb_err = abs(value_hi - value_lo)
    inner_err = 2.0 * measure.C_kappa * total[2]
    full_err = 2.0 * measure.C_kappa * err + comb_err + inner_err
    if full_err > 50.0 * tol * max(abs(value_hi), 1e-300):
        raise AccuracyError(
            f"min_integral: achieved error {full_err:.2e} exceeds tolerance "
            f"{tol:.1e}", estimate=float(value_hi), error_bound=float(full_err))
    return float(value_hi)


def _gk_multi(f, a, b, tol, max_cells):
    """adaptive_gk for integrands returning (len(x), k) column stacks."""
    from .quadrature import _G7_WEIGHTS, _K15_NODES, _K15_WEIGHTS

    def eval_cell(lo, hi):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        fx = np.asarray(f(mid + half * _K15_NODES), dtype=float)
        k15 = half * (fx.T @ _K15_WEIGHTS)
        g7 = half * (fx[:, 0] @ _G7_WEIGHTS)
        err = abs(k15[0] - g7)
        err = max((200.0 * err) ** 1.5, err) if err else 0.0
        return k15, err

    cells = []
    val, e = eval_cell(a, b)
    cells.append([e, a, b, val])
    nev = 15
    while len(cells) < max_cells:
        total0 = sum(c[3][0] for c in cells)
        errsum = sum(c[0] for c in cells)
        if errsum <= tol * max(abs(total0), 1e-300):
            break
        cells.sort(key=lambda c: -c[0])
        e0, lo, hi, _ = cells.pop(0)
        mid = 0.5 * (lo + hi)
        for l2, h2 in ((lo, mid), (mid, hi)):
            val, e = eval_cell(l2, h2)
            nev += 15
            cells.append([e, l2, h2, val])
    total = np.sum([c[3] for c in cells], axis=0)
    errsum = float(sum(c[0] for c in cells))
    return total, errsum, nev


# ---------------------------------------------------------------------------
# gamma_1 / gamma_2 quadruple-sum proxy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaProxy:
    gamma1_sq: float
    gamma2_sq: float


def gamma12_proxy(n: int, kernel: KernelSpec | None, beta: float | None,
                  rho_table=None) -> GammaProxy:
    """n^-2 sum over t1..t4 of rho_{t1-t3} rho_{t2-t4} rho_{t3-t4}.

    Factoring the t1 and t2 sums gives S(t) = sum_u rho_{u-t}, then the sum
    collapses to sum_{t3,t4} rho_{t3-t4} S(t3) S(t4) in O(n^2) work via an
    autocorrelation (rho is extended by its evenness).  The same majorant
    serves gamma_1^2 and gamma_2^2.  rho_table, when omitted, is built from
    (kernel, beta) by the overlap quadrature.
    """
    if rho_table is None:
        if kernel is None or beta is None:
            raise InputError("either a rho table or (kernel, beta) is required")
        from .kernels import rho_k
        rho_table = [rho_k(kernel, beta, k, tol=1e-8) for k in range(n + 1)]
    rho = np.asarray(rho_table, dtype=float)
    if rho.ndim != 1 or rho.size < n + 1:
        raise InputError(f"rho table must cover lags 0..{n}, got {rho.size}")
    # symmetric extension r[l] = rho_|l|, l = -(n-1) .. n-1
    r = np.concatenate([rho[n - 1:0:-1], rho[:n]])
    # S(t) = sum_{u=1..n} rho_{u-t} = prefix sums over the symmetric table
    csum = np.concatenate([[0.0], np.cumsum(r)])
    # window for t: lags (1-t) .. (n-t) -> indices (n-t) .. (2n-1-t) in r
    t = np.arange(1, n + 1)
    s_of_t = csum[2 * n - t] - csum[n - t]
    # sum_{t3,t4} rho_{t3-t4} S(t3) S(t4) = sum_d rho_d * corr_d(S)
    corr = np.correlate(s_of_t, s_of_t, mode="full")     # lags -(n-1)..(n-1)
    val = float((r * corr).sum()) / float(n) ** 2
    return GammaProxy(gamma1_sq=val, gamma2_sq=val)
