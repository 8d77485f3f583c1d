"""Moving-average kernels, FARIMA coefficients and kernel overlap integrals.

Every kernel vanishes on (-inf, 0].  The canonical power-law realisation is
g(x) = K x^gamma on (0, 1) and K x^-alpha on [1, inf), the extremal kernel
for the power-law envelope; the increment kernels carry an integrable
interior singularity at x = 1 that the quadrature always splits at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, ParameterError, StationarityError
from .quadrature import (
    check_accuracy,
    integrate_cells,
    integrate_upper_tail,
    quad_cell,
)

__all__ = [
    "PowerLaw",
    "LfsnIncrement",
    "FractionalLevyIncrement",
    "OuExponential",
    "DiscreteMA",
    "KernelSpec",
    "kernel_eval",
    "arima_coefficients",
    "rho_k",
    "product4_integral",
    "kernel_beta_integral",
]


def _pos_pow(x, expo):
    """x^expo on x > 0 and 0 elsewhere, without overflow warnings."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, safe ** expo, 0.0)


@dataclass(frozen=True)
class PowerLaw:
    """g(x) = K x^gamma on (0,1), K x^-alpha on [1,inf)."""

    gamma: float
    alpha: float
    K: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ParameterError("power-law decay exponent alpha must be > 0")
        if self.K < 0:
            raise ParameterError("kernel scale K must be >= 0")

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        head = self.K * _pos_pow(np.where(x < 1.0, x, 0.0), self.gamma)
        tail = self.K * _pos_pow(np.where(x >= 1.0, x, 0.0), -self.alpha)
        return np.where(x > 0.0, np.where(x < 1.0, head, tail), 0.0)

    def knots(self):
        return (0.0, 1.0)

    def power_at_zero(self) -> float:
        return self.gamma

    def interior_singularities(self):
        return ()

    def decay_alpha(self) -> float:
        return self.alpha

    def head_limit(self):
        """Right limit of g at 0, None when unbounded."""
        if self.gamma > 0:
            return 0.0
        if self.gamma == 0:
            return self.K
        return None


@dataclass(frozen=True)
class LfsnIncrement:
    """Increment kernel of the linear fractional stable motion.

    g(x) = (x)_+^(H - 1/beta) - (x - 1)_+^(H - 1/beta); the fold keeps the
    moving average one-dimensional and avoids differencing two nearly equal
    heavy-tailed integrals.
    """

    H: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.H < 1.0):
            raise ParameterError("self-similarity H must be in (0, 1)")
        if not (0.0 < self.beta < 2.0):
            raise ParameterError("stable index beta must be in (0, 2)")

    @property
    def exponent(self) -> float:
        return self.H - 1.0 / self.beta

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        return _pos_pow(x, self.exponent) - _pos_pow(x - 1.0, self.exponent)

    def knots(self):
        return (0.0, 1.0)

    def power_at_zero(self) -> float:
        return self.exponent

    def interior_singularities(self):
        if self.exponent < 0:
            return ((1.0, self.exponent),)
        return ()

    def decay_alpha(self) -> float:
        return 1.0 - self.H + 1.0 / self.beta

    def head_limit(self):
        if self.exponent > 0:
            return 0.0
        if self.exponent == 0:
            return 0.0          # kernel is identically 0 before the fold point
        return None


@dataclass(frozen=True)
class FractionalLevyIncrement:
    """g(x) = (x)_+^(-rho) - (x - 1)_+^(-rho), the fractional Levy noise kernel."""

    rho: float

    def __post_init__(self):
        if self.rho <= 0:
            raise ParameterError("decay parameter rho must be > 0")

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        return _pos_pow(x, -self.rho) - _pos_pow(x - 1.0, -self.rho)

    def knots(self):
        return (0.0, 1.0)

    def power_at_zero(self) -> float:
        return -self.rho

    def interior_singularities(self):
        return ((1.0, -self.rho),)

    def decay_alpha(self) -> float:
        return 1.0 + self.rho

    def head_limit(self):
        return None


@dataclass(frozen=True)
class OuExponential:
    """g(x) = exp(-lam x) on x > 0: the Ornstein-Uhlenbeck kernel."""

    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ParameterError("OU rate must be > 0")

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x > 0.0, x, 0.0)
        return np.where(x > 0.0, np.exp(-self.lam * safe), 0.0)

    def knots(self):
        return (0.0,)

    def power_at_zero(self) -> float:
        return 0.0

    def interior_singularities(self):
        return ()

    def decay_alpha(self) -> float:
        return math.inf

    def head_limit(self):
        return 1.0


@dataclass(frozen=True)
class DiscreteMA:
    """Step kernel g(x) = b[floor(x)] on [0, len(b)), for discrete moving averages."""

    b: tuple

    def __post_init__(self):
        if len(self.b) == 0:
            raise ParameterError("coefficient sequence must be non-empty")
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        coef = np.asarray(self.b)
        idx = np.floor(x).astype(int)
        valid = (x > 0.0) & (idx < len(self.b))
        idx = np.clip(idx, 0, len(self.b) - 1)
        return np.where(valid, coef[idx], 0.0)

    def knots(self):
        return tuple(float(j) for j in range(len(self.b) + 1))

    def power_at_zero(self) -> float:
        return 0.0

    def interior_singularities(self):
        return ()

    def decay_alpha(self) -> float:
        return math.inf      # compact support

    def head_limit(self):
        return self.b[0]


KernelSpec = PowerLaw | LfsnIncrement | FractionalLevyIncrement | OuExponential | DiscreteMA


def kernel_eval(spec: KernelSpec, x):
    """g(x); exactly 0 for every x <= 0.  Total on the real line."""
    out = spec.eval(x)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def kernel_support_bound(spec: KernelSpec) -> float:
    """Finite support endpoint, inf for kernels with unbounded support."""
    if isinstance(spec, DiscreteMA):
        return float(len(spec.b))
    return math.inf


# ---------------------------------------------------------------------------
# FARIMA coefficients
# ---------------------------------------------------------------------------

def arima_coefficients(phi, theta, d: float, n_max: int) -> np.ndarray:
    """Moving-average coefficients of Theta(B) Phi(B)^-1 (1-B)^-d.

    The fractional factor uses the recursion psi_0 = 1,
    psi_j = psi_{j-1} (j - 1 + d) / j, convolved with the MA polynomial and
    pushed through the AR recursion.  Phi must have no roots in the closed
    unit disk.
    """
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if n_max < 0:
        raise ParameterError("n_max must be >= 0")
    if phi.size:
        # Phi(z) = 1 - phi_1 z - ... - phi_p z^p, highest degree first for roots
        poly = np.concatenate([-phi[::-1], [1.0]])
        roots = np.roots(poly)
        if np.any(np.abs(roots) <= 1.0):
            raise StationarityError(
                f"AR polynomial has root(s) of modulus <= 1: {roots[np.abs(roots) <= 1.0]}")
    # fractional differencing weights
    psi = np.empty(n_max + 1)
    psi[0] = 1.0
    for j in range(1, n_max + 1):
        psi[j] = psi[j - 1] * (j - 1 + d) / j
    # convolve with Theta(z) = 1 + theta_1 z + ...
    c = psi.copy()
    for i, th in enumerate(theta, start=1):
        if i > n_max:
            break
        c[i:] += th * psi[:n_max + 1 - i]
    if not phi.size:
        return c
    b = np.empty(n_max + 1)
    for j in range(n_max + 1):
        acc = c[j]
        for i in range(1, min(j, phi.size) + 1):
            acc += phi[i - 1] * b[j - i]
        b[j] = acc
    return b


# ---------------------------------------------------------------------------
# Overlap integrals
# ---------------------------------------------------------------------------

def _sing_points_abs_pow(spec: KernelSpec, shift: float, frac: float):
    """Singular points of |g(x + shift)|^frac as {x: (p_left, p_right)}.

    frac is the power applied to |g|; exponents scale accordingly.
    """
    out = {}
    p0 = spec.power_at_zero()
    if p0 < 0:
        out[-shift] = (None, p0 * frac)
    for (x0, p) in spec.interior_singularities():
        out[x0 - shift] = (None, p * frac)
    return out


def _merge_singular(*dicts):
    merged = {}
    for d in dicts:
        for x, (pl, pr) in d.items():
            opl, opr = merged.get(x, (None, None))
            merged[x] = (
                (opl or 0.0) + (pl or 0.0) if (pl is not None or opl is not None) else None,
                (opr or 0.0) + (pr or 0.0) if (pr is not None or opr is not None) else None,
            )
    return merged


def rho_k(spec: KernelSpec, beta: float, k: float, tol: float = 1e-8,
          tail_cutoff: float | None = None) -> float:
    """Overlap integral int |g(x) g(x+k)|^(beta/2) dx over the real line.

    The [0,1] cell with an x^(gamma beta/2) singularity is handled by a
    power substitution, the infinite tail by x = 1/u.  tail_cutoff forces a
    hard truncation at the given point instead (used by truncation tests).
    """
    if beta <= 0 or beta >= 2:
        raise ParameterError("beta must be in (0, 2)")
    if k < 0:
        k = -k          # rho is even in k
    frac = beta / 2.0

    def integrand(x):
        return float(abs(kernel_eval(spec, x) * kernel_eval(spec, x + k))) ** frac

    sup = kernel_support_bound(spec)
    if sup < math.inf and k >= sup:
        return 0.0

    sing = _merge_singular(
        _sing_points_abs_pow(spec, 0.0, frac),
        _sing_points_abs_pow(spec, k, frac),
    )
    pts = {0.0}
    for kn in spec.knots():
        pts.add(float(kn))
        pts.add(float(kn) - k)
    pts.update(sing.keys())
    finite_top = min(sup, max(p for p in pts) + 1.0)
    pts = sorted(p for p in pts if 0.0 <= p <= finite_top)
    if pts[-1] < finite_top:
        pts.append(finite_top)

    val, err = integrate_cells(integrand, pts, tol, singular=sing)
    top = pts[-1]
    if sup == math.inf:
        decay = spec.decay_alpha()
        tail_power = math.inf if decay == math.inf else decay * beta  # both factors decay
        if tail_cutoff is not None:
            if tail_cutoff > top:
                tv, te = quad_cell(integrand, top, tail_cutoff, tol)
                val += tv
                err += te
        else:
            tv, te = integrate_upper_tail(
                integrand, top, tol,
                power_check=None if tail_power == math.inf else tail_power)
            val += tv
            err += te
    check_accuracy(val, err, tol, f"rho_k(k={k})")
    return val


def product4_integral(spec: KernelSpec, beta: float, times, tol: float = 1e-8) -> float:
    """int (prod_i |g(t_i - s)|)^(beta/4) ds over s in (-inf, min(t_i)]."""
    ts = [float(t) for t in times]
    if len(ts) != 4:
        raise ParameterError("exactly four times are required")
    if any(t < 1 for t in ts):
        raise ParameterError("times must be >= 1")
    frac = beta / 4.0

    def integrand(s):
        prod = 1.0
        for t in ts:
            prod *= abs(kernel_eval(spec, t - s))
        return prod ** frac

    # singularities in s: each factor |g(t_i - s)|^frac is singular where
    # t_i - s hits 0 (from below in s) or an interior singular point
    sing = {}
    p0 = spec.power_at_zero()
    interior = spec.interior_singularities()
    for t in ts:
        if p0 < 0:
            pl, _ = sing.get(t, (None, None))
            sing[t] = ((pl or 0.0) + p0 * frac, None)
        for (x0, p) in interior:
            key = t - x0
            pl, _ = sing.get(key, (None, None))
            sing[key] = ((pl or 0.0) + p * frac, None)

    top = min(ts)
    pts = {top}
    for t in ts:
        for kn in spec.knots():
            v = t - float(kn)
            if v <= top:
                pts.add(v)
    pts.update(k for k in sing.keys() if k <= top)
    sup = kernel_support_bound(spec)
    bottom = min(pts) - 1.0
    if sup < math.inf:
        bottom = max(t - sup for t in ts)
        if bottom >= top:
            return 0.0
    pts.add(bottom)
    pts = sorted(p for p in pts if p >= bottom)

    val, err = integrate_cells(integrand, pts, tol, singular=sing)
    if sup == math.inf:
        decay = spec.decay_alpha()
        tail_power = math.inf if decay == math.inf else decay * beta  # 4 factors at beta/4
        # lower tail (-inf, bottom]: reflect to an upper tail in u = 2*bottom - s
        tv, te = integrate_upper_tail(
            lambda u: integrand(2.0 * bottom - u), bottom, tol,
            power_check=None if tail_power == math.inf else tail_power)
        val += tv
        err += te
    check_accuracy(val, err, tol, "product4_integral")
    return val


def kernel_beta_integral(spec: KernelSpec, beta: float, tol: float = 1e-8,
                         lower: float = 0.0, upper: float = math.inf) -> float:
    """int_lower^upper |g(s)|^beta ds, with singular/tail handling.

    Divergence (non-integrable head or tail) raises AccuracyError.
    """
    p0 = spec.power_at_zero()
    if lower <= 0.0 and p0 * beta <= -1.0:
        raise AccuracyError("kernel head |g|^beta is not integrable")
    decay = spec.decay_alpha()
    if upper == math.inf and decay < math.inf and decay * beta <= 1.0:
        raise AccuracyError("kernel tail |g|^beta is not integrable")

    def integrand(x):
        return abs(float(kernel_eval(spec, x))) ** beta

    lo = max(lower, 0.0)
    sup = kernel_support_bound(spec)
    top_finite = min(upper, sup)
    if top_finite == math.inf:
        top_finite = max(max(spec.knots()) + 1.0, lo + 1.0)
    if top_finite <= lo:
        top_finite = lo      # nothing finite to integrate below the tail
    sing = _sing_points_abs_pow(spec, 0.0, beta)
    pts = {lo, top_finite}
    for kn in spec.knots():
        if lo < kn < top_finite:
            pts.add(float(kn))
    for x0 in sing.keys():
        if lo < x0 < top_finite:
            pts.add(x0)
    val, err = integrate_cells(integrand, sorted(pts), tol, singular=sing)
    if upper == math.inf and sup == math.inf:
        tv, te = integrate_upper_tail(
            integrand, top_finite, tol,
            power_check=None if decay == math.inf else decay * beta)
        val += tv
        err += te
    elif upper != math.inf and upper > top_finite:
        tv, te = quad_cell(integrand, top_finite, min(upper, sup), tol)
        val += tv
        err += te
    check_accuracy(val, err, tol, "kernel_beta_integral")
    return val
