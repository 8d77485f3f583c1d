"""The normalized partial-sum statistic and empirical distance estimators.

Test functions are twice continuously differentiable with bounded
derivatives; the raw indicator is admitted only after convolution with a
smooth bump.  Distances to the standard Gaussian are the exact empirical
Kolmogorov sup over order statistics and the quantile-coupling estimate of
Wasserstein-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .errors import (
    DegenerateVarianceError,
    ParameterError,
    WrongVariantError,
)
from .rng import RngStream, SymmetricStable, sample_symmetric_stable
from .simulate import ProcessModel, SimGrid, marginal_scale
from .stable import StableDist, stable_tail_constant

__all__ = [
    "Cos",
    "Sin",
    "SmoothedIndicator",
    "GaussBump",
    "TestFunction",
    "DistanceEstimate",
    "VarianceEstimate",
    "RateFit",
    "expected_f",
    "compute_vn",
    "estimate_variance",
    "kolmogorov_distance",
    "wasserstein1_distance",
    "fit_rate",
]


# ---------------------------------------------------------------------------
# C^2_b test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cos:
    """f(x) = cos(theta x); the real part of the empirical cf."""

    theta: float
    mean_mode: str = "analytic"

    def __call__(self, x):
        return np.cos(self.theta * np.asarray(x, dtype=float))

    @property
    def f_sup(self):
        return 1.0

    @property
    def df_sup(self):
        return abs(self.theta)

    @property
    def d2f_sup(self):
        return self.theta ** 2

    def kink_points(self):
        return ()


@dataclass(frozen=True)
class Sin:
    """f(x) = sin(theta x); the imaginary part of the empirical cf."""

    theta: float
    mean_mode: str = "analytic"

    def __call__(self, x):
        return np.sin(self.theta * np.asarray(x, dtype=float))

    @property
    def f_sup(self):
        return 1.0

    @property
    def df_sup(self):
        return abs(self.theta)

    @property
    def d2f_sup(self):
        return self.theta ** 2

    def kink_points(self):
        return ()


def _bump_tables():
    """Normalised C^inf bump psi on [-1, 1] and its survival integral Psi."""
    grid = np.linspace(-1.0, 1.0, 4001)
    inner = np.zeros_like(grid)
    mask = np.abs(grid) < 1.0
    inner[mask] = np.exp(-1.0 / (1.0 - grid[mask] ** 2))
    step = grid[1] - grid[0]
    cum = np.concatenate([[0.0], np.cumsum((inner[1:] + inner[:-1]) * 0.5 * step)])
    total = cum[-1]
    psi = inner / total
    surv = 1.0 - cum / total                 # Psi(v) = int_v^1 psi, 1 -> 0
    dpsi = np.gradient(psi, grid)
    return grid, psi, surv, float(np.max(np.abs(dpsi)))


_BUMP_GRID, _BUMP_PSI, _BUMP_SURV, _BUMP_DPSI_MAX = _bump_tables()
_BUMP_SURV_INTERP = PchipInterpolator(_BUMP_GRID, _BUMP_SURV)
_BUMP_PSI_MAX = float(np.max(_BUMP_PSI))


@dataclass(frozen=True)
class SmoothedIndicator:
    """Indicator of (-inf, threshold] convolved with a C^2 bump of width h.

    f is 1 below threshold - h, 0 above threshold + h and smooth monotone in
    between; h > 0 strictly since the raw indicator is not C^2.
    """

    threshold: float
    bandwidth: float
    mean_mode: str = "quadrature"

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ParameterError("bandwidth must be > 0 (raw indicator is not C^2)")

    def __call__(self, x):
        v = (np.asarray(x, dtype=float) - self.threshold) / self.bandwidth
        v = np.clip(v, -1.0, 1.0)
        return _BUMP_SURV_INTERP(v)

    @property
    def f_sup(self):
        return 1.0

    @property
    def df_sup(self):
        return _BUMP_PSI_MAX / self.bandwidth

    @property
    def d2f_sup(self):
        return _BUMP_DPSI_MAX / self.bandwidth ** 2

    def kink_points(self):
        return (self.threshold - self.bandwidth, self.threshold,
                self.threshold + self.bandwidth)


@dataclass(frozen=True)
class GaussBump:
    """f(x) = exp(-(x - center)^2 / (2 width^2))."""

    center: float
    width: float
    mean_mode: str = "quadrature"

    def __post_init__(self):
        if self.width <= 0:
            raise ParameterError("width must be > 0")

    def __call__(self, x):
        u = (np.asarray(x, dtype=float) - self.center) / self.width
        return np.exp(-0.5 * u * u)

    @property
    def f_sup(self):
        return 1.0

    @property
    def df_sup(self):
        return math.exp(-0.5) / self.width

    @property
    def d2f_sup(self):
        return 1.0 / self.width ** 2

    def kink_points(self):
        return (self.center - self.width, self.center, self.center + self.width)


TestFunction = Cos | Sin | SmoothedIndicator | GaussBump


# ---------------------------------------------------------------------------
# E[f(X_1)]
# ---------------------------------------------------------------------------

def expected_f(model: ProcessModel, f: TestFunction, tol: float = 1e-8,
               scale: float | None = None, stream: RngStream | None = None) -> float:
    """E[f(X_1)] under the stated mean mode.

    scale overrides the marginal scale (the harness passes the exact scale
    of the discretised process so the statistic is centred without
    discretisation bias).  Monte Carlo mode requires a stream.
    """
    if not isinstance(model.levy, SymmetricStable):
        raise WrongVariantError("expected_f requires symmetric stable noise")
    beta = model.levy.beta
    sigma = marginal_scale(model, tol) if scale is None else float(scale)
    mode = f.mean_mode
    if mode == "analytic":
        if isinstance(f, Cos):
            return math.exp(-((sigma * abs(f.theta)) ** beta))
        if isinstance(f, Sin):
            return 0.0
        raise WrongVariantError(
            f"analytic mean is only available for Cos/Sin, not {type(f).__name__}")
    if mode == "quadrature":
        if isinstance(f, Sin):
            return 0.0
        dist = StableDist(beta, sigma)
        # truncate where the discarded tail mass is negligible for bounded f
        c = stable_tail_constant(beta)
        t_cut = sigma * (4.0 * c * max(f.f_sup, 1.0) / max(tol, 1e-12)) ** (1.0 / beta)
        pts = {-t_cut, 0.0, t_cut, -sigma, sigma}
        pts.update(p for p in f.kink_points() if -t_cut < p < t_cut)
        # geometric ladder toward the cutoff so no cell dwarfs the body
        rung = max(sigma, 1.0, *(abs(p) for p in f.kink_points() or (0.0,)))
        while rung < t_cut:
            pts.update((-rung, rung))
            rung *= 4.0
        pts = sorted(pts)
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            val, _ = quad(lambda x: float(f(x)) * dist.pdf_exact(x), a, b,
                          epsabs=tol, epsrel=tol, limit=200)
            total += val
        return total
    if mode == "monte-carlo" or mode.startswith("monte-carlo"):
        if stream is None:
            raise ParameterError("monte-carlo mean mode requires a stream")
        r0 = getattr(f, "mc_draws", None) or 100_000
        draws = sample_symmetric_stable(stream, beta, sigma, size=r0)
        return float(np.mean(f(draws)))
    raise ParameterError(f"unknown mean mode {mode!r}")


# ---------------------------------------------------------------------------
# V_n and its variance
# ---------------------------------------------------------------------------

def compute_vn(path, f: TestFunction, mean: float) -> float:
    """n^(-1/2) sum_t (f(X_t) - mean).

    The sum is exactly rounded (fsum), so the value is invariant under any
    relabeling of t; the batch variant trades that for speed.
    """
    path = np.asarray(path, dtype=float)
    if path.size == 0:
        raise ParameterError("empty path")
    values = np.asarray(f(path), dtype=float)
    return float(math.fsum(values - mean) / math.sqrt(path.size))


def compute_vn_batch(paths: np.ndarray, f: TestFunction, mean: float) -> np.ndarray:
    paths = np.atleast_2d(np.asarray(paths, dtype=float))
    n = paths.shape[1]
    return (np.asarray(f(paths), dtype=float) - mean).sum(axis=1) / math.sqrt(n)


@dataclass
class VarianceEstimate:
    v_hat: float                 # sqrt of the lag-window long-run variance
    v2: float                    # c_0 + 2 sum_j c_j
    v2_stderr: float             # across-path stderr of the lag-window sum
    per_lag: np.ndarray          # c_0 .. c_{j_max}
    per_lag_stderr: np.ndarray
    vn2: float                   # direct MC variance of V_n
    vn2_stderr: float
    n: int
    R: int


def variance_from_paths(paths: np.ndarray, f: TestFunction, mean: float,
                        j_max: int) -> VarianceEstimate:
    """Lag-window long-run variance of f(X) from R simulated paths.

    v2 = c_0 + 2 sum_{j<=j_max} c_j with c_j the pooled autocovariance
    about the exact mean; also returns the direct MC variance of V_n on the
    same paths.  Raises when the estimate is not strictly positive.
    """
    if j_max < 1:
        raise ParameterError("j_max must be >= 1")
    paths = np.atleast_2d(np.asarray(paths, dtype=float))
    r, length = paths.shape
    if length < j_max + 2:
        raise ParameterError("paths are too short for the requested lag window")
    y = np.asarray(f(paths), dtype=float) - mean
    lags = np.arange(j_max + 1)
    per_path = np.empty((r, j_max + 1))
    for j in lags:
        prod = y[:, : length - j] * y[:, j:]
        per_path[:, j] = prod.mean(axis=1)
    c = per_path.mean(axis=0)
    c_se = per_path.std(axis=0, ddof=1) / math.sqrt(r) if r > 1 else np.zeros(j_max + 1)
    v2 = float(c[0] + 2.0 * c[1:].sum())
    v2_paths = per_path[:, 0] + 2.0 * per_path[:, 1:].sum(axis=1)
    v2_se = float(v2_paths.std(ddof=1) / math.sqrt(r)) if r > 1 else 0.0
    vn = y.sum(axis=1) / math.sqrt(length)
    vn2 = float(vn.var(ddof=1)) if r > 1 else 0.0
    # var of a sample variance via fourth-moment plug-in
    if r > 3:
        m2 = vn.var(ddof=1)
        m4 = np.mean((vn - vn.mean()) ** 4)
        vn2_se = math.sqrt(max(m4 - (r - 3) / (r - 1) * m2 ** 2, 0.0) / r)
    else:
        vn2_se = 0.0
    if v2 <= 0.0:
        raise DegenerateVarianceError(
            f"long-run variance estimate {v2:.3e} is not positive")
    return VarianceEstimate(
        v_hat=math.sqrt(v2), v2=v2, v2_stderr=v2_se, per_lag=c,
        per_lag_stderr=c_se, vn2=vn2, vn2_stderr=vn2_se, n=length, R=r)


def effective_mean(model: ProcessModel, f: TestFunction, grid: SimGrid | None,
                   tol: float = 1e-8, stream: RngStream | None = None) -> float:
    """E[f(X_1)] for the process actually simulated on the given grid.

    The OU kernel is simulated by its exact recursion, so the continuous
    marginal scale applies; lattice simulations use the exact scale of the
    discretised process, which centres V_n without discretisation bias.
    """
    from .kernels import OuExponential
    from .simulate import lattice_scale
    if grid is None or isinstance(model.kernel, OuExponential):
        return expected_f(model, f, tol=tol, stream=stream)
    return expected_f(model, f, tol=tol, scale=lattice_scale(model, grid),
                      stream=stream)


def estimate_variance(model: ProcessModel, f: TestFunction, grid: SimGrid,
                      j_max: int, R: int, stream: RngStream,
                      mean: float | None = None) -> VarianceEstimate:
    """Simulate R paths and estimate the long-run variance of f(X)."""
    from .simulate import sample_paths
    if R < 2:
        raise ParameterError("need at least 2 replications")
    if mean is None:
        mean = effective_mean(model, f, grid)
    indices = range(stream.stream_index, stream.stream_index + R)
    paths = sample_paths(model, grid, stream.master_seed, indices)
    return variance_from_paths(paths, f, mean, j_max)


# ---------------------------------------------------------------------------
# Distances and rate fits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceEstimate:
    metric: str                  # "dK" | "dW"
    value: float
    mc_stderr: float
    R: int
    n: int

    def __post_init__(self):
        if self.value < 0:
            raise ParameterError("distance must be >= 0")
        if self.metric == "dK" and self.value > 1.0 + 1e-12:
            raise ParameterError("Kolmogorov distance cannot exceed 1")


def kolmogorov_distance(samples, reference_cdf) -> float:
    """sup_x |F_hat - F| via the order-statistic envelope."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ParameterError("empty sample")
    r = x.size
    ref = np.asarray(reference_cdf(x), dtype=float)
    i = np.arange(1, r + 1)
    return float(max(np.max(np.abs(i / r - ref)), np.max(np.abs((i - 1) / r - ref))))


def wasserstein1_distance(samples, reference_quantile) -> float:
    """Quantile-coupling estimate (1/R) sum |x_(i) - Q((i - 1/2)/R)|."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ParameterError("empty sample")
    r = x.size
    q = np.asarray(reference_quantile((np.arange(1, r + 1) - 0.5) / r), dtype=float)
    return float(np.mean(np.abs(x - q)))


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    stderr: float


def fit_rate(ns, values, weights=None) -> RateFit:
    """Weighted least squares of log(value) on log(n)."""
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if ns.size != values.size or ns.size < 3:
        raise ParameterError("need at least 3 (n, value) points")
    if np.any(values <= 0.0):
        raise ParameterError("values must be positive for a log-log fit")
    w = np.ones_like(ns) if weights is None else np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ParameterError("weights must be >= 0")
    keep = w > 0
    if keep.sum() < 3:
        raise ParameterError("need at least 3 points with positive weight")
    lx = np.log(ns[keep])
    ly = np.log(values[keep])
    ww = w[keep]
    sw = ww.sum()
    mx = (ww * lx).sum() / sw
    my = (ww * ly).sum() / sw
    sxx = (ww * (lx - mx) ** 2).sum()
    sxy = (ww * (lx - mx) * (ly - my)).sum()
    slope = sxy / sxx
    intercept = my - slope * mx
    resid = ly - intercept - slope * lx
    dof = keep.sum() - 2
    sigma2 = (ww * resid ** 2).sum() / dof if dof > 0 else 0.0
    stderr = math.sqrt(sigma2 / sxx) if sxx > 0 else 0.0
    return RateFit(slope=float(slope), intercept=float(intercept), stderr=float(stderr))


def bootstrap_stderr(samples: np.ndarray, statistic, resamples: int,
                     stream: RngStream) -> float:
    """Plain nonparametric bootstrap standard error of a sample statistic."""
    x = np.asarray(samples, dtype=float)
    gen = stream.generator
    vals = np.empty(resamples)
    for b in range(resamples):
        idx = gen.integers(0, x.size, size=x.size)
        vals[b] = statistic(x[idx])
    return float(vals.std(ddof=1))
