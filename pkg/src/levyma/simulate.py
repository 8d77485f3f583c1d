"""Joint path simulation of the moving average X_t = int g(t-s) dL_s.

Discretisation: one fixed noise lattice of step 1/m shared by all times, so
the joint dependence of (X_1, ..., X_n) is respected.  Weights are the
kernel at the left endpoint of each argument cell; the cell touching zero
uses the cell-exact stable weight (mean of |g|^beta over the cell, to the
power 1/beta), which keeps the marginal scale contribution of a singular
head exact and reproduces step kernels exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
from scipy.signal import lfilter

from .errors import ModelInvalidError, ParameterError, ResourceError, WrongVariantError
from .kernels import DiscreteMA, KernelSpec, OuExponential, kernel_beta_integral, kernel_eval
from .quadrature import quad_cell, quad_singular_left
from .rng import (
    RngStream,
    SymmetricStable,
    TemperedStable,
    sample_symmetric_stable,
    sample_tempered_stable_increment,
)

__all__ = [
    "SimGrid",
    "ProcessModel",
    "simulate_path",
    "simulate_ou_exact",
    "marginal_scale",
    "lattice_weights",
    "lattice_scale",
    "tail_mass_ratio",
    "dump_paths",
    "load_paths",
]

DEFAULT_WORK_BUDGET = 10 ** 11    # n * m * (M * m) elements; FFT keeps this cheap


@dataclass(frozen=True)
class SimGrid:
    """Sub-lattice resolution 1/m, kernel horizon M and path length n."""

    m: int
    horizon: float
    n: int

    def __post_init__(self):
        if self.m < 1 or int(self.m) != self.m:
            raise ParameterError("lattice refinement m must be a positive integer")
        if self.n < 1:
            raise ParameterError("path length n must be >= 1")
        if self.horizon < 1.0:
            raise ParameterError("horizon M must be >= 1")
        cells = self.horizon * self.m
        if abs(cells - round(cells)) > 1e-9:
            raise ParameterError("horizon M must be a multiple of the step 1/m")

    @property
    def step(self) -> float:
        return 1.0 / self.m

    @property
    def kernel_cells(self) -> int:
        return int(round(self.horizon * self.m))

    @property
    def lattice_size(self) -> int:
        return self.m * (self.n - 1) + self.kernel_cells


@dataclass(frozen=True)
class ProcessModel:
    """Driving noise plus kernel; validated to define a finite moving average."""

    levy: SymmetricStable | TemperedStable
    kernel: KernelSpec

    def __post_init__(self):
        beta = self.noise_beta()
        # existence: int |g|^beta < infinity (raises on divergent head/tail)
        kernel_beta_integral(self.kernel, beta, tol=1e-6)

    def noise_beta(self) -> float:
        """Exponent p with int |g|^p < infinity certifying a well-defined X.

        Symmetric stable noise fixes p = beta.  Tempered noise admits any
        p in (1/alpha, 1/|gamma_0|) above its small-jump index; the choice
        below picks a valid exponent or fails loudly.
        """
        if isinstance(self.levy, SymmetricStable):
            return self.levy.beta
        alpha = self.kernel.decay_alpha()
        p_low = 0.0 if alpha == math.inf else 1.0 / alpha
        p0 = self.kernel.power_at_zero()
        p_high = math.inf if p0 >= 0 else -1.0 / p0
        p = min(2.0, max(self.levy.zeta, p_low * 1.05 + 1e-9, 0.1))
        if p >= p_high or p <= p_low:
            raise ModelInvalidError(
                "no admissible integrability exponent for this tempered model")
        return p


def marginal_scale(model: ProcessModel, tol: float = 1e-8) -> float:
    """sigma_g = sigma_L (int_0^inf |g|^beta ds)^(1/beta), the exact marginal scale."""
    if not isinstance(model.levy, SymmetricStable):
        raise WrongVariantError("marginal_scale requires symmetric stable noise")
    beta = model.levy.beta
    try:
        integral = kernel_beta_integral(model.kernel, beta, tol=tol)
    except Exception as exc:
        raise ModelInvalidError(f"kernel beta-integral failed: {exc}") from exc
    return model.levy.scale * integral ** (1.0 / beta)


def tail_mass_ratio(model: ProcessModel, grid: SimGrid, tol: float = 1e-6) -> float:
    """Truncation diagnostic int_M^inf |g|^beta / int_0^inf |g|^beta."""
    beta = model.noise_beta()
    total = kernel_beta_integral(model.kernel, beta, tol=tol)
    if total == 0.0:
        return 0.0
    tail = kernel_beta_integral(model.kernel, beta, tol=tol, lower=grid.horizon)
    return tail / total


def lattice_weights(model: ProcessModel, grid: SimGrid) -> np.ndarray:
    """Kernel weights w[0..K-1] on the argument cells [k/m, (k+1)/m).

    w[k] = g(k/m) for k >= 1; w[0] is the cell-exact stable weight
    sign * (m int_0^(1/m) |g|^beta)^(1/beta) so a singular head keeps its
    exact contribution to the marginal scale (step kernels reduce to b_0).
    """
    step = grid.step
    k = np.arange(grid.kernel_cells, dtype=float)
    w = np.asarray(kernel_eval(model.kernel, k * step), dtype=float)
    kern = model.kernel
    if isinstance(kern, DiscreteMA):
        w[0] = kern.b[0]
        return w
    beta = model.noise_beta()
    head = kern.head_limit()
    p0 = kern.power_at_zero()
    if head is not None and p0 >= 0:
        # bounded head: left endpoint value, taking the right limit at 0
        w[0] = head
        return w
    if p0 * beta <= -1.0:
        raise ModelInvalidError("kernel head is not beta-integrable")

    def integrand(x):
        return abs(float(kernel_eval(kern, x))) ** beta

    if p0 < 0:
        cell_int, _ = quad_singular_left(integrand, 0.0, step, p0 * beta, 1e-10)
    else:
        cell_int, _ = quad_cell(integrand, 0.0, step, 1e-10)
    sgn = 1.0 if float(kernel_eval(kern, step / 2.0)) >= 0 else -1.0
    w[0] = sgn * (cell_int / step) ** (1.0 / beta)
    return w


def lattice_scale(model: ProcessModel, grid: SimGrid,
                  weights: np.ndarray | None = None) -> float:
    """Exact marginal scale of the discretised process (stable noise only)."""
    if not isinstance(model.levy, SymmetricStable):
        raise WrongVariantError("lattice_scale requires symmetric stable noise")
    beta = model.levy.beta
    w = lattice_weights(model, grid) if weights is None else weights
    return model.levy.scale * (grid.step * np.sum(np.abs(w) ** beta)) ** (1.0 / beta)


def _draw_noise(model: ProcessModel, grid: SimGrid, stream: RngStream, size: int):
    step = grid.step
    if isinstance(model.levy, SymmetricStable):
        cell_scale = model.levy.scale * step ** (1.0 / model.levy.beta)
        return sample_symmetric_stable(stream, model.levy.beta, cell_scale, size=size)
    return sample_tempered_stable_increment(stream, model.levy, step, size=size)


def _convolve_direct(noise: np.ndarray, w: np.ndarray, m: int, n: int) -> np.ndarray:
    conv = np.convolve(noise, w, mode="full")
    return conv[w.size - 1::m][:n].copy()


def _convolve_fft(noise: np.ndarray, w: np.ndarray, m: int, n: int) -> np.ndarray:
    nfft = sfft.next_fast_len(noise.size + w.size - 1)
    conv = sfft.irfft(sfft.rfft(noise, nfft) * sfft.rfft(w, nfft), nfft)
    return conv[w.size - 1::m][:n].copy()


def simulate_path(model: ProcessModel, grid: SimGrid, stream: RngStream,
                  work_budget: int = DEFAULT_WORK_BUDGET) -> np.ndarray:
    """Simulate (X_1, ..., X_n) on one shared noise lattice.

    Step kernels at m = 1 use the direct windowed dot product, which matches
    a plain convolution of the same noise bit for bit; everything else goes
    through an FFT convolution of the full lattice.
    """
    work = grid.n * grid.m * grid.kernel_cells
    if work > work_budget:
        raise ResourceError(
            f"simulation work estimate {work:.2e} exceeds budget {work_budget:.2e}")
    w = lattice_weights(model, grid)
    noise = _draw_noise(model, grid, stream, grid.lattice_size)
    if (isinstance(model.kernel, DiscreteMA) and grid.m == 1) or grid.n * w.size <= 1 << 18:
        return _convolve_direct(noise, w, grid.m, grid.n)
    return _convolve_fft(noise, w, grid.m, grid.n)


def sample_paths(model: ProcessModel, grid: SimGrid, master_seed: int,
                 indices, prefer_exact: bool = True,
                 work_budget: int = DEFAULT_WORK_BUDGET) -> np.ndarray:
    """Matrix of paths, one replication stream per index.

    OU kernels with stable noise take the exact recursion (no
    discretisation at all); every other model runs on the shared lattice.
    Results depend only on (master_seed, index), never on scheduling.
    """
    idx = list(indices)
    out = np.empty((len(idx), grid.n))
    exact_ou = (prefer_exact and isinstance(model.kernel, OuExponential)
                and isinstance(model.levy, SymmetricStable))
    for row, i in enumerate(idx):
        stream = RngStream(master_seed, i)
        if exact_ou:
            out[row] = simulate_ou_exact(model.kernel.lam, model.levy.beta,
                                         model.levy.scale, grid.n, stream)
        else:
            out[row] = simulate_path(model, grid, stream, work_budget=work_budget)
    return out


def simulate_ou_exact(lam: float, beta: float, sigma_l: float, n: int,
                      stream: RngStream) -> np.ndarray:
    """Exact-in-law stable Ornstein-Uhlenbeck path at integer times.

    X_0 is stationary with scale sigma_l (lam beta)^(-1/beta) and
    X_{t+1} = e^-lam X_t + xi_t with innovation scale
    sigma_l ((1 - e^(-lam beta)) / (lam beta))^(1/beta).
    """
    if lam <= 0:
        raise ParameterError("OU rate must be > 0")
    if not (0.0 < beta < 2.0):
        raise ParameterError("stable index must be in (0, 2)")
    if n < 1:
        raise ParameterError("path length must be >= 1")
    scale_stat = sigma_l * (lam * beta) ** (-1.0 / beta)
    scale_inn = sigma_l * ((1.0 - math.exp(-lam * beta)) / (lam * beta)) ** (1.0 / beta)
    a = math.exp(-lam)
    x0 = sample_symmetric_stable(stream, beta, scale_stat)
    xi = sample_symmetric_stable(stream, beta, scale_inn, size=n)
    path, _ = lfilter([1.0], [1.0, -a], xi, zi=np.array([a * x0]))
    return path


def ou_stationary_scale(lam: float, beta: float, sigma_l: float) -> float:
    return sigma_l * (lam * beta) ** (-1.0 / beta)


# ---------------------------------------------------------------------------
# Path dumps: row-major float64 little-endian + JSON sidecar
# ---------------------------------------------------------------------------

def dump_paths(paths: np.ndarray, out_base, model_desc: dict, grid: SimGrid,
               master_seed: int) -> None:
    arr = np.ascontiguousarray(np.atleast_2d(paths), dtype="<f8")
    with open(f"{out_base}.bin", "wb") as fh:
        fh.write(arr.tobytes(order="C"))
    sidecar = {
        "dtype": "<f8",
        "order": "row-major",
        "shape": list(arr.shape),
        "model": model_desc,
        "grid": {"m": grid.m, "horizon": grid.horizon, "n": grid.n},
        "master_seed": int(master_seed),
    }
    with open(f"{out_base}.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_paths(out_base) -> tuple[np.ndarray, dict]:
    with open(f"{out_base}.json") as fh:
        sidecar = json.load(fh)
    data = np.fromfile(f"{out_base}.bin", dtype="<f8").reshape(sidecar["shape"])
    return data, sidecar
