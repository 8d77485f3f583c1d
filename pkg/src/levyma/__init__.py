"""Heavy-tailed Levy moving averages: simulation, statistics and rate checks."""

__version__ = "0.1.0"

from .bounds import (
    ArimaExample,
    BoundRate,
    CorollaryRates,
    FlnExample,
    IntensityMeasure,
    LfsnExample,
    OuExample,
    RateClass,
    a_n,
    a_n2,
    corollary_rate,
    gamma12_proxy,
    min_integral,
    min_integral_rate,
    theoretical_rate,
)
from .errors import (
    AccuracyError,
    ConfigError,
    DegenerateVarianceError,
    InputError,
    LevymaError,
    ModelInvalidError,
    ParameterError,
    ResourceError,
    StationarityError,
    WrongVariantError,
)
from .kernels import (
    DiscreteMA,
    FractionalLevyIncrement,
    KernelSpec,
    LfsnIncrement,
    OuExponential,
    PowerLaw,
    arima_coefficients,
    kernel_beta_integral,
    kernel_eval,
    product4_integral,
    rho_k,
)
from .rng import (
    RngStream,
    SymmetricStable,
    TemperedStable,
    sample_symmetric_stable,
    sample_tempered_stable_increment,
)
from .simulate import (
    ProcessModel,
    SimGrid,
    lattice_scale,
    lattice_weights,
    marginal_scale,
    sample_paths,
    simulate_ou_exact,
    simulate_path,
    tail_mass_ratio,
)
from .stable import StableDist
from .stats import (
    Cos,
    DistanceEstimate,
    GaussBump,
    Sin,
    SmoothedIndicator,
    compute_vn,
    estimate_variance,
    expected_f,
    fit_rate,
    kolmogorov_distance,
    wasserstein1_distance,
)
