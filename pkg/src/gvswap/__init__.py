"""Pricing engine for multi-asset generalized variance swaps.

Three assets follow exponential dynamics whose instantaneous variances are
Ornstein-Uhlenbeck processes driven by correlated Levy subordinators.  The
package computes the expected return-covariance matrix by two independent
analytic routes, prices swaps on its trace and on the constrained maximum of
the portfolio variance quadratic form, and ships a seeded Monte Carlo oracle
that validates every analytic formula.
"""

__version__ = "0.1.0"

from .covariance import (
    ExpectedCovMatrix,
    expected_cov_approx,
    expected_cov_matrix,
    expected_cov_series,
    expected_var_leg,
    sqrt_series_coefficients,
)
from .errors import (
    ConstraintDegeneracyError,
    DegenerateLawError,
    DomainError,
    EstimationError,
    GvswapError,
    InfeasibleTargetError,
    NumericalError,
    ParameterError,
    SingularConfigurationError,
)
from .market import DescriptiveStats, ReturnSeries, descriptive_stats, estimate_params, load_prices
from .mc import PathBundle, SimulationConfig, mc_expected_cov, mc_price, simulate
from .moments import (
    exp_integral_moment,
    raw_moments_from_cumulants,
    series_leg_product,
    series_leg_product_12,
    shifted_moment,
)
from .params import PAIR_ORDER, AssetParams, ModelParams
from .pricing import PricingResult, SwapContract, SwapKind, price_eigenvalue, price_trace
from .quadrature import adaptive_simpson
from .subordinators import (
    CorrelatedTriple,
    Family,
    SubordinatorSpec,
    cgf,
    correlated_increments,
    cumulant,
    sample_increment,
    stationary_vol_correlations,
)
from .weights import (
    ConstraintBasis,
    FeasibleWeights,
    attainable_target_interval,
    feasible_weights,
    qr_constraint_basis,
)

__all__ = [
    "AssetParams",
    "ConstraintBasis",
    "ConstraintDegeneracyError",
    "CorrelatedTriple",
    "DegenerateLawError",
    "DescriptiveStats",
    "DomainError",
    "EstimationError",
    "ExpectedCovMatrix",
    "Family",
    "FeasibleWeights",
    "GvswapError",
    "InfeasibleTargetError",
    "ModelParams",
    "NumericalError",
    "PAIR_ORDER",
    "ParameterError",
    "PathBundle",
    "PricingResult",
    "ReturnSeries",
    "SimulationConfig",
    "SingularConfigurationError",
    "SubordinatorSpec",
    "SwapContract",
    "SwapKind",
    "adaptive_simpson",
    "attainable_target_interval",
    "cgf",
    "correlated_increments",
    "cumulant",
    "descriptive_stats",
    "estimate_params",
    "exp_integral_moment",
    "expected_cov_approx",
    "expected_cov_matrix",
    "expected_cov_series",
    "expected_var_leg",
    "feasible_weights",
    "load_prices",
    "mc_expected_cov",
    "mc_price",
    "price_eigenvalue",
    "price_trace",
    "qr_constraint_basis",
    "raw_moments_from_cumulants",
    "sample_increment",
    "series_leg_product",
    "series_leg_product_12",
    "shifted_moment",
    "simulate",
    "sqrt_series_coefficients",
    "stationary_vol_correlations",
]
