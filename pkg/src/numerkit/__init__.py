"""Dimension-reduced pricing of homogeneous multi-asset claims.

Price ratios strip one dimension from lognormal pricing problems whose payoff
is homogeneous of degree one. The package carries the reduction machinery,
closed forms for five products built on it, and independent finite-difference,
quadrature, and Monte Carlo engines to check every formula against the full
dynamics.
"""

from .errors import (
    DegenerateCovarianceError,
    DimensionError,
    GridExtrapolationError,
    PayoffEvaluationError,
    PricingError,
    ReductionError,
    TimeDomainError,
    UnsupportedDimensionError,
    ValidationFailure,
)
from .model import (
    AssetDynamics,
    Convertible,
    Corporate,
    CovarianceMatrix,
    Esop,
    FxStrike,
    HomogeneousPayoff,
    MultiAssetProblem,
    PriceQuote,
    Savings,
    covariance_from_loadings,
    product_from_dict,
    product_to_dict,
    quote_to_dict,
    validate,
)
from .ratecurve import (
    VasicekModel,
    a_factor,
    b_factor,
    bond_price,
    integrated_variance,
    risk_neutral_level,
    short_rate_from_bond,
    sigma_p,
)
from .analytic import (
    bs_call,
    convertible_price,
    corporate_convertible_price,
    esop_price,
    esop_price_after_reset,
    esop_price_generalized,
    fx_option_gbp,
    fx_option_usd,
    norm_cdf,
    savings_domestic,
    savings_foreign,
)
from .numeraire import (
    ReducedProblem,
    certify_psd,
    check_homogeneity,
    quadrature_price,
    reduce,
)
from .pde import (
    GridSpec,
    Pde1Spec,
    Pde2Spec,
    derive_reduced,
    reduction_gap,
    solve_1d,
    solve_2d,
)
from .montecarlo import (
    McResult,
    McSpec,
    mc_bond_price,
    price_mc,
    sample_vasicek,
)
from .verify import (
    AgreementReport,
    ProductEngines,
    build_engines,
    default_suite,
    price_with_method,
    run_suite,
    suite_to_csv,
    suite_to_json,
    verify_product,
)

__version__ = "0.1.0"
