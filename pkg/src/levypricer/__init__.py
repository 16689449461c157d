"""Pricing library for European options under double jump dynamics:

a jump-extended square-root (CIR) short rate and jump-diffusion assets,
both carrying compound-Poisson jumps.  Pricing goes through an affine
bond formula, a forward-measure characteristic function in power-series
form, Fourier inversion for the continuous auxiliary call value, and
Poisson-weighted jump series; an independent Monte Carlo engine and
closed-form degenerate cases (CIR bond, Black-Scholes, Merton) validate
every analytic route.
"""

from .bond import BondLoading, bond_loading, bond_price, cir_bond_price, loading_A, loading_G
from .charfn import (
    B_eval,
    CharFnExpansion,
    D_eval,
    charfn_eval,
    coeff_recurrence,
    make_expansion,
    radius_bound,
    riccati_oracle,
)
from .errors import (
    DegenerateVolatility,
    DenominatorVanishing,
    InvalidParameter,
    LevyPricerError,
    QuadratureNotConverged,
    RadiusExceeded,
    StepCountExceeded,
    TailNotDecayed,
    UnsupportedBasket,
    UnsupportedLaw,
)
from .fourier import black_scholes_reference, p_terms, w_price, w_values
from .laws import (
    Exponential,
    Fixed,
    JumpLaw,
    Lognormal,
    jump_sum_nodes,
    poisson_weight,
    product_law_shift,
)
from .montecarlo import (
    PathBundle,
    mc_basket_price,
    mc_bond_price,
    mc_option_price,
    simulate_paths,
)
from .params import (
    ArithmeticWeights,
    AssetParams,
    BasketParams,
    GeometricWeights,
    MarketState,
    PriceResult,
    QuadratureSpec,
    RateParams,
    SeriesTruncation,
    SimSpec,
    validate,
)
from .series import (
    ConvergenceReport,
    basket_price,
    convergence_study,
    f_single,
    g_basket,
    merton_reference,
    option_price,
)

__version__ = "0.1.0"
