"""Subordinated diffusion numerics.

Brownian motion run on the clock of an inverse stable subordinator: special
functions, path simulation, densities, option prices and a fractional
Fokker-Planck solver.
"""

from . import errors, ffpe, pricing, specfun, subdiffusion, subordinator
from .errors import (
    ConvergenceError,
    PathBudgetError,
    PoleError,
    StabilityError,
    SubdiffError,
)
from .ffpe import FfpeProblem, FfpeSolution, laplace_subordination_check, solve_ffpe
from .pricing import (
    ContractParams,
    bs_price_classical,
    map_real_params,
    subordinated_price_mc,
    subordinated_price_quadrature,
)
from .quadrature import QuadConfig
from .specfun import (
    EvalConfig,
    airy_ai,
    f_alpha,
    f_alpha_mode,
    gamma,
    inverse_subordinator_density,
    mittag_leffler_neg,
    probability_integral,
)
from .subdiffusion import DensityGrid, ModelParams, subordinated_density, subordinated_moments
from .subordinator import SamplePath, SimConfig

__version__ = "0.1.0"
