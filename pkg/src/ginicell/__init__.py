"""Coverage of cellular networks with Poisson and alpha-Ginibre base stations.

Modules:

* :mod:`ginicell.numerics` incomplete gamma functions and adaptive quadrature
* :mod:`ginicell.pointproc` radial samplers, kernel eigenvalues, counting statistics
* :mod:`ginicell.channel` fading, path loss and tier settings
* :mod:`ginicell.analytic` single-tier coverage integrals
* :mod:`ginicell.multitier` two-tier Ginibre/Poisson coverage
* :mod:`ginicell.simulate` Monte Carlo SINR engine
* :mod:`ginicell.cli` command-line front end
"""

__version__ = "0.1.0"

from .analytic import SeriesTruncation, SingleTierScenario, coverage, coverage_ginibre, coverage_ppp, tau
from .channel import RAYLEIGH, FadingModel, PathLoss, TierConfig
from .multitier import TwoTierScenario, coverage_two_tier
from .numerics import QuadratureError, QuadratureSpec
from .pointproc import GinibreModel, PoissonModel, RadialConfiguration
from .simulate import McConfig, McEstimate, estimate_coverage_single, estimate_coverage_two_tier

__all__ = [
    "__version__",
    "SeriesTruncation",
    "SingleTierScenario",
    "coverage",
    "coverage_ginibre",
    "coverage_ppp",
    "tau",
    "RAYLEIGH",
    "FadingModel",
    "PathLoss",
    "TierConfig",
    "TwoTierScenario",
    "coverage_two_tier",
    "QuadratureError",
    "QuadratureSpec",
    "GinibreModel",
    "PoissonModel",
    "RadialConfiguration",
    "McConfig",
    "McEstimate",
    "estimate_coverage_single",
    "estimate_coverage_two_tier",
]
