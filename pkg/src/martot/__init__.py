"""martot: exact martingale couplings and adapted Wasserstein distances.

The package constructs Hoeffding-Frechet, inverse-transform martingale and
martingale rearrangement couplings between finitely supported measures in
convex order, and computes regular, lifted and nested adapted Wasserstein
distances with exact rational arithmetic.
"""

from .couplings import (DiscreteCoupling, LiftedCoupling, Segment,
                        barycentre_deviation, barycentre_dispersion,
                        common_refinement, disintegrate, hoeffding_frechet,
                        is_martingale, is_monge, lift,
                        lifted_hoeffding_frechet, product_coupling, reassemble)
from .errors import (InternalError, MartotError, OrderError, ParseError,
                     PreconditionError, ScaleError)
from .measures import (DiscreteMeasure, StochOrder, convex_order, mix,
                       stochastic_order, wasserstein, wasserstein_pow)
from .ot import (TransportPlan, adapted_wasserstein, adapted_wasserstein_pow,
                 aw_rho_equivalence_check, enumerate_martingale_couplings,
                 lifted_adapted_wasserstein_pow, lifted_diagonal_bound_pow,
                 lifted_martingale_lower_bound, nested_wasserstein_bruteforce_pow,
                 solve_ot, solve_ot_dense)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
