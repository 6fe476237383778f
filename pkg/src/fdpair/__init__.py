"""Joint UL/DL user pairing and power control for a full-duplex cell."""

from .assignment import (Assignment, BenefitMatrix, GuardError, compute_benefit_matrix,
                         solve_exhaustive, solve_hungarian)
from .auction import (AuctionTrace, Bid, BsAgentState, M1, M2, M3, M4, UlAgentState,
                      bs_assign_step, run_auction, ul_bid_step, verify_eps_cs)
from .channel import NetworkInstance, build_instance, path_gain_db, place_users
from .config import ConfigError, ScenarioConfig, WeightMode, load_config
from .harness import (CdfSeries, DropResult, MethodResult, run_drop, run_monte_carlo,
                      solve_hd, solve_repa)
from .power import (INFEASIBLE_BENEFIT, PairSolution, optimize_pair_powers, pair_sinr,
                    spectral_efficiency)

__version__ = "0.1.0"
