"""
Pairing UL and DL users: exhaustive search vs Hungarian
=======================================================

Every UL user is paired with exactly one DL user. The pair benefit matrix
comes from the per-pair power optimizer; the pairing is then a plain
assignment problem.
"""

import numpy as np

from fdpair import ScenarioConfig, compute_benefit_matrix, solve_exhaustive, solve_hungarian
from fdpair.harness import drop_instance

cfg = ScenarioConfig(num_ul=5, num_dl=5, num_channels=5, si_cancellation=-100.0)
inst, _ = drop_instance(cfg, drop_index=0)
benefit = compute_benefit_matrix(inst)

# path-loss compensation puts the weights at 1/G, so entries are large;
# -1e-3 cells are pairs that cannot meet both SINR targets (sentinel -1e6)
np.set_printoptions(precision=3, linewidth=120)
print("benefit matrix (x 1e9):")
print(benefit.c / 1e9)

###############################################################################
# Both solvers find the same total; exhaustive search walks all 120 pairings.

ex = solve_exhaustive(benefit)
hun = solve_hungarian(benefit)
print("\nexhaustive:", ex.pairs, f"{ex.total_benefit:.6g}")
print("hungarian: ", hun.pairs, f"{hun.total_benefit:.6g}")

for i, sol in enumerate(hun.per_pair_powers):
    print(f"UL {i} -> DL {hun.pairs[i]}: p_ul {sol.p_ul * 1e3:7.3f} mW, p_dl {sol.p_dl * 1e3:7.3f} mW")
