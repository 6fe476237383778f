"""
The distributed auction, message by message
===========================================

UL users bid for DL users; the base station keeps the prices and answers
each bid. Here the message log of a tiny run is printed in full, then a
larger run is compared with the centralized optimum.
"""

import numpy as np

from fdpair import run_auction, solve_hungarian, verify_eps_cs

c = np.array([[5.0, 1.0, 2.0],
              [4.0, 3.5, 0.5],
              [4.5, 1.0, 4.0]])
assignment, trace = run_auction(c, epsilon=0.1)

for rec in trace.records:
    print(f"{rec['step']:3d} {rec['from']:>4} -> {rec['to']:<4} {rec['type']:<3} {rec['payload']}")

print("\npairs:", assignment.pairs, "total", assignment.total_benefit)
print("final prices:", trace.prices)
print("optimum:", solve_hungarian(c).total_benefit)

###############################################################################
# The result is within N * eps of the optimum and the final prices certify
# it (eps-complementary slackness). Delivery order changes the path, not the
# guarantee.

rng = np.random.default_rng(1)
c = rng.uniform(0, 10, size=(7, 7))
opt = solve_hungarian(c).total_benefit
for scheduler in ("round_robin", "fifo", "random", "starve:ul3"):
    a, t = run_auction(c, 0.1, scheduler, seed=4)
    print(f"{scheduler:>12}: total {a.total_benefit:.3f} (optimum {opt:.3f}), "
          f"{t.bids} bids, eps-CS {verify_eps_cs(a, t.prices, c, 0.1)}")
