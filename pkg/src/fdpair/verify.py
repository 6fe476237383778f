"""Built-in randomized property suite behind ``fdpair verify``."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .assignment import solve_exhaustive, solve_hungarian
from .auction import InvariantViolation, iteration_bound, run_auction, verify_eps_cs


@dataclass
class Failure:
    check: str
    instance: int
    epsilon: float
    benefits: list
    detail: str

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


@dataclass
class VerifyReport:
    instances: int
    failures: list[Failure] = field(default_factory=list)
    bid_counts: list[int] = field(default_factory=list)
    bid_bounds: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_property_suite(seed: int = 0, instances: int = 200, epsilon: float = 0.1,
                       sizes=range(2, 8), skip_price_update: bool = False) -> VerifyReport:
    """Check the auction guarantees on random uniform ``[0, 10]`` benefit matrices.

    Per instance: Iε gap to the Hungarian optimum, bid count within the
    iteration bound, eps-CS at the final prices, and Hungarian equal to
    exhaustive search.
    """
    rng = np.random.default_rng(seed)
    sizes = list(sizes)
    report = VerifyReport(instances)
    for k in range(instances):
        n = int(sizes[k % len(sizes)])
        c = rng.uniform(0.0, 10.0, size=(n, n))

        def fail(check, detail):
            report.failures.append(Failure(check, k, epsilon, c.tolist(), detail))

        hun = solve_hungarian(c)
        ex = solve_exhaustive(c)
        if hun.total_benefit != ex.total_benefit:
            fail("hungarian_equals_exhaustive", f"{hun.total_benefit} != {ex.total_benefit}")
        try:
            auc, trace = run_auction(c, epsilon, record=False, skip_price_update=skip_price_update)
        except InvariantViolation as exc:
            fail("termination_bound", str(exc))
            continue
        report.bid_counts.append(trace.bids)
        report.bid_bounds.append(iteration_bound(c, epsilon))
        if trace.bids > iteration_bound(c, epsilon):
            fail("termination_bound", f"{trace.bids} bids > {iteration_bound(c, epsilon)}")
        if auc.total_benefit < hun.total_benefit - n * epsilon:
            fail("i_eps_optimality", f"auction {auc.total_benefit} vs optimum {hun.total_benefit}")
        if not verify_eps_cs(auc, trace.prices, c, epsilon):
            fail("eps_cs", "final assignment violates eps-CS at BS prices")
    return report
