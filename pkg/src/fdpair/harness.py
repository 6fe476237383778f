"""Monte Carlo drops comparing the pairing methods and baselines.

Methods:

* ``eopt``  exhaustive search over pairings (small N only)
* ``chun``  centralized Hungarian assignment
* ``dauc``  distributed auction
* ``hd``    half-duplex: every user served alone at max power, SE halved
* ``repa``  random pairing, equal (capped) powers

The three pairing solvers share one benefit matrix per drop.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .assignment import (Assignment, BenefitMatrix, GuardError, EXHAUSTIVE_MAX_N,
                         compute_benefit_matrix, solve_exhaustive, solve_hungarian)
from .auction import AuctionTrace, run_auction, verify_eps_cs
from .channel import NetworkInstance, build_instance, drop_rngs, place_users
from .config import ScenarioConfig
from .power import spectral_efficiency

METHODS = ("eopt", "chun", "dauc", "hd", "repa")
PAIRING_METHODS = ("eopt", "chun", "dauc")


@dataclass
class MethodResult:
    sum_weighted_se: float
    sum_se: float
    per_user_se: np.ndarray  # UL users first, then DL users
    infeasible_pairs: int = 0
    auction_bids: int | None = None
    eps_cs: bool | None = None
    pairs: np.ndarray | None = None


@dataclass
class DropResult:
    drop_index: int
    per_method: dict[str, MethodResult]
    trace: AuctionTrace | None = field(default=None, repr=False)


def _pairing_result(inst: NetworkInstance, assignment: Assignment) -> MethodResult:
    n = inst.n
    se_ul = np.empty(n)
    se_dl = np.empty(n)
    infeasible = 0
    for i, sol in enumerate(assignment.per_pair_powers):
        j = assignment.pairs[i]
        se_ul[i], se_dl[j] = sol.se_ul, sol.se_dl
        infeasible += not sol.feasible
    # physical SE at the chosen powers; the infeasibility sentinel never enters the sums
    weighted = float(np.dot(inst.alpha_ul, se_ul) + np.dot(inst.alpha_dl, se_dl))
    return MethodResult(sum_weighted_se=weighted, sum_se=float(se_ul.sum() + se_dl.sum()),
                        per_user_se=np.concatenate([se_ul, se_dl]),
                        infeasible_pairs=infeasible, pairs=assignment.pairs.copy())


def solve_hd(inst: NetworkInstance) -> MethodResult:
    """Half-duplex baseline: no SI, no UE-to-UE interference, two slots."""
    se_ul = spectral_efficiency(inst.p_max_ul * inst.g_ul / inst.sigma2)
    se_dl = spectral_efficiency(inst.p_max_dl * inst.g_dl / inst.sigma2)
    weighted = np.dot(inst.alpha_ul, se_ul) + np.dot(inst.alpha_dl, se_dl)
    return MethodResult(sum_weighted_se=float(weighted) / 2.0,
                        sum_se=float(se_ul.sum() + se_dl.sum()) / 2.0,
                        per_user_se=np.concatenate([se_ul, se_dl]) / 2.0)


def solve_repa(inst: NetworkInstance, rng: np.random.Generator, power: str = "max") -> MethodResult:
    """Random pairing with both links at a fixed share of their caps."""
    n = inst.n
    scale = 1.0 if power == "max" else 0.5
    p_ul, p_dl = scale * inst.p_max_ul, scale * inst.p_max_dl
    pairs = rng.permutation(n)
    rows = np.arange(n)
    sinr_ul = p_ul * inst.g_ul / (inst.sigma2 + inst.beta * p_dl)
    sinr_dl = np.empty(n)
    sinr_dl[pairs] = p_dl * inst.g_dl[pairs] / (inst.sigma2 + p_ul * inst.g_cross[rows, pairs])
    se_ul, se_dl = spectral_efficiency(sinr_ul), spectral_efficiency(sinr_dl)
    ok = (sinr_ul >= inst.sinr_th_ul) & (sinr_dl[pairs] >= inst.sinr_th_dl)
    weighted = np.dot(inst.alpha_ul, se_ul) + np.dot(inst.alpha_dl, se_dl)
    return MethodResult(sum_weighted_se=float(weighted), sum_se=float(se_ul.sum() + se_dl.sum()),
                        per_user_se=np.concatenate([se_ul, se_dl]),
                        infeasible_pairs=int(np.count_nonzero(~ok)), pairs=pairs)


def check_methods(methods, config: ScenarioConfig) -> tuple[str, ...]:
    methods = tuple(methods)
    if not methods:
        raise ValueError("no methods requested")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown method(s): {', '.join(unknown)}; choose from {', '.join(METHODS)}")
    if "eopt" in methods and config.n > EXHAUSTIVE_MAX_N:
        raise GuardError(
            f"eopt refused for N={config.n}: exhaustive search guard is N <= {EXHAUSTIVE_MAX_N}")
    return methods


def drop_instance(config: ScenarioConfig, drop_index: int):
    chan_rng, repa_rng = drop_rngs(config.seed, drop_index)
    inst = build_instance(config, place_users(config, chan_rng), chan_rng)
    return inst, repa_rng


def run_drop(config: ScenarioConfig, drop_index: int, methods=METHODS,
             keep_trace: bool = False) -> DropResult:
    methods = check_methods(methods, config)
    inst, repa_rng = drop_instance(config, drop_index)
    out: dict[str, MethodResult] = {}
    trace = None
    benefit: BenefitMatrix | None = None
    if any(m in PAIRING_METHODS for m in methods):
        benefit = compute_benefit_matrix(inst)
    for m in methods:
        if m == "eopt":
            out[m] = _pairing_result(inst, solve_exhaustive(benefit))
        elif m == "chun":
            out[m] = _pairing_result(inst, solve_hungarian(benefit))
        elif m == "dauc":
            assignment, trace = run_auction(benefit, config.epsilon, record=keep_trace)
            res = _pairing_result(inst, assignment)
            res.auction_bids = trace.bids
            res.eps_cs = verify_eps_cs(assignment, trace.prices, benefit, config.epsilon)
            out[m] = res
        elif m == "hd":
            out[m] = solve_hd(inst)
        elif m == "repa":
            out[m] = solve_repa(inst, repa_rng, config.repa_power)
    return DropResult(drop_index, out, trace if keep_trace else None)


@dataclass
class CdfSeries:
    method: str
    sorted_values: np.ndarray

    @classmethod
    def from_values(cls, method: str, values) -> "CdfSeries":
        return cls(method, np.sort(np.asarray(values, dtype=float)))

    def percentile(self, p):
        """Value at percentile ``p`` (0..100) by linear interpolation."""
        return np.percentile(self.sorted_values, p)

    def median(self) -> float:
        return float(self.percentile(50.0))


@dataclass
class MonteCarloResult:
    config: ScenarioConfig
    methods: tuple[str, ...]
    drops: list[DropResult]
    cdfs: dict[str, CdfSeries]
    weighted_cdfs: dict[str, CdfSeries]

    def ratios(self, weighted: bool = False) -> dict[str, float]:
        """Median ratios against the half-duplex baseline."""
        cdfs = self.weighted_cdfs if weighted else self.cdfs
        out = {}
        if "hd" not in cdfs:
            return out
        hd = cdfs["hd"].median()
        for m in ("dauc", "chun", "eopt", "repa"):
            if m in cdfs:
                out[f"{m}/hd"] = cdfs[m].median() / hd
                out[f"hd/{m}"] = hd / cdfs[m].median()
        return out


def _run_one(args):
    config, drop_index, methods = args
    return run_drop(config, drop_index, methods)


def run_monte_carlo(config: ScenarioConfig, methods=METHODS, workers: int | None = None,
                    drops: int | None = None) -> MonteCarloResult:
    """Run ``config.drops`` independent drops and aggregate per-method CDFs.

    With ``workers > 1`` drops run in a process pool; results are folded in
    drop order either way, so output does not depend on the worker count.
    """
    methods = check_methods(methods, config)
    count = config.drops if drops is None else drops
    jobs = [(config, d, methods) for d in range(count)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, count // (4 * workers))))
    else:
        results = [_run_one(job) for job in jobs]
    results.sort(key=lambda r: r.drop_index)
    cdfs = {m: CdfSeries.from_values(m, [r.per_method[m].sum_se for r in results]) for m in methods}
    wcdfs = {m: CdfSeries.from_values(m, [r.per_method[m].sum_weighted_se for r in results])
             for m in methods}
    return MonteCarloResult(config, methods, results, cdfs, wcdfs)


# ---------------------------------------------------------------- CSV output

PERCENTILES = np.arange(0, 101)


def drops_csv(result: MonteCarloResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["drop", "method", "sum_se", "sum_weighted_se", "bids", "infeasible_pairs"])
    for r in result.drops:
        for m in result.methods:
            mr = r.per_method[m]
            w.writerow([r.drop_index, m, repr(mr.sum_se), repr(mr.sum_weighted_se),
                        "" if mr.auction_bids is None else mr.auction_bids, mr.infeasible_pairs])
    return buf.getvalue()


def cdf_csv(cdfs: dict[str, CdfSeries], percentiles=PERCENTILES) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "percentile", "value"])
    for m, series in cdfs.items():
        for p, v in zip(percentiles, series.percentile(percentiles)):
            w.writerow([m, int(p), repr(float(v))])
    return buf.getvalue()
