import numpy as np
import pytest

from fdpair.assignment import GuardError, assignment_total, compute_benefit_matrix
from fdpair.channel import NetworkInstance
from fdpair.config import ScenarioConfig
from fdpair.harness import (CdfSeries, cdf_csv, drop_instance, drops_csv, run_drop,
                            run_monte_carlo, solve_hd, solve_repa)
from fdpair.power import pair_sinr

from oracles import pair_objective


def small(n=4, **kw):
    kw.setdefault("drops", 6)
    return ScenarioConfig(num_ul=n, num_dl=n, num_channels=n, **kw)


def unit_instance(beta=0.0):
    return NetworkInstance.from_gains([1.0], [1.0], [[0.5]], sigma2=1.0, beta=beta,
                                      sinr_th_ul=0.0, sinr_th_dl=0.0)


def test_hd_halving():
    res = solve_hd(unit_instance())
    assert res.per_user_se.tolist() == [0.5, 0.5]
    assert res.sum_se == 1.0 and res.sum_weighted_se == 1.0


def test_hd_ignores_self_interference():
    assert solve_hd(unit_instance(0.0)).sum_se == solve_hd(unit_instance(0.9)).sum_se
    a, _ = drop_instance(small(si_cancellation=-110.0), 3)
    b, _ = drop_instance(small(si_cancellation=-70.0), 3)
    assert solve_hd(a).sum_se == solve_hd(b).sum_se


def test_hd_sinr_dominates_full_duplex():
    inst, _ = drop_instance(small(si_cancellation=-100.0), 0)
    for i in range(inst.n):
        for j in range(inst.n):
            fd_ul, fd_dl = pair_sinr(inst.p_max_ul, inst.p_max_dl, inst, i, j)
            assert inst.p_max_ul * inst.g_ul[i] / inst.sigma2 >= fd_ul
            assert inst.p_max_dl * inst.g_dl[j] / inst.sigma2 >= fd_dl


def test_repa_single_pair_and_determinism():
    inst, _ = drop_instance(small(1), 0)
    assert solve_repa(inst, np.random.default_rng(0)).pairs.tolist() == [0]
    inst, _ = drop_instance(small(6), 1)
    a = solve_repa(inst, np.random.default_rng(5))
    b = solve_repa(inst, np.random.default_rng(5))
    assert np.array_equal(a.pairs, b.pairs) and a.sum_se == b.sum_se


def test_repa_half_power_option():
    inst, _ = drop_instance(small(4), 2)
    full = solve_repa(inst, np.random.default_rng(1), "max")
    half = solve_repa(inst, np.random.default_rng(1), "half")
    assert np.array_equal(full.pairs, half.pairs)
    assert full.sum_se != half.sum_se


def test_repa_loses_to_hd_without_cancellation():
    cfg = ScenarioConfig(si_cancellation=0.0, drops=10)
    for d in range(10):
        inst, rng = drop_instance(cfg, d)
        assert solve_repa(inst, rng).sum_se < solve_hd(inst).sum_se


def test_drop_gap_and_oracle_equivalence():
    cfg = small(4, si_cancellation=-100.0)
    for d in range(6):
        res = run_drop(cfg, d)
        inst, _ = drop_instance(cfg, d)
        c = compute_benefit_matrix(inst).c
        totals = {m: assignment_total(c, res.per_method[m].pairs) for m in ("eopt", "chun", "dauc")}
        assert totals["chun"] == totals["eopt"]
        assert totals["dauc"] >= totals["chun"] - cfg.n * cfg.epsilon
        assert res.per_method["dauc"].eps_cs
        assert res.per_method["dauc"].auction_bids > 0


def test_dauc_dominates_feasible_configurations():
    cfg = small(4, si_cancellation=-100.0)
    rng = np.random.default_rng(0)
    for d in range(6):
        res = run_drop(cfg, d, ("dauc", "repa"))
        inst, _ = drop_instance(cfg, d)
        c = compute_benefit_matrix(inst).c
        dauc_total = assignment_total(c, res.per_method["dauc"].pairs)
        bound = dauc_total + cfg.n * cfg.epsilon
        repa = res.per_method["repa"]
        if repa.infeasible_pairs == 0:
            assert repa.sum_weighted_se <= bound * (1 + 1e-12)
        for _ in range(50):
            perm = rng.permutation(cfg.n)
            p_u = rng.uniform(0, inst.p_max_ul, cfg.n)
            p_d = rng.uniform(0, inst.p_max_dl, cfg.n)
            value, ok = pair_objective(inst, np.arange(cfg.n), perm, p_u, p_d)
            if np.all(ok):
                assert value.sum() <= bound * (1 + 1e-12)


def test_drop_results_fields():
    res = run_drop(small(3), 0, ("dauc", "hd", "repa"))
    assert set(res.per_method) == {"dauc", "hd", "repa"}
    for m in res.per_method.values():
        assert m.sum_se >= 0 and m.per_user_se.shape == (6,)
        assert m.sum_se == pytest.approx(m.per_user_se.sum(), rel=1e-12)


def test_drop_determinism():
    methods = ("chun", "dauc", "hd", "repa")
    a, b = run_drop(small(5), 4, methods), run_drop(small(5), 4, methods)
    for m in methods:
        assert a.per_method[m].sum_se == b.per_method[m].sum_se
        assert np.array_equal(a.per_method[m].per_user_se, b.per_method[m].per_user_se)


def test_drop_guard_and_unknown_method():
    with pytest.raises(GuardError):
        run_drop(ScenarioConfig(), 0, ("eopt",))
    with pytest.raises(ValueError, match="bogus"):
        run_drop(small(2), 0, ("bogus",))


def test_cdf_percentiles():
    s = CdfSeries.from_values("x", [4.0, 1.0, 3.0, 2.0])
    assert s.sorted_values.tolist() == [1.0, 2.0, 3.0, 4.0]
    assert s.percentile(0) == 1.0 and s.percentile(100) == 4.0
    assert s.median() == 2.5
    assert s.percentile(25) == 1.75
    values = s.percentile(np.arange(101))
    assert np.all(np.diff(values) >= 0)


def test_monte_carlo_worker_independent():
    cfg = small(3, drops=5)
    serial = run_monte_carlo(cfg, ("chun", "dauc", "hd", "repa"))
    pooled = run_monte_carlo(cfg, ("chun", "dauc", "hd", "repa"), workers=2)
    assert drops_csv(serial) == drops_csv(pooled)
    assert cdf_csv(serial.cdfs) == cdf_csv(pooled.cdfs)


def test_ratios_use_medians():
    res = run_monte_carlo(small(3, drops=5), ("dauc", "hd"))
    r = res.ratios()
    assert r["dauc/hd"] == pytest.approx(res.cdfs["dauc"].median() / res.cdfs["hd"].median())
    assert r["hd/dauc"] == pytest.approx(1 / r["dauc/hd"])


def test_csv_layout():
    res = run_monte_carlo(small(2, drops=2), ("dauc", "hd"))
    lines = drops_csv(res).splitlines()
    assert lines[0] == "drop,method,sum_se,sum_weighted_se,bids,infeasible_pairs"
    assert len(lines) == 1 + 2 * 2
    assert lines[2].split(",")[4] == ""  # hd has no bid count
    cdf = cdf_csv(res.cdfs).splitlines()
    assert cdf[0] == "method,percentile,value" and len(cdf) == 1 + 2 * 101
