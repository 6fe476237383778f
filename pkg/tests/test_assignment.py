import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fdpair.assignment import (EXHAUSTIVE_MAX_N, Assignment, BenefitMatrix, GuardError,
                               assignment_total, compute_benefit_matrix, solve_exhaustive,
                               solve_hungarian)
from fdpair.channel import NetworkInstance, build_instance, drop_rngs, place_users
from fdpair.config import ScenarioConfig
from fdpair.power import optimize_pair_powers

from oracles import enumerate_best


def small_instance(n=4, seed=0, drop=0, **kw):
    cfg = ScenarioConfig(num_ul=n, num_dl=n, num_channels=n, **kw)
    rng, _ = drop_rngs(seed, drop)
    return build_instance(cfg, place_users(cfg, rng), rng)


def test_single_user_matrix_equals_pair_solution():
    inst = small_instance(1)
    benefit = compute_benefit_matrix(inst)
    assert benefit.c.shape == (1, 1)
    assert benefit.c[0, 0] == optimize_pair_powers(inst, 0, 0).benefit


def test_matrix_cells_match_single_pair_calls():
    inst = small_instance(3, drop=2)
    benefit = compute_benefit_matrix(inst)
    for i in range(3):
        for j in range(3):
            assert benefit.solution(i, j) == optimize_pair_powers(inst, i, j)


def test_additive_when_uncoupled():
    # no SI and no UE-to-UE leakage: each pair benefit splits into UL + DL parts
    rng = np.random.default_rng(1)
    g_ul, g_dl = rng.uniform(0.1, 2, 4), rng.uniform(0.1, 2, 4)
    inst = NetworkInstance.from_gains(g_ul, g_dl, np.zeros((4, 4)), sigma2=0.3, beta=0.0,
                                      sinr_th_ul=0.0, sinr_th_dl=0.0)
    c = compute_benefit_matrix(inst).c
    u = np.log2(1 + g_ul / 0.3)
    d = np.log2(1 + g_dl / 0.3)
    np.testing.assert_allclose(c, u[:, None] + d[None, :], rtol=1e-12)
    # every pairing then has the same total
    totals = [assignment_total(c, p) for p in ([0, 1, 2, 3], [3, 2, 1, 0], [1, 3, 0, 2])]
    assert max(totals) - min(totals) < 1e-12


def test_benefit_matrix_is_pure():
    inst = small_instance(4, drop=5)
    a, b = compute_benefit_matrix(inst), compute_benefit_matrix(inst)
    assert np.array_equal(a.c, b.c)
    assert not a.c.flags.writeable


@pytest.mark.parametrize("c, total", [
    ([[1, 0], [0, 1]], 2.0),
    ([[2, 1], [1, 2]], 4.0),
    ([[0, 1], [1, 0]], 2.0),
])
def test_exhaustive_small(c, total):
    assert solve_exhaustive(c).total_benefit == total
    assert solve_hungarian(c).total_benefit == total


def test_exhaustive_ties_lexicographic():
    res = solve_exhaustive(np.ones((3, 3)))
    assert res.pairs.tolist() == [0, 1, 2]


def test_hungarian_equals_exhaustive_random():
    rng = np.random.default_rng(7)
    for _ in range(200):
        c = rng.uniform(0, 10, size=(6, 6))
        assert solve_hungarian(c).total_benefit == solve_exhaustive(c).total_benefit


def test_exhaustive_against_plain_enumeration():
    rng = np.random.default_rng(8)
    for n in range(1, 6):
        c = rng.uniform(-5, 5, size=(n, n))
        best, _ = enumerate_best(c)
        assert solve_exhaustive(c).total_benefit == pytest.approx(best, abs=1e-12)


def test_dominant_column():
    rng = np.random.default_rng(9)
    c = rng.uniform(0, 1, size=(5, 5))
    c[2, 4] = 100.0
    for solver in (solve_exhaustive, solve_hungarian):
        assert solver(c).pairs[2] == 4
    assert solve_exhaustive(c).total_benefit == pytest.approx(enumerate_best(c)[0], abs=1e-12)


def test_permutation_matrix_benefit():
    perm = np.array([2, 0, 3, 1])
    c = np.zeros((4, 4))
    c[np.arange(4), perm] = 1.0
    res = solve_hungarian(c)
    assert res.pairs.tolist() == perm.tolist()
    assert np.array_equal(res.matrix(), c.astype(int))


def test_objective_matches_solutions():
    inst = small_instance(4, drop=1)
    benefit = compute_benefit_matrix(inst)
    res = solve_hungarian(benefit)
    assert res.is_bijection()
    # weighted totals reach ~1e12 under path-loss compensation, so compare relatively
    recomputed = math.fsum(s.benefit for s in res.per_pair_powers)
    assert res.total_benefit == pytest.approx(recomputed, rel=1e-12)


def test_guard():
    with pytest.raises(GuardError, match="N=10"):
        solve_exhaustive(np.zeros((EXHAUSTIVE_MAX_N + 1,) * 2))


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.array([[1.0, np.nan], [0, 0]])])
def test_matrix_validation(bad):
    with pytest.raises(ValueError):
        BenefitMatrix(bad)


def test_plain_matrix_has_no_powers():
    res = solve_hungarian([[1.0]])
    assert res.per_pair_powers is None
    with pytest.raises(LookupError):
        BenefitMatrix([[1.0]]).solution(0, 0)


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 6)).map(lambda t: (t[0], t[0])),
              elements=st.floats(-50, 50, allow_nan=False)))
def test_solvers_agree_and_biject(c):
    ex, hun = solve_exhaustive(c), solve_hungarian(c)
    assert ex.is_bijection() and hun.is_bijection()
    assert hun.total_benefit == pytest.approx(ex.total_benefit, abs=1e-9)
    assert isinstance(ex, Assignment)
