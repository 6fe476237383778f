"""Per-pair SINR, spectral efficiency and optimal UL/DL power allocation.

For a co-scheduled pair ``(i, j)`` the weighted objective
``a_u*log2(1+sinr_ul) + a_d*log2(1+sinr_dl)`` is maximized over the power
box subject to the SINR targets. Scaling both powers up by the same factor
raises both SINRs, so the optimum always sits on one of the two max-power
edges ``p_ul = P_max^u`` or ``p_dl = P_max^d``. Each edge is a 1-D search:
the feasible part of the edge is an interval known in closed form, which
is scanned on a uniform grid and then refined by golden-section search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import NetworkInstance

INFEASIBLE_BENEFIT = -1.0e6
GRID_POINTS = 1024
MIN_POWER_FRACTION = 1e-9
_GOLDEN_ITERS = 48
_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
_LN2 = np.log(2.0)


def spectral_efficiency(sinr):
    """Shannon spectral efficiency ``log2(1 + sinr)`` in bits/s/Hz."""
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0):
        raise ValueError("SINR must be non-negative")
    out = np.log1p(sinr) / _LN2
    return out if out.ndim else float(out)


def pair_sinr(p_ul, p_dl, inst: NetworkInstance, i, j):
    """SINRs of UL user ``i`` at the BS and of DL user ``j``, when paired.

    The UL link sees residual self-interference ``beta * p_dl``; the DL link
    sees UE-to-UE interference ``p_ul * G_ij``.
    """
    sinr_ul = p_ul * inst.g_ul[i] / (inst.sigma2 + inst.beta * p_dl)
    sinr_dl = p_dl * inst.g_dl[j] / (inst.sigma2 + p_ul * inst.g_cross[i, j])
    return sinr_ul, sinr_dl


@dataclass(frozen=True)
class PairSolution:
    p_ul: float
    p_dl: float
    sinr_ul: float
    sinr_dl: float
    se_ul: float
    se_dl: float
    benefit: float
    feasible: bool
    # weighted objective at the returned powers, equal to benefit when feasible
    objective: float


@dataclass(frozen=True)
class PairBatch:
    """Vectorized counterpart of :class:`PairSolution` (one entry per pair)."""

    p_ul: np.ndarray
    p_dl: np.ndarray
    sinr_ul: np.ndarray
    sinr_dl: np.ndarray
    objective: np.ndarray
    feasible: np.ndarray

    @property
    def benefit(self) -> np.ndarray:
        return np.where(self.feasible, self.objective, INFEASIBLE_BENEFIT)

    def item(self, k) -> PairSolution:
        return PairSolution(
            p_ul=float(self.p_ul[k]), p_dl=float(self.p_dl[k]),
            sinr_ul=float(self.sinr_ul[k]), sinr_dl=float(self.sinr_dl[k]),
            se_ul=float(np.log1p(self.sinr_ul[k]) / _LN2),
            se_dl=float(np.log1p(self.sinr_dl[k]) / _LN2),
            benefit=float(self.benefit[k]), feasible=bool(self.feasible[k]),
            objective=float(self.objective[k]))


def _upper_bound(num, den):
    # solves den * x <= num for x >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / den, np.where(num >= 0, np.inf, -np.inf))


def _lower_bound(num, den):
    # solves den * x >= num for x >= 0, den > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / den, np.where(num <= 0, 0.0, np.inf))


class _Pairs:
    """Gains and weights for a flat batch of candidate pairs."""

    def __init__(self, inst: NetworkInstance, ul, dl):
        self.g_ib = inst.g_ul[ul]
        self.g_bj = inst.g_dl[dl]
        self.g_ij = inst.g_cross[ul, dl]
        self.a_u = inst.alpha_ul[ul]
        self.a_d = inst.alpha_dl[dl]
        self.inst = inst

    def sinr(self, p_u, p_d, sl=(Ellipsis,)):
        inst = self.inst
        g_ib, g_bj, g_ij = self.g_ib[sl], self.g_bj[sl], self.g_ij[sl]
        return (p_u * g_ib / (inst.sigma2 + inst.beta * p_d),
                p_d * g_bj / (inst.sigma2 + p_u * g_ij))

    def objective(self, p_u, p_d, sl=(Ellipsis,)):
        s_u, s_d = self.sinr(p_u, p_d, sl)
        return (self.a_u[sl] * np.log1p(s_u) + self.a_d[sl] * np.log1p(s_d)) / _LN2


def _search_edge(pairs: _Pairs, fixed_ul: bool, lo, hi):
    """Maximize the pair objective along one max-power edge over ``[lo, hi]``.

    Returns ``(x, value)`` with ``x`` the free power; entries whose interval is
    empty come back as NaN.
    """
    inst = pairs.inst
    ok = lo <= hi
    lo = np.where(ok, lo, 0.0)
    hi = np.where(ok, hi, 0.0)
    col = (slice(None), None)

    def f(x, sl=col):
        if fixed_ul:
            return pairs.objective(inst.p_max_ul, x, sl)
        return pairs.objective(x, inst.p_max_dl, sl)

    t = np.linspace(0.0, 1.0, GRID_POINTS)
    grid = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    vals = f(grid)
    k = np.argmax(vals, axis=1)
    rows = np.arange(lo.shape[0])
    best_x = grid[rows, k]
    best_v = vals[rows, k]

    a = grid[rows, np.maximum(k - 1, 0)]
    b = grid[rows, np.minimum(k + 1, GRID_POINTS - 1)]
    flat = (Ellipsis,)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c, flat), f(d, flat)
    for _ in range(_GOLDEN_ITERS):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _INV_PHI * (b - a)
        new_d = a + _INV_PHI * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_next = np.where(left, f(new_c, flat), fd)
        fd_next = np.where(left, fc, f(new_d, flat))
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    x_ref = np.where(fc >= fd, c, d)
    v_ref = np.maximum(fc, fd)
    better = v_ref > best_v
    best_x = np.where(better, x_ref, best_x)
    best_v = np.where(better, v_ref, best_v)
    return np.where(ok, best_x, np.nan), np.where(ok, best_v, -np.inf)


def _feasible_intervals(pairs: _Pairs):
    inst = pairs.inst
    s2, beta = inst.sigma2, inst.beta
    pu, pd = inst.p_max_ul, inst.p_max_dl
    th_u, th_d = inst.sinr_th_ul, inst.sinr_th_dl
    floor_u, floor_d = MIN_POWER_FRACTION * pu, MIN_POWER_FRACTION * pd
    shrink = 1e-12
    # edge p_ul = P_max^u, free variable p_dl
    a_hi = _upper_bound(pu * pairs.g_ib - th_u * s2, th_u * beta * np.ones_like(pairs.g_ib))
    a_lo = _lower_bound(th_d * (s2 + pu * pairs.g_ij), pairs.g_bj)
    a_lo = np.maximum(a_lo * (1 + shrink), floor_d)
    a_hi = np.minimum(a_hi * (1 - shrink), pd)
    # edge p_dl = P_max^d, free variable p_ul
    b_lo = _lower_bound(th_u * (s2 + beta * pd), pairs.g_ib)
    b_hi = _upper_bound(pd * pairs.g_bj - th_d * s2, th_d * pairs.g_ij)
    b_lo = np.maximum(b_lo * (1 + shrink), floor_u)
    b_hi = np.minimum(b_hi * (1 - shrink), pu)
    return (a_lo, a_hi), (b_lo, b_hi)


def _best_on_edges(pairs: _Pairs, edge_a, edge_b):
    inst = pairs.inst
    x_a, v_a = _search_edge(pairs, True, *edge_a)
    x_b, v_b = _search_edge(pairs, False, *edge_b)
    take_a = v_a >= v_b
    p_u = np.where(take_a, inst.p_max_ul, x_b)
    p_d = np.where(take_a, x_a, inst.p_max_dl)
    return p_u, p_d, np.maximum(v_a, v_b)


def optimize_powers(inst: NetworkInstance, ul, dl) -> PairBatch:
    """Optimal powers for a batch of pairs ``(ul[k], dl[k])``.

    Pairs whose SINR targets cannot be met on either edge get the
    unconstrained best edge point and ``feasible=False``.
    """
    ul = np.asarray(ul, dtype=int).ravel()
    dl = np.asarray(dl, dtype=int).ravel()
    pairs = _Pairs(inst, ul, dl)
    edge_a, edge_b = _feasible_intervals(pairs)
    p_u, p_d, _ = _best_on_edges(pairs, edge_a, edge_b)

    infeasible = np.isnan(p_u) | np.isnan(p_d)
    if infeasible.any():
        full_a = (np.full(ul.shape, MIN_POWER_FRACTION * inst.p_max_dl), np.full(ul.shape, inst.p_max_dl))
        full_b = (np.full(ul.shape, MIN_POWER_FRACTION * inst.p_max_ul), np.full(ul.shape, inst.p_max_ul))
        sub = _Pairs(inst, ul[infeasible], dl[infeasible])
        q_u, q_d, _ = _best_on_edges(sub, tuple(e[infeasible] for e in full_a),
                                     tuple(e[infeasible] for e in full_b))
        p_u = p_u.copy()
        p_d = p_d.copy()
        p_u[infeasible] = q_u
        p_d[infeasible] = q_d

    s_u, s_d = pairs.sinr(p_u, p_d)
    objective = pairs.objective(p_u, p_d)
    feasible = (s_u >= inst.sinr_th_ul) & (s_d >= inst.sinr_th_dl)
    return PairBatch(p_ul=p_u, p_dl=p_d, sinr_ul=s_u, sinr_dl=s_d,
                     objective=objective, feasible=feasible)


def optimize_pair_powers(inst: NetworkInstance, i: int, j: int) -> PairSolution:
    """Optimal ``(p_ul, p_dl)`` for the single pair ``(i, j)``."""
    if not (0 <= i < inst.n and 0 <= j < inst.g_dl.shape[0]):
        raise IndexError(f"pair ({i}, {j}) out of range")
    return optimize_powers(inst, [i], [j]).item(0)


def evaluate_pair(inst: NetworkInstance, i: int, j: int, p_ul: float, p_dl: float) -> PairSolution:
    """Score a pair at given powers, without optimizing."""
    s_u, s_d = pair_sinr(p_ul, p_dl, inst, i, j)
    se_u, se_d = spectral_efficiency(s_u), spectral_efficiency(s_d)
    objective = inst.alpha_ul[i] * se_u + inst.alpha_dl[j] * se_d
    feasible = bool(s_u >= inst.sinr_th_ul and s_d >= inst.sinr_th_dl)
    return PairSolution(p_ul=float(p_ul), p_dl=float(p_dl), sinr_ul=float(s_u), sinr_dl=float(s_d),
                        se_ul=se_u, se_dl=se_d, objective=float(objective), feasible=feasible,
                        benefit=float(objective) if feasible else INFEASIBLE_BENEFIT)
