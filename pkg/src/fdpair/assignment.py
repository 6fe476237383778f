"""Benefit matrix and exact one-to-one UL/DL assignment solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .channel import NetworkInstance
from .power import PairBatch, PairSolution, optimize_powers

EXHAUSTIVE_MAX_N = 9


class GuardError(ValueError):
    """Raised when a solver refuses an instance that is too large for it."""


@dataclass(frozen=True, eq=False)
class BenefitMatrix:
    """``c[i, j]``: weighted pair benefit of putting UL ``i`` with DL ``j``.

    ``batch`` keeps the per-cell power solutions (row-major) when the matrix
    was built from a network instance; plain matrices have none.
    """

    c: np.ndarray
    batch: PairBatch | None = None

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"benefit matrix must be square, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("benefit matrix entries must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.shape[0]

    def solution(self, i: int, j: int) -> PairSolution:
        if self.batch is None:
            raise LookupError("benefit matrix carries no power solutions")
        return self.batch.item(i * self.n + j)

    @property
    def solutions(self) -> list[list[PairSolution]]:
        return [[self.solution(i, j) for j in range(self.n)] for i in range(self.n)]


def compute_benefit_matrix(inst: NetworkInstance) -> BenefitMatrix:
    n = inst.n
    ul, dl = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    batch = optimize_powers(inst, ul, dl)
    return BenefitMatrix(batch.benefit.reshape(n, n), batch)


def assignment_total(c: np.ndarray, pairs) -> float:
    """Exactly rounded ``sum_i c[i, pairs[i]]``, independent of summation order."""
    c = np.asarray(c)
    return math.fsum(c[np.arange(len(pairs)), np.asarray(pairs)])


@dataclass(frozen=True, eq=False)
class Assignment:
    pairs: np.ndarray  # pairs[i] = DL user of UL user i
    total_benefit: float
    per_pair_powers: list[PairSolution] | None = field(default=None, repr=False)

    @classmethod
    def from_pairs(cls, benefit: BenefitMatrix, pairs) -> "Assignment":
        pairs = np.asarray(pairs, dtype=int)
        powers = None
        if benefit.batch is not None:
            powers = [benefit.solution(i, int(j)) for i, j in enumerate(pairs)]
        return cls(pairs=pairs, total_benefit=assignment_total(benefit.c, pairs),
                   per_pair_powers=powers)

    def is_bijection(self) -> bool:
        n = len(self.pairs)
        return sorted(self.pairs.tolist()) == list(range(n))

    def matrix(self) -> np.ndarray:
        n = len(self.pairs)
        x = np.zeros((n, n), dtype=int)
        x[np.arange(n), self.pairs] = 1
        return x


def _as_benefit(c) -> BenefitMatrix:
    return c if isinstance(c, BenefitMatrix) else BenefitMatrix(c)


def solve_exhaustive(c) -> Assignment:
    """Brute-force maximum over all ``N!`` permutations.

    Ties go to the lexicographically smallest permutation.
    """
    benefit = _as_benefit(c)
    n = benefit.n
    if n > EXHAUSTIVE_MAX_N:
        raise GuardError(
            f"exhaustive search refused for N={n}: guard is N <= {EXHAUSTIVE_MAX_N}")
    perms = np.array(list(permutations(range(n))), dtype=np.intp)
    totals = benefit.c[np.arange(n), perms].sum(axis=1)
    best = perms[int(np.argmax(totals))]
    return Assignment.from_pairs(benefit, best)


def solve_hungarian(c) -> Assignment:
    """Centralized optimal assignment (maximization form)."""
    benefit = _as_benefit(c)
    # offset keeps the min-cost form non-negative; it does not move the argmin
    cost = benefit.c.max() - benefit.c
    rows, cols = linear_sum_assignment(cost)
    pairs = np.empty(benefit.n, dtype=int)
    pairs[rows] = cols
    return Assignment.from_pairs(benefit, pairs)
