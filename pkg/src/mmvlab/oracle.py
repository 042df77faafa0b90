"""Exhaustive reference solvers for small instances.

These enumerate supports outright and exist to validate both the theory
(the rank criterion min over |I| >= k of rank(Q* A_I) identifies the true
support on noiseless data) and the iterative solvers. Budgets guard
against combinatorial blowups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, islice

import numpy as np

from .linops import DEFAULT_TOL, RankTolerance, noise_basis, numerical_rank


@dataclass(frozen=True)
class OracleBudget:
    max_supports: int = 2_000_000
    residual_tol: float = 1e-8

    def __post_init__(self):
        if self.max_supports < 1 or self.residual_tol <= 0:
            raise ValueError("budget fields must be positive")


DEFAULT_BUDGET = OracleBudget()

_BATCH = 2048


def _batched(iterable, size):
    it = iter(iterable)
    while batch := list(islice(it, size)):
        yield batch


def brute_min_rank_support(
    a,
    y,
    k: int,
    tol: RankTolerance = DEFAULT_TOL,
    budget: OracleBudget = DEFAULT_BUDGET,
) -> tuple[list[tuple[int, ...]], int]:
    """Minimize rank(Q* A_I) over all supports of size exactly k.

    Q spans the noise subspace of the (noiseless) data; enumerating |I| = k
    suffices because the minimum over |I| = l is nondecreasing in l.
    Returns (supports, min_rank) where ``supports`` lists every support
    attaining the minimum (ties are surfaced, never broken silently).
    """
    a = np.asarray(a)
    y = np.asarray(y)
    n = a.shape[1]
    total = math.comb(n, k)
    if total > budget.max_supports:
        raise ValueError(f"C({n},{k}) = {total} exceeds the support budget")

    r = numerical_rank(y, tol)
    qa = noise_basis(y, r).conj().T @ a  # (m - r) x n

    best_rank = None
    best: list[tuple[int, ...]] = []
    for batch in _batched(combinations(range(n), k), _BATCH):
        idx = np.asarray(batch)  # (batch, k)
        stacked = qa.T[idx].transpose(0, 2, 1)  # (batch, m - r, k)
        svals = np.linalg.svd(stacked, compute_uv=False)
        # threshold anchored at the unit column scale of A, so fully
        # annihilated blocks count as rank 0
        ref = np.maximum(svals[:, 0], 1.0)
        ranks = np.sum(svals > tol.rel_tol * ref[:, None], axis=1)
        for support, rank in zip(batch, ranks):
            rank = int(rank)
            if best_rank is None or rank < best_rank:
                best_rank = rank
                best = [support]
            elif rank == best_rank:
                best.append(support)
    return best, int(best_rank)


def brute_l0(
    a,
    y,
    k_max: int,
    budget: OracleBudget = DEFAULT_BUDGET,
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Smallest-support exact solver for min ||X||_0 s.t. ||Y - A X||_F small.

    Tries supports in order of size then lexicographically, solving least
    squares on each, and returns the first whose relative residual is below
    the budget's ``residual_tol``. Raises if nothing of size <= k_max fits.
    """
    a = np.asarray(a)
    y = np.asarray(y)
    n = a.shape[1]
    y_norm = np.linalg.norm(y)
    if sum(math.comb(n, kk) for kk in range(1, k_max + 1)) > budget.max_supports:
        raise ValueError("support budget exceeded")

    for kk in range(1, k_max + 1):
        for support in combinations(range(n), kk):
            cols = a[:, support]
            block, *_ = np.linalg.lstsq(cols, y, rcond=None)
            if np.linalg.norm(cols @ block - y) < budget.residual_tol * y_norm:
                x = np.zeros((n, y.shape[1]), dtype=block.dtype)
                x[list(support)] = block
                return x, support
    raise ValueError(f"no support of size <= {k_max} fits the data at the budget tolerance")


def spark_lower_bound(
    a,
    limit: int | None = None,
    tol: RankTolerance = DEFAULT_TOL,
    budget: OracleBudget = DEFAULT_BUDGET,
) -> int:
    """Smallest size <= limit of a numerically dependent column subset, or
    limit + 1 when every such subset is independent (a certified lower
    bound spark(A) >= limit + 1).

    ``limit`` defaults to min(n, m + 1); any m + 1 columns are dependent,
    so the default sentinel limit + 1 = m + 2 is never reached for
    limit = m + 1 <= n.
    """
    a = np.asarray(a)
    m, n = a.shape
    if limit is None:
        limit = min(n, m + 1)
    if sum(math.comb(n, s) for s in range(1, limit + 1)) > budget.max_supports:
        raise ValueError("subset budget exceeded")

    for size in range(1, limit + 1):
        if size > m:
            return size  # more columns than rows are always dependent
        for subset in combinations(range(n), size):
            if numerical_rank(a[:, subset], tol) < size:
                return size
    return limit + 1
