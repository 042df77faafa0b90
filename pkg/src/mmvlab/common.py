"""Pieces shared by the hyperparameter-learning solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve


@dataclass
class SolveResult:
    """Outcome of one solver run.

    ``r_hat`` is the signal-subspace dimension used, for solvers that
    estimate one; None otherwise.
    """

    X_hat: np.ndarray
    gamma: np.ndarray
    support_estimate: np.ndarray
    cost_trace: np.ndarray
    iters: int
    converged: bool
    r_hat: int | None = None


def sigma_y(gamma, a, lam: float) -> np.ndarray:
    """Hermitian model covariance lambda*I + A Gamma A*."""
    a = np.asarray(a)
    s = (a * gamma) @ a.conj().T
    s[np.diag_indices_from(s)] += lam
    return 0.5 * (s + s.conj().T)


def x_update(gamma, a, y, lam: float) -> np.ndarray:
    """Closed-form ridge-type signal estimate Gamma A* (lambda I + A Gamma A*)^{-1} Y.

    Rows with a zero hyperparameter come out exactly zero.
    """
    gamma = np.asarray(gamma, dtype=float)
    a = np.asarray(a)
    c = cho_factor(sigma_y(gamma, a, lam), lower=True)
    return gamma[:, None] * (a.conj().T @ cho_solve(c, np.asarray(y)))


def row_energies(x) -> np.ndarray:
    """Squared l2 norm of each row."""
    x = np.asarray(x)
    return np.einsum("ij,ij->i", x.conj(), x).real


def top_k_rows(scores, k: int) -> np.ndarray:
    """Indices of the k largest scores, ties broken by lower index.

    ``scores`` may be a matrix (scored by row l2 norm) or a 1-D score
    vector. The result is sorted.
    """
    scores = np.asarray(scores)
    if scores.ndim == 2:
        scores = np.sqrt(row_energies(scores))
    if k > scores.size:
        raise ValueError(f"k={k} exceeds the number of rows {scores.size}")
    order = np.argsort(-scores, kind="stable")
    return np.sort(order[:k])


def pick_support(x_hat, gamma, prune_tol: float, k: int | None) -> np.ndarray:
    """Support rule shared by the solvers: top-k row norms of the estimate
    when the sparsity is known, otherwise all rows whose hyperparameter
    clears a relative pruning threshold."""
    if k is not None:
        return top_k_rows(x_hat, k)
    gamma = np.asarray(gamma)
    gmax = gamma.max() if gamma.size else 0.0
    return np.flatnonzero(gamma > prune_tol * gmax)


def relative_change(new, old) -> float:
    """||new - old|| / ||new||, with 0/0 treated as converged (0)."""
    num = np.linalg.norm(new - old)
    den = np.linalg.norm(new)
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return float(num / den)


def default_lambda(y, snr_db: float | None = None) -> float:
    """Regularization level proportional to the per-entry noise power.

    With a known SNR this is 10**(-snr/10) times the mean squared
    measurement entry; without one, a fixed 1e-2 fraction of it.
    """
    y = np.asarray(y)
    scale = np.linalg.norm(y) ** 2 / y.size
    if snr_db is None or math.isinf(snr_db):
        factor = 1e-2 if snr_db is None else 1e-10
    else:
        factor = 10.0 ** (-snr_db / 10.0)
    return float(max(factor * scale, 1e-300))
