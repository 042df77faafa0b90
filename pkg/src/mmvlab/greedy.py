"""Subspace and greedy baselines: MUSIC, S-OMP, SA-MUSIC.

All three assume the sparsity level k is known and return exactly k
distinct column indices, ties broken toward the lower index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import orth as scipy_orth

from .common import top_k_rows
from .subspace import AUTO_RANK, RankPolicy, SubspaceEstimate, estimate_subspace, music_spectrum


@dataclass(frozen=True)
class GreedyConfig:
    k: int
    rank_policy: RankPolicy = AUTO_RANK

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")


def music_recover(a, y, cfg: GreedyConfig, est: SubspaceEstimate | None = None) -> np.ndarray:
    """Pick the k columns with the largest MUSIC pseudospectrum values."""
    a = np.asarray(a)
    if cfg.k >= a.shape[0]:
        raise ValueError(f"MUSIC needs k < m, got k={cfg.k}, m={a.shape[0]}")
    if est is None:
        est = estimate_subspace(y, cfg.rank_policy)
    return top_k_rows(music_spectrum(est, a), cfg.k)


def somp_recover(a, y, cfg: GreedyConfig) -> np.ndarray:
    """Simultaneous OMP: k greedy selections of the column most correlated
    with the residual, which is re-projected off the chosen columns after
    every pick."""
    a = np.asarray(a)
    y = np.asarray(y)
    m, n = a.shape
    if cfg.k > min(m, n):
        raise ValueError(f"S-OMP needs k <= min(m, n), got k={cfg.k}")

    selected: list[int] = []
    # orthonormal basis of the selected columns, grown by Gram-Schmidt
    basis = np.zeros((m, cfg.k), dtype=np.result_type(a.dtype, y.dtype))
    residual = y.astype(basis.dtype, copy=True)
    for step in range(cfg.k):
        corr = a.conj().T @ residual
        scores = np.einsum("ij,ij->i", corr.conj(), corr).real
        scores[selected] = -1.0
        pick = int(np.argmax(scores))
        selected.append(pick)

        col = a[:, pick].astype(basis.dtype)
        col -= basis[:, :step] @ (basis[:, :step].conj().T @ col)
        norm = np.linalg.norm(col)
        if norm <= 1e-10:
            raise np.linalg.LinAlgError("selected columns are numerically dependent")
        basis[:, step] = col / norm
        residual = y - basis[:, : step + 1] @ (basis[:, : step + 1].conj().T @ y)
    return np.sort(np.asarray(selected))


def samusic_recover(a, y, cfg: GreedyConfig) -> np.ndarray:
    """Subspace-augmented MUSIC.

    When the detected signal rank r_hat falls short of k, a partial support
    of size k - r_hat is recovered greedily (S-OMP on the data projected
    onto the signal subspace); the signal subspace is then augmented with
    the picked columns and the remaining r_hat indices are those whose
    columns have the largest projection onto the augmented subspace.
    Degenerates to plain MUSIC when r_hat >= k.
    """
    a = np.asarray(a)
    y = np.asarray(y)
    est = estimate_subspace(y, cfg.rank_policy)
    if est.r_hat >= cfg.k:
        return music_recover(a, y, cfg, est=est)

    projected = est.U_sig @ (est.U_sig.conj().T @ y)
    partial = somp_recover(a, projected, GreedyConfig(k=cfg.k - est.r_hat))

    dtype = np.result_type(est.U_sig.dtype, a.dtype)
    w = scipy_orth(np.hstack([est.U_sig.astype(dtype), a[:, partial].astype(dtype)]))
    coef = w.conj().T @ a
    scores = np.einsum("ij,ij->j", coef.conj(), coef).real
    scores[partial] = -1.0
    rest = top_k_rows(scores, est.r_hat)
    return np.sort(np.concatenate([partial, rest]))
