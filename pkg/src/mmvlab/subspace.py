"""Signal/noise subspace estimation and MUSIC-style spectral criteria.

The noise subspace Q (orthogonal complement of the dominant left singular
subspace of the data) is the geometric object shared by MUSIC, SA-MUSIC and
the subspace-penalized solver: columns of the sensing matrix that carry
signal energy are the ones nearly orthogonal to Q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linops import DEFAULT_TOL, RankTolerance, detect_rank, numerical_rank

SPECTRUM_CAP = 1e12


@dataclass(frozen=True)
class RankPolicy:
    """How the signal-subspace dimension is chosen.

    mode "auto" applies the relative spectral-gap rule to the data singular
    values; mode "fixed" uses a caller-supplied dimension (experiments with
    known rank).
    """

    mode: str = "auto"
    fixed_r: int | None = None

    def __post_init__(self):
        if self.mode not in ("auto", "fixed"):
            raise ValueError(f"unknown rank policy mode {self.mode!r}")
        if self.mode == "fixed" and (self.fixed_r is None or self.fixed_r < 1):
            raise ValueError("fixed mode needs fixed_r >= 1")


AUTO_RANK = RankPolicy()


def fixed_rank(r: int) -> RankPolicy:
    return RankPolicy(mode="fixed", fixed_r=r)


@dataclass(frozen=True)
class SubspaceEstimate:
    """Orthonormal split of measurement space into signal and noise parts.

    ``U_sig`` holds the top ``r_hat`` left singular vectors, ``Q`` the
    remaining m - r_hat; stacked they form a unitary matrix. ``singvals``
    has length m (zero-padded when there are fewer snapshots than sensors).
    """

    U_sig: np.ndarray
    Q: np.ndarray
    r_hat: int
    singvals: np.ndarray


def estimate_subspace(
    y,
    policy: RankPolicy = AUTO_RANK,
    gap_threshold: float = 0.1,
    use_squared_singvals: bool = False,
) -> SubspaceEstimate:
    """Split the column space of ``y`` into signal and noise subspaces.

    With the auto policy the rank comes from the spectral-gap rule applied
    to the singular values of y (or their squares, i.e. the eigenvalues of
    Y Y*, when ``use_squared_singvals`` is set). A fixed policy overrides
    detection entirely.
    """
    y = np.asarray(y)
    m = y.shape[0]
    if np.linalg.norm(y) == 0.0:
        raise ValueError("cannot estimate a subspace from zero data")
    u, s, _ = np.linalg.svd(y, full_matrices=True)
    singvals = np.zeros(m)
    singvals[: s.size] = s

    if policy.mode == "fixed":
        r_hat = policy.fixed_r
        if not 1 <= r_hat < m:
            raise ValueError(f"fixed rank {r_hat} out of range for m={m}")
    else:
        # Two padding artifacts must not reach the gap rule. Roundoff-level
        # values are snapped to exact zero (otherwise SVD noise against a
        # padded zero forms a spurious perfect gap). With fewer snapshots
        # than sensors the spectrum is truncated to its min(m, N) real
        # values plus one zero sentinel, so the artificial gap between the
        # noise floor and the padding sits at the structurally excluded
        # last index instead of winning the argmax.
        eps_floor = singvals[0] * max(y.shape) * np.finfo(float).eps
        cleaned = np.where(singvals > eps_floor, singvals, 0.0)
        if s.size < m:
            cleaned = np.append(cleaned[: s.size], 0.0)
        gaps_on = cleaned**2 if use_squared_singvals else cleaned
        r_hat = detect_rank(gaps_on, threshold=gap_threshold)

    return SubspaceEstimate(U_sig=u[:, :r_hat], Q=u[:, r_hat:], r_hat=r_hat, singvals=singvals)


def music_spectrum(est: SubspaceEstimate, a) -> np.ndarray:
    """Pseudospectrum 1 / ||Q* a_i|| per dictionary column.

    Large values mark columns close to the signal subspace; exact
    membership would give an infinite peak, which is clamped at a large
    finite cap to keep rankings well-defined.
    """
    a = np.asarray(a)
    proj = est.Q.conj().T @ a
    denom = np.sqrt(np.einsum("ij,ij->j", proj.conj(), proj).real)
    return 1.0 / np.maximum(denom, 1.0 / SPECTRUM_CAP)


def subspace_rank_objective(
    est: SubspaceEstimate, a, index_set, tol: RankTolerance = DEFAULT_TOL
) -> int:
    """Numerical rank of Q* A_I, the quantity whose minimum over supports
    of size >= k identifies the true support on noiseless data.

    The rank threshold is anchored at the unit column scale of A so a
    fully annihilated block counts as rank 0.
    """
    idx = np.asarray(index_set, dtype=int)
    if idx.size == 0:
        raise ValueError("index set must be nonempty")
    return numerical_rank(est.Q.conj().T @ np.asarray(a)[:, idx], tol, scale=1.0)
