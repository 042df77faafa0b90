"""Shared dense linear-algebra kernels.

SVD-based functionals used throughout the toolkit: Schatten quasi-norms,
matrix powers of positive semi-definite matrices with explicit zero
retention, noise-subspace bases, spectral-gap rank detection, and a
pseudo-inverse with a uniform numerical-rank convention.

All "rank" decisions in this package go through :class:`RankTolerance`,
which thresholds singular values relative to the largest one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RankTolerance:
    """Relative threshold below which singular values count as zero."""

    rel_tol: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must be in (0, 1), got {self.rel_tol}")


DEFAULT_TOL = RankTolerance()


def numerical_rank(a, tol: RankTolerance = DEFAULT_TOL, scale: float | None = None) -> int:
    """Number of singular values above ``rel_tol`` times the reference scale.

    ``a`` may be a matrix or a 1-D array of (nonnegative) singular values.
    The reference is the largest singular value, optionally floored by
    ``scale``; pass ``scale`` when the matrix can be entirely roundoff
    (e.g. a projected block of a unit-column dictionary, whose natural
    scale is 1) so such a matrix counts as rank 0 rather than full.
    """
    a = np.asarray(a)
    s = np.linalg.svd(a, compute_uv=False) if a.ndim == 2 else np.abs(a)
    if s.size == 0:
        return 0
    ref = max(s.max(), scale or 0.0)
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rel_tol * ref))


def schatten_p(w, p: float) -> float:
    """Schatten-p quasi-norm sum(sigma_i**p) for p in (0, 1].

    Equals the nuclear norm at p = 1; 0**p is taken as 0 so rank-deficient
    inputs are handled without special cases.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    s = np.linalg.svd(np.asarray(w), compute_uv=False)
    return float(np.sum(s**p))


def _validate_hermitian_psd(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = np.abs(m).max() if m.size else 0.0
    if scale > 0.0 and np.abs(m - m.conj().T).max() > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian to working precision")
    return 0.5 * (m + m.conj().T)


def psd_power(m, e: float, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Spectral power M**e of a Hermitian PSD matrix.

    Eigenvalues at or below ``rel_tol`` times the largest are kept at
    exactly zero ("retaining zero singular values at zero"), which makes
    negative exponents well-defined on the range of M. The zero matrix maps
    to itself for any exponent.
    """
    m = _validate_hermitian_psd(m)
    lam, u = np.linalg.eigh(m)
    lmax = lam[-1] if lam.size else 0.0
    if lmax <= 0.0:
        return np.zeros_like(m)
    if lam[0] < -1e-10 * lmax:
        raise ValueError("matrix has a significantly negative eigenvalue")
    keep = lam > tol.rel_tol * lmax
    f = np.zeros_like(lam)
    f[keep] = lam[keep] ** e
    out = (u * f) @ u.conj().T
    return 0.5 * (out + out.conj().T)


def noise_basis(y, r: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the top-r left
    singular subspace of ``y``.

    Returns an m x (m - r) matrix Q with Q*Q = I and Q*U_r = 0.
    """
    y = np.asarray(y)
    m = y.shape[0]
    if not 0 <= r < m:
        raise ValueError(f"need 0 <= r < m, got r={r}, m={m}")
    u, _, _ = np.linalg.svd(y, full_matrices=True)
    return u[:, r:]


def detect_rank(singvals, threshold: float = 0.1) -> int:
    """Estimate rank from the largest relative spectral gap.

    For a nonincreasing spectrum s_1 >= ... >= s_m the relative gap at
    index i is (s_i - s_{i+1}) / (s_i - s_m). The estimate is the smallest
    index attaining the maximal gap over i <= m - 2, provided that maximum
    exceeds ``threshold``; otherwise m - 1 is returned (no detectable gap).
    Index m - 1 is excluded because its ratio is identically 1.
    """
    s = np.asarray(singvals, dtype=float)
    if s.ndim != 1 or s.size < 1:
        raise ValueError("singvals must be a 1-D vector")
    if np.any(np.diff(s) > 0):
        raise ValueError("singvals must be nonincreasing")
    m = s.size
    if s[0] <= s[-1]:
        raise ValueError("rank undetectable: all singular values equal")
    if m <= 2:
        return m - 1
    num = s[: m - 2] - s[1 : m - 1]
    den = s[: m - 2] - s[-1]
    ratios = np.divide(num, den, out=np.zeros(m - 2), where=den > 0)
    best = int(np.argmax(ratios))  # ties -> smallest index
    if ratios[best] > threshold:
        return best + 1
    return m - 1


def pinv(b, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """SVD-based Moore-Penrose pseudo-inverse with the package-wide
    numerical-rank convention."""
    return np.linalg.pinv(np.asarray(b), rcond=tol.rel_tol)
