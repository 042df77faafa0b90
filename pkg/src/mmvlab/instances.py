"""Problem-instance generation for joint sparse recovery experiments.

Builds the data every solver and benchmark consumes: unit-column sensing
matrices (Gaussian or partial-DFT), row-sparse signal matrices with
controlled rank and conditioning, measurement noise calibrated to an exact
Frobenius SNR, and adversarial basic-feasible-solution initializations for
the local-minima experiments.

Everything here is pure given (spec, seed): identical inputs reproduce
bit-identical instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GAUSSIAN = "gaussian"
FOURIER = "fourier"


@dataclass(frozen=True)
class SignalSpec:
    """Parameters of one random MMV instance.

    m, n
        Measurement and signal dimensions (A is m x n).
    N
        Number of measurement vectors (snapshots).
    k
        Row sparsity of the signal.
    r
        Rank of the nonzero signal block, r <= min(k, N).
    tau
        Geometric decay of the planted singular values sigma_i = tau**i,
        0 < tau <= 1; tau = 1 gives a perfectly conditioned signal.
    snr_db
        Measurement SNR in dB (Frobenius power ratio); math.inf means
        noiseless.
    matrix_kind
        "gaussian" (real) or "fourier" (complex partial DFT).
    seed
        64-bit seed; sub-streams for matrix, signal and noise are derived
        from it.

    Note: k may exceed m. Such instances are hopeless for recovery but are
    legal benchmark points (the undersampling sweeps start below the
    sparsity level).
    """

    m: int
    n: int
    N: int
    k: int
    r: int
    tau: float = 1.0
    snr_db: float = math.inf
    matrix_kind: str = GAUSSIAN
    seed: int = 0

    def __post_init__(self):
        if min(self.m, self.n, self.N, self.k, self.r) < 1:
            raise ValueError("all dimensions must be >= 1")
        if self.n < self.k:
            raise ValueError(f"need k <= n, got k={self.k}, n={self.n}")
        if self.r > self.k or self.r > self.N:
            raise ValueError(f"need r <= min(k, N), got r={self.r}")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must be in (0, 1], got {self.tau}")
        if self.matrix_kind not in (GAUSSIAN, FOURIER):
            raise ValueError(f"unknown matrix_kind {self.matrix_kind!r}")

    @property
    def is_complex(self) -> bool:
        return self.matrix_kind == FOURIER


@dataclass(frozen=True)
class ProblemInstance:
    """One realized MMV problem: measurements plus the planted ground truth."""

    A: np.ndarray
    Y: np.ndarray
    X_true: np.ndarray
    support: np.ndarray  # sorted row indices, length k
    k: int
    r: int
    snr_db: float
    seed: int
    spec: SignalSpec = field(repr=False, default=None)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def N(self) -> int:
        return self.Y.shape[1]

    @property
    def noiseless(self) -> bool:
        return math.isinf(self.snr_db)


def gen_gaussian_matrix(m: int, n: int, seed: int) -> np.ndarray:
    """Real i.i.d. N(0, 1/m) matrix with columns rescaled to unit norm."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, 1.0 / math.sqrt(m), size=(m, n))
    return a / np.linalg.norm(a, axis=0)


def gen_fourier_matrix(m: int, n: int, seed: int) -> np.ndarray:
    """Partial DFT sensing matrix: m rows drawn uniformly without
    replacement from the n x n unitary DFT, columns renormalized."""
    if m > n:
        raise ValueError(f"partial DFT needs m <= n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    rows = rng.choice(n, size=m, replace=False)
    a = np.exp(-2j * np.pi * np.outer(rows, np.arange(n)) / n) / math.sqrt(n)
    return a / np.linalg.norm(a, axis=0)


def gen_sensing_matrix(spec: SignalSpec, seed: int) -> np.ndarray:
    if spec.matrix_kind == FOURIER:
        return gen_fourier_matrix(spec.m, spec.n, seed)
    return gen_gaussian_matrix(spec.m, spec.n, seed)


def _standard_matrix(rng, shape, complex_field: bool) -> np.ndarray:
    if complex_field:
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)
    return rng.standard_normal(shape)


def signal_singular_values(tau: float, r: int) -> np.ndarray:
    """Planted spectrum (tau, tau**2, ..., tau**r); tau controls conditioning."""
    return tau ** np.arange(1, r + 1, dtype=float)


def gen_signal(spec: SignalSpec, seed: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Row-sparse signal with planted support, rank and conditioning.

    The support is uniform over k-subsets of {0..n-1}. The nonzero block is
    U diag(tau, tau**2, ..., tau**r) V with U a random k x r orthonormal
    frame and V an r x N i.i.d. Gaussian matrix with entry variance 1/N.
    Returns (X, support) with X of shape n x N and ``support`` sorted.
    """
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    support = np.sort(rng.choice(spec.n, size=spec.k, replace=False))
    sigma = signal_singular_values(spec.tau, spec.r)

    u, _ = np.linalg.qr(_standard_matrix(rng, (spec.k, spec.r), spec.is_complex))
    for _ in range(64):
        v = _standard_matrix(rng, (spec.r, spec.N), spec.is_complex) / math.sqrt(spec.N)
        block = (u * sigma) @ v
        s = np.linalg.svd(block, compute_uv=False)
        if s[spec.r - 1] > 1e-12 * s[0]:
            break
    else:  # pragma: no cover - probability zero
        raise RuntimeError("could not draw a rank-r coefficient matrix")

    x = np.zeros((spec.n, spec.N), dtype=block.dtype)
    x[support] = block
    return x, support


def add_noise(y0: np.ndarray, snr_db: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise scaled to hit ``snr_db`` exactly.

    The drawn noise matrix is rescaled so that
    10*log10(||Y0||_F^2 / ||E||_F^2) equals the requested SNR; complex
    inputs get circularly symmetric noise. ``snr_db = inf`` returns the
    input unchanged.
    """
    y0 = np.asarray(y0)
    if math.isinf(snr_db):
        return y0.copy()
    signal = np.linalg.norm(y0)
    if signal == 0.0:
        raise ValueError("undefined SNR: zero signal with finite snr_db")
    rng = np.random.default_rng(seed)
    e = _standard_matrix(rng, y0.shape, np.iscomplexobj(y0))
    e *= signal / (np.linalg.norm(e) * 10.0 ** (snr_db / 20.0))
    return y0 + e


def make_instance(spec: SignalSpec) -> ProblemInstance:
    """Generate the full (A, Y, X, support) tuple for one spec.

    Sub-seeds for the sensing matrix, the signal and the noise are derived
    from ``spec.seed`` so the three draws are independent streams.
    """
    s_matrix, s_signal, s_noise = np.random.SeedSequence(spec.seed).generate_state(3, dtype=np.uint64)
    a = gen_sensing_matrix(spec, int(s_matrix))
    x, support = gen_signal(spec, int(s_signal))
    y = add_noise(a @ x, spec.snr_db, int(s_noise))
    return ProblemInstance(
        A=a, Y=y, X_true=x, support=support,
        k=spec.k, r=spec.r, snr_db=spec.snr_db, seed=spec.seed, spec=spec,
    )


def gen_bfs_init(inst: ProblemInstance, s: int, seed: int, max_tries: int = 64) -> np.ndarray:
    """Basic feasible solution X0 with A X0 = Y, exactly m nonzero rows, and
    |supp(X0) ∩ supp(X*)| = s.

    Used to start solvers at an adversarial feasible point: s support rows
    are taken from the true support and m - s from its complement, then the
    square system on those rows is solved exactly. Requires a noiseless
    instance. Index sets whose submatrix is numerically singular are
    redrawn.
    """
    if not inst.noiseless:
        raise ValueError("BFS initialization requires a noiseless instance")
    m, n, k = inst.m, inst.n, inst.k
    if s > k or s > m:
        raise ValueError(f"overlap s={s} is infeasible (k={k}, m={m})")
    if m > n or m - s > n - k:
        raise ValueError(f"cannot place {m - s} off-support rows among {n - k}")

    rng = np.random.default_rng(seed)
    complement = np.setdiff1d(np.arange(n), inst.support, assume_unique=False)
    y_norm = np.linalg.norm(inst.Y)
    for _ in range(max_tries):
        rows_in = rng.choice(inst.support, size=s, replace=False)
        rows_out = rng.choice(complement, size=m - s, replace=False)
        j = np.sort(np.concatenate([rows_in, rows_out]))
        try:
            block = np.linalg.solve(inst.A[:, j], inst.Y)
        except np.linalg.LinAlgError:
            continue
        if np.linalg.norm(inst.A[:, j] @ block - inst.Y) <= 1e-8 * y_norm:
            x0 = np.zeros((n, inst.N), dtype=block.dtype)
            x0[j] = block
            return x0
    raise RuntimeError(f"no well-conditioned BFS index set found in {max_tries} tries")
