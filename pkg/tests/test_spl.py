import math

import numpy as np
import pytest

from mmvlab import msbl, spl
from mmvlab.common import default_lambda, row_energies
from mmvlab.instances import SignalSpec, make_instance
from mmvlab.linops import numerical_rank, psd_power, schatten_p
from mmvlab.oracle import brute_min_rank_support
from mmvlab.subspace import estimate_subspace, fixed_rank, music_spectrum


def rand_psd(rng, d, rank):
    b = rng.standard_normal((d, rank))
    return b @ b.T


class TestPsiUpdate:
    def test_nuclear_case_is_inverse_sqrt(self):
        # gamma = (4, 1), A = Q = I makes the penalty Gram diag(4, 1)
        psi = spl.psi_update(np.array([4.0, 1.0]), np.eye(2), np.eye(2), p=1.0)
        np.testing.assert_allclose(psi, np.diag([0.5, 1.0]), atol=1e-12)

    def test_rank_mode_inverse_keeps_zeros(self):
        psi = spl.psi_update(np.array([4.0, 0.0]), np.eye(2), np.eye(2), p=None)
        np.testing.assert_allclose(psi, np.diag([0.25, 0.0]), atol=1e-12)

    @pytest.mark.parametrize("p", [1.0, 0.5, 0.25])
    def test_conjugacy_inverts_on_range(self, p):
        """Psi**(q/2 - 1) must reproduce the Gram matrix on its range,
        since (p/2 - 1)(q/2 - 1) = 1."""
        rng = np.random.default_rng(5)
        e = p / 2.0 - 1.0
        q_half_minus_1 = 1.0 / e
        for rank in (2, 4):
            m = rand_psd(rng, 4, rank)
            psi = psd_power(m, e)
            back = psd_power(psi, q_half_minus_1)
            assert np.linalg.norm(back - psd_power(m, 1.0)) <= 1e-8 * np.linalg.norm(m)

    def test_exponent_values(self):
        assert spl.SplConfig(lam=1.0, p=1.0).exponent() == pytest.approx(-0.5)
        assert spl.SplConfig(lam=1.0, p=0.5).exponent() == pytest.approx(-0.75)
        assert spl.SplConfig(lam=1.0).exponent() == -1.0


def test_x_update_shared_with_msbl():
    assert spl.x_update is msbl.x_update


class TestGammaUpdate:
    def cfg(self, **kw):
        return spl.SplConfig(lam=1.0, **kw)

    def test_scalar_stationary_value(self):
        # one snapshot, row norm 2, curvature d = 4: gamma = sqrt(4/4) = 1
        a = np.array([[0.0], [1.0]])  # Q* a_1 = 1 with Q = e2
        q = np.array([[0.0], [1.0]])
        psi = np.array([[4.0]])
        x = np.array([[2.0]])
        got = spl.gamma_update(x, psi, a, q, self.cfg())
        assert got[0] == pytest.approx(1.0)

    def test_degenerate_branches_assign_cap(self):
        a = np.eye(2)
        q = np.array([[1.0], [0.0]])  # Q* a_2 = 0 exactly
        psi = np.zeros((1, 1))  # curvature vanishes for every column
        x = np.array([[3.0, 0.0], [0.0, 0.0]])
        got = spl.gamma_update(x, psi, a, q, self.cfg())
        # branch with energy (the unbounded case) and without (the
        # arbitrary-constant case) both land on the cap
        np.testing.assert_array_equal(got, [1e6, 1e6])

    def test_zero_energy_with_curvature_gives_zero(self):
        a = np.eye(2)
        q = np.eye(2)
        psi = np.eye(2)
        x = np.zeros((2, 3))
        np.testing.assert_array_equal(spl.gamma_update(x, psi, a, q, self.cfg()), [0.0, 0.0])


class TestRevival:
    def test_spl_revives_where_msbl_cannot(self):
        """Full-signal-rank noiseless case: a support column lies inside the
        signal subspace, so its penalty curvature vanishes; one SPL update
        turns the dead row back on while the M-SBL update keeps it dead."""
        inst = make_instance(SignalSpec(m=12, n=24, N=8, k=4, r=4, seed=31))
        est = estimate_subspace(inst.Y, fixed_rank(4))
        dead = inst.support[1]

        gamma = np.zeros(inst.n)
        gamma[inst.support] = 1.0
        gamma[dead] = 0.0

        lam = 1e-8
        cfg = spl.SplConfig(lam=lam)
        x = spl.x_update(gamma, inst.A, inst.Y, lam)
        assert row_energies(x)[dead] == 0.0

        psi = spl.psi_update(gamma, inst.A, est.Q, p=None)
        d = np.einsum(
            "ij,ij->j", (est.Q.conj().T @ inst.A).conj(), psi @ (est.Q.conj().T @ inst.A)
        ).real
        assert d[dead] <= cfg.denom_tol

        gamma_spl = spl.gamma_update(x, psi, inst.A, est.Q, cfg)
        assert gamma_spl[dead] > 0.0

        gamma_msbl = msbl.gamma_update(gamma, x, inst.A, lam)
        assert gamma_msbl[dead] == 0.0


class TestCost:
    def test_zero_state_reduces_to_data_energy(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((5, 9))
        y = rng.standard_normal((5, 3))
        q = np.linalg.qr(rng.standard_normal((5, 2)))[0]
        got = spl.cost(np.zeros((9, 3)), np.ones(9), np.zeros((2, 2)), a, y, q, lam=0.4, p=1.0)
        assert got == pytest.approx(np.linalg.norm(y) ** 2)

    def test_rejects_energy_outside_gamma_support(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((4, 6))
        y = rng.standard_normal((4, 2))
        q = np.linalg.qr(rng.standard_normal((4, 2)))[0]
        gamma = np.zeros(6)
        x = np.ones((6, 2))
        with pytest.raises(ValueError):
            spl.cost(x, gamma, np.eye(2), a, y, q, lam=0.1, p=1.0)

    @pytest.mark.parametrize("p", [1.0, 0.5])
    def test_monotone_descent(self, p):
        for seed in range(4):
            inst = make_instance(SignalSpec(m=14, n=28, N=8, k=4, r=3, snr_db=25.0, seed=seed))
            cfg = spl.SplConfig(lam=default_lambda(inst.Y, 25.0), p=p, max_iters=80)
            res = spl.solve(inst.A, inst.Y, cfg)
            trace = res.cost_trace
            drops = np.diff(trace)
            assert np.all(drops <= 1e-6 * np.abs(trace[:-1]))


class TestKktIdentity:
    def test_penalty_value_at_convergence(self):
        """At a stationary point the quadratic row term equals the Schatten
        term, so the total penalty is twice the Schatten quasi-norm of
        Q* A Gamma^{1/2}."""
        inst = make_instance(SignalSpec(m=16, n=32, N=12, k=4, r=4, snr_db=40.0, seed=8))
        p = 1.0
        cfg = spl.SplConfig(lam=default_lambda(inst.Y, 40.0), p=p, rank_policy=fixed_rank(4), max_iters=400)
        res = spl.solve(inst.A, inst.Y, cfg)
        assert res.converged

        est = estimate_subspace(inst.Y, fixed_rank(4))
        gamma = res.gamma
        active = gamma > 0
        tr_xgx = float(np.sum(row_energies(res.X_hat)[active] / gamma[active]))
        half = inst.N * schatten_p(est.Q.conj().T @ inst.A @ np.diag(np.sqrt(gamma)), p)
        assert tr_xgx == pytest.approx(half, rel=0.05)
        assert tr_xgx + half == pytest.approx(2 * half, rel=0.05)


def test_rank_identity_at_truth():
    """gamma supported exactly on the true support of a noiseless instance
    makes Q* A Gamma^{1/2} have rank k - r."""
    for seed in range(5):
        inst = make_instance(SignalSpec(m=14, n=28, N=8, k=5, r=3, seed=seed))
        est = estimate_subspace(inst.Y, fixed_rank(3))
        gamma = np.zeros(inst.n)
        gamma[inst.support] = 1.0 + np.arange(5) * 0.1
        rank = numerical_rank(est.Q.conj().T @ inst.A @ np.diag(np.sqrt(gamma)), scale=1.0)
        assert rank == inst.k - inst.r


def test_music_case_factorization():
    """With m = k + 1 and full signal rank the penalty Gram is scalar and
    the gamma update factors into (MUSIC spectrum) x (row-norm term)."""
    inst = make_instance(SignalSpec(m=6, n=16, N=8, k=5, r=5, seed=12))
    est = estimate_subspace(inst.Y, fixed_rank(5))
    assert est.Q.shape == (6, 1)

    gamma = np.abs(np.random.default_rng(0).normal(1.0, 0.2, size=16))
    b = est.Q.conj().T @ inst.A
    gram = (b * gamma) @ b.conj().T
    assert gram.shape == (1, 1)
    m_scalar = gram[0, 0].real

    cfg = spl.SplConfig(lam=1.0)
    x = spl.x_update(gamma, inst.A, inst.Y, 1e-9)
    psi = spl.psi_update(gamma, inst.A, est.Q, p=None)
    got = spl.gamma_update(x, psi, inst.A, est.Q, cfg)

    eta = music_spectrum(est, inst.A)
    row_term = np.sqrt(row_energies(x) * m_scalar / inst.N)
    expected = eta * row_term
    mask = got < cfg.gamma_cap
    np.testing.assert_allclose(got[mask], expected[mask], rtol=1e-8)


class TestSolve:
    def test_zero_data_is_an_error(self):
        rng = np.random.default_rng(4)
        with pytest.raises(ValueError):
            spl.solve(rng.standard_normal((4, 8)), np.zeros((4, 3)), spl.SplConfig(lam=0.1))

    def test_easy_instance_recovery(self):
        inst = make_instance(SignalSpec(m=16, n=32, N=8, k=3, r=3, seed=19))
        res = spl.solve(inst.A, inst.Y, spl.SplConfig(lam=1e-8), k=3)
        np.testing.assert_array_equal(res.support_estimate, inst.support)
        assert res.r_hat == 3

    def test_gamma_nonnegative_and_finite(self):
        inst = make_instance(SignalSpec(m=12, n=24, N=8, k=4, r=3, snr_db=20.0, seed=6))
        res = spl.solve(inst.A, inst.Y, spl.SplConfig(lam=default_lambda(inst.Y, 20.0)))
        assert np.all(res.gamma >= 0.0) and np.all(np.isfinite(res.gamma))

    def test_agrees_with_rank_oracle_on_small_instances(self):
        """Rank-minimizing mode with annealed regularization lands on the
        brute-force minimizer of rank(Q* A_I)."""
        hits = 0
        for seed in range(5):
            inst = make_instance(SignalSpec(m=8, n=12, N=4, k=3, r=2, seed=100 + seed))
            supports, min_rank = brute_min_rank_support(inst.A, inst.Y, 3)
            assert min_rank == 1 and len(supports) == 1
            cfg = spl.SplConfig(
                lam=1e-2, anneal=True, anneal_every=5, max_iters=300,
                rank_policy=fixed_rank(2),
            )
            res = spl.solve(inst.A, inst.Y, cfg, k=3)
            hits += np.array_equal(res.support_estimate, np.asarray(supports[0]))
        assert hits == 5

    def test_config_validation(self):
        with pytest.raises(ValueError):
            spl.SplConfig(lam=1.0, p=1.5)
        with pytest.raises(ValueError):
            spl.SplConfig(lam=-1.0)
