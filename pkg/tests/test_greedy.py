import numpy as np
import pytest

from mmvlab.greedy import GreedyConfig, music_recover, samusic_recover, somp_recover
from mmvlab.instances import SignalSpec, make_instance
from mmvlab.subspace import fixed_rank


def noiseless(m, n, N, k, r, seed, kind="gaussian"):
    return make_instance(SignalSpec(m=m, n=n, N=N, k=k, r=r, matrix_kind=kind, seed=seed))


class TestMusic:
    def test_full_rank_exact_recovery(self):
        for seed in range(20):
            inst = noiseless(16, 40, 12, 5, 5, seed)
            got = music_recover(inst.A, inst.Y, GreedyConfig(k=5))
            np.testing.assert_array_equal(got, inst.support)

    def test_k_equals_one_identity_dictionary(self):
        rng = np.random.default_rng(0)
        y = rng.standard_normal((6, 4))
        y[3] *= 10.0  # dominant row
        got = music_recover(np.eye(6), y, GreedyConfig(k=1, rank_policy=fixed_rank(1)))
        np.testing.assert_array_equal(got, [3])

    def test_rank_deficient_mostly_fails(self):
        hits = 0
        for seed in range(40):
            inst = noiseless(30, 128, 64, 10, 6, 100 + seed)
            got = music_recover(inst.A, inst.Y, GreedyConfig(k=10))
            hits += np.array_equal(got, inst.support)
        assert hits / 40 < 0.5

    def test_rejects_k_at_m(self):
        inst = noiseless(5, 10, 5, 3, 3, 0)
        with pytest.raises(ValueError):
            music_recover(inst.A, inst.Y, GreedyConfig(k=5))


class TestSomp:
    def test_unitary_dictionary_reduces_to_correlation_ranking(self):
        rng = np.random.default_rng(1)
        a, _ = np.linalg.qr(rng.standard_normal((12, 12)))
        y = rng.standard_normal((12, 5))
        k = 4
        corr = np.linalg.norm(a.T @ y, axis=1)
        expected = np.sort(np.argsort(-corr, kind="stable")[:k])
        got = somp_recover(a, y, GreedyConfig(k=k))
        np.testing.assert_array_equal(got, expected)

    def test_k_equals_one_is_argmax_correlation(self):
        rng = np.random.default_rng(2)
        inst = noiseless(8, 20, 6, 3, 2, 7)
        corr = np.linalg.norm(inst.A.conj().T @ inst.Y, axis=1)
        got = somp_recover(inst.A, inst.Y, GreedyConfig(k=1))
        np.testing.assert_array_equal(got, [int(np.argmax(corr))])

    def test_easy_noiseless_recovery_rate(self):
        hits = 0
        for seed in range(100):
            inst = noiseless(32, 64, 8, 4, 4, 300 + seed)
            got = somp_recover(inst.A, inst.Y, GreedyConfig(k=4))
            hits += np.array_equal(got, inst.support)
        assert hits >= 99

    def test_dependent_columns_error(self):
        a = np.zeros((4, 3))
        a[:, 0] = a[:, 1] = np.array([1.0, 0, 0, 0])
        a[:, 2] = np.array([0, 1.0, 0, 0])
        y = np.ones((4, 2))
        with pytest.raises(np.linalg.LinAlgError):
            somp_recover(a, y, GreedyConfig(k=3))


class TestSaMusic:
    def test_fixed_full_rank_policy_matches_music(self):
        for seed in range(10):
            inst = make_instance(SignalSpec(m=20, n=48, N=24, k=6, r=4, snr_db=20.0, seed=seed))
            cfg = GreedyConfig(k=6, rank_policy=fixed_rank(6))
            np.testing.assert_array_equal(
                samusic_recover(inst.A, inst.Y, cfg), music_recover(inst.A, inst.Y, cfg)
            )

    def test_beats_plain_music_below_full_rank(self):
        music_hits = samusic_hits = 0
        trials = 40
        for seed in range(trials):
            inst = noiseless(40, 128, 256, 10, 6, 500 + seed)
            cfg = GreedyConfig(k=10)
            music_hits += np.array_equal(music_recover(inst.A, inst.Y, cfg), inst.support)
            samusic_hits += np.array_equal(samusic_recover(inst.A, inst.Y, cfg), inst.support)
        assert samusic_hits == trials
        assert music_hits < trials

    def test_returns_k_distinct_indices(self):
        inst = make_instance(SignalSpec(m=14, n=32, N=16, k=5, r=3, snr_db=15.0, seed=3))
        got = samusic_recover(inst.A, inst.Y, GreedyConfig(k=5))
        assert got.size == 5 and np.unique(got).size == 5
        assert np.all((0 <= got) & (got < 32))


def test_permutation_equivariance():
    rng = np.random.default_rng(9)
    inst = noiseless(16, 32, 12, 5, 4, 42)
    perm = rng.permutation(32)
    a_perm = inst.A[:, perm]
    cfg = GreedyConfig(k=5)
    for recover in (music_recover, somp_recover, samusic_recover):
        base = recover(inst.A, inst.Y, cfg)
        permuted = recover(a_perm, inst.Y, cfg)
        # column j of a_perm is column perm[j] of A
        np.testing.assert_array_equal(np.sort(perm[permuted]), base)


def test_fourier_instances_supported():
    inst = noiseless(16, 32, 12, 4, 4, 11, kind="fourier")
    got = music_recover(inst.A, inst.Y, GreedyConfig(k=4))
    np.testing.assert_array_equal(got, inst.support)
    got = somp_recover(inst.A, inst.Y, GreedyConfig(k=4))
    np.testing.assert_array_equal(got, inst.support)
