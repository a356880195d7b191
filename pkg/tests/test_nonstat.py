"""Nonstationarity matrices against constructed and brute-force oracles."""

import numpy as np
import pytest

from ssakit.moments import whiten
from ssakit.nonstat import NonstatMatrix, m_assa, m_cor, m_mean, m_var
from ssakit.series import MultivariateSeries, Segmentation, equal_segmentation
from ssakit.simulation import random_orthogonal


def brute_interval_stats(Y, seg, lag, center):
    out = []
    for a, b in seg.intervals:
        X = Y[a - 1 : b - 1]
        m = X.mean(axis=0) if center == "interval" else Y.mean(axis=0)
        n = len(X)
        S = np.zeros((Y.shape[1],) * 2)
        for t in range(n - lag):
            S += np.outer(X[t] - m, X[t + lag] - m)
        out.append((X.mean(axis=0), S / (n - lag)))
    return out


def brute_m_mean(Y, seg):
    p = Y.shape[1]
    M = np.zeros((p, p))
    for (m, _), w in zip(brute_interval_stats(Y, seg, 0, "interval"), seg.weights):
        M += w * np.outer(m, m)
    return M


def brute_m_var(Y, seg, center):
    p = Y.shape[1]
    M = np.zeros((p, p))
    for (_, S), w in zip(brute_interval_stats(Y, seg, 0, center), seg.weights):
        G = np.eye(p) - S
        M += w * G @ G.T
    return M


def brute_m_cor(Y, seg, lag, center):
    # the full-span statistic centers on the full-span mean under either
    # centering rule, because the whole series is its own interval
    p = Y.shape[1]
    T = Y.shape[0]
    full_m = Y.mean(axis=0)
    acc = np.zeros((p, p))
    for t in range(T - lag):
        acc += np.outer(Y[t] - full_m, Y[t + lag] - full_m)
    full = acc / (T - lag)
    M = np.zeros((p, p))
    for (_, S), w in zip(brute_interval_stats(Y, seg, lag, center), seg.weights):
        G = full - S
        M += w * G @ G.T
    return M


def brute_m_assa(Y, seg, center):
    p = Y.shape[1]
    M = np.zeros((p, p))
    for (m, S), w in zip(brute_interval_stats(Y, seg, 0, center), seg.weights):
        M += w * (np.outer(m, m) + 0.5 * S @ S.T)
    return M - 0.5 * np.eye(p)


def whitened_fixture(seed, T=120, p=3):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((T, p)) @ rng.standard_normal((p, p))
    return whiten(X).whitened


class TestConstructedCases:
    def test_m_mean_two_opposite_levels(self):
        # halves at -a and +a: M = 0.5 a^2 + 0.5 a^2 = a^2, exactly
        a = 0.125
        y = MultivariateSeries(np.r_[np.full(40, -a), np.full(40, a)])
        seg = equal_segmentation(80, 2)
        got = m_mean(y, seg)
        assert got.kind == "mean"
        assert got.matrix[0, 0] == pytest.approx(a * a, abs=1e-15)

    def test_m_var_two_variance_levels(self):
        # alternating +-sqrt(1+d) then +-sqrt(1-d): interval means are exactly
        # zero and interval variances exactly 1+d and 1-d, so M = d^2
        d = 0.25
        up = np.tile([1.0, -1.0], 30) * np.sqrt(1 + d)
        down = np.tile([1.0, -1.0], 30) * np.sqrt(1 - d)
        y = MultivariateSeries(np.r_[up, down])
        seg = equal_segmentation(120, 2)
        got = m_var(y, seg)
        assert got.matrix[0, 0] == pytest.approx(d * d, abs=1e-14)

    def test_m_cor_stationary_signal_is_small(self):
        rng = np.random.default_rng(5)
        y = whiten(rng.standard_normal((4000, 2))).whitened
        got = m_cor(y, equal_segmentation(4000, 4), lag=1)
        assert np.max(np.abs(got.matrix)) < 0.01


class TestBruteForce:
    @pytest.mark.parametrize("seed", range(6))
    def test_all_four_matrices(self, seed):
        rng = np.random.default_rng(200 + seed)
        T = int(rng.integers(60, 150))
        K = int(rng.integers(2, 5))
        p = int(rng.integers(2, 5))
        y = whiten(rng.standard_normal((T, p)) @ rng.standard_normal((p, p))).whitened
        seg = equal_segmentation(T, K)
        Y = y.values
        lag = int(rng.integers(1, 3))
        for center in ("interval", "global"):
            assert np.max(np.abs(m_var(y, seg, center).matrix
                                 - brute_m_var(Y, seg, center))) < 1e-12
            assert np.max(np.abs(m_cor(y, seg, lag, center).matrix
                                 - brute_m_cor(Y, seg, lag, center))) < 1e-12
            assert np.max(np.abs(m_assa(y, seg, center).matrix
                                 - brute_m_assa(Y, seg, center))) < 1e-12
        assert np.max(np.abs(m_mean(y, seg).matrix - brute_m_mean(Y, seg))) < 1e-12


class TestAlgebraicProperties:
    @pytest.mark.parametrize("builder", [m_mean, m_var, lambda y, s: m_cor(y, s, 1)])
    def test_positive_semidefinite(self, builder):
        y = whitened_fixture(31)
        M = builder(y, equal_segmentation(y.n_samples, 3)).matrix
        assert np.linalg.eigvalsh(M).min() > -1e-12

    @pytest.mark.parametrize("builder", [
        m_mean,
        m_var,
        lambda y, s: m_cor(y, s, 1),
        m_assa,
    ])
    def test_rotation_equivariance(self, builder):
        # rotating whitened data by Q conjugates every matrix by Q
        y = whitened_fixture(32, T=150, p=4)
        seg = equal_segmentation(150, 3)
        Q = random_orthogonal(4, seed=99)
        yq = MultivariateSeries(y.values @ Q.T)
        M = builder(y, seg).matrix
        MQ = builder(yq, seg).matrix
        assert np.max(np.abs(MQ - Q @ M @ Q.T)) < 1e-10

    def test_interval_centering_collapses_assa_onto_var(self):
        # with per-interval centering the weighted interval covariances and
        # mean outer products sum exactly to the identity, which forces
        # M_v = 2 M_assa; the two then share eigenvectors
        y = whitened_fixture(33, T=200, p=4)
        seg = equal_segmentation(200, 4)
        Mv = m_var(y, seg, "interval").matrix
        Ma = m_assa(y, seg, "interval").matrix
        assert np.max(np.abs(Mv - 2.0 * Ma)) < 1e-12

    def test_global_centering_splits_assa_into_mean_plus_half_var(self):
        y = whitened_fixture(34, T=200, p=4)
        seg = equal_segmentation(200, 4)
        Mm = m_mean(y, seg).matrix
        Mv = m_var(y, seg, "global").matrix
        Ma = m_assa(y, seg, "global").matrix
        assert np.max(np.abs(Ma - (Mm + 0.5 * Mv))) < 1e-12


class TestInputChecks:
    def test_unwhitened_input_rejected(self):
        rng = np.random.default_rng(41)
        x = MultivariateSeries(rng.standard_normal((60, 2)) + 5.0)
        with pytest.raises(ValueError, match="whitened"):
            m_mean(x, equal_segmentation(60, 3))

    def test_segmentation_length_mismatch_rejected(self):
        y = whitened_fixture(42)
        with pytest.raises(ValueError, match="covers"):
            m_mean(y, equal_segmentation(y.n_samples + 10, 2))

    def test_cor_lag_below_one_rejected(self):
        y = whitened_fixture(43)
        with pytest.raises(ValueError, match="at least 1"):
            m_cor(y, equal_segmentation(y.n_samples, 2), lag=0)


class TestSerialization:
    def test_json_round_trip_cor(self):
        y = whitened_fixture(51)
        seg = Segmentation(y.n_samples, ((1, 50), (50, y.n_samples + 1)))
        M = m_cor(y, seg, lag=2)
        back = NonstatMatrix.from_json(M.to_json())
        assert back.kind == "cor"
        assert back.lag == 2
        assert np.array_equal(back.matrix, M.matrix)
        assert back.segmentation.intervals == seg.intervals

    def test_json_round_trip_mean(self):
        y = whitened_fixture(52)
        M = m_mean(y, equal_segmentation(y.n_samples, 3))
        back = NonstatMatrix.from_json(M.to_json())
        assert back.kind == "mean"
        assert back.lag is None
        assert np.array_equal(back.matrix, M.matrix)
