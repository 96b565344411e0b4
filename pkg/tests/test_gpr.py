import numpy as np
import pytest

from gpmimo.covariance import ChannelCovariance, GridShape
from gpmimo.gpr import (
    ComplexGPR,
    FitInitializationError,
    fit_hyperparameters,
    log_marginal_likelihood,
    posterior,
    reconstruct,
)
from gpmimo.kernels import GramSet, RBFKernel, SpatialCovarianceKernel, gram
from gpmimo.linalg import JITTER_MAX_FRACTION
from gpmimo.seeding import standard_complex_normal
from gpmimo.sounding import make_plan, observe, split_grid
from randmat import random_psd, random_unit_diag_psd


def make_case(n_rx, n_tx, stride, noise_var, seed, cov_seed=0):
    mat = random_unit_diag_psd(n_rx * n_tx, seed=cov_seed)
    cov = ChannelCovariance(GridShape(n_rx, n_tx), mat)
    rng = np.random.default_rng(seed)
    h_true = standard_complex_normal(rng, (n_rx, n_tx))
    plan = make_plan(cov.shape, stride)
    train, test = observe(h_true, plan, noise_var, seed=seed + 1)
    return cov, h_true, train, test


class TestPosterior:
    def test_noiseless_interpolation(self):
        # test point equal to a training point: mean = observation, var = 0
        mat = random_unit_diag_psd(6, seed=4)
        cov = ChannelCovariance(GridShape(2, 3), mat)
        kernel = SpatialCovarianceKernel(cov)
        z_train = np.array([[0, 0], [1, 1], [0, 2]])
        rng = np.random.default_rng(0)
        h = standard_complex_normal(rng, 3)
        grams = GramSet(
            k_train=kernel(z_train),
            k_cross=kernel(z_train, z_train[:1]),
            k_test=kernel(z_train[:1]),
        )
        post = posterior(grams, h, noise_var=0.0)
        assert abs(post.mean[0] - h[0]) < 1e-9
        assert post.var[0] < 1e-9

    def test_uncorrelated_test_points_return_prior(self):
        p, m = 5, 3
        rng = np.random.default_rng(1)
        h = standard_complex_normal(rng, p)
        k_test = random_psd(m, seed=2)
        grams = GramSet(
            k_train=np.eye(p, dtype=complex),
            k_cross=np.zeros((p, m), dtype=complex),
            k_test=k_test,
        )
        post = posterior(grams, h, noise_var=0.3)
        assert np.allclose(post.mean, 0.0)
        assert np.allclose(post.cov, k_test)

    @pytest.mark.parametrize("noise_var", [0.01, 0.1, 1.0])
    def test_matches_subsampled_mmse_oracle(self, noise_var):
        # dense-inverse evaluation of the selector-form linear MMSE estimate
        cov, h_true, train, test = make_case(4, 4, 2, noise_var, seed=10)
        kernel = SpatialCovarianceKernel(cov)
        post = posterior(gram(kernel, train, test), train.values, noise_var)

        b_idx = train.vec_indices
        r = cov.matrix
        k = r[np.ix_(b_idx, b_idx)] + noise_var * np.eye(len(b_idx))
        u_hat = r[:, b_idx] @ np.linalg.inv(k) @ train.values
        oracle = u_hat[test.vec_indices]
        scale = max(np.max(np.abs(oracle)), 1.0)
        assert np.max(np.abs(post.mean - oracle)) / scale < 1e-10

    def test_posterior_variance_never_exceeds_prior(self):
        cov, _, train, test = make_case(3, 4, 2, 0.2, seed=3)
        kernel = SpatialCovarianceKernel(cov)
        grams = gram(kernel, train, test)
        post = posterior(grams, train.values, 0.2)
        assert np.all(post.var <= np.real(np.diag(grams.k_test)) + 1e-9)

    def test_adding_training_point_shrinks_variance(self):
        cov, h_true, train, test = make_case(3, 3, 2, 0.1, seed=5)
        kernel = SpatialCovarianceKernel(cov)
        grams_all = gram(kernel, train, test)
        post_all = posterior(grams_all, train.values, 0.1)

        from gpmimo.sounding import TrainingSet

        smaller = TrainingSet(
            inputs=train.inputs[:-1],
            values=train.values[:-1],
            noise_var=train.noise_var,
            shape=train.shape,
        )
        grams_small = gram(kernel, smaller, test)
        post_small = posterior(grams_small, smaller.values, 0.1)
        assert np.all(post_all.var <= post_small.var + 1e-9)

    def test_jitter_within_budget(self):
        # rank-deficient covariance forces the jitter ladder
        low_rank = random_psd(9, seed=8, rank=3)
        cov = ChannelCovariance(GridShape(3, 3), low_rank)
        kernel = SpatialCovarianceKernel(cov)
        z = split_grid(cov.shape, np.arange(3))[0]
        k_train = kernel(z)
        grams = GramSet(k_train=k_train, k_cross=k_train[:, :2], k_test=k_train[:2, :2])
        rng = np.random.default_rng(0)
        post = posterior(grams, standard_complex_normal(rng, len(z)), noise_var=0.0)
        assert post.jitter <= JITTER_MAX_FRACTION * np.real(np.trace(k_train)) / len(z)


class TestLogMarginalLikelihood:
    def test_zero_kernel_diagonal_case(self):
        rng = np.random.default_rng(2)
        h = standard_complex_normal(rng, 6)
        c = 0.7
        value = log_marginal_likelihood(np.zeros((6, 6), dtype=complex), h, c)
        expected = -np.sum(np.abs(h) ** 2) / c - 6 * np.log(np.pi * c)
        assert value == pytest.approx(expected, rel=1e-12)

    def test_phase_invariance(self):
        rng = np.random.default_rng(3)
        h = standard_complex_normal(rng, 5)
        k = random_psd(5, seed=3)
        a = log_marginal_likelihood(k, h, 0.4)
        b = log_marginal_likelihood(k, h * np.exp(1j * 1.234), 0.4)
        assert a == pytest.approx(b, rel=1e-12)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(4)
        h = standard_complex_normal(rng, 6)
        k = random_psd(6, seed=5)
        noise_var = 0.3
        c = k + noise_var * np.eye(6)
        sign, logdet = np.linalg.slogdet(c)
        oracle = float(
            -np.real(h.conj() @ np.linalg.inv(c) @ h) - logdet - 6 * np.log(np.pi)
        )
        assert log_marginal_likelihood(k, h, noise_var) == pytest.approx(oracle, abs=1e-9)


class TestComplexGPREstimatorAPI:
    def test_get_set_params(self):
        model = ComplexGPR(RBFKernel(1.0, 0.5), noise_var=0.1)
        params = model.get_params()
        assert params["noise_var"] == 0.1
        assert params["kernel__lengthscale"] == 0.5
        model.set_params(kernel__lengthscale=2.0, noise_var=0.2)
        assert model.kernel.lengthscale == 2.0
        assert model.noise_var == 0.2

    def test_fit_predict_consistency_with_posterior(self):
        cov, _, train, test = make_case(3, 4, 2, 0.15, seed=6)
        kernel = SpatialCovarianceKernel(cov)
        model = ComplexGPR(kernel, noise_var=0.15).fit(train.inputs, train.values)
        mean, var = model.predict(test.inputs, return_var=True)
        post = posterior(gram(kernel, train, test), train.values, 0.15)
        assert np.allclose(mean, post.mean, atol=1e-12)
        assert np.allclose(var, post.var, atol=1e-10)

    def test_prediction_operator_reusable(self):
        cov, _, train, test = make_case(3, 3, 2, 0.1, seed=7)
        model = ComplexGPR(SpatialCovarianceKernel(cov), noise_var=0.1)
        model.fit(train.inputs, train.values)
        weights, var = model.prediction_operator(test.inputs)
        mean_direct, var_direct = model.predict(test.inputs, return_var=True)
        assert np.allclose(weights.conj().T @ train.values, mean_direct, atol=1e-12)
        assert np.allclose(var, var_direct, atol=1e-12)

    def test_lml_matches_function(self):
        cov, _, train, _ = make_case(3, 3, 1, 0.2, seed=8)
        kernel = SpatialCovarianceKernel(cov)
        model = ComplexGPR(kernel, noise_var=0.2).fit(train.inputs, train.values)
        direct = log_marginal_likelihood(kernel(train.inputs), train.values, 0.2)
        assert model.log_marginal_likelihood() == pytest.approx(direct, rel=1e-12)


class TestFitHyperparameters:
    def make_rbf_data(self, lengthscale=2.0, n_rx=20, n_tx=10, noise_var=0.01, seed=0):
        shape = GridShape(n_rx, n_tx)
        grid, _ = split_grid(shape, np.arange(n_tx))
        kernel = RBFKernel(scale=1.0, lengthscale=lengthscale)
        k = np.real(kernel(grid)) + 1e-10 * np.eye(len(grid))
        factor = np.linalg.cholesky(k)
        rng = np.random.default_rng(seed)
        values = factor @ standard_complex_normal(rng, len(grid))
        values += np.sqrt(noise_var) * standard_complex_normal(rng, len(grid))

        from gpmimo.sounding import TrainingSet

        return TrainingSet(inputs=grid, values=values, noise_var=noise_var, shape=shape)

    def test_recovers_lengthscale(self):
        train = self.make_rbf_data(lengthscale=2.0, seed=12)
        report = fit_hyperparameters("RBF", train, max_iters=50, seed=1)
        assert 1.5 <= report.kernel.lengthscale <= 2.7

    def test_zero_budget_returns_init(self):
        train = self.make_rbf_data(seed=13)
        report = fit_hyperparameters("RBF", train, max_iters=0)
        assert report.iterations == 0
        assert len(report.lml_trace) == 1
        assert report.kernel.lengthscale == 0.5  # table default untouched

    def test_trace_monotone_and_improving(self):
        train = self.make_rbf_data(seed=14)
        report = fit_hyperparameters("RBF", train, max_iters=30, seed=2)
        trace = np.asarray(report.lml_trace)
        assert np.all(np.diff(trace) >= -1e-9)
        assert trace[-1] >= trace[0] - 1e-9

    def test_fitted_parameters_within_bounds(self):
        train = self.make_rbf_data(seed=15)
        report = fit_hyperparameters("RQ", train, max_iters=25, seed=3)
        params = report.kernel.get_params()
        assert 1e-2 <= params["scale"] <= 1e2
        assert 1e-2 <= params["lengthscale"] <= 5.0
        assert 1e-1 <= params["alpha"] <= 5.0

    def test_sc_family_rejected(self):
        train = self.make_rbf_data(seed=16)
        with pytest.raises(ValueError):
            fit_hyperparameters("SC", train)

    def test_non_finite_init_raises(self):
        train = self.make_rbf_data(seed=17)
        bad = train.values.copy()
        bad[0] = np.nan
        from gpmimo.sounding import TrainingSet

        broken = TrainingSet(train.inputs, bad, train.noise_var, train.shape)
        with pytest.raises(FitInitializationError):
            fit_hyperparameters("RBF", broken)


class TestReconstruct:
    def test_full_sounding_noiseless_identity(self):
        cov, h_true, train, _ = make_case(3, 4, 1, 0.0, seed=20)
        model = ComplexGPR(SpatialCovarianceKernel(cov), noise_var=0.0)
        model.fit(train.inputs, train.values)
        h_hat, var_map = reconstruct(model, train)
        assert np.max(np.abs(h_hat - h_true)) < 1e-8
        assert np.max(var_map) < 1e-8

    def test_equals_full_vector_mmse_oracle(self):
        # Bayesian update of observed entries == selector-form MMSE on all entries
        cov, h_true, train, test = make_case(4, 4, 2, 0.1, seed=21)
        model = ComplexGPR(SpatialCovarianceKernel(cov), noise_var=0.1)
        model.fit(train.inputs, train.values)
        h_hat, _ = reconstruct(model, train)

        idx = train.vec_indices
        r = cov.matrix
        k = r[np.ix_(idx, idx)] + 0.1 * np.eye(len(idx))
        u_oracle = r[:, idx] @ np.linalg.inv(k) @ train.values
        h_oracle = u_oracle.reshape(4, 4, order="F")
        assert np.max(np.abs(h_hat - h_oracle)) < 1e-10

    def test_passthrough_mode(self):
        cov, h_true, train, _ = make_case(3, 3, 2, 0.5, seed=22)
        model = ComplexGPR(SpatialCovarianceKernel(cov), noise_var=0.5)
        model.fit(train.inputs, train.values)
        h_hat, var_map = reconstruct(model, train, passthrough_observed=True)
        r, t = train.inputs[:, 0], train.inputs[:, 1]
        assert np.array_equal(h_hat[r, t], train.values)
        assert np.all(var_map[r, t] == 0.5)

    def test_reference_grid_shapes(self):
        # 36x36 grid, stride 2: 648 observed entries, 648 from the posterior
        from gpmimo.covariance import kronecker_covariance, sample_channel, side_correlation

        side = side_correlation(36, 0.5, 1.2, np.pi / 6)
        cov = kronecker_covariance(side, side)
        h_true = sample_channel(cov, seed=30)
        plan = make_plan(cov.shape, stride=2)
        train, test = observe(h_true, plan, noise_var=1.0, seed=31)
        assert (len(train), len(test)) == (648, 648)
        model = ComplexGPR(SpatialCovarianceKernel(cov), noise_var=1.0)
        model.fit(train.inputs, train.values)
        h_hat, var_map = reconstruct(model, train)
        assert h_hat.shape == (36, 36)
        assert var_map.shape == (36, 36)
        assert np.all(np.isfinite(h_hat))

    def test_observed_entries_never_report_zero_variance_when_noisy(self):
        cov, _, train, _ = make_case(3, 3, 2, 0.3, seed=23)
        model = ComplexGPR(SpatialCovarianceKernel(cov), noise_var=0.3)
        model.fit(train.inputs, train.values)
        _, var_map = reconstruct(model, train)
        r, t = train.inputs[:, 0], train.inputs[:, 1]
        assert np.all(var_map[r, t] > 0.0)
