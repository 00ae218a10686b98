"""Gibbs samplers, predictives, and realized diagnostics for the mixtures."""

import numpy as np
import pytest

from ppn.core import Dataset
from ppn.datagen import gen_gmm_data, gen_multmix_data, MULTMIX_TABLES
from ppn.errors import DataError, ParameterError, StateError
from ppn.mixtures import (ChainConfig, GmmState, MultMixState, PosteriorDraws,
                          gmm_full_loglik, gmm_gibbs_fit,
                          gmm_loglik_diagnostic, gmm_loglik_diagnostic_batch,
                          gmm_predictive, multmix_chi2_diagnostic,
                          multmix_chi2_diagnostic_batch, multmix_gibbs_fit,
                          multmix_predictive)
from ppn.rng import Seed


def _gmm_state(means, variances, n=1):
    means = np.atleast_2d(np.asarray(means, dtype=float))
    variances = np.atleast_2d(np.asarray(variances, dtype=float))
    return GmmState(means, variances, np.zeros(n, dtype=int))


class TestChainConfig:
    def test_retained_count(self):
        cfg = ChainConfig()
        assert (cfg.iters - cfg.burnin) // cfg.thin == 200

    def test_invalid(self):
        with pytest.raises(ParameterError):
            ChainConfig(100, 100, 1)
        with pytest.raises(ParameterError):
            ChainConfig(100, 50, 0)


class TestGmmFit:
    def test_k1_conjugate_oracle(self):
        # K=1 reduces to Normal mean / Inverse-Gamma variance conditionals
        g = Seed(11).stream("k1data").generator
        y = 3.0 + np.sqrt(2.0) * g.standard_normal((400, 1))
        fit = gmm_gibbs_fit(Dataset(y), 1, 3000, 1000, 2, Seed(11).stream("k1"))
        mu = np.array([s.means[0, 0] for s in fit.states])
        var = np.array([s.variances[0, 0] for s in fit.states])
        n, ybar = 400, y.mean()
        s2 = var.mean()
        mu_post = (n * ybar / s2) / (n / s2 + 1.0 / 25.0)
        sd_post = 1.0 / np.sqrt(n / s2 + 1.0 / 25.0)
        assert abs(mu.mean() - mu_post) < 4 * sd_post / np.sqrt(len(mu) / 10)
        # E[1/sigma^2 | mu] = (1 + n/2) / (1 + SS/2) at the posterior-mean mu
        ss = ((y[:, 0] - mu.mean()) ** 2).sum()
        assert abs((1.0 / var).mean() - (1 + n / 2) / (1 + ss / 2)) < 0.05 * (1.0 / var).mean()

    def test_empty_components_refresh_from_prior(self):
        # two points cannot occupy three components; empty ones must carry
        # prior-distributed parameters: E[1/sigma^2] = 1, E[mu] = 0, var 25
        data = Dataset(np.array([[0.0, 0.0], [0.1, 0.1]]))
        fit = gmm_gibbs_fit(data, 3, 4000, 1000, 1, Seed(5).stream("empty"))
        inv_var, mus = [], []
        for s in fit.states:
            counts = np.bincount(s.assignments, minlength=3)
            for k in np.flatnonzero(counts == 0):
                inv_var.extend(1.0 / s.variances[k])
                mus.extend(s.means[k])
        inv_var, mus = np.array(inv_var), np.array(mus)
        assert len(inv_var) > 1000
        assert abs(inv_var.mean() - 1.0) < 0.15
        assert abs(mus.mean()) < 0.6
        assert abs(mus.var() - 25.0) < 3.0

    def test_appendix_recovery(self):
        data = gen_gmm_data(500, Seed(21))
        fit = gmm_gibbs_fit(data, 3, stream=Seed(21).stream("fit"))
        post_means = np.mean([s.means for s in fit.states], axis=0)
        got = post_means[np.argsort(post_means[:, 0])]
        truth = np.array([[-5.0, 5.0], [0.0, 0.0], [10.0, 5.0]])
        assert np.all(np.abs(got - truth) < 0.5)

    def test_determinism(self):
        data = gen_gmm_data(60, Seed(2))
        a = gmm_gibbs_fit(data, 2, 200, 100, 2, Seed(3).stream("f"))
        b = gmm_gibbs_fit(data, 2, 200, 100, 2, Seed(3).stream("f"))
        assert np.array_equal(a.states[-1].means, b.states[-1].means)
        assert a.model_id == "gmm-K2"

    def test_invalid_k(self):
        with pytest.raises(ParameterError):
            gmm_gibbs_fit(gen_gmm_data(10, Seed(0)), 0, stream=Seed(0).stream("x"))

    def test_full_loglik_k1_closed_form(self):
        y = np.array([[0.5], [-0.5]])
        ll = gmm_full_loglik(Dataset(y), np.array([[0.0]]), np.array([[1.0]]), 1)
        expected = -0.5 * (2 * np.log(2 * np.pi) + 0.25 + 0.25)
        assert abs(ll - expected) < 1e-12


class TestGmmPredictive:
    def test_tight_cluster_mean(self):
        g = Seed(4).stream("tight").generator
        data = Dataset(0.05 * g.standard_normal((300, 2)))
        fit = gmm_gibbs_fit(data, 1, 600, 100, 5, Seed(4).stream("fitt"))
        reps = gmm_predictive(fit, 400, 50, Seed(4).stream("rep"))
        grand = np.mean([r.values.mean(axis=0) for r in reps], axis=0)
        assert np.all(np.abs(grand) < 0.2)
        assert all(r.n == 400 for r in reps)

    def test_r_zero(self):
        fit = PosteriorDraws((_gmm_state([[0.0, 0.0]], [[1.0, 1.0]]),), "gmm-K1")
        with pytest.raises(ParameterError):
            gmm_predictive(fit, 10, 0, Seed(0).stream("r"))

    def test_determinism(self):
        data = gen_gmm_data(50, Seed(6))
        fit = gmm_gibbs_fit(data, 2, 200, 100, 5, Seed(6).stream("f"))
        a = gmm_predictive(fit, 30, 5, Seed(6).stream("r"))
        b = gmm_predictive(fit, 30, 5, Seed(6).stream("r"))
        assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))


class TestGmmDiagnostic:
    def test_zero_residual_unit_variance(self):
        state = _gmm_state([[1.0, 2.0]], [[1.0, 1.0]])
        x = Dataset(np.array([[1.0, 2.0]]))
        assert gmm_loglik_diagnostic(x, state, Seed(0).stream("d")) == 0.0

    def test_unit_residual(self):
        state = _gmm_state([[0.0, 0.0]], [[1.0, 1.0]])
        x = Dataset(np.array([[1.0, 0.0]]))
        assert abs(gmm_loglik_diagnostic(x, state, Seed(0).stream("d")) + 0.5) < 1e-12

    def test_symmetric_components_deterministic(self):
        # identical components: the label draw cannot change the value
        state = GmmState(np.array([[0.0, 0.0], [0.0, 0.0]]),
                         np.array([[1.0, 1.0], [1.0, 1.0]]),
                         np.zeros(1, dtype=int))
        x = Dataset(np.array([[1.0, 0.0]]))
        vals = [gmm_loglik_diagnostic(x, state, Seed(i).stream("d")) for i in range(5)]
        assert np.allclose(vals, -0.5)

    def test_label_permutation_invariance_in_expectation(self):
        state = GmmState(np.array([[0.0, 0.0], [3.0, 3.0]]),
                         np.array([[1.0, 1.0], [2.0, 2.0]]),
                         np.zeros(1, dtype=int))
        flipped = GmmState(state.means[::-1].copy(), state.variances[::-1].copy(),
                           state.assignments)
        x = gen_gmm_data(40, Seed(12))
        a = np.mean([gmm_loglik_diagnostic(x, state, Seed(i).stream("p"))
                     for i in range(400)])
        b = np.mean([gmm_loglik_diagnostic(x, flipped, Seed(i).stream("q"))
                     for i in range(400)])
        assert abs(a - b) < 3.0

    def test_batch_shape_and_errors(self):
        states = [_gmm_state([[0.0, 0.0]], [[1.0, 1.0]]) for _ in range(7)]
        x = gen_gmm_data(10, Seed(1))
        vals = gmm_loglik_diagnostic_batch(x, states, Seed(1).stream("b"))
        assert vals.shape == (7,)
        bad = _gmm_state([[0.0, 0.0]], [[1.0, -1.0]])
        with pytest.raises(StateError):
            gmm_loglik_diagnostic_batch(x, [bad], Seed(1).stream("b"))

    def test_continuous_required(self):
        x = gen_multmix_data(5, seed=Seed(0))
        state = _gmm_state([[0.0, 0.0]], [[1.0, 1.0]])
        with pytest.raises(DataError):
            gmm_loglik_diagnostic(x, state, Seed(0).stream("d"))


class TestMultMixFit:
    def test_k1_conjugate_oracle(self):
        data = gen_multmix_data(300, K_true=1, seed=Seed(9))
        fit = multmix_gibbs_fit(data, 1, 2000, 500, 3, Seed(9).stream("f"))
        assert all(np.allclose(s.weights, [1.0]) for s in fit.states)
        codes = data.codes()
        for j, size in enumerate(data.level_sizes):
            counts = np.bincount(codes[:, j], minlength=size)
            expected = (2.0 + counts) / (2.0 * size + data.n)
            got = np.mean([s.tables[j][0] for s in fit.states], axis=0)
            assert np.allclose(got, expected, atol=0.01)

    def test_two_class_recovery(self):
        data = gen_multmix_data(1000, seed=Seed(14))
        fit = multmix_gibbs_fit(data, 2, stream=Seed(14).stream("f"))
        post = [np.mean([s.tables[j] for s in fit.states], axis=0) for j in range(3)]
        truth = [np.array([MULTMIX_TABLES[0][j], MULTMIX_TABLES[1][j]]) for j in range(3)]
        # classes may come out in either order; match on variable 0
        direct = max(np.abs(post[j] - truth[j]).max() for j in range(3))
        swapped = max(np.abs(post[j] - truth[j][::-1]).max() for j in range(3))
        assert min(direct, swapped) < 0.1

    def test_determinism(self):
        data = gen_multmix_data(80, seed=Seed(3))
        a = multmix_gibbs_fit(data, 2, 300, 100, 4, Seed(3).stream("f"))
        b = multmix_gibbs_fit(data, 2, 300, 100, 4, Seed(3).stream("f"))
        assert np.array_equal(a.states[-1].weights, b.states[-1].weights)
        assert a.model_id == "multmix-K2"

    def test_requires_onehot(self):
        with pytest.raises(DataError):
            multmix_gibbs_fit(gen_gmm_data(10, Seed(0)), 2, stream=Seed(0).stream("f"))


class TestMultMixPredictive:
    def test_frequencies_match_posterior(self):
        data = gen_multmix_data(800, K_true=1, seed=Seed(15))
        fit = multmix_gibbs_fit(data, 1, 800, 300, 5, Seed(15).stream("f"))
        reps = multmix_predictive(fit, 1000, 20, Seed(15).stream("r"))
        post_table = np.mean([s.tables[0][0] for s in fit.states], axis=0)
        freq = np.mean([np.bincount(r.codes()[:, 0], minlength=4) / r.n
                        for r in reps], axis=0)
        assert np.allclose(freq, post_table, atol=0.05)

    def test_onehot_and_determinism(self):
        data = gen_multmix_data(100, seed=Seed(16))
        fit = multmix_gibbs_fit(data, 2, 300, 100, 5, Seed(16).stream("f"))
        a = multmix_predictive(fit, 50, 4, Seed(16).stream("r"))
        b = multmix_predictive(fit, 50, 4, Seed(16).stream("r"))
        assert all(r.kind == "categorical-onehot" for r in a)
        assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))


class TestMultMixDiagnostic:
    def test_perfect_prediction(self):
        state = MultMixState(np.array([1.0]),
                             (np.array([[1.0, 0.0]]), np.array([[1.0, 0.0, 0.0]])),
                             np.zeros(1, dtype=int))
        x = Dataset.from_codes([[0, 0]], (2, 3))
        assert multmix_chi2_diagnostic(x, state) == 0.0

    def test_half_probability_single_variable(self):
        state = MultMixState(np.array([1.0]), (np.array([[0.5, 0.5]]),),
                             np.zeros(1, dtype=int))
        x = Dataset.from_codes([[0]], (2,))
        assert abs(multmix_chi2_diagnostic(x, state) - 2 * np.log(2)) < 1e-12

    def test_doubling_additivity(self):
        data = gen_multmix_data(40, seed=Seed(17))
        fit = multmix_gibbs_fit(data, 2, 200, 100, 10, Seed(17).stream("f"))
        state = fit.states[0]
        doubled = Dataset(np.vstack([data.values, data.values]),
                          kind="categorical-onehot", level_sizes=data.level_sizes)
        single = multmix_chi2_diagnostic(data, state)
        assert abs(multmix_chi2_diagnostic(doubled, state) - 2 * single) < 1e-9

    def test_label_permutation_invariance(self):
        data = gen_multmix_data(40, seed=Seed(18))
        fit = multmix_gibbs_fit(data, 2, 200, 100, 10, Seed(18).stream("f"))
        s = fit.states[0]
        flipped = MultMixState(s.weights[::-1].copy(),
                               tuple(t[::-1].copy() for t in s.tables),
                               s.assignments)
        assert abs(multmix_chi2_diagnostic(data, s)
                   - multmix_chi2_diagnostic(data, flipped)) < 1e-9

    def test_zero_cell_sentinel(self):
        state = MultMixState(np.array([1.0]), (np.array([[0.0, 1.0]]),),
                             np.zeros(1, dtype=int))
        x = Dataset.from_codes([[0]], (2,))
        assert multmix_chi2_diagnostic(x, state) == np.inf

    def test_batch_shape(self):
        data = gen_multmix_data(20, seed=Seed(19))
        fit = multmix_gibbs_fit(data, 2, 200, 100, 20, Seed(19).stream("f"))
        vals = multmix_chi2_diagnostic_batch(data, fit.states)
        assert vals.shape == (len(fit.states),)
        assert np.all(vals > 0)


class TestPosteriorDraws:
    def test_map_state(self):
        data = gen_gmm_data(50, Seed(20))
        fit = gmm_gibbs_fit(data, 1, 300, 100, 5, Seed(20).stream("f"))
        idx = int(np.argmax(fit.logpost))
        assert fit.map_state() is fit.states[idx]

    def test_needs_states(self):
        with pytest.raises(ParameterError):
            PosteriorDraws((), "m")

    def test_map_needs_logpost(self):
        draws = PosteriorDraws((_gmm_state([[0.0]], [[1.0]]),), "m")
        with pytest.raises(StateError):
            draws.map_state()
