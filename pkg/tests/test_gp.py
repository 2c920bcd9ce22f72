"""GP regression tests: exactness against dense oracles, MLL, hyperparameter fit."""

import math

import numpy as np
import pytest
import scipy.stats

from catbox import (
    ContinuousVar,
    GramNotPositiveDefiniteError,
    KernelParams,
    MixedPoint,
    SearchSpace,
    SyntheticFn,
    eval_synthetic,
    fit,
    mixed_wrap,
    mll,
    optimize_hyperparams,
    predict,
)
from catbox import gp, kernels
from catbox.kernels import CsmComponent, GsmComponent, HammingParams
from catbox.space import normalize
from util import make_params, make_space, sample_points


def random_dataset(rng, space, n, noise=0.0):
    obs = []
    for p in sample_points(rng, space, n):
        y = float(np.sin(2.0 * sum(p.con)) + sum(p.cat) + noise * rng.normal())
        obs.append((p, y))
    return obs


def unit_interval_space(d=1):
    return SearchSpace(continuous=tuple(ContinuousVar(f"x{i}", 0.0, 1.0) for i in range(d)))


class TestFit:
    def test_single_observation_interpolates(self):
        space = unit_interval_space()
        rng = np.random.default_rng(0)
        params = make_params(rng, d=1, u=0)
        params = KernelParams(gsm=params.gsm, csm=params.csm, lam=params.lam, noise_var=1e-8)
        obs = [(MixedPoint(con=(0.5,)), 3.7)]
        model = fit(space, obs, params)
        post = predict(model, obs[0][0])
        assert post.raw_mean == pytest.approx(3.7, abs=1e-5)

    def test_duplicate_points_succeed_via_jitter(self):
        space = unit_interval_space()
        rng = np.random.default_rng(1)
        params = make_params(rng, d=1, u=0)
        obs = [(MixedPoint(con=(0.5,)), 1.0), (MixedPoint(con=(0.5,)), 1.0)]
        model = fit(space, obs, params)
        assert np.isfinite(model.chol).all()

    def test_chol_reproduces_gram(self):
        rng = np.random.default_rng(2)
        space = make_space(rng, n_cat=1, n_con=2)
        params = make_params(rng, d=2, u=1)
        obs = random_dataset(rng, space, 15)
        model = fit(space, obs, params)
        K = kernels.gram(params, list(model.train.points), jitter=model.jitter)
        rel = np.linalg.norm(model.chol @ model.chol.T - K) / np.linalg.norm(K)
        assert rel <= 1e-8

    def test_alpha_solves_system(self):
        rng = np.random.default_rng(3)
        space = make_space(rng, n_cat=0, n_con=2)
        params = make_params(rng, d=2, u=0)
        obs = random_dataset(rng, space, 20)
        model = fit(space, obs, params)
        K = kernels.gram(params, list(model.train.points), jitter=model.jitter)
        assert np.linalg.norm(K @ model.alpha - model.train.y) <= 1e-6

    def test_interpolation_on_ackley(self):
        # noiseless fit reproduces training targets through the solve
        rng = np.random.default_rng(4)
        obj = mixed_wrap(SyntheticFn(kind="ackley", dim=2), 0, 2, 2)
        pts = sample_points(rng, obj.space, 30)
        obs = [(p, obj(p)) for p in pts]
        params = make_params(rng, d=2, u=0)
        params = KernelParams(gsm=params.gsm, csm=params.csm, lam=params.lam, noise_var=1e-8)
        model = fit(obj.space, obs, params)
        for p, y in obs:
            post = predict(model, p)
            std_target = (y - model.train.y_mean) / model.train.y_std
            assert post.mean == pytest.approx(std_target, abs=1e-4)

    def test_gram_not_pd_error_carries_jitter(self):
        err = GramNotPositiveDefiniteError(final_jitter=1e-2)
        assert err.final_jitter == 1e-2
        assert "gram not PD" in str(err)

    def test_jitter_ladder_exhaustion_raises(self, monkeypatch):
        # force every factorization attempt to fail; the ladder must give up
        # after 6 escalations and surface the final jitter
        calls = []

        def always_fail(K):
            calls.append(K[0, 0])
            raise np.linalg.LinAlgError("forced")

        monkeypatch.setattr(np.linalg, "cholesky", always_fail)
        rng = np.random.default_rng(20)
        space = unit_interval_space()
        params = make_params(rng, d=1, u=0)
        obs = [(MixedPoint(con=(0.5,)), 1.0), (MixedPoint(con=(0.6,)), 2.0)]
        with pytest.raises(GramNotPositiveDefiniteError) as err:
            fit(space, obs, params)
        assert len(calls) == 7  # initial attempt + 6 escalations
        assert err.value.final_jitter > 0


class TestPredict:
    def test_training_point_reproduction(self):
        rng = np.random.default_rng(5)
        space = make_space(rng, n_cat=1, n_con=1)
        params = make_params(rng, d=1, u=1)
        params = KernelParams(
            gsm=params.gsm, csm=params.csm, hamming=params.hamming, lam=params.lam, noise_var=1e-8
        )
        obs = random_dataset(rng, space, 8)
        model = fit(space, obs, params)
        k0 = kernels.kernel_diag_value(params, 1, 1)
        for p, y in obs:
            post = predict(model, p)
            assert post.raw_mean == pytest.approx(y, abs=1e-4 * (1 + abs(y)))
            assert post.var <= 1e-6 * k0

    def test_prior_reversion_far_from_data(self):
        space = SearchSpace(continuous=(ContinuousVar("x", 0.0, 1000.0),))
        params = KernelParams(
            gsm=(GsmComponent(weight=0.7, mean=(0.0,), var=(40.0,)),),
            csm=(CsmComponent(weight=0.3, eta=(0.0,), gamma=(30.0,)),),
            noise_var=1e-6,
        )
        obs = [(MixedPoint(con=(float(x),)), float(np.cos(x))) for x in (0.0, 1.0, 2.0, 3.0)]
        model = fit(space, obs, params)
        post = predict(model, MixedPoint(con=(990.0,)))
        assert post.raw_mean == pytest.approx(model.train.y_mean, abs=1e-6)
        assert post.var == pytest.approx(kernels.kernel_diag_value(params, 1, 0), rel=1e-6)

    def test_three_point_system_matches_direct_inverse(self):
        rng = np.random.default_rng(6)
        space = make_space(rng, n_cat=1, n_con=1)
        params = make_params(rng, d=1, u=1)
        obs = random_dataset(rng, space, 3)
        model = fit(space, obs, params)
        pts = list(model.train.points)
        K = kernels.gram(params, pts, jitter=model.jitter)
        Kinv = np.linalg.inv(K)
        q = space.sample(rng)
        ks = kernels.cross_gram(params, pts, [normalize(space, q)])[:, 0]
        mean_direct = float(ks @ Kinv @ model.train.y)
        var_direct = kernels.kernel_diag_value(params, 1, 1) - float(ks @ Kinv @ ks)
        post = predict(model, q)
        assert post.mean == pytest.approx(mean_direct, abs=1e-10)
        assert post.var == pytest.approx(max(var_direct, 0.0), abs=1e-10)

    def test_variance_nonnegative_and_clamped(self):
        rng = np.random.default_rng(7)
        space = make_space(rng, n_cat=0, n_con=1)
        params = make_params(rng, d=1, u=0)
        obs = random_dataset(rng, space, 12)
        model = fit(space, obs, params)
        for p in sample_points(rng, space, 100):
            assert predict(model, p).var >= 0.0

    def test_variance_non_increasing_with_more_data(self):
        rng = np.random.default_rng(8)
        space = make_space(rng, n_cat=1, n_con=2)
        params = make_params(rng, d=2, u=1)
        obs = random_dataset(rng, space, 15)
        extra = random_dataset(rng, space, 5)
        m_small = fit(space, obs, params)
        m_big = fit(space, obs + extra, params)
        for q in sample_points(rng, space, 50):
            assert predict(m_big, q).var <= predict(m_small, q).var + 1e-8


class TestMll:
    def test_unit_variance_single_point(self):
        # k(x,x) + noise == 1 with y == mean gives the standard normal log-density at 0
        space = unit_interval_space()
        params = KernelParams(
            gsm=(GsmComponent(weight=0.5, mean=(0.0,), var=(1.0,)),),
            csm=(CsmComponent(weight=0.5 - 1e-3, eta=(0.0,), gamma=(1.0,)),),
            noise_var=1e-3,
        )
        value = mll(space, [(MixedPoint(con=(0.5,)), 0.0)], params)
        # adaptive jitter adds 1e-8 * k(x,x) to the diagonal
        assert value == pytest.approx(-0.5 * math.log(2.0 * math.pi), abs=1e-7)

    def test_single_point_closed_form(self):
        space = unit_interval_space()
        params = KernelParams(
            gsm=(GsmComponent(weight=1.5, mean=(0.0,), var=(1.0,)),),
            csm=(CsmComponent(weight=0.5, eta=(0.0,), gamma=(1.0,)),),
            noise_var=0.25,
        )
        v = 1.5 + 0.5 + 0.25
        value = mll(space, [(MixedPoint(con=(0.5,)), 0.0)], params)
        assert value == pytest.approx(-0.5 * math.log(2.0 * math.pi * v), abs=1e-6)

    def test_matches_dense_multivariate_normal(self):
        rng = np.random.default_rng(9)
        space = make_space(rng, n_cat=1, n_con=2)
        params = make_params(rng, d=2, u=1)
        obs = random_dataset(rng, space, 5)
        train = gp.build_training_set(space, obs)
        K0 = kernels.gram(params, list(train.points), jitter=0.0)
        jitter = 1e-8 * np.trace(K0) / 5
        K = K0 + jitter * np.eye(5)
        expected = scipy.stats.multivariate_normal.logpdf(train.y, mean=np.zeros(5), cov=K)
        assert mll(space, obs, params) == pytest.approx(float(expected), abs=1e-8)

    def test_deterministic(self):
        rng = np.random.default_rng(10)
        space = make_space(rng, n_cat=1, n_con=1)
        params = make_params(rng, d=1, u=1)
        obs = random_dataset(rng, space, 7)
        assert mll(space, obs, params) == mll(space, obs, params)


class TestGradients:
    def test_analytic_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        for trial in range(3):
            space = make_space(rng, n_cat=int(rng.integers(0, 3)), n_con=int(rng.integers(0, 3)))
            params = make_params(rng, d=space.n_con, u=space.n_cat)
            obs = random_dataset(rng, space, 10)
            train = gp.build_training_set(space, obs)
            X = np.array([p.con01 for p in train.points]).reshape(10, -1)
            C = np.array([p.cat for p in train.points]).reshape(10, -1)
            structure = kernels.structure_of(params, space.n_con, space.n_cat)
            v0 = kernels.pack(params, structure)
            _, grad = gp._nll_and_grad(v0, structure, X, C, train.y)
            h = 1e-5
            for i in range(v0.size):
                vp, vm = v0.copy(), v0.copy()
                vp[i] += h
                vm[i] -= h
                fp, _ = gp._nll_and_grad(vp, structure, X, C, train.y)
                fm, _ = gp._nll_and_grad(vm, structure, X, C, train.y)
                fd = (fp - fm) / (2 * h)
                assert grad[i] == pytest.approx(fd, rel=1e-4, abs=1e-6)


class TestOptimizeHyperparams:
    def test_self_consistency_generate_and_refit(self):
        # data drawn from a known one-component GSM prior; the refit MLL must
        # come within 2 nats of the generating parameters' MLL
        rng = np.random.default_rng(12)
        space = unit_interval_space()
        gen = KernelParams(
            gsm=(GsmComponent(weight=1.0, mean=(2.0,), var=(0.5,)),),
            csm=(CsmComponent(weight=1e-6, eta=(0.0,), gamma=(0.5,)),),
            noise_var=1e-4,
        )
        pts = [MixedPoint(con=(float(x),)) for x in np.linspace(0, 1, 60)]
        qs = [normalize(space, p) for p in pts]
        K = kernels.gram(gen, qs, jitter=1e-10)
        y = np.linalg.cholesky(K) @ rng.standard_normal(60)
        obs = list(zip(pts, y.tolist()))
        init = gp.default_init_params(space, obs, rng)
        fitted = optimize_hyperparams(space, obs, init, budget=8, seed=0)
        assert mll(space, obs, fitted) >= mll(space, obs, gen) - 2.0

    def test_budget_one_fixed_point(self):
        # drive a single start to convergence; restarting from that local
        # optimum must leave the MLL unchanged
        rng = np.random.default_rng(13)
        space = unit_interval_space()
        obs = random_dataset(rng, space, 10)
        params = gp.default_init_params(space, obs, rng)
        value = mll(space, obs, params)
        for _ in range(10):
            params = optimize_hyperparams(space, obs, params, budget=1, seed=0, maxiter=500)
            new_value = mll(space, obs, params)
            if new_value - value < 1e-8:
                break
            value = new_value
        again = optimize_hyperparams(space, obs, params, budget=1, seed=0, maxiter=500)
        assert mll(space, obs, again) >= mll(space, obs, params) - 1e-9
        assert mll(space, obs, again) == pytest.approx(mll(space, obs, params), abs=1e-6)

    def test_monotonicity_across_seeds(self):
        rng = np.random.default_rng(14)
        space = make_space(rng, n_cat=1, n_con=1)
        obs = random_dataset(rng, space, 8)
        init = gp.default_init_params(space, obs, rng)
        base = mll(space, obs, init)
        for seed in range(5):
            out = optimize_hyperparams(space, obs, init, budget=2, seed=seed, maxiter=20)
            assert mll(space, obs, out) >= base - 1e-9

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(15)
        space = make_space(rng, n_cat=1, n_con=1)
        obs = random_dataset(rng, space, 8)
        init = gp.default_init_params(space, obs, np.random.default_rng(1))
        a = optimize_hyperparams(space, obs, init, budget=3, seed=42, maxiter=25)
        b = optimize_hyperparams(space, obs, init, budget=3, seed=42, maxiter=25)
        assert a == b

    def test_budget_validation(self):
        rng = np.random.default_rng(16)
        space = unit_interval_space()
        obs = random_dataset(rng, space, 3)
        init = gp.default_init_params(space, obs, rng)
        with pytest.raises(ValueError):
            optimize_hyperparams(space, obs, init, budget=0)


class TestStandardization:
    def test_constant_targets_force_unit_std(self):
        rng = np.random.default_rng(17)
        space = unit_interval_space()
        obs = [(p, 5.0) for p in sample_points(rng, space, 4)]
        train = gp.build_training_set(space, obs)
        assert train.y_std == 1.0
        assert train.y_mean == 5.0
        assert np.allclose(train.y, 0.0)

    def test_pure_categorical_space_fit(self):
        rng = np.random.default_rng(18)
        space = make_space(rng, n_cat=2, n_con=0)
        params = make_params(rng, d=0, u=2)
        obs = random_dataset(rng, space, 10)
        model = fit(space, obs, params)
        post = predict(model, obs[0][0])
        assert math.isfinite(post.mean) and post.var >= 0
