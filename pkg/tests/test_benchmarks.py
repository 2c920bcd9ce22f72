"""Synthetic function tests: optima identities, arbitrary-precision oracle, noise."""

import math

import mpmath
import numpy as np
import pytest

from catbox import MixedPoint, NoiseSpec, SyntheticFn, add_noise, eval_synthetic, mixed_wrap
from catbox.benchmarks import BenchmarkError


class TestOptima:
    def test_ackley_zero_at_origin(self):
        for d in (1, 2, 5):
            fn = SyntheticFn(kind="ackley", dim=d)
            assert abs(eval_synthetic(fn, np.zeros(d))) < 1e-6

    def test_griewank_zero_at_origin(self):
        fn = SyntheticFn(kind="griewank", dim=4)
        assert abs(eval_synthetic(fn, np.zeros(4))) < 1e-6

    def test_rosenbrock_zero_at_ones(self):
        fn = SyntheticFn(kind="rosenbrock", dim=6)
        assert eval_synthetic(fn, np.ones(6)) == 0.0

    def test_schwefel_near_zero_at_published_optimizer(self):
        fn = SyntheticFn(kind="schwefel", dim=3)
        assert abs(eval_synthetic(fn, np.full(3, 420.9687))) < 1e-3


class TestAckleyOracle:
    def test_matches_arbitrary_precision(self):
        # independent evaluation with 50-digit arithmetic
        mpmath.mp.dps = 50
        a, b = mpmath.mpf(20), mpmath.mpf("0.2")
        c = 2 * mpmath.pi

        def oracle(zs):
            d = len(zs)
            zs = [mpmath.mpf(repr(z)) for z in zs]
            s1 = mpmath.sqrt(sum(z * z for z in zs) / d)
            s2 = sum(mpmath.cos(c * z) for z in zs) / d
            return float(-a * mpmath.exp(-b * s1) - mpmath.exp(s2) + a + mpmath.e)

        fn = SyntheticFn(kind="ackley", dim=2)
        for z in ([1.0, 1.0], [0.5, -3.25], [10.0, 20.5], [-32.0, 32.0]):
            assert eval_synthetic(fn, np.asarray(z)) == pytest.approx(oracle(z), abs=1e-12)


class TestDomainChecks:
    def test_out_of_domain_faults(self):
        fn = SyntheticFn(kind="ackley", dim=2)
        with pytest.raises(BenchmarkError):
            eval_synthetic(fn, np.array([0.0, 40.0]))

    def test_dimension_mismatch_faults(self):
        fn = SyntheticFn(kind="griewank", dim=3)
        with pytest.raises(BenchmarkError):
            eval_synthetic(fn, np.zeros(2))

    def test_rosenbrock_needs_two_dims(self):
        with pytest.raises(BenchmarkError):
            SyntheticFn(kind="rosenbrock", dim=1)

    def test_unknown_kind(self):
        with pytest.raises(BenchmarkError):
            SyntheticFn(kind="sphere", dim=2)


class TestMixedWrap:
    def test_middle_levels_evaluate_at_center(self):
        obj = mixed_wrap(SyntheticFn(kind="ackley", dim=4), 2, 3, 2)
        assert obj.space.n_cat == 2 and obj.space.n_con == 2
        value = obj(MixedPoint(cat=(1, 1), con=(0.0, 0.0)))
        assert value == pytest.approx(0.0, abs=1e-9)

    def test_degenerate_pure_continuous(self):
        fn = SyntheticFn(kind="ackley", dim=2)
        obj = mixed_wrap(fn, 0, 2, 2)
        z = np.array([3.0, -4.0])
        assert obj(MixedPoint(con=tuple(z))) == pytest.approx(-eval_synthetic(fn, z), abs=1e-12)

    def test_grid_best_matches_enumeration(self):
        fn = SyntheticFn(kind="ackley", dim=2)
        obj = mixed_wrap(fn, 2, 3, 0)
        values = {}
        for i in range(3):
            for j in range(3):
                values[(i, j)] = obj(MixedPoint(cat=(i, j)))
        best = max(values, key=values.get)
        lo, hi = fn.domain
        grid = [lo, (lo + hi) / 2.0, hi]
        brute = {}
        for i in range(3):
            for j in range(3):
                brute[(i, j)] = -eval_synthetic(fn, np.array([grid[i], grid[j]]))
        assert best == max(brute, key=brute.get)
        for key in values:
            assert values[key] == pytest.approx(brute[key], abs=1e-12)

    def test_split_must_match_dim(self):
        with pytest.raises(BenchmarkError):
            mixed_wrap(SyntheticFn(kind="ackley", dim=4), 1, 3, 2)


class TestNoise:
    def test_sigma_zero_identity(self):
        spec = NoiseSpec(kind="gaussian", sigma=0.0, seed=1)
        assert add_noise(3.25, spec, 17) == 3.25
        assert add_noise(3.25, NoiseSpec(kind="none"), 17) == 3.25

    def test_ocm_protocol_arithmetic(self):
        # 5% of the reference optimum 69.9
        assert 0.05 * 69.9 == pytest.approx(3.495, abs=1e-12)

    def test_moments(self):
        spec = NoiseSpec(kind="gaussian", sigma=1.0, seed=5)
        draws = np.array([add_noise(0.0, spec, i) for i in range(100_000)])
        assert abs(draws.mean()) < 0.01
        assert abs(draws.std() - 1.0) < 0.01

    def test_reproducible_per_index(self):
        spec = NoiseSpec(kind="gaussian", sigma=2.0, seed=9)
        assert add_noise(1.0, spec, 3) == add_noise(1.0, spec, 3)
        assert add_noise(1.0, spec, 3) != add_noise(1.0, spec, 4)

    def test_independent_across_indices(self):
        spec = NoiseSpec(kind="gaussian", sigma=1.0, seed=11)
        n = 6000
        a = np.array([add_noise(0.0, spec, i) for i in range(n)])
        b = np.array([add_noise(0.0, spec, i + n) for i in range(n)])
        # 3 standard errors of a sample correlation at this n
        assert abs(np.corrcoef(a, b)[0, 1]) < 3.0 / np.sqrt(n)

    def test_invalid_spec(self):
        with pytest.raises(BenchmarkError):
            NoiseSpec(kind="uniform")
        with pytest.raises(BenchmarkError):
            NoiseSpec(sigma=-1.0)
