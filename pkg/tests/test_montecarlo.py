"""Seeded sampling and the bounded-integrand Monte Carlo TV estimator."""

import math

import numpy as np
import pytest

from gmmstab.errors import DimensionMismatch, DomainError, SizeMismatch
from gmmstab.gaussian_tv import SphericalGaussian, tv_exact
from gmmstab.mixture import MixtureModel
from gmmstab.montecarlo import componentwise_tv, mc_tv, sample


def single(mean, sigma=1.0) -> MixtureModel:
    comp = SphericalGaussian(tuple(mean), sigma)
    return MixtureModel((comp,), (1.0,), comp.dim)


def two_cluster_1d(mu=3.0, sigma=1.0) -> MixtureModel:
    return MixtureModel.create(
        (SphericalGaussian((-mu,), sigma), SphericalGaussian((mu,), sigma)), (0.5, 0.5)
    )


class TestSample:
    def test_law_of_large_numbers(self):
        n = 10**6
        draws = sample(single((0.0, 0.0)), n, seed=42)
        tol = 4.0 / math.sqrt(n)
        assert abs(draws[:, 0].mean()) <= tol
        assert abs(draws[:, 1].mean()) <= tol

    def test_covariance_trace(self):
        n = 10**6
        draws = sample(single((0.0, 0.0, 0.0), sigma=1.3), n, seed=7)
        trace = np.trace(np.cov(draws.T))
        assert trace == pytest.approx(3 * 1.3**2, rel=0.02)

    def test_mixture_proportions(self):
        m = two_cluster_1d()
        draws = sample(m, 10**5, seed=0)
        frac_left = np.mean(draws[:, 0] < 0)
        assert frac_left == pytest.approx(0.5, abs=0.01)

    def test_determinism(self):
        m = two_cluster_1d()
        a = sample(m, 1000, seed=5)
        b = sample(m, 1000, seed=5)
        c = sample(m, 1000, seed=6)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_domain(self):
        with pytest.raises(DomainError):
            sample(two_cluster_1d(), 0, seed=0)


class TestMcTv:
    def test_identical_is_exact_zero(self):
        m = two_cluster_1d()
        est = mc_tv(m, m, 5000, seed=1)
        assert est.value == 0.0
        assert est.std_error == 0.0
        assert est.n_samples == 5000
        assert est.seed == 1

    def test_matches_exact_gaussian_pair(self):
        rng = np.random.default_rng(12)
        for d in (1, 2):
            a = SphericalGaussian(tuple(rng.normal(size=d)), float(rng.uniform(0.6, 1.8)))
            b = SphericalGaussian(tuple(rng.normal(size=d)), float(rng.uniform(0.6, 1.8)))
            est = mc_tv(single(a.mean, a.sigma), single(b.mean, b.sigma), 10**6, seed=9)
            exact = tv_exact(a, b)
            assert abs(est.value - exact) <= 3.0 * est.std_error + 1e-6

    def test_small_contamination_level(self):
        # P vs (1-lam) P + lam Q with Q far away: TV is essentially lam.
        lam = 0.05
        p = two_cluster_1d()
        far = SphericalGaussian((80.0,), 1.0)
        mixed = MixtureModel.create(
            p.components + (far,),
            tuple((1 - lam) * w for w in p.weights) + (lam,),
        )
        est = mc_tv(p, mixed, 10**6, seed=3)
        assert abs(est.value - lam) <= 3.0 * est.std_error

    def test_symmetry_exact(self):
        p = two_cluster_1d()
        q = MixtureModel.create(
            (SphericalGaussian((-2.0,), 1.2), SphericalGaussian((2.5,), 0.9)), (0.4, 0.6)
        )
        a = mc_tv(p, q, 20000, seed=11)
        b = mc_tv(q, p, 20000, seed=11)
        assert a.value == b.value
        assert a.std_error == b.std_error

    def test_range_and_se_scaling(self):
        p = two_cluster_1d()
        q = two_cluster_1d(mu=2.5, sigma=1.1)
        est1 = mc_tv(p, q, 10**5, seed=2)
        est4 = mc_tv(p, q, 4 * 10**5, seed=2)
        assert 0.0 <= est1.value <= 1.0
        ratio = est4.std_error / est1.std_error
        assert abs(ratio - 0.5) <= 0.15  # halving within 30%

    def test_far_tail_never_nan(self):
        p = single((0.0,))
        q = single((1e3,))
        est = mc_tv(p, q, 20000, seed=4)
        assert math.isfinite(est.value)
        assert est.value == pytest.approx(1.0, abs=1e-6)

    def test_determinism(self):
        p = two_cluster_1d()
        q = two_cluster_1d(mu=2.0)
        assert mc_tv(p, q, 30000, seed=8) == mc_tv(p, q, 30000, seed=8)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mc_tv(single((0.0,)), single((0.0, 0.0)), 2000, seed=0)


class TestComponentwise:
    def test_identical_identity_matching(self):
        m = two_cluster_1d()
        ests = componentwise_tv(m, m, (0, 1), 5000, seed=0)
        assert all(e.value == 0.0 and e.std_error == 0.0 for e in ests)

    def test_matches_exact_per_pair(self):
        p = two_cluster_1d()
        q = MixtureModel.create(
            (SphericalGaussian((-3.1,), 1.05), SphericalGaussian((2.9,), 0.95)), (0.5, 0.5)
        )
        ests = componentwise_tv(p, q, (0, 1), 10**6, seed=1)
        for i, est in enumerate(ests):
            exact = tv_exact(p.components[i], q.components[i])
            assert abs(est.value - exact) <= 3.0 * est.std_error + 1e-6

    def test_matching_invariance(self):
        p = two_cluster_1d()
        q = MixtureModel.create(
            (SphericalGaussian((-2.8,), 1.1), SphericalGaussian((3.2,), 1.0)), (0.5, 0.5)
        )
        direct = componentwise_tv(p, q, (0, 1), 20000, seed=2)
        # Swap the component order in both mixtures and flip the matching.
        p2 = MixtureModel.create((p.components[1], p.components[0]), (0.5, 0.5))
        q2 = MixtureModel.create((q.components[1], q.components[0]), (0.5, 0.5))
        swapped = componentwise_tv(p2, q2, (0, 1), 20000, seed=2)
        assert direct[0].value == swapped[1].value
        assert direct[1].value == swapped[0].value

    def test_size_mismatch(self):
        p = two_cluster_1d()
        q = single((0.0,))
        with pytest.raises(SizeMismatch):
            componentwise_tv(p, q, (0,), 2000, seed=0)

    def test_bad_matching(self):
        m = two_cluster_1d()
        with pytest.raises(DomainError):
            componentwise_tv(m, m, (0, 0), 2000, seed=0)
