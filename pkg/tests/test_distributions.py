"""Jump laws, Dirichlet machinery, special functions."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.special

from simplexwalk import distributions as dist
from simplexwalk import special
from simplexwalk.errors import DomainError, InvalidParameterError
from simplexwalk.quadrature import integrate_interval
from simplexwalk.rng import make_stream
from simplexwalk.stats import chi_square_simplex, ks_critical, ks_one_sample, ks_two_sample, ks_two_sample_critical


class TestSpecial:
    def test_log_gamma_recurrence(self):
        x = np.linspace(0.1, 50.0, 2_000)
        lhs = special.log_gamma(x + 1.0)
        rhs = special.log_gamma(x) + np.log(x)
        assert np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))) < 1e-12

    def test_betainc_against_scipy(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            a = float(rng.uniform(0.05, 8.0))
            b = float(rng.uniform(0.05, 8.0))
            x = float(rng.random())
            mine = special.betainc_reg(a, b, x)
            ref = scipy.special.betainc(a, b, x)
            assert abs(mine - ref) < 1e-13

    def test_betainc_edges(self):
        assert special.betainc_reg(2.0, 3.0, 0.0) == 0.0
        assert special.betainc_reg(2.0, 3.0, 1.0) == 1.0
        with pytest.raises(DomainError):
            special.betainc_reg(-1.0, 1.0, 0.5)

    def test_betainc_inv_roundtrip(self):
        for a, b in [(0.5, 0.5), (1.0, 2.0), (0.6, 1.2), (3.0, 0.7)]:
            for q in (0.01, 0.3, 0.5, 0.77, 0.99):
                x = special.betainc_inv(a, b, q)
                assert abs(special.betainc_reg(a, b, x) - q) < 1e-12


class TestJumpLaws:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            dist.BetaJump(0.0, 1.0)
        with pytest.raises(InvalidParameterError):
            dist.PointMassJump(1.5)

    def test_point_mass_degenerate(self):
        rng = make_stream(0)
        law = dist.PointMassJump(1.0)
        assert dist.sample_jump(law, rng) == 1.0
        assert np.all(dist.sample_jump(law, rng, 10) == 1.0)

    def test_point_mass_pdf_rejected(self):
        with pytest.raises(DomainError):
            dist.jump_pdf(dist.PointMassJump(0.5), 0.3)

    def test_point_mass_tail_indicator(self):
        law = dist.PointMassJump(0.5)
        assert dist.jump_tail(law, 0.4) == 1.0
        assert dist.jump_tail(law, 0.5) == 1.0
        assert dist.jump_tail(law, 0.6) == 0.0

    def test_uniform_matches_beta11(self):
        xs = np.linspace(0.0, 1.0, 11)
        u, b = dist.UniformJump(), dist.BetaJump(1.0, 1.0)
        assert np.allclose(dist.jump_pdf(u, xs), dist.jump_pdf(b, xs))
        assert np.allclose(dist.jump_cdf(u, xs), dist.jump_cdf(b, xs), atol=1e-14)

    def test_pdf_values(self):
        assert dist.jump_pdf(dist.UniformJump(), 0.25) == pytest.approx(1.0)
        assert dist.jump_pdf(dist.BetaJump(1.0, 2.0), 0.5) == pytest.approx(1.0)

    def test_tail_closed_form(self):
        # Beta(1, gamma) tail at 1 - delta is delta^gamma
        for gamma in (1.0, 2.0, 3.5):
            law = dist.BetaJump(1.0, gamma)
            for delta in (0.1, 0.05, 0.2):
                assert abs(dist.jump_tail(law, 1.0 - delta) - delta**gamma) < 1e-12

    def test_empirical_tail(self):
        rng = make_stream(12)
        law = dist.BetaJump(1.0, 2.0)
        n = 100_000
        xs = dist.sample_jump(law, rng, n)
        phat = np.mean(xs >= 0.9)
        assert abs(phat - 0.01) < 3 * np.sqrt(0.01 * 0.99 / n)

    def test_beta_symmetry_two_sample(self):
        rng = make_stream(13)
        n = 100_000
        xs = dist.sample_jump(dist.BetaJump(2.0, 2.0), rng, n)
        ys = 1.0 - dist.sample_jump(dist.BetaJump(2.0, 2.0), rng, n)
        assert ks_two_sample(xs, ys) < ks_two_sample_critical(n, n, 0.01)

    def test_pdf_integrates_to_one(self):
        for law in (dist.BetaJump(0.5, 0.5), dist.BetaJump(1.0, 2.0), dist.BetaJump(2.3, 0.8)):
            a, b = dist.beta_params(law)
            total = integrate_interval(
                lambda x: dist.jump_pdf(law, x), 0.0, 1.0, lower_power=a, upper_power=b
            )
            assert abs(total - 1.0) < 1e-6

    @pytest.mark.parametrize(
        "law",
        [dist.UniformJump(), dist.BetaJump(0.5, 0.5), dist.BetaJump(1.0, 2.0), dist.BetaJump(2.0, 5.0)],
    )
    def test_sampler_cdf_consistency(self, law):
        # 100 equal-probability bins from the quantile function
        rng = make_stream(17)
        n = 100_000
        xs = dist.sample_jump(law, rng, n)
        edges = [dist.jump_ppf(law, q) for q in np.linspace(0.0, 1.0, 101)]
        counts, _ = np.histogram(xs, bins=edges)
        expected = n / 100
        stat = float(((counts - expected) ** 2 / expected).sum())
        # chi2(99) 0.999 quantile
        import scipy.stats

        assert stat < scipy.stats.chi2.ppf(0.999, 99)

    def test_deterministic_streams(self):
        a = dist.sample_jump(dist.BetaJump(1.0, 2.0), make_stream(5, 3), 100)
        b = dist.sample_jump(dist.BetaJump(1.0, 2.0), make_stream(5, 3), 100)
        assert np.array_equal(a, b)


class TestDirichlet:
    def test_params_validation(self):
        with pytest.raises(InvalidParameterError):
            dist.DirichletParams((1.0,))
        with pytest.raises(InvalidParameterError):
            dist.DirichletParams((1.0, -0.2))

    def test_flat_density(self):
        params = dist.DirichletParams((1.0, 1.0, 1.0))
        assert dist.dirichlet_pdf(params, np.array([0.2, 0.3])) == pytest.approx(2.0)
        assert dist.dirichlet_pdf(params, np.array([0.01, 0.5])) == pytest.approx(2.0)

    def test_symmetry(self):
        params = dist.DirichletParams((0.7, 0.7, 0.7))
        z = np.array([0.2, 0.3])  # barycentric (0.2, 0.3, 0.5)
        perms = [np.array([0.3, 0.2]), np.array([0.5, 0.3]), np.array([0.2, 0.5])]
        base = dist.dirichlet_pdf(params, z)
        for p in perms:
            assert dist.dirichlet_pdf(params, p) == pytest.approx(base)

    def test_boundary_guard(self):
        params = dist.DirichletParams((0.6, 0.6, 0.6))
        with pytest.raises(DomainError):
            dist.dirichlet_pdf(params, np.array([0.0, 0.3]))

    def test_integrates_to_one_2d(self):
        params = dist.DirichletParams((0.6, 0.6, 0.6))

        def inner(z1: float) -> float:
            return integrate_interval(
                lambda z2: dist.dirichlet_pdf(params, np.array([z1, z2])),
                0.0,
                1.0 - z1,
                lower_power=0.6,
                upper_power=0.6,
            )

        total = integrate_interval(inner, 0.0, 1.0, lower_power=0.6, upper_power=1.2)
        assert abs(total - 1.0) < 1e-6

    def test_moments(self):
        params = dist.DirichletParams((0.6, 0.6, 0.6))
        mean, cov = dist.dirichlet_moments(params)
        assert mean == pytest.approx([1 / 3, 1 / 3])
        # var = m(1-m)/(total+1) with m = 1/3, total = 1.8
        assert cov[0, 0] == pytest.approx((1 / 3) * (2 / 3) / 2.8)

    def test_marginal_law(self):
        params = dist.DirichletParams((2.0, 3.0, 4.0))
        m = dist.dirichlet_marginal(params, 1)
        assert (m.a, m.b) == (2.0, 7.0)

    def test_dirichlet11_is_uniform(self):
        rng = make_stream(21)
        n = 100_000
        z = dist.sample_dirichlet(dist.DirichletParams((1.0, 1.0)), rng, n)[:, 0]
        assert ks_one_sample(z, lambda x: x) < ks_critical(n, 0.01)

    def test_symmetric_mean(self):
        rng = make_stream(22)
        n = 100_000
        z = dist.sample_dirichlet(dist.DirichletParams((2.0, 2.0, 2.0)), rng, n)
        sd = np.sqrt((1 / 3) * (2 / 3) / 7.0)
        assert np.max(np.abs(z.mean(axis=0) - 1 / 3)) < 3 * sd / np.sqrt(n)

    def test_marginal_vs_beta_cdf(self):
        rng = make_stream(23)
        n = 100_000
        params = dist.DirichletParams((0.6, 0.6, 0.8))
        z1 = dist.sample_dirichlet(params, rng, n)[:, 0]
        law = dist.dirichlet_marginal(params, 1)
        assert ks_one_sample(z1, lambda x: dist.jump_cdf(law, x)) < ks_critical(n, 0.01)

    def test_stick_coordinates_chi_square(self):
        # joint law check through the independent-stick factorization
        rng = make_stream(24)
        params = dist.DirichletParams((0.6, 0.9, 1.4))
        z = dist.sample_dirichlet(params, rng, 100_000)
        rep = chi_square_simplex(z, params, bins_per_axis=10, alpha=0.001)
        assert rep.detail["cell_prob_sum"] == pytest.approx(1.0, abs=1e-9)
        assert rep.passed, rep


class TestArcsine:
    def test_midpoint(self):
        assert dist.arcsine_cdf(0.5) == pytest.approx(0.5)

    def test_matches_incomplete_beta(self):
        xs = np.linspace(0.0, 1.0, 1001)
        ref = special.betainc_reg(0.5, 0.5, xs)
        assert np.max(np.abs(dist.arcsine_cdf(xs) - ref)) < 1e-10

    def test_pdf_integrates(self):
        total = integrate_interval(
            dist.arcsine_pdf, 0.0, 1.0, lower_power=0.5, upper_power=0.5
        )
        assert abs(total - 1.0) < 1e-8
