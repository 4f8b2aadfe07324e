"""Samplers: determinism, exact margins, tail standardization, model files."""

import numpy as np
import pytest

from conftest import ks_bound, ks_uniform
from tailcomb.angular import DiscreteAngularMeasure, axes_measure
from tailcomb.errors import ConfigurationError, DomainError, NumericalError
from tailcomb.rng import RngStream, chunk_ranges
from tailcomb.samplers import (
    BreimanDiscrete,
    GaussianCopula,
    LinearFactor,
    MaxLinearFrechet,
    MultivariateT,
    S1SDiscrete,
    model_from_json,
    sample_chunk,
    sigma_build,
)


def draw_pvalues(model, n, seed=2024):
    rows = []
    for c, start, stop in chunk_ranges(n):
        rows.append(sample_chunk(model, seed, c).p[: stop - start])
    return np.concatenate(rows, axis=0)


def draw_raw(model, n, seed=2024):
    rows = []
    for c, start, stop in chunk_ranges(n):
        rows.append(sample_chunk(model, seed, c).x[: stop - start])
    return np.concatenate(rows, axis=0)


class TestSigmaBuild:
    def test_ar_zero_is_identity(self):
        np.testing.assert_array_equal(sigma_build("ar", rho=0.0, d=3), np.eye(3))

    def test_ar_half(self):
        expected = [[1, 0.5, 0.25], [0.5, 1, 0.5], [0.25, 0.5, 1]]
        np.testing.assert_allclose(sigma_build("ar", rho=0.5, d=3), expected)

    def test_exch(self):
        np.testing.assert_allclose(
            sigma_build("exch", rho=0.5, d=2), [[1, 0.5], [0.5, 1]]
        )

    def test_exch_domain(self):
        with pytest.raises(DomainError):
            sigma_build("exch", rho=-0.6, d=3)  # needs rho > -1/2

    def test_dense_spd_check(self):
        with pytest.raises(NumericalError):
            sigma_build("dense", matrix=[[1.0, 0.99], [0.99, 1.0 - 2.0]])
        with pytest.raises(NumericalError):
            sigma_build("dense", matrix=[[1.0, 2.0], [2.0, 1.0]])


class TestDeterminism:
    MODELS = [
        MultivariateT(nu=1.0, sigma=np.eye(2)),
        GaussianCopula(sigma=sigma_build("ar", rho=0.5, d=2)),
        BreimanDiscrete(measure=axes_measure(2)),
        LinearFactor(A=np.eye(2)),
        MaxLinearFrechet(A=np.eye(2)),
        S1SDiscrete(atoms=np.array([[1.0, 0.0], [0.0, 1.0]]), scales=np.array([1.0, 1.0])),
    ]

    @pytest.mark.parametrize("model", MODELS, ids=lambda m: type(m).__name__)
    def test_identical_across_calls(self, model):
        a = sample_chunk(model, 7, 3, chunk_size=512)
        b = sample_chunk(model, 7, 3, chunk_size=512)
        np.testing.assert_array_equal(a.x, b.x)
        if a.p is not None:
            np.testing.assert_array_equal(a.p, b.p)

    @pytest.mark.parametrize("model", MODELS, ids=lambda m: type(m).__name__)
    def test_streams_differ(self, model):
        a = sample_chunk(model, 7, 3, chunk_size=512)
        b = sample_chunk(model, 7, 4, chunk_size=512)
        assert not np.array_equal(a.x, b.x)

    def test_stream_is_pure_function_of_key(self):
        g1 = RngStream(123, 5).generator()
        g2 = RngStream(123, 5).generator()
        np.testing.assert_array_equal(g1.random(16), g2.random(16))


class TestMultivariateT:
    def test_gaussian_limit_uncorrelated(self):
        model = MultivariateT(nu=1e6, sigma=np.eye(2))
        x = draw_raw(model, 65_536)
        corr = np.corrcoef(x.T)[0, 1]
        assert abs(corr) <= 3.0 / np.sqrt(x.shape[0]) * 1.5

    def test_marginal_uniformity_nu1(self):
        model = MultivariateT(nu=1.0, sigma=np.eye(2))
        p = draw_pvalues(model, 100_000)
        phat = np.mean(p[:, 0] < 0.1)
        se = np.sqrt(0.1 * 0.9 / p.shape[0])
        assert abs(phat - 0.1) <= 4.0 * se

    def test_gamma_mean(self):
        # G ~ Gamma(nu/2, rate 1/2) has mean nu
        n = 1_000_000
        for nu in (1.0, 5.0, 25.0):
            g = 2.0 * RngStream(55, 0).generator().standard_gamma(nu / 2.0, size=n)
            se = g.std() / np.sqrt(n)
            assert abs(g.mean() - nu) <= 4.0 * se

    def test_location_shift(self):
        mu = np.array([5.0, -1.0])
        model = MultivariateT(nu=10.0, sigma=np.eye(2), mu=mu)
        x = draw_raw(model, 65_536)
        np.testing.assert_allclose(np.median(x, axis=0), mu, atol=0.1)


class TestBreiman:
    def test_single_atom_margin(self):
        measure = DiscreteAngularMeasure(beta=1.0, atoms=[[0.5, 0.5]], weights=[1.0])
        model = BreimanDiscrete(measure=measure)
        batch = sample_chunk(model, 1, 0, chunk_size=4096)
        # X = (Y/2, Y/2) and S_1(x) = min(1, 1/(2x))
        np.testing.assert_allclose(batch.x[:, 0], batch.x[:, 1])
        expected = np.minimum(1.0, 1.0 / (2.0 * batch.x[:, 0]))
        np.testing.assert_allclose(batch.p[:, 0], expected, rtol=1e-12)

    def test_axes_exactly_one_extreme(self):
        model = BreimanDiscrete(measure=axes_measure(2))
        batch = sample_chunk(model, 1, 0, chunk_size=4096)
        assert np.all((batch.x > 0).sum(axis=1) == 1)

    def test_degenerate_margin_rejected(self):
        measure = DiscreteAngularMeasure(beta=1.0, atoms=[[1.0, 0.0]], weights=[1.0])
        with pytest.raises(ConfigurationError):
            BreimanDiscrete(measure=measure)

    def test_signed_measure_rejected(self):
        signed = DiscreteAngularMeasure(
            beta=1.0, atoms=[[0.5, -0.5], [-0.5, 0.5]], weights=[0.5, 0.5], signed=True
        )
        with pytest.raises(ConfigurationError):
            BreimanDiscrete(measure=signed)


class TestMaxLinearFrechet:
    def test_identity_margins_frechet(self):
        model = MaxLinearFrechet(A=np.eye(2))
        x = draw_raw(model, 65_536)
        # P[X <= 1] = e^{-1}
        phat = np.mean(x[:, 0] <= 1.0)
        se = np.sqrt(phat * (1 - phat) / x.shape[0])
        assert abs(phat - np.exp(-1.0)) <= 4.0 * se

    def test_zero_row_rejected(self):
        with pytest.raises(ConfigurationError):
            MaxLinearFrechet(A=np.array([[1.0, 0.0], [0.0, 0.0]]))


class TestS1S:
    def test_single_pair_standard_cauchy(self):
        model = S1SDiscrete(atoms=np.array([[1.0, 0.0], [0.0, 1.0]]), scales=np.array([1.0, 1.0]))
        x = draw_raw(model, 65_536)
        med = np.median(np.abs(x[:, 0]))
        assert abs(med - 1.0) <= 0.05  # |Cauchy| median is 1

    def test_mixed_sign_cancellation(self):
        model = S1SDiscrete(
            atoms=np.array([[0.5, -0.5]]), scales=np.array([2.0]), standardized=True
        )
        x = draw_raw(model, 4096)
        t = x @ np.array([0.5, 0.5])
        np.testing.assert_allclose(t, 0.0, atol=1e-12)

    def test_standardization_validated(self):
        with pytest.raises(ConfigurationError):
            S1SDiscrete(atoms=np.array([[1.0, 0.0]]), scales=np.array([1.0]))


class TestLinearFactor:
    def test_identity_margins_pareto(self):
        model = LinearFactor(A=np.eye(2))
        x = draw_raw(model, 65_536)
        phat = np.mean(x[:, 0] > 2.0)
        se = np.sqrt(phat * (1 - phat) / x.shape[0])
        assert abs(phat - 0.5) <= 4.0 * se

    def test_comonotone_column(self):
        model = LinearFactor(A=np.array([[1.0], [1.0]]))
        x = draw_raw(model, 4096)
        np.testing.assert_allclose(x[:, 0], x[:, 1])

    def test_no_pvalues(self):
        model = LinearFactor(A=np.eye(2))
        assert sample_chunk(model, 0, 0, chunk_size=64).p is None

    def test_single_jump_tail(self):
        # A = [[1,1],[0,1]]: t*P(X_1 > t) -> 2
        model = LinearFactor(A=np.array([[1.0, 1.0], [0.0, 1.0]]))
        n, t = 1_000_000, 1e3
        x = draw_raw(model, n)
        phat = np.mean(x[:, 0] > t)
        se = t * np.sqrt(phat * (1 - phat) / n)
        assert abs(t * phat - 2.0) <= 4.0 * se


class TestMarginalUniformity:
    """Every p-emitting model: per-margin KS within the 1% bound at 1e6 draws."""

    N = 1_000_000

    MODELS = [
        MultivariateT(nu=1.0, sigma=sigma_build("ar", rho=0.5, d=3)),
        GaussianCopula(sigma=sigma_build("exch", rho=0.4, d=3)),
        BreimanDiscrete(
            measure=DiscreteAngularMeasure(
                beta=1.0,
                atoms=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1 / 3, 1 / 3, 1 / 3]],
                weights=[0.25, 0.25, 0.25, 0.25],
            )
        ),
        MaxLinearFrechet(A=np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])),
        S1SDiscrete(
            atoms=np.array([[0.5, 0.5, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
            scales=np.array([1.0, 1.0, 0.5, 0.5]),
        ),
    ]

    @pytest.mark.parametrize("model", MODELS, ids=lambda m: type(m).__name__)
    def test_uniform_margins(self, model):
        p = draw_pvalues(model, self.N)
        for i in range(p.shape[1]):
            assert ks_uniform(p[:, i]) <= ks_bound(self.N), f"margin {i}"


class TestTailStandardizationMC:
    """t * P(transformed margin > t) is 1 exactly in p-space: P(p < 1/t) = 1/t."""

    @pytest.mark.parametrize(
        "model",
        [
            MultivariateT(nu=1.0, sigma=sigma_build("ar", rho=0.5, d=2)),
            BreimanDiscrete(
                measure=DiscreteAngularMeasure(
                    beta=1.0, atoms=[[0.5, 0.5], [1.0, 0.0], [0.0, 1.0]], weights=[0.5, 0.25, 0.25]
                )
            ),
        ],
        ids=["mvt_nu1", "breiman_beta1"],
    )
    def test_pareto_margin_tail(self, model):
        n, t = 1_000_000, 100.0
        p = draw_pvalues(model, n)
        phat = np.mean(p[:, 0] < 1.0 / t)
        se = t * np.sqrt(phat * (1 - phat) / n)
        assert abs(t * phat - 1.0) <= 4.0 * se


class TestModelFiles:
    def test_mvt_round_trip(self):
        obj = {"kind": "mvt", "nu": 2.0, "d": 3, "sigma": {"kind": "ar", "rho": 0.5}}
        model = model_from_json(obj)
        assert isinstance(model, MultivariateT)
        assert model.nu == 2.0 and model.d == 3 and model.rho == 0.5

    def test_dense_sigma(self):
        obj = {"kind": "gauss_copula", "sigma": [[1.0, 0.2], [0.2, 1.0]]}
        model = model_from_json(obj)
        assert isinstance(model, GaussianCopula) and model.d == 2

    def test_breiman(self):
        obj = {
            "kind": "breiman",
            "measure": {
                "version": 1,
                "beta": 1.0,
                "signed": False,
                "atoms": [[0.5, 0.5], [1.0, 0.0], [0.0, 1.0]],
                "weights": [0.5, 0.25, 0.25],
            },
        }
        model = model_from_json(obj)
        assert isinstance(model, BreimanDiscrete) and model.beta == 1.0

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError):
            model_from_json({"kind": "mystery"})


class TestGaussianCopulaDependence:
    def test_strong_exchangeable_correlation(self):
        model = GaussianCopula(sigma=sigma_build("exch", rho=0.9, d=2), sigma_kind="exch", rho=0.9)
        p = draw_pvalues(model, 65_536)
        # Spearman rho of the p-values: correlate the ranks
        from scipy import stats

        rho_s = stats.spearmanr(p[:, 0], p[:, 1]).statistic
        assert rho_s > 0.8


class TestS1SNonStandardized:
    def test_margins_still_uniform(self):
        model = S1SDiscrete(
            atoms=np.array([[0.5, 0.5], [1.0, 0.0]]),
            scales=np.array([3.0, 1.0]),
            standardized=False,
        )
        p = draw_pvalues(model, 65_536)
        from conftest import ks_bound, ks_uniform

        for i in range(2):
            assert ks_uniform(p[:, i]) <= ks_bound(p.shape[0])
