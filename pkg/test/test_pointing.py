"""
Tests for the pointing jitter model and the seeded radial sampler.
"""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from src.link.pointing import PointingModel, rayleigh_cdf, rayleigh_pdf, sample_radial, sigma_s
from src.utils.errors import EmptySampleError, InvalidParameterError
from src.utils.rng import CHUNK_SIZE, chunk_sizes, map_substreams, substream


class TestPointingModel:
    """sigma_s as a function of hop distance."""

    def test_constant_mode_ignores_distance(self):
        model = PointingModel(sigma_s0=2.0)
        assert sigma_s(model, 0.0) == sigma_s(model, 5000e3) == 2.0

    def test_exponential_mode(self):
        model = PointingModel(sigma_s0=2.0, k0=0.1, d0=100e3, mode="exponential")
        assert sigma_s(model, 0.0) == 2.0
        assert sigma_s(model, 1000e3) == pytest.approx(2.0 * math.e, rel=1e-15)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"sigma_s0": 0.0},
            {"sigma_s0": 2.0, "d0": 0.0},
            {"sigma_s0": 2.0, "k0": -0.1},
            {"sigma_s0": 2.0, "mode": "linear"},
        ],
    )
    def test_invalid_model_raises(self, kwargs):
        with pytest.raises(InvalidParameterError):
            PointingModel(**kwargs)

    def test_negative_distance_raises(self):
        with pytest.raises(InvalidParameterError):
            sigma_s(PointingModel(sigma_s0=2.0), -1.0)


class TestRayleigh:
    """Closed-form Rayleigh law."""

    def test_pdf_integrates_to_one(self):
        total, _ = integrate.quad(lambda r: rayleigh_pdf(r, 2.0), 0.0, np.inf)
        assert total == pytest.approx(1.0, rel=1e-10)

    def test_cdf_is_integral_of_pdf(self):
        partial, _ = integrate.quad(lambda r: rayleigh_pdf(r, 2.0), 0.0, 3.0, epsabs=0.0, epsrel=1e-12)
        assert rayleigh_cdf(3.0, 2.0) == pytest.approx(partial, rel=1e-10)
        assert rayleigh_cdf(0.0, 2.0) == 0.0
        assert rayleigh_cdf(math.inf, 2.0) == 1.0

    def test_non_positive_sigma_raises(self):
        with pytest.raises(InvalidParameterError):
            rayleigh_pdf(1.0, 0.0)


class TestSampler:
    """Seeded, worker-independent radial samples."""

    def test_same_seed_same_samples(self):
        a = sample_radial(7, 2.0, 50_000)
        b = sample_radial(7, 2.0, 50_000)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, sample_radial(8, 2.0, 50_000))

    def test_worker_count_does_not_change_samples(self):
        n = 2 * CHUNK_SIZE + 1234
        serial = sample_radial(3, 2.0, n, workers=1)
        pooled = sample_radial(3, 2.0, n, workers=4)
        assert serial.shape == (n,)
        assert np.array_equal(serial, pooled)

    def test_moments_match_rayleigh(self):
        r = sample_radial(11, 2.0, 400_000)
        assert np.all(r >= 0)
        assert r.mean() == pytest.approx(2.0 * math.sqrt(math.pi / 2.0), rel=1e-2)
        assert np.mean(r**2) == pytest.approx(2.0 * 2.0**2, rel=1e-2)

    @pytest.mark.parametrize("sigma", [0.5, 2.0])
    def test_kolmogorov_smirnov_against_rayleigh(self, sigma):
        radii = sample_radial(5, sigma, 1_000_000)
        assert stats.kstest(radii, stats.rayleigh(scale=sigma).cdf).statistic < 5e-3

    def test_empty_sample_raises(self):
        with pytest.raises(EmptySampleError):
            sample_radial(1, 2.0, 0)


class TestSubstreams:
    """Stream-splitting rule."""

    def test_chunk_sizes(self):
        assert chunk_sizes(10, chunk_size=4) == [4, 4, 2]
        assert chunk_sizes(8, chunk_size=4) == [4, 4]
        with pytest.raises(EmptySampleError):
            chunk_sizes(-1)

    def test_substream_is_spawned_child(self):
        child = np.random.SeedSequence(42).spawn(3)[2]
        expected = np.random.Generator(np.random.PCG64(child)).random(5)
        assert np.array_equal(substream(42, 2).random(5), expected)

    def test_map_substreams_keeps_index_order(self):
        sizes = map_substreams(lambda gen, size: size, seed=0, n=10, workers=3, chunk_size=3)
        assert sizes == [3, 3, 3, 1]
