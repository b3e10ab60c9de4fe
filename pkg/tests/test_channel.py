import numpy as np
import pytest
from scipy import stats

from sttc_microsim.channel import (
    ChannelMatrix,
    SnrPoint,
    sample_rayleigh_channel,
    snr_to_noise_variance,
    transmit,
)


class TestRayleighSampling:
    def test_reproducible(self):
        a = sample_rayleigh_channel(np.random.default_rng(0))
        b = sample_rayleigh_channel(np.random.default_rng(0))
        assert a == b

    def test_unit_mean_power(self):
        rng = np.random.default_rng(1)
        gains = np.array(
            [(c.h1, c.h2) for c in (sample_rayleigh_channel(rng) for _ in range(10_000))]
        )
        power = np.abs(gains) ** 2
        assert power[:, 0].mean() == pytest.approx(1.0, abs=0.05)
        assert power[:, 1].mean() == pytest.approx(1.0, abs=0.05)

    def test_components_look_gaussian(self):
        rng = np.random.default_rng(2)
        n = 100_000
        draws = [sample_rayleigh_channel(rng) for _ in range(n)]
        parts = np.concatenate(
            [
                np.fromiter((c.h1.real for c in draws), float),
                np.fromiter((c.h1.imag for c in draws), float),
            ]
        )
        assert abs(stats.skew(parts)) < 0.1
        assert parts.var() == pytest.approx(0.5, rel=0.05)


class TestSnr:
    @pytest.mark.parametrize("db,var", [(0.0, 1.0), (10.0, 0.1), (20.0, 0.01)])
    def test_snr_to_noise_variance(self, db, var):
        assert snr_to_noise_variance(db) == pytest.approx(var, rel=1e-12)

    def test_snr_point_consistency(self):
        sp = SnrPoint.from_db(13.0)
        assert sp.noise_variance == pytest.approx(10 ** (-1.3), rel=1e-12)


class TestTransmit:
    def test_noise_free_limit(self):
        h = ChannelMatrix(1 + 0j, 0j)
        x = np.array([[1 + 0j, -1 + 0j, 1j], [1j, 1j, 1j]])
        y, noise = transmit(x, h, SnrPoint(1000.0, 0.0), np.random.default_rng(3))
        assert np.allclose(y, x[0] / np.sqrt(2))
        assert np.allclose(noise, 0)

    def test_zero_streams_give_pure_noise(self):
        h = ChannelMatrix(0.3 + 1j, -1 + 0.2j)
        x = np.zeros((2, 64), dtype=complex)
        y, noise = transmit(x, h, SnrPoint.from_db(5.0), np.random.default_rng(4))
        assert np.array_equal(y, noise)

    def test_noise_power_matches_variance(self):
        h = ChannelMatrix(1 + 0j, 1 + 0j)
        x = np.zeros((2, 100_000), dtype=complex)
        _, noise = transmit(x, h, SnrPoint.from_db(10.0), np.random.default_rng(5))
        assert np.mean(np.abs(noise) ** 2) == pytest.approx(0.1, rel=0.05)

    def test_deterministic_given_seed(self):
        h = ChannelMatrix(0.5 + 0.5j, 1j)
        x = np.ones((2, 16), dtype=complex)
        y1, _ = transmit(x, h, SnrPoint.from_db(8.0), np.random.default_rng(6))
        y2, _ = transmit(x, h, SnrPoint.from_db(8.0), np.random.default_rng(6))
        assert np.array_equal(y1, y2)

    def test_stream_shape_checked(self):
        h = ChannelMatrix(1 + 0j, 1 + 0j)
        with pytest.raises(ValueError):
            transmit(np.ones((3, 4), dtype=complex), h, SnrPoint.from_db(0), np.random.default_rng(7))
