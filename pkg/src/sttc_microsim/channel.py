"""Quasi-static flat Rayleigh fading and AWGN for the 2-Tx / 1-Rx link.

The channel is held fixed for a whole frame (it is always an argument,
never sampled inside :func:`transmit`), gains are CN(0, 1) per antenna,
and with the 1/sqrt(2) transmit scale the SNR in dB maps to a noise
variance of ``10**(-snr_db / 10)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import POWER_SCALE


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex gains of the two transmit antennas."""

    h1: complex
    h2: complex

    def as_reals(self) -> tuple[float, float, float, float]:
        return (self.h1.real, self.h1.imag, self.h2.real, self.h2.imag)


@dataclass(frozen=True)
class SnrPoint:
    snr_db: float
    noise_variance: float

    @classmethod
    def from_db(cls, snr_db: float) -> "SnrPoint":
        return cls(float(snr_db), snr_to_noise_variance(snr_db))


def snr_to_noise_variance(snr_db: float) -> float:
    """Linear noise variance under unit total transmit energy per period."""
    return float(10.0 ** (-float(snr_db) / 10.0))


def sample_rayleigh_channel(rng: np.random.Generator) -> ChannelMatrix:
    """Draw i.i.d. CN(0, 1) gains (real and imaginary parts N(0, 1/2))."""
    re = rng.standard_normal(2)
    im = rng.standard_normal(2)
    gains = (re + 1j * im) * math.sqrt(0.5)
    return ChannelMatrix(complex(gains[0]), complex(gains[1]))


def transmit(x, h: ChannelMatrix, sp: SnrPoint, rng: np.random.Generator):
    """Apply fading and additive noise: y_t = (h1*x1_t + h2*x2_t)/sqrt(2) + n_t.

    Returns ``(y, noise)``; the realized noise sequence is kept because the
    feature extraction downstream wants its average power.
    """
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != 2:
        raise ValueError("expected two antenna streams of equal length")
    faded = (h.h1 * x[0] + h.h2 * x[1]) * POWER_SCALE
    scale = math.sqrt(sp.noise_variance / 2.0)
    n = x.shape[1]
    noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * scale
    return faded + noise, noise
