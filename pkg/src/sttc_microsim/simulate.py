"""BER-vs-SNR curves and code-vs-code competitions.

Two comparison modes share one verdict rule (smallest SNR where the BER
hits zero, then average BER, then minimum BER, then a coin flip):

* the full-simulation baseline averages many iterations of random
  260-bit frames over fresh Rayleigh channels, and
* the microsimulation competition runs a single pass of the constant
  12-bit elementary frame over one fixed channel, three times, with the
  winner taken by majority vote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelMatrix, sample_rayleigh_channel
from .codes import (
    POWER_SCALE,
    GeneratorMatrix,
    build_trellis,
    encode,
    expected_observations,
    symbols_to_bits,
    viterbi_batch,
)

# Concatenation of all QPSK input symbol values bracketed by zero pairs.
ELEMENTARY_FRAME = np.array([0, 0, 0, 0, 0, 1, 1, 0, 1, 1, 0, 0], dtype=np.int64)

DEFAULT_FRAME_BITS = 260
DEFAULT_ITERATIONS = 100


def make_grid(lo: float = 0.0, step: float = 2.0, hi: float = 24.0) -> np.ndarray:
    """SNR grid in dB, inclusive of both ends (default 0,2,...,24)."""
    n = int(round((hi - lo) / step)) + 1
    grid = lo + step * np.arange(n)
    return check_grid(grid)


def parse_grid_spec(spec: str) -> np.ndarray:
    """Parse a ``min:step:max`` grid specification."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"SNR grid must be min:step:max, got {spec!r}")
    try:
        lo, step, hi = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"non-numeric SNR grid component in {spec!r}") from None
    if step <= 0 or hi < lo:
        raise ValueError(f"bad SNR grid range {spec!r}")
    return make_grid(lo, step, hi)


def check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("SNR grid must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
        raise ValueError("SNR grid must be finite and strictly increasing")
    return grid


@dataclass(frozen=True, eq=False)
class BerCurve:
    """BER sampled on an SNR grid; the unit of comparison between codes."""

    snr_db: np.ndarray
    ber: np.ndarray

    def __post_init__(self):
        check_grid(self.snr_db)
        if self.ber.shape != self.snr_db.shape:
            raise ValueError("ber and snr_db must have equal length")
        if np.any((self.ber < 0) | (self.ber > 1)):
            raise ValueError("ber values must lie in [0, 1]")


def curve_to_csv(curve: BerCurve) -> str:
    lines = ["snr_db,ber"]
    for snr, ber in zip(curve.snr_db, curve.ber):
        lines.append(f"{float(snr)!r},{float(ber)!r}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MetricTriple:
    """Comparison metrics of one curve.

    ``ber_zero`` is +inf when the measured BER never reaches zero inside
    the grid.
    """

    ber_zero: float
    ber_ave: float
    ber_min: float


def curve_metrics(curve: BerCurve) -> MetricTriple:
    return _metrics(curve.snr_db, curve.ber)


def _metrics(grid: np.ndarray, ber: np.ndarray) -> MetricTriple:
    zero = np.flatnonzero(ber == 0.0)
    ber_zero = float(grid[zero[0]]) if zero.size else math.inf
    return MetricTriple(ber_zero, float(ber.mean()), float(ber.min()))


def hierarchy_compare(m0: MetricTriple, m1: MetricTriple, rng: np.random.Generator) -> int:
    """Index of the better triple: ber_zero, then ber_ave, then ber_min.

    A full tie is broken uniformly at random.
    """
    for a, b in (
        (m0.ber_zero, m1.ber_zero),
        (m0.ber_ave, m1.ber_ave),
        (m0.ber_min, m1.ber_min),
    ):
        if a != b:
            return 0 if a < b else 1
    return int(rng.integers(0, 2))


def majority_vote(votes, rng: np.random.Generator | None = None) -> int:
    """Mode of a sequence of 0/1 votes; an even split needs an rng to break."""
    votes = list(votes)
    if not votes:
        raise ValueError("majority_vote needs at least one vote")
    ones = sum(votes)
    zeros = len(votes) - ones
    if ones != zeros:
        return int(ones > zeros)
    if rng is None:
        raise ValueError("tied vote with no tie-break rng")
    return int(rng.integers(0, 2))


def _prepare_micro(g: GeneratorMatrix, h: ChannelMatrix):
    """Branch table and noise-free receive samples of the elementary frame."""
    expected = expected_observations(build_trellis(g), h)
    x = encode(g, ELEMENTARY_FRAME)
    faded = (h.h1 * x[0] + h.h2 * x[1]) * POWER_SCALE
    return expected, faded


def _micro_ber(expected, faded, grid, rng) -> tuple[np.ndarray, float]:
    """Single-pass BER per grid point for one prepared code, plus the
    mean power of the realized noise across all points.
    """
    points = grid.size
    steps = faded.size
    scale = np.sqrt(snr_to_noise_variance_vec(grid) / 2.0)[:, None]
    noise = (
        rng.standard_normal((points, steps)) + 1j * rng.standard_normal((points, steps))
    ) * scale
    paths, _ = viterbi_batch(expected, faded[None, :] + noise)
    bits = symbols_to_bits(paths)
    ber = np.mean(bits != ELEMENTARY_FRAME[None, :], axis=1)
    return ber, float(np.mean(np.abs(noise) ** 2))


def snr_to_noise_variance_vec(grid: np.ndarray) -> np.ndarray:
    return 10.0 ** (-np.asarray(grid, dtype=float) / 10.0)


def run_ber_curve_micro(
    g: GeneratorMatrix, h: ChannelMatrix, grid, rng: np.random.Generator
) -> tuple[BerCurve, float]:
    """One microsimulation pass: the constant 12-bit frame, one channel,
    fresh noise per SNR point.  Returns the curve and the mean noise power.
    """
    grid = check_grid(grid)
    expected, faded = _prepare_micro(g, h)
    ber, noise_power = _micro_ber(expected, faded, grid, rng)
    return BerCurve(grid, ber), noise_power


def run_ber_curve_full(
    g: GeneratorMatrix,
    grid,
    iterations: int = DEFAULT_ITERATIONS,
    frame_bits: int = DEFAULT_FRAME_BITS,
    rng: np.random.Generator | None = None,
) -> BerCurve:
    """Monte-Carlo BER curve averaged over independent iterations.

    Each iteration draws a fresh channel, a fresh random frame (terminated
    by an appended zero bit-pair that is excluded from the error count),
    and fresh noise at every SNR point.
    """
    grid = check_grid(grid)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if frame_bits < 2 or frame_bits % 2 != 0:
        raise ValueError("frame_bits must be a positive even number")
    if rng is None:
        raise ValueError("an explicitly seeded rng is required")
    trellis = build_trellis(g)
    points = grid.size
    steps = frame_bits // 2 + 1
    scale = np.sqrt(snr_to_noise_variance_vec(grid) / 2.0)[:, None]
    total = np.zeros(points)
    for _ in range(iterations):
        h = sample_rayleigh_channel(rng)
        frame = rng.integers(0, 2, size=frame_bits)
        tx_frame = np.concatenate([frame, [0, 0]])
        x = encode(g, tx_frame)
        faded = (h.h1 * x[0] + h.h2 * x[1]) * POWER_SCALE
        noise = (
            rng.standard_normal((points, steps))
            + 1j * rng.standard_normal((points, steps))
        ) * scale
        paths, _ = viterbi_batch(expected_observations(trellis, h), faded[None, :] + noise)
        bits = symbols_to_bits(paths)[:, :frame_bits]
        total += np.mean(bits != frame[None, :], axis=1)
    return BerCurve(grid, total / iterations)


@dataclass(frozen=True)
class Subcompetition:
    winner: int
    metrics0: MetricTriple
    metrics1: MetricTriple
    noise_power0: float
    noise_power1: float


def subcompete(
    g0: GeneratorMatrix,
    g1: GeneratorMatrix,
    h: ChannelMatrix,
    grid,
    rng: np.random.Generator,
) -> Subcompetition:
    """One microsimulation duel on a shared channel, fresh noise per code."""
    grid = check_grid(grid)
    return _subcompete(_prepare_micro(g0, h), _prepare_micro(g1, h), grid, rng)


def _subcompete(prep0, prep1, grid, rng) -> Subcompetition:
    ber0, n0 = _micro_ber(*prep0, grid, rng)
    ber1, n1 = _micro_ber(*prep1, grid, rng)
    m0 = _metrics(grid, ber0)
    m1 = _metrics(grid, ber1)
    return Subcompetition(hierarchy_compare(m0, m1, rng), m0, m1, n0, n1)


@dataclass(frozen=True, eq=False)
class CompetitionRecord:
    """Everything observed during one three-round micro-competition."""

    g0: GeneratorMatrix
    g1: GeneratorMatrix
    h: ChannelMatrix
    grid: np.ndarray
    metrics0: tuple[MetricTriple, ...]
    metrics1: tuple[MetricTriple, ...]
    noise_power0: float
    noise_power1: float
    winner: int
    tally: tuple[int, int]


def compete_micro(
    g0: GeneratorMatrix,
    g1: GeneratorMatrix,
    h: ChannelMatrix,
    grid,
    rng: np.random.Generator,
) -> CompetitionRecord:
    """Three subcompetitions on the same channel, majority-vote winner."""
    grid = check_grid(grid)
    prep0 = _prepare_micro(g0, h)
    prep1 = _prepare_micro(g1, h)
    subs = [_subcompete(prep0, prep1, grid, rng) for _ in range(3)]
    votes = [s.winner for s in subs]
    return CompetitionRecord(
        g0=g0,
        g1=g1,
        h=h,
        grid=grid,
        metrics0=tuple(s.metrics0 for s in subs),
        metrics1=tuple(s.metrics1 for s in subs),
        noise_power0=float(np.mean([s.noise_power0 for s in subs])),
        noise_power1=float(np.mean([s.noise_power1 for s in subs])),
        winner=majority_vote(votes),
        tally=(votes.count(0), votes.count(1)),
    )


@dataclass(frozen=True, eq=False)
class FullCompetition:
    winner: int
    metrics0: MetricTriple
    metrics1: MetricTriple
    curve0: BerCurve
    curve1: BerCurve


def compete_full(
    g0: GeneratorMatrix,
    g1: GeneratorMatrix,
    grid,
    iterations: int = DEFAULT_ITERATIONS,
    rng: np.random.Generator | None = None,
    frame_bits: int = DEFAULT_FRAME_BITS,
) -> FullCompetition:
    """Ground-truth duel: both codes simulated under identical channels,
    frames and noise (shared seed), verdict from the averaged curves.
    """
    grid = check_grid(grid)
    if rng is None:
        raise ValueError("an explicitly seeded rng is required")
    seed = int(rng.integers(0, 2**63))
    curve0 = run_ber_curve_full(g0, grid, iterations, frame_bits, np.random.default_rng(seed))
    curve1 = run_ber_curve_full(g1, grid, iterations, frame_bits, np.random.default_rng(seed))
    m0 = curve_metrics(curve0)
    m1 = curve_metrics(curve1)
    return FullCompetition(hierarchy_compare(m0, m1, rng), m0, m1, curve0, curve1)
