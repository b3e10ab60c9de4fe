"""4-state QPSK space-time trellis codec for a 2-Tx / 1-Rx link.

A code is defined by a 4x2 coefficient matrix over Z4.  Row ``k`` of the
matrix multiplies bit ``k`` of the tap vector ``[b1_t, b2_t, b1_{t-1},
b2_{t-1}]`` (b1 is the MSB of the QPSK symbol index) and column ``j``
selects transmit antenna ``j``.  Under this convention the classic
delay-diversity code prints, in the usual transposed one-row-per-antenna
form, as ``"[0 0 2 1; 2 1 0 0]"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# QPSK constellation, index s -> e^{j*pi*s/2}.
QPSK = np.array([1 + 0j, 0 + 1j, -1 + 0j, 0 - 1j])

NUM_STATES = 4
NUM_INPUTS = 4

# Per-antenna amplitude so two antennas radiate unit energy per symbol period.
POWER_SCALE = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class GeneratorMatrix:
    """Z4 coefficient matrix of a 4-state code, stored tap-major (4x2)."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.entries) != 4 or any(len(row) != 2 for row in self.entries):
            raise ValueError("generator matrix must have 4 rows of 2 entries")
        if any(e not in (0, 1, 2, 3) for row in self.entries for e in row):
            raise ValueError("generator matrix entries must lie in {0,1,2,3}")

    @classmethod
    def from_text(cls, text: str) -> "GeneratorMatrix":
        """Parse the transposed bracket form, e.g. ``"[0 0 2 1; 2 1 0 0]"``.

        Each semicolon-separated row lists the four tap coefficients of one
        antenna, matching how such codes are printed in the literature.
        """
        body = text.strip()
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1]
        rows = [r for r in body.split(";")]
        if len(rows) != 2:
            raise ValueError(f"expected 2 antenna rows, got {len(rows)}: {text!r}")
        per_antenna = []
        for row in rows:
            parts = row.replace(",", " ").split()
            if len(parts) != 4:
                raise ValueError(f"expected 4 coefficients per row: {row.strip()!r}")
            try:
                values = [int(p) for p in parts]
            except ValueError:
                raise ValueError(f"non-integer coefficient in {row.strip()!r}") from None
            per_antenna.append(values)
        entries = tuple(
            (per_antenna[0][k], per_antenna[1][k]) for k in range(4)
        )
        return cls(entries)

    def to_text(self) -> str:
        """Inverse of :meth:`from_text`."""
        rows = []
        for j in range(2):
            rows.append(" ".join(str(self.entries[k][j]) for k in range(4)))
        return "[" + "; ".join(rows) + "]"

    def flat(self) -> tuple[int, ...]:
        """Entries in row-major (tap-major) order, 8 integers."""
        return tuple(e for row in self.entries for e in row)

    def coefficients(self) -> np.ndarray:
        """4x2 integer array, taps down the rows, antennas across."""
        return np.array(self.entries, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Trellis:
    """Branch table of a code: 4 states x 4 inputs.

    The state is the previous input symbol, so ``next_state[s, m] == m``.
    ``output_symbols[s, m]`` holds the QPSK indices sent by the two antennas.
    """

    num_states: int
    next_state: np.ndarray
    output_symbols: np.ndarray


def build_trellis(g: GeneratorMatrix) -> Trellis:
    coeff = g.coefficients()
    outputs = np.zeros((NUM_STATES, NUM_INPUTS, 2), dtype=np.int64)
    nxt = np.zeros((NUM_STATES, NUM_INPUTS), dtype=np.int64)
    for state in range(NUM_STATES):
        b1_prev, b2_prev = state >> 1, state & 1
        for m in range(NUM_INPUTS):
            b1, b2 = m >> 1, m & 1
            taps = np.array([b1, b2, b1_prev, b2_prev])
            outputs[state, m] = (taps @ coeff) % 4
            nxt[state, m] = m
    return Trellis(num_states=NUM_STATES, next_state=nxt, output_symbols=outputs)


def qpsk_map(s: int) -> complex:
    """Map a symbol index 0..3 onto the unit-magnitude QPSK point."""
    if s not in (0, 1, 2, 3):
        raise ValueError(f"QPSK symbol index out of range: {s}")
    return complex(QPSK[s])


def _check_frame(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame, dtype=np.int64)
    if frame.ndim != 1 or frame.size == 0:
        raise ValueError("bit frame must be a non-empty 1-D sequence")
    if frame.size % 2 != 0:
        raise ValueError("bit frame length must be even")
    if np.any((frame != 0) & (frame != 1)):
        raise ValueError("bit frame must contain only 0s and 1s")
    return frame


def encode(g: GeneratorMatrix, frame) -> np.ndarray:
    """Encode a bit frame into per-antenna QPSK streams, shape (2, T).

    Bits are consumed in pairs (b1, b2) with b1 the MSB of the symbol
    index; the encoder starts in state 0.  Output points have unit
    magnitude; power normalization happens at transmission.
    """
    frame = _check_frame(frame)
    b1 = frame[0::2]
    b2 = frame[1::2]
    b1_prev = np.concatenate(([0], b1[:-1]))
    b2_prev = np.concatenate(([0], b2[:-1]))
    coeff = g.coefficients()
    s = (
        np.outer(b1, coeff[0])
        + np.outer(b2, coeff[1])
        + np.outer(b1_prev, coeff[2])
        + np.outer(b2_prev, coeff[3])
    ) % 4
    return QPSK[s].T.copy()


def expected_observations(trellis: Trellis, h) -> np.ndarray:
    """Noise-free receive value for every branch, shape (4 states, 4 inputs).

    ``h`` is any object with complex attributes ``h1`` and ``h2``.  Includes
    the transmit power scale, so entries compare directly against received
    samples.
    """
    sym = QPSK[trellis.output_symbols]
    return (h.h1 * sym[..., 0] + h.h2 * sym[..., 1]) * POWER_SCALE


def symbols_to_bits(symbols: np.ndarray) -> np.ndarray:
    """Expand symbol indices to interleaved (b1, b2) bit arrays."""
    symbols = np.asarray(symbols, dtype=np.int64)
    bits = np.empty(symbols.shape[:-1] + (2 * symbols.shape[-1],), dtype=np.int64)
    bits[..., 0::2] = symbols >> 1
    bits[..., 1::2] = symbols & 1
    return bits


def viterbi_batch(expected: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Viterbi-decode a batch of received sequences over one branch table.

    Parameters
    ----------
    expected : (4, 4) complex array from :func:`expected_observations`.
    y : (batch, T) complex array of received samples.

    Returns
    -------
    (paths, metrics) : symbol paths (batch, T) and their Euclidean path
    metrics (batch,).  Decoding starts in state 0, the terminal state is
    free, and metric ties prefer the lower state index.
    """
    batch, steps = y.shape
    # All branch metrics up front; the time loop then only adds and reduces.
    dist = np.abs(y[:, :, None, None] - expected[None, None, :, :]) ** 2
    pm = np.full((batch, NUM_STATES), np.inf)
    pm[:, 0] = 0.0
    back = np.empty((batch, steps, NUM_STATES), dtype=np.int8)
    for t in range(steps):
        total = pm[:, :, None] + dist[:, t]
        prev = total.argmin(axis=1)
        pm = np.take_along_axis(total, prev[:, None, :], axis=1)[:, 0, :]
        back[:, t] = prev
    rows = np.arange(batch)
    state = pm.argmin(axis=1)
    metrics = pm[rows, state]
    # next_state == input, so the state entered after step t is the symbol m_t.
    paths = np.empty((batch, steps), dtype=np.int64)
    for t in range(steps - 1, -1, -1):
        paths[:, t] = state
        state = back[rows, t, state]
    return paths, metrics


def viterbi_decode(trellis: Trellis, y, h, return_metric: bool = False):
    """Maximum-likelihood sequence decoding of one received frame.

    Returns the decoded bit frame (length ``2 * len(y)``); with
    ``return_metric=True`` also returns the winning path metric.
    """
    y = np.asarray(y, dtype=complex)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("received sequence must be non-empty and 1-D")
    paths, metrics = viterbi_batch(expected_observations(trellis, h), y[None, :])
    bits = symbols_to_bits(paths)[0]
    if return_metric:
        return bits, float(metrics[0])
    return bits


def brute_force_ml_decode(trellis: Trellis, y, h, return_metric: bool = False):
    """Exhaustive ML decoding; test oracle for :func:`viterbi_decode`.

    Enumerates every input sequence (frames up to 16 bits) and returns the
    metric-minimizing one; ties go to the lexicographically smallest bit
    sequence.
    """
    y = np.asarray(y, dtype=complex)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("received sequence must be non-empty and 1-D")
    steps = y.size
    if 2 * steps > 16:
        raise ValueError("brute-force decoding is limited to 16-bit frames")
    expected = expected_observations(trellis, h)
    # Lexicographic enumeration: the first symbol varies slowest.
    candidates = np.indices((4,) * steps).reshape(steps, -1).T
    prev = np.concatenate(
        [np.zeros((candidates.shape[0], 1), dtype=np.int64), candidates[:, :-1]], axis=1
    )
    metrics = np.sum(np.abs(y[None, :] - expected[prev, candidates]) ** 2, axis=1)
    best = int(np.argmin(metrics))
    bits = symbols_to_bits(candidates[best])
    if return_metric:
        return bits, float(metrics[best])
    return bits


def bit_error_rate(tx, rx) -> float:
    """Fraction of differing positions between two equal-length bit frames."""
    tx = np.asarray(tx)
    rx = np.asarray(rx)
    if tx.shape != rx.shape:
        raise ValueError(f"frame length mismatch: {tx.shape} vs {rx.shape}")
    return float(np.mean(tx != rx))


def random_generator_matrix(rng: np.random.Generator) -> GeneratorMatrix:
    """Draw a matrix with entries i.i.d. uniform over {0,1,2,3}."""
    entries = rng.integers(0, 4, size=(4, 2))
    return GeneratorMatrix(tuple(tuple(int(e) for e in row) for row in entries))
