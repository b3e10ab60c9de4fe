"""Feature vectors, labeled training data, and CSV persistence.

A competition record flattens into 26 numbers: the two generator matrices
(8 entries each, row-major), the channel as four reals, then the per-code
averages over the three subcompetitions of noise power, mean BER, and the
SNR where the BER reached zero (with +inf mapped to one grid step past the
top of the grid so every feature stays finite).  The label marks whether
the micro verdict agreed with the full-simulation verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import GeneratorMatrix, random_generator_matrix
from .simulate import (
    CompetitionRecord,
    check_grid,
    compete_full,
    compete_micro,
    make_grid,
)
from .channel import sample_rayleigh_channel

FEATURE_NAMES = (
    [f"g0_{i}" for i in range(8)]
    + [f"g1_{i}" for i in range(8)]
    + ["h_re1", "h_im1", "h_re2", "h_im2"]
    + ["n0", "n1", "b0", "b1", "z0", "z1"]
)
FEATURE_DIM = len(FEATURE_NAMES)
CSV_HEADER = FEATURE_NAMES + ["label"]


@dataclass(frozen=True)
class LabeledRow:
    features: np.ndarray
    label: int

    def __post_init__(self):
        if self.features.shape != (FEATURE_DIM,):
            raise ValueError(f"feature vector must have length {FEATURE_DIM}")
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")


def zero_snr_sentinel(grid) -> float:
    """Finite stand-in for an unreached BER zero: grid max plus one step."""
    grid = check_grid(grid)
    step = float(grid[-1] - grid[-2]) if grid.size > 1 else 2.0
    return float(grid[-1]) + step


def extract_features(rec: CompetitionRecord) -> np.ndarray:
    """Deterministic 26-number flattening of a complete competition record."""
    if len(rec.metrics0) != 3 or len(rec.metrics1) != 3:
        raise ValueError("competition record must hold three subcompetitions")
    sentinel = zero_snr_sentinel(rec.grid)

    def z_mean(triples):
        return float(
            np.mean([t.ber_zero if math.isfinite(t.ber_zero) else sentinel for t in triples])
        )

    def b_mean(triples):
        return float(np.mean([t.ber_ave for t in triples]))

    values = (
        list(rec.g0.flat())
        + list(rec.g1.flat())
        + list(rec.h.as_reals())
        + [
            rec.noise_power0,
            rec.noise_power1,
            b_mean(rec.metrics0),
            b_mean(rec.metrics1),
            z_mean(rec.metrics0),
            z_mean(rec.metrics1),
        ]
    )
    return np.array(values, dtype=float)


def random_opponents(
    g_opt: GeneratorMatrix, n: int, rng: np.random.Generator
) -> list[GeneratorMatrix]:
    """Draw n unique random matrices, all distinct from ``g_opt``."""
    seen = {g_opt}
    out: list[GeneratorMatrix] = []
    while len(out) < n:
        g = random_generator_matrix(rng)
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out


def prepare_dataset(
    g_opt: GeneratorMatrix,
    opponents: list[GeneratorMatrix],
    reps: int = 100,
    grid=None,
    iterations: int = 100,
    rng: np.random.Generator | None = None,
    progress=None,
) -> list[LabeledRow]:
    """Labeled rows for one reference code against a set of opponents.

    Per opponent the full-simulation verdict is computed once, then ``reps``
    micro-competitions on fresh channels are labeled by agreement with it.
    Each opponent consumes its own child rng stream, so the output does not
    depend on evaluation order.
    """
    grid = make_grid() if grid is None else check_grid(grid)
    if rng is None:
        raise ValueError("an explicitly seeded rng is required")
    if len(set(opponents)) != len(opponents):
        raise ValueError("opponents must be unique")
    if g_opt in opponents:
        raise ValueError("opponents must be distinct from the reference code")
    seeds = rng.integers(0, 2**63, size=len(opponents))
    rows: list[LabeledRow] = []
    for idx, (opp, seed) in enumerate(zip(opponents, seeds)):
        child = np.random.default_rng(int(seed))
        winner_sim = compete_full(g_opt, opp, grid, iterations, child).winner
        for _ in range(reps):
            h = sample_rayleigh_channel(child)
            rec = compete_micro(g_opt, opp, h, grid, child)
            rows.append(LabeledRow(extract_features(rec), int(rec.winner == winner_sim)))
        if progress is not None:
            progress(idx + 1, len(opponents))
    return rows


def split_train_test(
    rows: list[LabeledRow], fraction: float = 0.7, rng: np.random.Generator | None = None
) -> tuple[list[LabeledRow], list[LabeledRow]]:
    """Uniform shuffle, then split at ceil(fraction * n)."""
    if len(rows) < 2:
        raise ValueError("need at least two rows to split")
    if rng is None:
        raise ValueError("an explicitly seeded rng is required")
    order = rng.permutation(len(rows))
    cut = math.ceil(fraction * len(rows))
    train = [rows[i] for i in order[:cut]]
    test = [rows[i] for i in order[cut:]]
    return train, test


def rows_to_arrays(rows: list[LabeledRow]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([r.features for r in rows], dtype=float)
    y = np.array([r.label for r in rows], dtype=float)
    return x, y


def rows_to_lists(rows: list[LabeledRow]) -> list[list[float]]:
    return [[float(v) for v in r.features] + [float(r.label)] for r in rows]


def rows_from_lists(data: list[list[float]]) -> list[LabeledRow]:
    rows = []
    for i, values in enumerate(data):
        if len(values) != FEATURE_DIM + 1:
            raise ValueError(f"row {i}: expected {FEATURE_DIM + 1} values, got {len(values)}")
        label = values[-1]
        if label not in (0.0, 1.0):
            raise ValueError(f"row {i}: label must be 0 or 1, got {label}")
        rows.append(LabeledRow(np.array(values[:-1], dtype=float), int(label)))
    return rows


def write_csv(rows: list[LabeledRow], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(csv_text(rows))


def csv_text(rows: list[LabeledRow]) -> str:
    lines = [",".join(CSV_HEADER)]
    for r in rows:
        lines.append(",".join(repr(float(v)) for v in r.features) + f",{r.label}")
    return "\n".join(lines) + "\n"


def read_csv(path) -> list[LabeledRow]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_csv(text, name=str(path))


def parse_csv(text: str, name: str = "<string>") -> list[LabeledRow]:
    """Parse a dataset CSV; an entirely empty file is an empty dataset."""
    lines = [ln for ln in text.splitlines()]
    if not lines or (len(lines) == 1 and not lines[0].strip()):
        return []
    if lines[0].split(",") != CSV_HEADER:
        raise ValueError(f"{name}: header mismatch")
    rows: list[LabeledRow] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(CSV_HEADER):
            raise ValueError(
                f"{name}:{lineno}: expected {len(CSV_HEADER)} columns, got {len(parts)}"
            )
        try:
            features = np.array([float(p) for p in parts[:-1]], dtype=float)
            label = int(parts[-1])
        except ValueError:
            raise ValueError(f"{name}:{lineno}: non-numeric value") from None
        if label not in (0, 1):
            raise ValueError(f"{name}:{lineno}: label must be 0 or 1")
        if not np.all(np.isfinite(features)):
            raise ValueError(f"{name}:{lineno}: non-finite feature value")
        rows.append(LabeledRow(features, label))
    return rows
