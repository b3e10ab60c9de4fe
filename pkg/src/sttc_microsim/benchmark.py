"""Accuracy and wall-time benchmark of microsimulation against full simulation.

Each case pits one published reference code against a set of random
opponents.  Per pair, the full-simulation verdict is the ground truth;
plain microsimulation (one random channel) and the MLP-gated search are
scored by agreement with it, and the wall time of the full and gated
competitions is recorded.  Timing wraps the competition calls only.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .channel import sample_rayleigh_channel
from .codes import GeneratorMatrix
from .dataset import random_opponents
from .microsim import ACCEPTED, MicrosimConfig, decided_winner, microsimulate
from .mlp import MlpModel
from .simulate import check_grid, compete_full, compete_micro, make_grid

# Reference codes used only for generating training data; the benchmark
# cases file holds the seven held-out test codes.
TRAINING_CASES = (
    ("Tarokh", GeneratorMatrix.from_text("[0 0 2 1; 2 1 0 0]")),
    ("Baro", GeneratorMatrix.from_text("[2 0 1 3; 2 2 0 1]")),
)

DEFAULT_OPPONENTS = 20
DEFAULT_GT_ITERATIONS = 20


def load_cases(path=None) -> list[tuple[str, GeneratorMatrix]]:
    """Named benchmark cases from a text file (``name: [matrix]`` lines).

    Without a path, the seven bundled reference cases are used.
    """
    if path is None:
        text = (resources.files("sttc_microsim") / "data" / "benchmark_cases.txt").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    cases = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ValueError(f"cases line {lineno}: expected 'name: [matrix]'")
        name, matrix = line.split(":", 1)
        cases.append((name.strip(), GeneratorMatrix.from_text(matrix)))
    if not cases:
        raise ValueError("cases file contains no cases")
    return cases


@dataclass
class CaseResult:
    name: str
    n_opponents: int
    accuracy_micro: float
    accuracy_mlp: float
    accuracy_improvement_pct: float | None
    mean_full_seconds: float
    mean_mlp_seconds: float
    time_improvement_pct: float
    accepted: int
    exhausted: int
    mean_trials_used: float
    mean_accepted_seconds: float | None
    mean_exhausted_seconds: float | None
    full_ties: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class BenchmarkReport:
    cases: list
    summary: dict
    settings: dict
    sanity: dict | None = None

    def to_dict(self) -> dict:
        return {
            "cases": [c.to_dict() for c in self.cases],
            "summary": self.summary,
            "settings": self.settings,
            "sanity": self.sanity,
        }


def _improvement_gain(old: float, new: float) -> float | None:
    return None if old == 0 else (new - old) / old * 100.0


def _improvement_drop(old: float, new: float) -> float | None:
    return None if old == 0 else (old - new) / old * 100.0


def _stats(values) -> dict:
    arr = np.asarray(values, dtype=float)
    s = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return {"mean": float(arr.mean()), "s": s, "s2": s * s}


def run_benchmark(
    cases,
    model: MlpModel,
    n_opponents: int = DEFAULT_OPPONENTS,
    gt_iterations: int = DEFAULT_GT_ITERATIONS,
    trials: int = 100,
    grid=None,
    frame_bits: int = 260,
    seed: int = 0,
    sanity: bool = False,
) -> BenchmarkReport:
    """Score every case and aggregate mean / s / s^2 rows.

    Every (case, opponent) pair consumes its own seeded rng stream, so
    results are independent of evaluation order.
    """
    grid = make_grid() if grid is None else check_grid(grid)
    cfg = MicrosimConfig(trial_budget=trials, snr_db=grid)
    case_results: list[CaseResult] = []
    sanity_agree = 0
    sanity_total = 0
    for ci, (name, g_case) in enumerate(cases):
        opp_rng = np.random.default_rng(np.random.SeedSequence([seed, ci]))
        opponents = random_opponents(g_case, n_opponents, opp_rng)
        micro_hits = 0
        mlp_hits = 0
        full_times = []
        mlp_times = []
        accepted_times = []
        exhausted_times = []
        trials_used = []
        ties = 0
        for oi, opp in enumerate(opponents):
            rng = np.random.default_rng(np.random.SeedSequence([seed, ci, oi]))
            t0 = time.perf_counter()
            full = compete_full(g_case, opp, grid, gt_iterations, rng, frame_bits)
            full_times.append(time.perf_counter() - t0)
            if full.metrics0 == full.metrics1:
                ties += 1
            h = sample_rayleigh_channel(rng)
            micro_winner = compete_micro(g_case, opp, h, grid, rng).winner
            t0 = time.perf_counter()
            result = microsimulate(g_case, opp, model, cfg, rng)
            elapsed = time.perf_counter() - t0
            mlp_times.append(elapsed)
            (accepted_times if result.status == ACCEPTED else exhausted_times).append(elapsed)
            trials_used.append(result.trials_used)
            micro_hits += int(micro_winner == full.winner)
            mlp_hits += int(decided_winner(result) == full.winner)
            if sanity:
                rng_replay = np.random.default_rng(np.random.SeedSequence([seed, ci, oi]))
                replay = compete_full(g_case, opp, grid, gt_iterations, rng_replay, frame_bits)
                sanity_agree += int(replay.winner == full.winner)
                sanity_total += 1
        acc_micro = micro_hits / n_opponents
        acc_mlp = mlp_hits / n_opponents
        mean_full = float(np.mean(full_times))
        mean_mlp = float(np.mean(mlp_times))
        case_results.append(
            CaseResult(
                name=name,
                n_opponents=n_opponents,
                accuracy_micro=acc_micro,
                accuracy_mlp=acc_mlp,
                accuracy_improvement_pct=_improvement_gain(acc_micro, acc_mlp),
                mean_full_seconds=mean_full,
                mean_mlp_seconds=mean_mlp,
                time_improvement_pct=_improvement_drop(mean_full, mean_mlp),
                accepted=len(accepted_times),
                exhausted=len(exhausted_times),
                mean_trials_used=float(np.mean(trials_used)),
                mean_accepted_seconds=float(np.mean(accepted_times)) if accepted_times else None,
                mean_exhausted_seconds=float(np.mean(exhausted_times)) if exhausted_times else None,
                full_ties=ties,
            )
        )
    acc_improvements = [
        c.accuracy_improvement_pct for c in case_results if c.accuracy_improvement_pct is not None
    ]
    time_improvements = [
        c.time_improvement_pct for c in case_results if c.time_improvement_pct is not None
    ]
    summary = {
        "accuracy_micro": _stats([c.accuracy_micro for c in case_results]),
        "accuracy_mlp": _stats([c.accuracy_mlp for c in case_results]),
        "full_seconds": _stats([c.mean_full_seconds for c in case_results]),
        "mlp_seconds": _stats([c.mean_mlp_seconds for c in case_results]),
        "accuracy_improvement_pct": float(np.mean(acc_improvements)) if acc_improvements else None,
        "time_improvement_pct": float(np.mean(time_improvements)) if time_improvements else None,
    }
    settings = {
        "n_opponents": n_opponents,
        "gt_iterations": gt_iterations,
        "trials": trials,
        "frame_bits": frame_bits,
        "seed": seed,
        "snr_db": [float(v) for v in grid],
    }
    sanity_block = None
    if sanity:
        sanity_block = {
            "agreement": sanity_agree / sanity_total if sanity_total else None,
            "full_ties": int(sum(c.full_ties for c in case_results)),
        }
    return BenchmarkReport(case_results, summary, settings, sanity_block)


def _fmt(value, width, digits=4) -> str:
    if value is None:
        return "-".rjust(width)
    if isinstance(value, float) and not math.isfinite(value):
        return "inf".rjust(width)
    return f"{value:.{digits}f}".rjust(width)


def render_tables(report: BenchmarkReport) -> str:
    """Two aligned text tables: accuracy and wall time per case."""
    name_w = max(len("MEAN"), max(len(c.name) for c in report.cases))
    lines = ["ACCURACY", f"{'CASE'.ljust(name_w)}  {'MICRO':>8}  {'MICRO+MLP':>9}  {'IMPROVEMENT(%)':>14}"]
    for c in report.cases:
        lines.append(
            f"{c.name.ljust(name_w)}  {_fmt(c.accuracy_micro, 8)}  "
            f"{_fmt(c.accuracy_mlp, 9)}  {_fmt(c.accuracy_improvement_pct, 14, 2)}"
        )
    s = report.summary
    lines.append(
        f"{'MEAN'.ljust(name_w)}  {_fmt(s['accuracy_micro']['mean'], 8)}  "
        f"{_fmt(s['accuracy_mlp']['mean'], 9)}  {_fmt(s['accuracy_improvement_pct'], 14, 2)}"
    )
    lines.append(
        f"{'S'.ljust(name_w)}  {_fmt(s['accuracy_micro']['s'], 8)}  "
        f"{_fmt(s['accuracy_mlp']['s'], 9)}  {'-':>14}"
    )
    lines.append(
        f"{'S^2'.ljust(name_w)}  {_fmt(s['accuracy_micro']['s2'], 8)}  "
        f"{_fmt(s['accuracy_mlp']['s2'], 9)}  {'-':>14}"
    )
    lines.append("")
    lines.append("WALL TIME")
    lines.append(
        f"{'CASE'.ljust(name_w)}  {'FULL-SIM(S)':>11}  {'MICRO+MLP(S)':>12}  {'IMPROVEMENT(%)':>14}"
    )
    for c in report.cases:
        lines.append(
            f"{c.name.ljust(name_w)}  {_fmt(c.mean_full_seconds, 11)}  "
            f"{_fmt(c.mean_mlp_seconds, 12)}  {_fmt(c.time_improvement_pct, 14, 2)}"
        )
    lines.append(
        f"{'MEAN'.ljust(name_w)}  {_fmt(s['full_seconds']['mean'], 11)}  "
        f"{_fmt(s['mlp_seconds']['mean'], 12)}  {_fmt(s['time_improvement_pct'], 14, 2)}"
    )
    lines.append(
        f"{'S'.ljust(name_w)}  {_fmt(s['full_seconds']['s'], 11)}  "
        f"{_fmt(s['mlp_seconds']['s'], 12)}  {'-':>14}"
    )
    lines.append(
        f"{'S^2'.ljust(name_w)}  {_fmt(s['full_seconds']['s2'], 11)}  "
        f"{_fmt(s['mlp_seconds']['s2'], 12)}  {'-':>14}"
    )
    if report.sanity is not None:
        lines.append("")
        lines.append(
            f"SANITY replayed ground truth agreement: {report.sanity['agreement']}, "
            f"tie-broken full competitions: {report.sanity['full_ties']}"
        )
    return "\n".join(lines) + "\n"
