"""Lazy search for a representative channel, gated by the MLP.

Random channels are tried one after another; each drives a three-round
micro-competition whose features the classifier scores.  The first
accepted trial elects that channel as representative and its winner is
returned.  If the trial budget runs out, the majority verdict across all
trials is reported as a fallback, flagged as such.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelMatrix, sample_rayleigh_channel
from .codes import GeneratorMatrix
from .dataset import FEATURE_DIM, extract_features
from .mlp import MlpModel, predict
from .simulate import check_grid, compete_micro, majority_vote, make_grid

ACCEPTED = "accepted"
EXHAUSTED = "exhausted"


@dataclass(frozen=True, eq=False)
class MicrosimConfig:
    trial_budget: int = 100
    snr_db: np.ndarray = field(default_factory=make_grid)

    def __post_init__(self):
        if self.trial_budget < 1:
            raise ValueError("trial_budget must be >= 1")
        check_grid(self.snr_db)


@dataclass(frozen=True)
class MicrosimResult:
    status: str
    winner: int | None
    representative_channel: ChannelMatrix | None
    trials_used: int
    fallback_winner: int


def microsimulate(
    g0: GeneratorMatrix,
    g1: GeneratorMatrix,
    model: MlpModel,
    cfg: MicrosimConfig,
    rng: np.random.Generator,
) -> MicrosimResult:
    """Run the gated search and return its verdict.

    Deterministic given the rng seed and model.  The accepted winner is
    exactly the micro-competition winner for the elected channel.
    """
    if not model.scaler.fitted:
        raise ValueError("microsimulation needs a trained model")
    if model.layer_sizes[0] != FEATURE_DIM:
        raise ValueError(
            f"model input dimension {model.layer_sizes[0]} does not match "
            f"the {FEATURE_DIM}-number feature layout"
        )
    votes = []
    for trial in range(1, cfg.trial_budget + 1):
        h = sample_rayleigh_channel(rng)
        rec = compete_micro(g0, g1, h, cfg.snr_db, rng)
        votes.append(rec.winner)
        if predict(model, extract_features(rec)) == 1:
            return MicrosimResult(
                status=ACCEPTED,
                winner=rec.winner,
                representative_channel=h,
                trials_used=trial,
                fallback_winner=majority_vote(votes, rng),
            )
    return MicrosimResult(
        status=EXHAUSTED,
        winner=None,
        representative_channel=None,
        trials_used=cfg.trial_budget,
        fallback_winner=majority_vote(votes, rng),
    )


def decided_winner(result: MicrosimResult) -> int:
    """The verdict a caller should score: accepted winner, else fallback."""
    return result.winner if result.status == ACCEPTED else result.fallback_winner
