"""Pydantic request/response models of the HTTP API.

Generator matrices travel as their transposed text form (e.g.
``"[0 0 2 1; 2 1 0 0]"``), SNR grids as ``"min:step:max"`` strings, and
trained models as their self-describing JSON documents.  Infinite
ber_zero values are exported as the finite sentinel (grid max plus one
step) so every payload is strict JSON.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str


class CurvePoint(BaseModel):
    snr_db: float
    ber: float


class SimulateRequest(BaseModel):
    generator: str
    mode: Literal["full", "micro"] = "full"
    snr: str = "0:2:24"
    seed: int = Field(default=0, ge=0)
    iterations: int = Field(default=100, ge=1)
    frame_bits: int = Field(default=260, ge=2)
    channel_seed: Optional[int] = Field(default=None, ge=0)


class SimulateResponse(BaseModel):
    mode: str
    seed: int
    points: list[CurvePoint]


class ChannelGains(BaseModel):
    h1_re: float
    h1_im: float
    h2_re: float
    h2_im: float


class MetricTripleOut(BaseModel):
    ber_zero: float
    ber_ave: float
    ber_min: float


class CompeteRequest(BaseModel):
    g0: str
    g1: str
    mode: Literal["full", "micro", "micro-mlp"] = "full"
    snr: str = "0:2:24"
    seed: int = Field(default=0, ge=0)
    iterations: int = Field(default=100, ge=1)
    trials: int = Field(default=100, ge=1)
    model: Optional[dict] = None


class CompeteResponse(BaseModel):
    winner: int
    winner_matrix: str
    mode: str
    seed: int
    timestamp: str
    elapsed_seconds: float
    metrics0: Optional[MetricTripleOut] = None
    metrics1: Optional[MetricTripleOut] = None
    tally: Optional[list[int]] = None
    status: Optional[str] = None
    trials_used: Optional[int] = None
    fallback_winner: Optional[int] = None
    representative_channel: Optional[ChannelGains] = None


class PrepareDataRequest(BaseModel):
    g_opt: str
    n_opponents: int = Field(default=100, ge=1)
    reps: int = Field(default=100, ge=1)
    iterations: int = Field(default=100, ge=1)
    snr: str = "0:2:24"
    seed: int = Field(default=0, ge=0)


class PrepareDataResponse(BaseModel):
    header: list[str]
    rows: list[list[float]]


class TrainRequest(BaseModel):
    rows: list[list[float]]
    split_fraction: float = Field(default=0.7, gt=0.0, lt=1.0)
    max_iter: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)


class TrainReportOut(BaseModel):
    iterations: int
    final_loss: float
    train_accuracy: float
    test_accuracy: Optional[float]
    converged: bool
    n_train: int
    n_test: int


class TrainResponse(BaseModel):
    report: TrainReportOut
    model: dict


class BenchmarkCaseIn(BaseModel):
    name: str
    generator: str


class BenchmarkRequest(BaseModel):
    model: dict
    cases: Optional[list[BenchmarkCaseIn]] = None
    n_opponents: int = Field(default=20, ge=1)
    gt_iterations: int = Field(default=20, ge=1)
    trials: int = Field(default=100, ge=1)
    snr: str = "0:2:24"
    seed: int = Field(default=0, ge=0)
    sanity: bool = False


class BenchmarkResponse(BaseModel):
    report: dict
    tables: str
