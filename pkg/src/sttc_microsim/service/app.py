"""FastAPI service wrapping the core package.

Every endpoint is stateless: requests carry all inputs (seeds included),
responses carry all outputs, and the caller owns persistence.  Timing
fields wrap the competition calls only.
"""

from __future__ import annotations

import logging
import math
import time
from datetime import datetime, timezone

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import benchmark as bench
from ..channel import sample_rayleigh_channel
from ..codes import GeneratorMatrix
from ..dataset import (
    CSV_HEADER,
    prepare_dataset,
    random_opponents,
    rows_from_lists,
    rows_to_lists,
    split_train_test,
    zero_snr_sentinel,
)
from ..microsim import MicrosimConfig, decided_winner, microsimulate
from ..mlp import init_model, model_from_doc, model_to_doc, train
from ..simulate import (
    compete_full,
    compete_micro,
    parse_grid_spec,
    run_ber_curve_full,
    run_ber_curve_micro,
)
from .schemas import (
    BenchmarkRequest,
    BenchmarkResponse,
    ChannelGains,
    CompeteRequest,
    CompeteResponse,
    CurvePoint,
    HealthResponse,
    MetricTripleOut,
    PrepareDataRequest,
    PrepareDataResponse,
    SimulateRequest,
    SimulateResponse,
    TrainReportOut,
    TrainRequest,
    TrainResponse,
)

logger = logging.getLogger("sttc_microsim.service")


def _parse_matrix(text: str) -> GeneratorMatrix:
    try:
        return GeneratorMatrix.from_text(text)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


def _parse_grid(spec: str) -> np.ndarray:
    try:
        return parse_grid_spec(spec)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


def _load_model_doc(doc: dict | None):
    if doc is None:
        raise HTTPException(status_code=422, detail="a trained model document is required")
    try:
        return model_from_doc(doc)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


def _finite_triple(triple, grid) -> MetricTripleOut:
    sentinel = zero_snr_sentinel(grid)
    zero = triple.ber_zero if math.isfinite(triple.ber_zero) else sentinel
    return MetricTripleOut(ber_zero=zero, ber_ave=triple.ber_ave, ber_min=triple.ber_min)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def create_app() -> FastAPI:
    app = FastAPI(
        title="sttc-microsim",
        description="Space-time trellis code comparison by simulation or "
        "MLP-gated microsimulation",
        version="0.1.0",
    )

    @app.get("/healthz", response_model=HealthResponse)
    def healthz():
        return HealthResponse(status="ok")

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest):
        g = _parse_matrix(req.generator)
        grid = _parse_grid(req.snr)
        rng = np.random.default_rng(req.seed)
        if req.mode == "micro":
            channel_rng = (
                np.random.default_rng(req.channel_seed) if req.channel_seed is not None else rng
            )
            h = sample_rayleigh_channel(channel_rng)
            curve, _ = run_ber_curve_micro(g, h, grid, rng)
        else:
            if req.frame_bits % 2 != 0:
                raise HTTPException(status_code=422, detail="frame_bits must be even")
            curve = run_ber_curve_full(g, grid, req.iterations, req.frame_bits, rng)
        points = [
            CurvePoint(snr_db=float(s), ber=float(b)) for s, b in zip(curve.snr_db, curve.ber)
        ]
        return SimulateResponse(mode=req.mode, seed=req.seed, points=points)

    @app.post("/compete", response_model=CompeteResponse, response_model_exclude_none=True)
    def compete(req: CompeteRequest):
        g0 = _parse_matrix(req.g0)
        g1 = _parse_matrix(req.g1)
        grid = _parse_grid(req.snr)
        rng = np.random.default_rng(req.seed)
        common = dict(mode=req.mode, seed=req.seed, timestamp=_utc_now())
        if req.mode == "full":
            start = time.perf_counter()
            result = compete_full(g0, g1, grid, req.iterations, rng)
            elapsed = time.perf_counter() - start
            return CompeteResponse(
                winner=result.winner,
                winner_matrix=(g0 if result.winner == 0 else g1).to_text(),
                elapsed_seconds=elapsed,
                metrics0=_finite_triple(result.metrics0, grid),
                metrics1=_finite_triple(result.metrics1, grid),
                **common,
            )
        if req.mode == "micro":
            start = time.perf_counter()
            h = sample_rayleigh_channel(rng)
            rec = compete_micro(g0, g1, h, grid, rng)
            elapsed = time.perf_counter() - start
            return CompeteResponse(
                winner=rec.winner,
                winner_matrix=(g0 if rec.winner == 0 else g1).to_text(),
                elapsed_seconds=elapsed,
                tally=list(rec.tally),
                **common,
            )
        model = _load_model_doc(req.model)
        cfg = MicrosimConfig(trial_budget=req.trials, snr_db=grid)
        try:
            start = time.perf_counter()
            result = microsimulate(g0, g1, model, cfg, rng)
            elapsed = time.perf_counter() - start
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        winner = decided_winner(result)
        rep = None
        if result.representative_channel is not None:
            h = result.representative_channel
            rep = ChannelGains(
                h1_re=h.h1.real, h1_im=h.h1.imag, h2_re=h.h2.real, h2_im=h.h2.imag
            )
        return CompeteResponse(
            winner=winner,
            winner_matrix=(g0 if winner == 0 else g1).to_text(),
            elapsed_seconds=elapsed,
            status=result.status,
            trials_used=result.trials_used,
            fallback_winner=result.fallback_winner,
            representative_channel=rep,
            **common,
        )

    @app.post("/prepare-data", response_model=PrepareDataResponse)
    def prepare_data(req: PrepareDataRequest):
        g_opt = _parse_matrix(req.g_opt)
        grid = _parse_grid(req.snr)
        rng = np.random.default_rng(req.seed)
        opponents = random_opponents(g_opt, req.n_opponents, rng)
        rows = prepare_dataset(
            g_opt,
            opponents,
            reps=req.reps,
            grid=grid,
            iterations=req.iterations,
            rng=rng,
            progress=lambda done, total: logger.info("dataset: opponent %d/%d", done, total),
        )
        return PrepareDataResponse(header=list(CSV_HEADER), rows=rows_to_lists(rows))

    @app.post("/train", response_model=TrainResponse)
    def train_model(req: TrainRequest):
        try:
            rows = rows_from_lists(req.rows)
            rng = np.random.default_rng(req.seed)
            train_rows, test_rows = split_train_test(rows, req.split_fraction, rng)
            model = init_model(rows[0].features.size, rng)
            trained, report = train(model, train_rows, max_iter=req.max_iter, eval_rows=test_rows)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        out = TrainReportOut(
            n_train=len(train_rows), n_test=len(test_rows), **report.to_dict()
        )
        return TrainResponse(report=out, model=model_to_doc(trained))

    @app.post("/benchmark", response_model=BenchmarkResponse)
    def run_benchmark(req: BenchmarkRequest):
        model = _load_model_doc(req.model)
        grid = _parse_grid(req.snr)
        if req.cases is None:
            cases = bench.load_cases()
        else:
            cases = [(c.name, _parse_matrix(c.generator)) for c in req.cases]
        report = bench.run_benchmark(
            cases,
            model,
            n_opponents=req.n_opponents,
            gt_iterations=req.gt_iterations,
            trials=req.trials,
            grid=grid,
            seed=req.seed,
            sanity=req.sanity,
        )
        return BenchmarkResponse(report=report.to_dict(), tables=bench.render_tables(report))

    return app


app = create_app()
