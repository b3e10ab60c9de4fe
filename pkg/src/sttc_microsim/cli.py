"""Command-line client of the service.

Runs against an in-process copy of the FastAPI app unless ``--server``
points at a remote instance; either way requests and responses go through
the same HTTP schemas, and files are read and written on the client side.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract here is exit code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class ServiceClient:
    """Minimal JSON-over-HTTP client; in-process ASGI unless a URL is given."""

    def __init__(self, server: str | None = None):
        self._client = None
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)

    def post(self, path: str, payload: dict) -> dict:
        if self._client is not None:
            resp = self._client.post(path, json=payload)
        else:
            resp = _asgi_post(path, payload)
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            if resp.status_code < 500:
                raise UsageError(str(detail))
            raise RuntimeError(str(detail))
        return resp.json()

    def close(self):
        if self._client is not None:
            self._client.close()


def _asgi_post(path: str, payload: dict):
    import asyncio

    import httpx

    from .service.app import app

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://service") as client:
            return await client.post(path, json=payload, timeout=None)

    return asyncio.run(go())


def _check_matrix(text: str) -> str:
    from .codes import GeneratorMatrix

    try:
        GeneratorMatrix.from_text(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return text


def _write_output(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _json_text(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _load_model_file(path: str) -> dict:
    from .mlp import load_model, model_to_doc

    try:
        return model_to_doc(load_model(path))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot load model {path}: {exc}") from None


def cmd_simulate(args, client: ServiceClient):
    from .simulate import BerCurve, curve_to_csv

    payload = {
        "generator": _check_matrix(args.g),
        "mode": "micro" if args.micro else "full",
        "snr": args.snr,
        "seed": args.seed,
        "iterations": args.iterations,
        "frame_bits": args.frame_bits,
        "channel_seed": args.channel_seed,
    }
    data = client.post("/simulate", payload)
    if args.format == "json":
        _write_output(_json_text(data), args.out)
        return
    curve = BerCurve(
        np.array([p["snr_db"] for p in data["points"]]),
        np.array([p["ber"] for p in data["points"]]),
    )
    _write_output(curve_to_csv(curve), args.out)


def cmd_prepare_data(args, client: ServiceClient):
    from .dataset import rows_from_lists, write_csv

    payload = {
        "g_opt": _check_matrix(args.g_opt),
        "n_opponents": args.opponents,
        "reps": args.reps,
        "iterations": args.iterations,
        "snr": args.snr,
        "seed": args.seed,
    }
    data = client.post("/prepare-data", payload)
    write_csv(rows_from_lists(data["rows"]), args.out)
    logging.getLogger(__name__).info("wrote %d rows to %s", len(data["rows"]), args.out)


def cmd_train(args, client: ServiceClient):
    from .dataset import read_csv, rows_to_lists
    from .mlp import model_from_doc, save_model

    rows = []
    for path in args.datasets:
        try:
            rows.extend(read_csv(path))
        except OSError as exc:
            raise UsageError(f"cannot read dataset {path}: {exc}") from None
    payload = {
        "rows": rows_to_lists(rows),
        "split_fraction": args.split,
        "max_iter": args.max_iter,
        "seed": args.seed,
    }
    data = client.post("/train", payload)
    save_model(model_from_doc(data["model"]), args.model_out)
    sys.stdout.write(_json_text(data["report"]))


def cmd_compete(args, client: ServiceClient):
    if args.mode == "micro-mlp" and args.model is None:
        raise UsageError("--model is required for mode micro-mlp")
    payload = {
        "g0": _check_matrix(args.g0),
        "g1": _check_matrix(args.g1),
        "mode": args.mode,
        "snr": args.snr,
        "seed": args.seed,
        "iterations": args.iterations,
        "trials": args.trials,
        "model": _load_model_file(args.model) if args.model else None,
    }
    data = client.post("/compete", payload)
    _write_output(_json_text(data), args.out)


def cmd_benchmark(args, client: ServiceClient):
    payload = {
        "model": _load_model_file(args.model),
        "cases": None,
        "n_opponents": args.opponents,
        "gt_iterations": args.gt_iterations,
        "trials": args.trials,
        "snr": args.snr,
        "seed": args.seed,
        "sanity": args.sanity,
    }
    if args.cases:
        from .benchmark import load_cases

        try:
            cases = load_cases(args.cases)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot load cases {args.cases}: {exc}") from None
        payload["cases"] = [{"name": n, "generator": g.to_text()} for n, g in cases]
    data = client.post("/benchmark", payload)
    sys.stdout.write(data["tables"])
    if args.out:
        _write_output(_json_text(data["report"]), args.out)


def cmd_serve(args, _client=None):
    import uvicorn

    uvicorn.run("sttc_microsim.service.app:app", host=args.host, port=args.port)


def _add_common(p, snr=True, seed=True):
    if seed:
        p.add_argument("--seed", type=int, default=0, help="rng seed (default 0)")
    if snr:
        p.add_argument("--snr", default="0:2:24", help="SNR grid min:step:max in dB")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sttc-microsim", description=__doc__.split("\n")[0])
    parser.add_argument("--server", default=None, help="URL of a running service "
                        "(default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="emit a BER-vs-SNR curve as CSV")
    p.add_argument("--g", required=True, help='generator matrix, e.g. "[0 0 2 1; 2 1 0 0]"')
    p.add_argument("--micro", action="store_true", help="single-pass microsimulation curve")
    p.add_argument("--channel-seed", type=int, default=None,
                   help="separate seed for the micro-mode channel draw")
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--frame-bits", type=int, default=260)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("prepare-data", help="generate a labeled training dataset CSV")
    p.add_argument("--g-opt", required=True, help="reference generator matrix")
    p.add_argument("--opponents", type=int, default=100)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--iterations", type=int, default=100,
                   help="full-simulation iterations for the ground truth")
    p.add_argument("--out", required=True, help="dataset CSV path")
    _add_common(p)
    p.set_defaults(handler=cmd_prepare_data)

    p = sub.add_parser("train", help="train the classifier on dataset CSVs")
    p.add_argument("datasets", nargs="+", help="dataset CSV paths (concatenated)")
    p.add_argument("--model-out", required=True, help="where to save the trained model")
    p.add_argument("--split", type=float, default=0.7, help="train fraction (default 0.7)")
    p.add_argument("--max-iter", type=int, default=1000)
    _add_common(p, snr=False)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("compete", help="decide which of two matrices is better")
    p.add_argument("--g0", required=True)
    p.add_argument("--g1", required=True)
    p.add_argument("--mode", choices=["full", "micro", "micro-mlp"], default="full")
    p.add_argument("--model", default=None, help="trained model (micro-mlp mode)")
    p.add_argument("--iterations", type=int, default=100, help="full-mode iterations")
    p.add_argument("--trials", type=int, default=100, help="micro-mlp trial budget")
    p.add_argument("--out", default=None, help="verdict JSON path (default stdout)")
    _add_common(p)
    p.set_defaults(handler=cmd_compete)

    p = sub.add_parser("benchmark", help="accuracy/time benchmark vs full simulation")
    p.add_argument("--model", required=True, help="trained model path")
    p.add_argument("--cases", default=None, help="cases file (default: bundled seven)")
    p.add_argument("--opponents", type=int, default=20)
    p.add_argument("--gt-iterations", type=int, default=20)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", default=None, help="report JSON path")
    p.add_argument("--sanity", action="store_true",
                   help="replay the ground truth and report agreement/ties")
    _add_common(p)
    p.set_defaults(handler=cmd_benchmark)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(message)s", stream=sys.stderr)
    logging.getLogger("sttc_microsim").setLevel(logging.INFO)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.handler is cmd_serve:
        cmd_serve(args)
        return 0
    client = ServiceClient(args.server)
    try:
        args.handler(args, client)
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # process boundary: report and map to exit code 2
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
