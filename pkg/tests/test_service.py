import asyncio

import httpx
import numpy as np

from sttc_microsim.mlp import model_to_doc
from sttc_microsim.service.app import create_app
from tests.conftest import make_stub_model

HONG = "[0 2 2 3; 2 2 1 2]"
HONG_OPPONENT = "[2 2 0 1; 0 0 2 2]"
TAROKH = "[0 0 2 1; 2 1 0 0]"

app = create_app()


def request(method: str, path: str, payload=None) -> httpx.Response:
    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://test") as client:
            if method == "get":
                return await client.get(path)
            return await client.post(path, json=payload, timeout=None)

    return asyncio.run(go())


def post(path, payload):
    return request("post", path, payload)


def test_healthz():
    resp = request("get", "/healthz")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


class TestSimulate:
    def test_full_curve(self):
        resp = post("/simulate", {"generator": TAROKH, "mode": "full", "seed": 1, "iterations": 3})
        assert resp.status_code == 200
        points = resp.json()["points"]
        assert len(points) == 13
        assert points[0]["snr_db"] == 0.0
        assert all(0.0 <= p["ber"] <= 1.0 for p in points)

    def test_micro_curve_with_channel_seed(self):
        req = {"generator": HONG, "mode": "micro", "seed": 7, "channel_seed": 3}
        a = post("/simulate", req)
        b = post("/simulate", req)
        assert a.status_code == 200
        assert a.json() == b.json()

    def test_custom_grid(self):
        resp = post("/simulate", {"generator": HONG, "mode": "micro", "snr": "0:4:12", "seed": 2})
        assert [p["snr_db"] for p in resp.json()["points"]] == [0.0, 4.0, 8.0, 12.0]

    def test_bad_matrix_is_422(self):
        resp = post("/simulate", {"generator": "[nope]", "mode": "micro"})
        assert resp.status_code == 422

    def test_bad_grid_is_422(self):
        resp = post("/simulate", {"generator": HONG, "snr": "0:0:24"})
        assert resp.status_code == 422


class TestCompete:
    def test_full_mode(self):
        resp = post(
            "/compete",
            {"g0": HONG, "g1": HONG_OPPONENT, "mode": "full", "seed": 5, "iterations": 50},
        )
        assert resp.status_code == 200
        data = resp.json()
        assert data["winner"] == 0
        assert data["winner_matrix"] == HONG
        assert "metrics0" in data and "metrics1" in data
        assert data["elapsed_seconds"] > 0
        assert "timestamp" in data and data["seed"] == 5

    def test_micro_mode_has_tally(self):
        resp = post("/compete", {"g0": HONG, "g1": HONG_OPPONENT, "mode": "micro", "seed": 5})
        data = resp.json()
        assert sum(data["tally"]) == 3
        assert "status" not in data  # None fields excluded

    def test_micro_mlp_mode(self):
        doc = model_to_doc(make_stub_model(0.0))
        resp = post(
            "/compete",
            {"g0": HONG, "g1": HONG_OPPONENT, "mode": "micro-mlp", "seed": 5, "model": doc},
        )
        data = resp.json()
        assert data["status"] == "accepted"
        assert data["trials_used"] == 1
        assert "representative_channel" in data

    def test_micro_mlp_without_model_is_422(self):
        resp = post("/compete", {"g0": HONG, "g1": HONG_OPPONENT, "mode": "micro-mlp"})
        assert resp.status_code == 422

    def test_bad_model_doc_is_422(self):
        resp = post(
            "/compete",
            {"g0": HONG, "g1": HONG_OPPONENT, "mode": "micro-mlp", "model": {"bad": 1}},
        )
        assert resp.status_code == 422

    def test_metrics_are_finite(self):
        resp = post(
            "/compete",
            {"g0": TAROKH, "g1": HONG_OPPONENT, "mode": "full", "seed": 1, "iterations": 2},
        )
        data = resp.json()
        for key in ("metrics0", "metrics1"):
            assert data[key]["ber_zero"] <= 26.0


class TestPrepareData:
    def test_row_count_and_header(self):
        resp = post(
            "/prepare-data",
            {"g_opt": TAROKH, "n_opponents": 2, "reps": 2, "iterations": 2, "seed": 9},
        )
        assert resp.status_code == 200
        data = resp.json()
        assert len(data["rows"]) == 4
        assert len(data["header"]) == 27
        assert data["header"][-1] == "label"
        assert all(len(row) == 27 for row in data["rows"])


class TestTrain:
    def _rows(self, n=60):
        rng = np.random.default_rng(10)
        rows = []
        for _ in range(n):
            features = rng.standard_normal(26).tolist()
            rows.append(features + [float(features[0] > 0)])
        return rows

    def test_train_round_trip(self):
        resp = post("/train", {"rows": self._rows(), "seed": 11, "max_iter": 100})
        assert resp.status_code == 200
        data = resp.json()
        assert data["report"]["n_train"] == 42
        assert data["report"]["n_test"] == 18
        assert 0.0 <= data["report"]["train_accuracy"] <= 1.0
        assert data["model"]["layer_sizes"] == [26, 10, 6, 5, 1]

    def test_single_class_is_422(self):
        rows = [[0.0] * 26 + [1.0] for _ in range(10)]
        resp = post("/train", {"rows": rows, "seed": 12})
        assert resp.status_code == 422

    def test_malformed_rows_are_422(self):
        resp = post("/train", {"rows": [[1.0, 2.0]], "seed": 13})
        assert resp.status_code == 422


class TestBenchmark:
    def test_small_run(self):
        doc = model_to_doc(make_stub_model(0.0))
        resp = post(
            "/benchmark",
            {
                "model": doc,
                "cases": [{"name": "Hong", "generator": HONG}],
                "n_opponents": 2,
                "gt_iterations": 2,
                "trials": 5,
                "seed": 14,
            },
        )
        assert resp.status_code == 200
        data = resp.json()
        assert len(data["report"]["cases"]) == 1
        assert "ACCURACY" in data["tables"]

    def test_model_required(self):
        resp = post("/benchmark", {"cases": None})
        assert resp.status_code == 422
