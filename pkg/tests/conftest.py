import numpy as np
import pytest

from sttc_microsim.mlp import MlpModel, Scaler, init_model
from sttc_microsim.dataset import FEATURE_DIM


def make_stub_model(output_bias: float = 0.0, input_dim: int = FEATURE_DIM) -> MlpModel:
    """Zero-weight model with a fitted identity scaler.

    Its forward value is sigmoid(output_bias) for every input, so bias 0
    always accepts (0.5 >= threshold) and a large negative bias always
    rejects.
    """
    model = init_model(input_dim, np.random.default_rng(0))
    for w in model.weights:
        w[:] = 0.0
    for b in model.biases:
        b[:] = 0.0
    model.biases[-1][:] = output_bias
    model.scaler = Scaler(np.zeros(input_dim), np.ones(input_dim), fitted=True)
    return model


def scrub_timing(obj):
    """Drop wall-clock-derived fields from a report structure."""
    if isinstance(obj, dict):
        return {
            k: scrub_timing(v)
            for k, v in obj.items()
            if "seconds" not in k and k not in ("timestamp", "time_improvement_pct")
        }
    if isinstance(obj, list):
        return [scrub_timing(v) for v in obj]
    return obj


@pytest.fixture
def accept_all_model():
    return make_stub_model(0.0)


@pytest.fixture
def reject_all_model():
    return make_stub_model(-10.0)
