"""From-scratch multilayer perceptron binary classifier.

Fixed architecture: input, three ReLU hidden layers of (10, 6, 5) nodes,
one sigmoid output node.  Training minimizes full-batch binary
cross-entropy with the limited-memory quasi-Newton optimizer (history 10,
strong-Wolfe line search) capped at 1000 iterations.  Features are
z-scored with statistics fitted on the training split; the statistics are
stored in the model so prediction is self-contained.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .optim import minimize_lbfgs

HIDDEN_LAYERS = (10, 6, 5)
MODEL_FORMAT_VERSION = 1

_P_LO = np.nextafter(0.0, 1.0)
_P_HI = np.nextafter(1.0, 0.0)


@dataclass
class Scaler:
    mean: np.ndarray
    std: np.ndarray
    fitted: bool

    @classmethod
    def identity(cls, dim: int) -> "Scaler":
        return cls(np.zeros(dim), np.ones(dim), False)

    @classmethod
    def fit(cls, x: np.ndarray) -> "Scaler":
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        std = np.where(std > 0, std, 1.0)  # constant features pass through
        return cls(mean, std, True)

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.std


@dataclass
class MlpModel:
    layer_sizes: tuple[int, ...]
    weights: list
    biases: list
    scaler: Scaler
    hidden_activation: str = "relu"
    output_activation: str = "sigmoid"

    def num_parameters(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


@dataclass
class TrainReport:
    iterations: int
    final_loss: float
    train_accuracy: float
    test_accuracy: float | None
    converged: bool

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "final_loss": self.final_loss,
            "train_accuracy": self.train_accuracy,
            "test_accuracy": self.test_accuracy,
            "converged": self.converged,
        }


def init_model(
    input_dim: int = 26,
    rng: np.random.Generator | None = None,
    hidden: tuple[int, ...] = HIDDEN_LAYERS,
) -> MlpModel:
    """Symmetric scaled-uniform weights (limit sqrt(6/(fan_in+fan_out))),
    zero biases, unfitted identity scaler.
    """
    if input_dim < 1:
        raise ValueError("input_dim must be >= 1")
    if rng is None:
        raise ValueError("an explicitly seeded rng is required")
    sizes = (input_dim, *hidden, 1)
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(sizes, weights, biases, Scaler.identity(input_dim))


def _logits(model: MlpModel, x_scaled: np.ndarray) -> np.ndarray:
    a = x_scaled
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        a = np.maximum(a @ w + b, 0.0)
    return (a @ model.weights[-1] + model.biases[-1])[:, 0]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward(model: MlpModel, features) -> float:
    """Probability in the open interval (0, 1) for one feature vector."""
    x = np.asarray(features, dtype=float)
    if x.shape != (model.layer_sizes[0],):
        raise ValueError(
            f"feature dimension mismatch: expected {model.layer_sizes[0]}, got {x.shape}"
        )
    return float(forward_batch(model, x[None, :])[0])


def forward_batch(model: MlpModel, x: np.ndarray) -> np.ndarray:
    z = _logits(model, model.scaler.transform(np.asarray(x, dtype=float)))
    return np.clip(_sigmoid(z), _P_LO, _P_HI)


def predict(model: MlpModel, features) -> int:
    """1 iff the forward probability is >= 0.5 (the boundary accepts)."""
    if not model.scaler.fitted:
        raise ValueError("model is untrained: scaler statistics are not fitted")
    return int(forward(model, features) >= 0.5)


def pack_parameters(model: MlpModel) -> np.ndarray:
    parts = []
    for w, b in zip(model.weights, model.biases):
        parts.append(w.ravel())
        parts.append(b.ravel())
    return np.concatenate(parts)


def with_parameters(model: MlpModel, params: np.ndarray) -> MlpModel:
    weights = []
    biases = []
    offset = 0
    for fan_in, fan_out in zip(model.layer_sizes[:-1], model.layer_sizes[1:]):
        weights.append(params[offset : offset + fan_in * fan_out].reshape(fan_in, fan_out).copy())
        offset += fan_in * fan_out
        biases.append(params[offset : offset + fan_out].copy())
        offset += fan_out
    if offset != params.size:
        raise ValueError("parameter vector size does not match the architecture")
    return MlpModel(
        model.layer_sizes,
        weights,
        biases,
        model.scaler,
        model.hidden_activation,
        model.output_activation,
    )


def bce_loss_and_grad(
    model: MlpModel, params: np.ndarray, x_scaled: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its gradient w.r.t. the flat parameters.

    The loss is evaluated through the logits (softplus(z) - y*z), which keeps
    both the value and the gradient finite for saturated outputs.
    """
    m = with_parameters(model, params)
    n = x_scaled.shape[0]
    activations = [x_scaled]
    pre = []
    a = x_scaled
    for w, b in zip(m.weights[:-1], m.biases[:-1]):
        z = a @ w + b
        pre.append(z)
        a = np.maximum(z, 0.0)
        activations.append(a)
    logits = (a @ m.weights[-1] + m.biases[-1])[:, 0]
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits))

    delta = ((_sigmoid(logits) - y) / n)[:, None]
    grad_w = [np.empty(0)] * len(m.weights)
    grad_b = [np.empty(0)] * len(m.biases)
    grad_w[-1] = activations[-1].T @ delta
    grad_b[-1] = delta.sum(axis=0)
    upstream = delta @ m.weights[-1].T
    for layer in range(len(m.weights) - 2, -1, -1):
        delta_h = upstream * (pre[layer] > 0)
        grad_w[layer] = activations[layer].T @ delta_h
        grad_b[layer] = delta_h.sum(axis=0)
        if layer > 0:
            upstream = delta_h @ m.weights[layer].T
    parts = []
    for gw, gb in zip(grad_w, grad_b):
        parts.append(gw.ravel())
        parts.append(gb.ravel())
    return loss, np.concatenate(parts)


def train(
    model: MlpModel,
    train_rows,
    max_iter: int = 1000,
    eval_rows=None,
    gtol: float = 1e-6,
) -> tuple[MlpModel, TrainReport]:
    """Fit the scaler on the training rows and minimize the cross-entropy.

    Raises on single-class training data.  Returns the trained model and a
    report; test accuracy is filled in when ``eval_rows`` is given.
    """
    from .dataset import rows_to_arrays

    x, y = rows_to_arrays(train_rows)
    if x.shape[0] < 2:
        raise ValueError("need at least two training rows")
    if x.shape[1] != model.layer_sizes[0]:
        raise ValueError(
            f"training data has {x.shape[1]} features, model expects {model.layer_sizes[0]}"
        )
    if np.unique(y).size < 2:
        raise ValueError("training data must contain both labels")
    scaler = Scaler.fit(x)
    x_scaled = scaler.transform(x)
    seeded = MlpModel(
        model.layer_sizes,
        model.weights,
        model.biases,
        scaler,
        model.hidden_activation,
        model.output_activation,
    )
    result = minimize_lbfgs(
        lambda p: bce_loss_and_grad(seeded, p, x_scaled, y),
        pack_parameters(seeded),
        max_iter=max_iter,
        history_size=10,
        gtol=gtol,
    )
    trained = with_parameters(seeded, result.x)
    train_acc = float(np.mean((forward_batch(trained, x) >= 0.5) == y))
    test_acc = None
    if eval_rows:
        xe, ye = rows_to_arrays(eval_rows)
        test_acc = float(np.mean((forward_batch(trained, xe) >= 0.5) == ye))
    report = TrainReport(
        iterations=result.n_iter,
        final_loss=result.fun,
        train_accuracy=train_acc,
        test_accuracy=test_acc,
        converged=result.converged,
    )
    return trained, report


def model_to_doc(model: MlpModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "layer_sizes": list(model.layer_sizes),
        "hidden_activation": model.hidden_activation,
        "output_activation": model.output_activation,
        "scaler_mean": [float(v) for v in model.scaler.mean],
        "scaler_std": [float(v) for v in model.scaler.std],
        "scaler_fitted": bool(model.scaler.fitted),
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
    }


def model_from_doc(doc: dict) -> MlpModel:
    try:
        version = doc["format_version"]
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {version}")
        sizes = tuple(int(s) for s in doc["layer_sizes"])
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError("invalid layer sizes")
        if doc["hidden_activation"] != "relu" or doc["output_activation"] != "sigmoid":
            raise ValueError("unsupported activation")
        weights = [np.array(w, dtype=float) for w in doc["weights"]]
        biases = [np.array(b, dtype=float) for b in doc["biases"]]
        scaler = Scaler(
            np.array(doc["scaler_mean"], dtype=float),
            np.array(doc["scaler_std"], dtype=float),
            bool(doc["scaler_fitted"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed model document: {exc}") from None
    expected = list(zip(sizes[:-1], sizes[1:]))
    if len(weights) != len(expected) or len(biases) != len(expected):
        raise ValueError("layer count does not match layer sizes")
    for (fan_in, fan_out), w, b in zip(expected, weights, biases):
        if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
            raise ValueError("weight shape does not match layer sizes")
    if scaler.mean.shape != (sizes[0],) or scaler.std.shape != (sizes[0],):
        raise ValueError("scaler dimension does not match the input layer")
    if np.any(scaler.std <= 0):
        raise ValueError("scaler standard deviations must be positive")
    arrays = weights + biases + [scaler.mean, scaler.std]
    if any(not np.all(np.isfinite(a)) for a in arrays):
        raise ValueError("model parameters must be finite")
    return MlpModel(sizes, weights, biases, scaler)


def save_model(model: MlpModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_doc(model), fh, indent=1)
        fh.write("\n")


def load_model(path) -> MlpModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not a valid model file: {exc}") from None
    return model_from_doc(doc)
