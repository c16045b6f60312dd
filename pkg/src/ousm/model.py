"""Small ReLU/softmax multilayer perceptron with analytic gradients.

Weights are stored as ``(fan_out, fan_in)`` matrices, so a layer computes
``a @ W.T + b``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, TrainingDiverged

PROB_FLOOR = 1e-12


@dataclass
class MlpModel:
    layer_dims: list
    weights: list
    biases: list

    @property
    def num_classes(self):
        return self.layer_dims[-1]

    def copy(self):
        return MlpModel(list(self.layer_dims),
                        [w.copy() for w in self.weights],
                        [b.copy() for b in self.biases])

    def parameters(self):
        """Weights and biases interleaved per layer: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out


@dataclass
class ForwardRecord:
    logits: np.ndarray
    probabilities: np.ndarray
    penultimate: np.ndarray
    per_sample_ce: np.ndarray | None
    activations: list  # inputs to each layer, kept for backward


@dataclass
class Gradients:
    weights: list
    biases: list

    def parameters(self):
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out


def init_model(layer_dims, seed=0) -> MlpModel:
    """He-initialized weights (std sqrt(2/fan_in)), zero biases."""
    dims = [int(d) for d in layer_dims]
    if len(dims) < 2:
        raise InvalidArgument("layer_dims needs at least an input and an output size")
    if any(d < 1 for d in dims):
        raise InvalidArgument(f"layer sizes must be positive, got {dims}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(dims, weights, biases)


def softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(model, X, labels=None) -> ForwardRecord:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.layer_dims[0]:
        raise InvalidArgument(
            f"expected features of width {model.layer_dims[0]}, got shape {X.shape}")
    acts = [X]
    a = X
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w.T + b
        if i < last:
            a = np.maximum(z, 0.0)
            acts.append(a)
        else:
            a = z
    logits = a
    probs = softmax(logits)
    ce = None
    if labels is not None:
        labels = np.asarray(labels)
        p = probs[np.arange(len(labels)), labels]
        ce = -np.log(np.maximum(p, PROB_FLOOR))
    return ForwardRecord(logits, probs, acts[-1], ce, acts)


def backward(model, X, labels, coefficients, eta=0.0, record=None) -> Gradients:
    """Gradients of ``sum_i c_i * CE_i + eta * sum ||W||^2`` (biases undecayed).

    ``record`` may carry a forward pass already computed on the same batch.
    """
    labels = np.asarray(labels)
    c = np.asarray(coefficients, dtype=np.float64)
    if c.shape != labels.shape or labels.shape[0] != np.shape(X)[0]:
        raise InvalidArgument("coefficients, labels and batch must have equal length")
    if record is None:
        record = forward(model, X)
    delta = record.probabilities.copy()
    delta[np.arange(len(labels)), labels] -= 1.0
    delta *= c[:, None]
    gw = [None] * len(model.weights)
    gb = [None] * len(model.weights)
    for i in range(len(model.weights) - 1, -1, -1):
        a_prev = record.activations[i]
        gw[i] = delta.T @ a_prev + (2.0 * eta) * model.weights[i]
        gb[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i]) * (a_prev > 0.0)
    return Gradients(gw, gb)


def sgd_step(model, grads, learning_rate) -> MlpModel:
    """Plain SGD, in place. Returns the same model for chaining."""
    if not learning_rate > 0:
        raise InvalidArgument(f"learning_rate must be positive, got {learning_rate}")
    for g in grads.parameters():
        if not np.all(np.isfinite(g)):
            raise TrainingDiverged("non-finite gradient")
    for w, g in zip(model.weights, grads.weights):
        w -= learning_rate * g
    for b, g in zip(model.biases, grads.biases):
        b -= learning_rate * g
    return model


def extract_features(model, X, mode="logits"):
    rec = forward(model, X)
    if mode == "logits":
        return rec.logits
    if mode == "penultimate":
        return rec.penultimate
    raise InvalidArgument(f"unknown feature mode {mode!r}")


def save_checkpoint(model, path):
    doc = {
        "layer_dims": list(model.layer_dims),
        "weights": [w.ravel().tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_checkpoint(path) -> MlpModel:
    with open(path) as fh:
        doc = json.load(fh)
    dims = doc["layer_dims"]
    weights = [np.array(w, dtype=np.float64).reshape(o, i)
               for w, i, o in zip(doc["weights"], dims[:-1], dims[1:])]
    biases = [np.array(b, dtype=np.float64) for b in doc["biases"]]
    return MlpModel(list(dims), weights, biases)
