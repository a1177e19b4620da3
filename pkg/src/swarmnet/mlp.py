"""Single-hidden-layer feed-forward network evaluated from a flat weight vector.

The flat layout is the same one the swarm optimizers search over, so a particle
position can be plugged in as network parameters without any translation:
for each hidden neuron j the block ``[bias_j, w_j1 .. w_jn]``, followed by the
output block ``[output_bias, beta_1 .. beta_m]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Topology:
    """Layer sizes of the network: n_inputs -> n_hidden -> n_outputs.

    Only a single output neuron is supported; the classifier is binary.
    """

    n_inputs: int
    n_hidden: int
    n_outputs: int = 1

    def __post_init__(self):
        if self.n_inputs < 1 or self.n_hidden < 1 or self.n_outputs < 1:
            raise ValueError("all layer sizes must be >= 1")
        if self.n_outputs != 1:
            raise ValueError("only a single output neuron is supported")

    @property
    def n_params(self) -> int:
        """Total number of weights and biases in the flat layout."""
        return (self.n_inputs + 1) * self.n_hidden + (self.n_hidden + 1)


@dataclass
class WeightVector:
    """Flat parameter vector for one network, tied to its topology."""

    topology: Topology
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.topology.n_params,):
            raise ValueError(
                f"weight vector has length {self.values.size}, "
                f"topology needs {self.topology.n_params}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("weight vector contains non-finite values")

    def to_csv_line(self) -> str:
        """Serialize as one CSV line: the topology triple, then the flat values."""
        t = self.topology
        parts = [str(t.n_inputs), str(t.n_hidden), str(t.n_outputs)]
        parts.extend(repr(v) for v in self.values.tolist())
        return ",".join(parts)

    @classmethod
    def from_csv_line(cls, line: str) -> "WeightVector":
        fields = line.strip().split(",")
        if len(fields) < 4:
            raise ValueError("weight line needs a topology triple and at least one value")
        topology = Topology(int(fields[0]), int(fields[1]), int(fields[2]))
        values = np.array([float(v) for v in fields[3:]])
        return cls(topology, values)


def sigmoid(x):
    """Logistic transfer 1 / (1 + e^-x), computed without overflow.

    Accepts a scalar or an array; strictly increasing and bounded in (0, 1).
    """
    arr = np.asarray(x, dtype=float)
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ex = np.exp(arr[~pos])
    out[~pos] = ex / (1.0 + ex)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def _weights_array(topology: Topology, weights) -> np.ndarray:
    values = weights.values if isinstance(weights, WeightVector) else np.asarray(weights, dtype=float)
    if values.shape != (topology.n_params,):
        raise ValueError(
            f"weight vector has length {values.size}, topology needs {topology.n_params}"
        )
    return values


def _unpack(topology: Topology, values: np.ndarray):
    n, m = topology.n_inputs, topology.n_hidden
    hidden = values[: (n + 1) * m].reshape(m, n + 1)
    out = values[(n + 1) * m :]
    # hidden[:, 0] are biases, hidden[:, 1:] the input weights; out[0] is the
    # output bias and out[1:] the hidden-to-output weights.
    return hidden[:, 1:], hidden[:, 0], out[1:], out[0]


def forward_batch(topology: Topology, weights, features: np.ndarray) -> np.ndarray:
    """Network output for every row of a feature matrix, shape (n_rows,)."""
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[1] != topology.n_inputs:
        raise ValueError(
            f"feature matrix has width {features.shape[-1]}, "
            f"topology needs {topology.n_inputs}"
        )
    values = _weights_array(topology, weights)
    w, b_hidden, beta, b_out = _unpack(topology, values)
    z = sigmoid(features @ w.T + b_hidden)
    return sigmoid(z @ beta + b_out)


def forward(topology: Topology, weights, inputs) -> float:
    """Single forward pass: sigmoid hidden layer, then a sigmoid output neuron."""
    inputs = np.asarray(inputs, dtype=float)
    if inputs.shape != (topology.n_inputs,):
        raise ValueError(
            f"input has length {inputs.size}, topology needs {topology.n_inputs}"
        )
    return float(forward_batch(topology, weights, inputs[None, :])[0])


def mse_fitness(topology: Topology, weights, dataset) -> float:
    """Mean squared error of the network outputs against binary labels."""
    if len(dataset.labels) == 0:
        raise ValueError("cannot score an empty dataset")
    outputs = forward_batch(topology, weights, dataset.features)
    errors = outputs - np.asarray(dataset.labels, dtype=float)
    return float(np.mean(errors * errors))


def classify(topology: Topology, weights, inputs) -> int:
    """Binary decision: 1 when the output is at or above 0.5, else 0."""
    return int(forward(topology, weights, inputs) >= 0.5)


def classify_batch(topology: Topology, weights, features: np.ndarray) -> np.ndarray:
    """Binary decisions for every row of a feature matrix."""
    return (forward_batch(topology, weights, features) >= 0.5).astype(int)
