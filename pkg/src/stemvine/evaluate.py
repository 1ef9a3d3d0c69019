"""Forward evaluation of stem-vine networks and the margin/ramp risk functionals."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, EvalError, FormatError, LabelError, ParamError, SemanticError
from .graph import StemVineNetwork, WeightSlot, validate
from .linalg import as_matrix

SVD_MAGIC = b"SVD1"


@dataclass(frozen=True)
class LabeledDataset:
    """Instances ``X`` (one per row) with 1-based labels in ``{1..k}``."""

    X: np.ndarray
    labels: np.ndarray
    k: int

    def __post_init__(self):
        X = as_matrix(self.X, "X")
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.shape[0] != X.shape[0]:
            raise LabelError(f"need {X.shape[0]} labels, got shape {labels.shape}")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(labels == np.round(labels)):
                raise LabelError("labels must be integers")
        labels = labels.astype(np.int64)
        if self.k < 1 or labels.min() < 1 or labels.max() > self.k:
            raise LabelError(f"labels must lie in 1..{self.k}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True)
class VertexTrace:
    activations: tuple  # activations[j-1] is F^j(X)

    def __getitem__(self, j: int) -> np.ndarray:
        if j < 1:
            raise IndexError("vertices are 1-based")
        return self.activations[j - 1]

    def __len__(self):
        return len(self.activations)

    @property
    def output(self) -> np.ndarray:
        return self.activations[-1]


def _weight(weights, sid, slot: WeightSlot) -> np.ndarray:
    if sid not in weights:
        raise EvalError(f"weight slot {sid} is unbound")
    a = np.asarray(weights[sid], dtype=np.float64)
    if a.shape != slot.shape:
        raise DimensionError(f"slot {sid} expects shape {slot.shape}, got {a.shape}")
    return a


def _apply(e, h, weights, sid):
    if isinstance(e, WeightSlot):
        return h @ _weight(weights, sid, e).T
    return e.nonlinearity(h)


def run_chain(elements, h, weights, prefix=""):
    k = 0
    for e in elements:
        sid = None
        if isinstance(e, WeightSlot):
            k += 1
            sid = f"{prefix}A{k}"
        h = _apply(e, h, weights, sid)
    return h


def forward(net: StemVineNetwork, weights: dict, X) -> VertexTrace:
    """Activations at every vertex; vine outputs are added at their terminal vertex."""
    violations = validate(net)
    if violations:
        raise SemanticError("; ".join(map(str, violations)), violations)
    X = as_matrix(X, "X")
    if X.shape[1] != net.input_dim:
        raise DimensionError(f"X has {X.shape[1]} columns, network expects {net.input_dim}")
    acts = [X]
    k = 0
    for idx, e in enumerate(net.stem):
        sid = None
        if isinstance(e, WeightSlot):
            k += 1
            sid = f"A{k}"
        h = _apply(e, acts[-1], weights, sid)
        for vine in net.vines_ending_at(idx + 2):
            h = h + run_chain(vine.body, acts[vine.u - 1], weights, vine.name + ".")
        acts.append(h)
    return VertexTrace(tuple(acts))


def predict(net, weights, X) -> np.ndarray:
    return forward(net, weights, X).output


def margin(v, y: int) -> float:
    v = np.asarray(v, dtype=np.float64).ravel()
    k = v.shape[0]
    if k < 2:
        raise ParamError("margin needs at least two classes")
    if not (1 <= y <= k):
        raise LabelError(f"label {y} outside 1..{k}")
    others = np.delete(v, y - 1)
    return float(v[y - 1] - others.max())


def margins(F: np.ndarray, labels) -> np.ndarray:
    """Row-wise margins for a score matrix and 1-based labels."""
    F = np.asarray(F, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n, k = F.shape
    if k < 2:
        raise ParamError("margin needs at least two classes")
    if labels.min() < 1 or labels.max() > k:
        raise LabelError(f"labels outside 1..{k}")
    rows = np.arange(n)
    correct = F[rows, labels - 1]
    masked = F.copy()
    masked[rows, labels - 1] = -np.inf
    return correct - masked.max(axis=1)


def ramp_loss(r, lam: float):
    """0 below -lam, 1 above 0, linear in between. Works elementwise on arrays."""
    if not lam > 0:
        raise ParamError("margin parameter lambda must be positive")
    out = np.clip(1.0 + np.asarray(r, dtype=np.float64) / lam, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def empirical_ramp_risk(net, weights, data: LabeledDataset, lam: float) -> float:
    if not lam > 0:
        raise ParamError("margin parameter lambda must be positive")
    F = predict(net, weights, data.X)
    if F.shape[1] != data.k:
        raise DimensionError(f"network emits {F.shape[1]} scores for {data.k} classes")
    return float(np.mean(ramp_loss(-margins(F, data.labels), lam)))


def zero_one_error(net, weights, data: LabeledDataset) -> float:
    """Fraction misclassified; ties in argmax go to the smallest class index."""
    F = predict(net, weights, data.X)
    if F.shape[1] != data.k:
        raise DimensionError(f"network emits {F.shape[1]} scores for {data.k} classes")
    pred = np.argmax(F, axis=1) + 1
    return float(np.mean(pred != data.labels))


# -- SVD1 dataset files --------------------------------------------------------

def dataset_to_bytes(data: LabeledDataset) -> bytes:
    n, n0 = data.X.shape
    return (
        SVD_MAGIC
        + struct.pack("<III", n, n0, data.k)
        + data.X.astype("<f8").tobytes(order="C")
        + data.labels.astype("<u4").tobytes()
    )


def dataset_from_bytes(raw: bytes) -> LabeledDataset:
    if len(raw) < 16 or raw[:4] != SVD_MAGIC:
        raise FormatError("missing SVD1 magic")
    n, n0, k = struct.unpack_from("<III", raw, 4)
    expected = 16 + 8 * n * n0 + 4 * n
    if len(raw) != expected:
        raise FormatError(f"SVD1 payload length {len(raw)} != {expected}")
    X = np.frombuffer(raw, dtype="<f8", count=n * n0, offset=16).reshape(n, n0).astype(np.float64)
    labels = np.frombuffer(raw, dtype="<u4", count=n, offset=16 + 8 * n * n0).astype(np.int64)
    return LabeledDataset(X, labels, k)


def write_dataset(path, data: LabeledDataset) -> None:
    Path(path).write_bytes(dataset_to_bytes(data))


def read_dataset(path) -> LabeledDataset:
    return dataset_from_bytes(Path(path).read_bytes())
