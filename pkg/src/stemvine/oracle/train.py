"""Minimal minibatch SGD trainer with weight decay and a hand-written backward pass."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ParamError, SemanticError, TrainError, UnsupportedError
from ..evaluate import LabeledDataset
from ..graph import NonlinSlot, NormProfile, StemVineNetwork, WeightSlot, validate
from ..linalg import norm_2_1_of_transpose, spectral_norm

TRAINABLE = ("relu", "leaky_relu", "identity")
MAX_WEIGHT_MATRICES = 6
MAX_DIM = 32


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.1
    epochs: int = 200
    batch_size: int = 20
    weight_decay: float = 0.0
    seed: int = 0
    init_scale: float = 1.0

    def __post_init__(self):
        if not (self.lr > 0 and self.batch_size > 0 and self.epochs >= 0 and self.weight_decay >= 0):
            raise ParamError("need lr > 0, batch_size > 0, epochs >= 0, weight_decay >= 0")


@dataclass
class TrainResult:
    weights: dict
    references: dict  # initialization, used as reference matrices
    network: StemVineNetwork  # same architecture with measured profiles
    losses: list = field(default_factory=list)


def _dsigma(nl, z):
    if nl.kind == "relu":
        return (z > 0).astype(np.float64)
    if nl.kind == "leaky_relu":
        return np.where(z > 0, 1.0, nl.slope)
    return np.ones_like(z)


def _chain_forward(elements, h, weights, prefix):
    cache = []  # input to each element
    k = 0
    for e in elements:
        cache.append(h)
        if isinstance(e, WeightSlot):
            k += 1
            h = h @ weights[f"{prefix}A{k}"].T
        else:
            h = e.nonlinearity(h)
    return h, cache


def _chain_backward(elements, cache, g, weights, prefix, grads):
    ids = []
    k = 0
    for e in elements:
        if isinstance(e, WeightSlot):
            k += 1
            ids.append(f"{prefix}A{k}")
        else:
            ids.append(None)
    for e, h, sid in zip(reversed(elements), reversed(cache), reversed(ids)):
        if sid is not None:
            grads[sid] += g.T @ h
            g = g @ weights[sid]
        else:
            g = g * _dsigma(e.nonlinearity, h)
    return g


def loss_and_grads(net: StemVineNetwork, weights: dict, X, labels, weight_decay: float = 0.0):
    """Mean softmax cross-entropy plus ``weight_decay/2 * sum w^2``, with exact gradients."""
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    slot_ids = _stem_slot_ids(net)
    acts = [X]
    vine_caches = {}
    for idx, e in enumerate(net.stem):
        h = acts[-1]
        out = h @ weights[slot_ids[idx]].T if isinstance(e, WeightSlot) else e.nonlinearity(h)
        for vine in net.vines_ending_at(idx + 2):
            vout, vcache = _chain_forward(vine.body, acts[vine.u - 1], weights, vine.name + ".")
            vine_caches[vine.key] = vcache
            out = out + vout
        acts.append(out)
    F = acts[-1]
    n = F.shape[0]
    shifted = F - F.max(axis=1, keepdims=True)
    logp = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    rows = np.arange(n)
    loss = -logp[rows, labels - 1].mean()
    sq = sum(float(np.sum(w * w)) for w in weights.values())
    loss += 0.5 * weight_decay * sq

    grads = {sid: np.zeros_like(w) for sid, w in weights.items()}
    gv = [None] * len(acts)
    probs = np.exp(logp)
    probs[rows, labels - 1] -= 1.0
    gv[-1] = probs / n
    for j in range(len(acts), 1, -1):
        g = gv[j - 1]
        if g is None:
            continue
        for vine in net.vines_ending_at(j):
            gu = _chain_backward(vine.body, vine_caches[vine.key], g, weights, vine.name + ".", grads)
            gv[vine.u - 1] = gu if gv[vine.u - 1] is None else gv[vine.u - 1] + gu
        e = net.stem[j - 2]
        h = acts[j - 2]
        if isinstance(e, WeightSlot):
            sid = slot_ids[j - 2]
            grads[sid] += g.T @ h
            gin = g @ weights[sid]
        else:
            gin = g * _dsigma(e.nonlinearity, h)
        gv[j - 2] = gin if gv[j - 2] is None else gv[j - 2] + gin
    for sid, w in weights.items():
        grads[sid] += weight_decay * w
    return float(loss), grads


def _stem_slot_ids(net):
    ids, k = [], 0
    for e in net.stem:
        if isinstance(e, WeightSlot):
            k += 1
            ids.append(f"A{k}")
        else:
            ids.append(None)
    return ids


def check_trainable(net: StemVineNetwork) -> None:
    violations = validate(net)
    if violations:
        raise SemanticError("; ".join(map(str, violations)), violations)
    slots = net.weight_slots()
    if len(slots) > MAX_WEIGHT_MATRICES or net.max_width > MAX_DIM:
        raise UnsupportedError(f"trainer handles at most {MAX_WEIGHT_MATRICES} matrices of dim <= {MAX_DIM}")
    for e in list(net.stem) + [e for v in net.vines for e in v.body]:
        if isinstance(e, NonlinSlot) and e.nonlinearity.kind not in TRAINABLE:
            raise UnsupportedError(f"no backward pass for {e.nonlinearity}")


def init_weights(net: StemVineNetwork, seed: int, scale: float = 1.0) -> dict:
    rng = np.random.default_rng(seed)
    return {
        info.slot_id: scale * rng.standard_normal(info.slot.shape) * np.sqrt(2.0 / info.slot.in_dim)
        for info in net.weight_slots()
    }


def measured_network(net: StemVineNetwork, weights: dict, refs: dict) -> StemVineNetwork:
    profiles = {}
    for sid, w in weights.items():
        s = spectral_norm(w)
        profiles[sid] = NormProfile(s if s > 0 else 1e-12, norm_2_1_of_transpose(w - refs[sid]), refs[sid])
    return net.with_profiles(profiles)


def train_tiny(net: StemVineNetwork, data: LabeledDataset, cfg: TrainConfig = TrainConfig()) -> TrainResult:
    """Minibatch SGD on cross-entropy with weight decay.

    The decay term is applied as its proximal step ``w <- w / (1 + lr * wd)``
    after the data-gradient step, which minimizes the same objective and stays
    stable for any decay strength. Initialization doubles as the reference.
    """
    check_trainable(net)
    if data.k != net.output_dim or data.X.shape[1] != net.input_dim:
        raise ParamError("dataset does not match network input/output dims")
    init = init_weights(net, cfg.seed, cfg.init_scale)
    weights = {k: v.copy() for k, v in init.items()}
    rng = np.random.default_rng([cfg.seed, 1])
    n = data.n
    shrink = 1.0 / (1.0 + cfg.lr * cfg.weight_decay)
    losses = []
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            loss, grads = loss_and_grads(net, weights, data.X[idx], data.labels[idx], 0.0)
            if not np.isfinite(loss):
                raise TrainError("loss diverged")
            total += loss * len(idx)
            for sid in weights:
                weights[sid] = (weights[sid] - cfg.lr * grads[sid]) * shrink
        losses.append(total / n)
        if not all(np.all(np.isfinite(w)) for w in weights.values()):
            raise TrainError("weights diverged")
    return TrainResult(weights, init, measured_network(net, weights, init), losses)


def finite_difference_check(net: StemVineNetwork, weights: dict, X, labels, weight_decay: float = 0.0,
                            h: float = 1e-6) -> float:
    """Largest relative error between analytic and central-difference gradients."""
    _, grads = loss_and_grads(net, weights, X, labels, weight_decay)
    worst = 0.0
    for sid, w in weights.items():
        for idx in np.ndindex(w.shape):
            plus = {k: v.copy() for k, v in weights.items()}
            minus = {k: v.copy() for k, v in weights.items()}
            plus[sid][idx] += h
            minus[sid][idx] -= h
            fd = (loss_and_grads(net, plus, X, labels, weight_decay)[0]
                  - loss_and_grads(net, minus, X, labels, weight_decay)[0]) / (2 * h)
            an = grads[sid][idx]
            worst = max(worst, abs(fd - an) / max(1e-8, abs(fd) + abs(an)))
    return worst
