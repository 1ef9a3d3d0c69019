"""Random toy stem-vine networks for property tests and experiments."""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..graph import (
    IDENTITY, Nonlinearity, NonlinSlot, NormProfile, StemVineNetwork, Vine, WeightSlot,
)
from ..linalg import norm_2_1_of_transpose, spectral_norm

TOY_KINDS = ("relu", "leaky_relu", "tanh", "identity")


def random_nonlinearity(rng, kinds=TOY_KINDS) -> Nonlinearity:
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "leaky_relu":
        return Nonlinearity(kind, float(np.round(rng.uniform(0.05, 0.5), 3)))
    return Nonlinearity(kind)


def _profile(rng):
    return NormProfile(float(np.round(rng.uniform(0.2, 3.0), 3)), float(np.round(rng.uniform(0.0, 2.0), 3)))


def attach_points(net: StemVineNetwork) -> tuple[list[int], list[int]]:
    """Vertices where a vine may start and where one may end."""
    starts = [1] + [j for j in range(2, net.vertex_count + 1) if isinstance(net.stem[j - 2], NonlinSlot)]
    ends = [j for j in starts if j > 1]
    return starts, ends


def random_vine_body(rng, d_in: int, d_out: int, kinds=TOY_KINDS, allow_identity=True) -> tuple:
    if allow_identity and d_in == d_out and rng.random() < 0.5:
        return ()
    if rng.random() < 0.6:
        return (WeightSlot(d_in, d_out, _profile(rng)),)
    h = int(rng.integers(1, 6))
    return (WeightSlot(d_in, h, _profile(rng)), NonlinSlot(h, random_nonlinearity(rng, kinds)),
            WeightSlot(h, d_out, _profile(rng)))


def random_network(rng, n_layers: int | None = None, max_dim: int = 5, n_vines: int | None = None,
                   kinds=TOY_KINDS, uniform_width: bool = False) -> StemVineNetwork:
    """Stem of ``n_layers`` weight/nonlinearity pairs (occasionally a doubled nonlinearity) plus vines."""
    if n_layers is None:
        n_layers = int(rng.integers(1, 6))
    width = int(rng.integers(1, max_dim + 1))
    dims = [width if uniform_width else int(rng.integers(1, max_dim + 1)) for _ in range(n_layers + 1)]
    stem = []
    for i in range(n_layers):
        stem.append(WeightSlot(dims[i], dims[i + 1], _profile(rng)))
        stem.append(NonlinSlot(dims[i + 1], random_nonlinearity(rng, kinds)))
        if rng.random() < 0.15:
            stem.append(NonlinSlot(dims[i + 1], random_nonlinearity(rng, kinds)))
    net = StemVineNetwork(tuple(stem))
    if n_vines is None:
        n_vines = int(rng.integers(0, 4))
    starts, ends = attach_points(net)
    vdims = net.vertex_dims()
    vines = []
    copies: dict = {}
    for _ in range(n_vines):
        u = starts[int(rng.integers(len(starts)))]
        later = [v for v in ends if v > u]
        if not later:
            continue
        v = later[int(rng.integers(len(later)))]
        copies[(u, v)] = copies.get((u, v), 0) + 1
        body = random_vine_body(rng, vdims[u - 1], vdims[v - 1], kinds)
        vines.append(Vine(u, v, copies[(u, v)], body))
    return StemVineNetwork(net.stem, tuple(vines))


def add_vine(net: StemVineNetwork, rng, identity: bool) -> StemVineNetwork | None:
    """Network with one extra vine, or None when no valid attachment exists."""
    starts, ends = attach_points(net)
    vdims = net.vertex_dims()
    pairs = [(u, v) for u in starts for v in ends if u < v
             and (not identity or vdims[u - 1] == vdims[v - 1])]
    if not pairs:
        return None
    u, v = pairs[int(rng.integers(len(pairs)))]
    copy = 1 + sum(1 for x in net.vines if (x.u, x.v) == (u, v))
    if identity:
        body = ()
    else:
        body = (WeightSlot(vdims[u - 1], vdims[v - 1], _profile(rng)),)
    return StemVineNetwork(net.stem, net.vines + (Vine(u, v, copy, body),))


def random_weights(net: StemVineNetwork, rng, scale: float = 1.0) -> dict:
    return {
        info.slot_id: scale * rng.standard_normal(info.slot.shape) / np.sqrt(info.slot.in_dim)
        for info in net.weight_slots()
    }


def fit_profiles(net: StemVineNetwork, weights: dict, refs: dict | None = None) -> StemVineNetwork:
    """Profiles set to the measured spectral norm and reference distance of each weight."""
    refs = refs or {}
    out = {}
    for sid, A in weights.items():
        ref = refs.get(sid)
        dev = A if ref is None else A - ref
        s = spectral_norm(A)
        out[sid] = NormProfile(s if s > 0 else 1e-12, norm_2_1_of_transpose(dev), ref)
    return net.with_profiles(out)


def residual_toy(n0: int, hidden: int, k: int, blocks: int = 1, head=IDENTITY) -> StemVineNetwork:
    """``A1, relu, [A, relu, A, relu] * blocks, A_out, head`` with one identity vine per block."""
    p = NormProfile(1.0, 1.0)
    relu = Nonlinearity("relu")
    stem = [WeightSlot(n0, hidden, p), NonlinSlot(hidden, relu)]
    vines = []
    for i in range(blocks):
        start = len(stem) + 1
        stem += [WeightSlot(hidden, hidden, p), NonlinSlot(hidden, relu),
                 WeightSlot(hidden, hidden, p), NonlinSlot(hidden, relu)]
        vines.append(Vine(start, start + 4, 1, ()))
    stem += [WeightSlot(hidden, k, p), NonlinSlot(k, head)]
    return StemVineNetwork(tuple(stem), tuple(vines))


def chain_counterpart(net: StemVineNetwork) -> StemVineNetwork:
    """The stem alone: same stem slots, vines removed."""
    return replace(net, vines=())
