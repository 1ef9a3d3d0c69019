"""Fixed experiment grids shared by the command line, the scripts and the tests.

Every suite is deterministic given its seed arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bounds import covering_terms, lipschitz_bound, propagate_norms, term_signature, total_R
from ..cert import BoundReport, certify, dudley_bound, generalization_bound
from ..evaluate import LabeledDataset, forward, zero_one_error
from ..graph import IDENTITY, NonlinSlot, NormProfile, StemVineNetwork, Vine, WeightSlot, chain_network
from ..linalg import frobenius_norm
from .cover import ChainCheck, MaureyCheck, chain_check, grid_single_matrix_class, maurey_check
from .data import make_blobs
from .netgen import add_vine, attach_points, fit_profiles, random_network, random_weights, residual_toy
from .probe import lipschitz_probe
from .rademacher import monte_carlo_rademacher
from .train import TrainConfig, TrainResult, train_tiny

MAUREY_SHAPES = ((1, 1), (2, 1), (1, 2), (2, 2), (4, 1), (1, 4))
MAUREY_RADII = (0.5, 1.0)
COVER_EPS = (0.25, 0.5, 1.0)


def maurey_suite(seeds=(0, 1, 2), n_points: int = 4) -> list[MaureyCheck]:
    out = []
    for d, m in MAUREY_SHAPES:
        for seed in seeds:
            X = np.random.default_rng([seed, d]).standard_normal((n_points, d))
            for a in MAUREY_RADII:
                for eps in COVER_EPS:
                    out.append(maurey_check(X, a, d, m, eps))
    return out


def chain_suite(seeds=range(6)) -> list[ChainCheck]:
    """Two-stage relu classes ``relu(X W1^T) W2^T`` with ``d = 2, m1 = 2, m2 = 1``."""
    out = []
    for seed in seeds:
        X = np.random.default_rng(seed).standard_normal((3, 2))
        out.append(chain_check(X, 1.0, 1.0, 2, 2, 1, 0.5, 0.5))
    return out


def single_matrix_network(d: int, m: int, a: float) -> StemVineNetwork:
    """One weight matrix with ``s = b = a`` followed by the identity."""
    return StemVineNetwork((WeightSlot(d, m, NormProfile(a, a)), NonlinSlot(m, IDENTITY)))


@dataclass
class RademacherCheck:
    d: int
    a: float
    n: int
    hypotheses: int
    estimate: float
    R: float
    dudley: float
    margin: float

    @property
    def ok(self) -> bool:
        return self.estimate <= self.dudley + self.margin


def rademacher_suite(trials: int = 10_000, seed: int = 0, dims=(1, 2), radii=(0.5, 1.0),
                     sizes=(8, 32)) -> list[RademacherCheck]:
    """Monte-Carlo Rademacher complexity of scalar grid classes against the entropy-integral bound."""
    out = []
    for d in dims:
        for n in sizes:
            X = np.random.default_rng([seed, d, n]).standard_normal((n, d))
            for a in radii:
                cloud = grid_single_matrix_class(X, a, a / 2, d, 1)
                values = cloud.points[:, :, 0]
                est = monte_carlo_rademacher(values, trials, seed)
                R = total_R(single_matrix_network(d, 1, a), frobenius_norm(X))
                out.append(RademacherCheck(d, a, n, len(cloud), est, R, dudley_bound(R, n), 3 / math.sqrt(trials)))
    return out


@dataclass
class PlacementCheck:
    seed: int
    chain_terms: int
    vine_terms: int
    same_form: bool

    @property
    def ok(self) -> bool:
        return self.chain_terms == self.vine_terms and self.same_form


def matched_pair(rng, width: int | None = None) -> tuple[StemVineNetwork, StemVineNetwork]:
    """A chain and a stem-vine net sharing one multiset of weight profiles and one width.

    The stem-vine net moves one matrix of the chain into a weighted vine and
    sprinkles identity vines on top.
    """
    L = int(rng.integers(2, 6))
    w = width or int(rng.integers(1, 6))
    profiles = [NormProfile(float(np.round(rng.uniform(0.2, 3.0), 3)), float(np.round(rng.uniform(0.0, 2.0), 3)))
                for _ in range(L)]
    chain = chain_network([w] * (L + 1), profiles)
    order = rng.permutation(L)
    shuffled = [profiles[i] for i in order]
    stem_net = chain_network([w] * L, shuffled[:-1])
    starts, ends = attach_points(stem_net)
    pairs = [(u, v) for u in starts for v in ends if u < v]
    u, v = pairs[int(rng.integers(len(pairs)))]
    net = StemVineNetwork(stem_net.stem, (Vine(u, v, 1, (WeightSlot(w, w, shuffled[-1]),)),))
    for _ in range(int(rng.integers(0, 3))):
        net = add_vine(net, rng, identity=True)
    return chain, net


def placement_suite(count: int = 100, seed: int = 0) -> list[PlacementCheck]:
    out = []
    for i in range(count):
        chain, net = matched_pair(np.random.default_rng([seed, i]))
        a, b = covering_terms(chain, 1.0), covering_terms(net, 1.0)
        out.append(PlacementCheck(i, len(a), len(b), term_signature(a) == term_signature(b)))
    return out


@dataclass
class PropagationCheck:
    seed: int
    vertex_violations: int
    probe_ratio: float
    lipschitz: float

    @property
    def ok(self) -> bool:
        return self.vertex_violations == 0 and self.probe_ratio <= self.lipschitz * (1 + 1e-9)


def propagation_suite(networks: int = 50, inputs: int = 20, seed: int = 0, batch: int = 3) -> list[PropagationCheck]:
    """Measured activation norms and probed slopes against the propagated bounds."""
    out = []
    for i in range(networks):
        rng = np.random.default_rng([seed, i])
        net = random_network(rng)
        weights = random_weights(net, rng)
        net = fit_profiles(net, weights)
        bad = 0
        for _ in range(inputs):
            X = rng.standard_normal((batch, net.input_dim)) * rng.uniform(0.1, 10.0)
            trace = forward(net, weights, X)
            bounds = propagate_norms(net, frobenius_norm(X))
            bad += sum(frobenius_norm(trace[j]) > bounds[j - 1] * (1 + 1e-9) + 1e-12
                       for j in range(1, net.vertex_count + 1))
        ratio = lipschitz_probe(net, weights, trials=200, seed=i)
        out.append(PropagationCheck(i, bad, ratio, lipschitz_bound(net)))
    return out


# -- trained networks ----------------------------------------------------------------

BLOB_DIM = 2
BLOB_CLASSES = 3
BLOB_SPREAD = 0.2


@dataclass
class GapRun:
    seed: int
    train_error: float
    test_error: float
    ramp: float
    remainder: float
    report: BoundReport
    training: TrainResult
    train_data: LabeledDataset

    @property
    def gap(self) -> float:
        return self.test_error - self.ramp

    @property
    def ok(self) -> bool:
        return self.gap <= self.remainder


def gap_run(seed: int, n_train: int = 200, n_test: int = 2000, lam: float = 1.0, delta: float = 0.05,
            cfg: TrainConfig | None = None, hidden: int = 16) -> GapRun:
    """Train on separable blobs, certify on the training sample, measure on fresh data."""
    cfg = cfg or TrainConfig(seed=seed)
    train = make_blobs(n_train, BLOB_DIM, BLOB_CLASSES, BLOB_SPREAD, seed=2 * seed)
    test = make_blobs(n_test, BLOB_DIM, BLOB_CLASSES, BLOB_SPREAD, seed=2 * seed + 1)
    net = residual_toy(BLOB_DIM, hidden, BLOB_CLASSES)
    res = train_tiny(net, train, cfg)
    report = certify(res.network, res.weights, res.references, train, lam, delta)
    return GapRun(seed, zero_one_error(net, res.weights, train), zero_one_error(net, res.weights, test),
                  report.empirical_ramp_risk, report.non_ramp_remainder, report, res, train)


@dataclass
class DecayRow:
    weight_decay: float
    spectral_sum: float
    R: float
    bound: float
    train_error: float


def weight_decay_sweep(decays=(0.0, 1e-2, 1.0), seed: int = 0, epochs: int = 200, n_train: int = 200,
                       lam: float = 1.0, delta: float = 0.05) -> list[DecayRow]:
    rows = []
    for wd in decays:
        run = gap_run(seed, n_train=n_train, n_test=10, lam=lam, delta=delta,
                      cfg=TrainConfig(epochs=epochs, seed=seed, weight_decay=wd))
        rows.append(DecayRow(wd, sum(s["s_measured"] for s in run.report.slots), run.report.R,
                             run.report.generalization_bound, run.train_error))
    return rows


def norm_sweep(net: StemVineNetwork, factors, input_norm: float, n: int, delta: float = 0.05,
               scale: str = "b", ramp: float = 0.0) -> list[tuple[float, float, float]]:
    """``(factor, R, bound)`` rows with every ``s`` and/or ``b`` multiplied by ``factor``."""
    if scale not in ("b", "s", "both"):
        raise ValueError("scale must be 'b', 's' or 'both'")
    rows = []
    for f in factors:
        sf = f if scale in ("s", "both") else 1.0
        bf = f if scale in ("b", "both") else 1.0
        R = total_R(net.map_profiles(lambda p: p.scaled(sf, bf)), input_norm)
        rows.append((float(f), R, generalization_bound(ramp, R, n, delta)))
    return rows
