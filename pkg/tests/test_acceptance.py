"""Acceptance criteria. Each test prints one PASS/FAIL line, collected in the terminal summary."""
import math
import time

import mpmath
import numpy as np

from stemvine.bounds import covering_terms
from stemvine.cert import certify, generalization_bound
from stemvine.evaluate import LabeledDataset, empirical_ramp_risk, zero_one_error
from stemvine.graph import uniform_resnet34, validate
from stemvine.oracle.netgen import add_vine, fit_profiles, random_network, random_weights
from stemvine.oracle.suites import (
    chain_suite, gap_run, maurey_suite, placement_suite, propagation_suite, rademacher_suite,
    weight_decay_sweep,
)


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_resnet34_census(criterion):
    with Clock() as clock:
        net = uniform_resnet34(widths=(3, 4, 5, 6, 7, 10))
        weighted = {v.key for v in net.vines if not v.is_identity}
        terms = covering_terms(net, 1.0)
    ok = (validate(net) == [] and net.vertex_count == 70 and len(net.vines) == 16
          and weighted == {(15, 19, 1), (31, 35, 1), (55, 59, 1)} and len(terms) == 37 and clock.seconds < 1)
    detail = f"vertices={net.vertex_count} vines={len(net.vines)} weighted={sorted(weighted)} terms={len(terms)}"
    assert criterion(1, "ResNet-34 structural constants", ok, detail)


def test_maurey_domination(criterion):
    with Clock() as clock:
        checks = maurey_suite(seeds=(0, 1, 2))
    bad = [c for c in checks if not c.ok]
    ok = not bad and clock.seconds < 30
    assert criterion(2, "greedy cover <= Maurey bound", ok, f"{len(checks)} instances, {len(bad)} violations, {clock.seconds:.2f}s")


def test_chain_domination(criterion):
    with Clock() as clock:
        checks = chain_suite(range(6))
    bad = [c for c in checks if not c.ok]
    ok = not bad and clock.seconds < 60
    assert criterion(3, "composed greedy cover <= chain product bound", ok,
                     f"{len(checks)} instances, {len(bad)} violations, {clock.seconds:.2f}s")


def test_identity_vine_neutrality(criterion):
    bad = 0
    with Clock() as clock:
        for seed in range(100):
            rng = np.random.default_rng([4, seed])
            net = random_network(rng, uniform_width=True)
            base = len(covering_terms(net, 1.0))
            bad += len(covering_terms(add_vine(net, rng, identity=True), 1.0)) != base
            bad += len(covering_terms(add_vine(net, rng, identity=False), 1.0)) != base + 1
    ok = bad == 0 and clock.seconds < 10
    assert criterion(4, "identity vines add no covering term", ok, f"100 networks, {bad} violations, {clock.seconds:.2f}s")


def test_placement_invariance(criterion):
    with Clock() as clock:
        checks = placement_suite(100, seed=0)
    bad = [c for c in checks if not c.ok]
    ok = not bad and clock.seconds < 10
    assert criterion(5, "chain and stem-vine term census agree", ok, f"100 pairs, {len(bad)} violations, {clock.seconds:.2f}s")


def test_norm_propagation_soundness(criterion):
    with Clock() as clock:
        checks = propagation_suite(networks=50, inputs=20, seed=0)
    bad = [c for c in checks if not c.ok]
    ok = not bad and clock.seconds < 60
    worst = max(c.probe_ratio / c.lipschitz for c in checks)
    assert criterion(6, "activation norms and probed slopes within propagated bounds", ok,
                     f"50 networks, {len(bad)} violations, worst probe/bound {worst:.3f}, {clock.seconds:.2f}s")


def test_dudley_consistency(criterion):
    with Clock() as clock:
        checks = rademacher_suite(trials=10_000, seed=0)
    bad = [c for c in checks if not c.ok]
    ok = not bad and clock.seconds < 60
    worst = max(c.estimate / c.dudley for c in checks)
    assert criterion(7, "Monte-Carlo Rademacher <= entropy-integral bound", ok,
                     f"{len(checks)} classes, {len(bad)} violations, worst ratio {worst:.3f}, {clock.seconds:.2f}s")


def test_generalization_arithmetic(criterion):
    with Clock() as clock:
        with mpmath.workdps(40):
            n, delta = mpmath.mpf(10 ** 4), mpmath.mpf("0.01")
            exact = (mpmath.mpf("0.1") + 8 / n ** 1.5 + 36 / n * mpmath.log(n)
                     + 3 * mpmath.sqrt(mpmath.log(1 / delta) / (2 * n)))
            closed = 2 * mpmath.sqrt(2) + mpmath.mpf("1.5")
        got = generalization_bound(0.1, 1.0, 10 ** 4, 0.01)
        got0 = generalization_bound(0.0, 0.0, 2, 1 / math.e)
        err = abs(got - float(exact)) / float(exact)
        err0 = abs(got0 - float(closed)) / float(closed)
    ok = err <= 1e-12 and err0 <= 1e-15 and clock.seconds < 1
    assert criterion(8, "generalization bound arithmetic", ok, f"rel err {err:.1e} and {err0:.1e}")


def test_gap_validity(criterion):
    with Clock() as clock:
        runs = [gap_run(seed, n_train=200, n_test=2000, lam=1.0, delta=0.05) for seed in range(20)]
    bad = [r for r in runs if not r.ok]
    ok = not bad and clock.seconds < 180
    worst = max(r.gap for r in runs)
    assert criterion(9, "observed gap <= certified remainder", ok,
                     f"20 seeds, {len(bad)} violations, largest gap {worst:.4f}, "
                     f"smallest remainder {min(r.remainder for r in runs):.4g}, {clock.seconds:.1f}s")


def test_weight_decay_correlation(criterion):
    with Clock() as clock:
        rows = weight_decay_sweep((0.0, 1e-2, 1.0), seed=0)
    s = [r.spectral_sum for r in rows]
    R = [r.R for r in rows]
    ok = s[0] > s[1] > s[2] and R[0] >= R[1] >= R[2] and clock.seconds < 120
    detail = ", ".join(f"wd={r.weight_decay:g}: sum s={r.spectral_sum:.4g} R={r.R:.4g}" for r in rows)
    assert criterion(10, "weight decay lowers norms and R", ok, detail)


def _triple(seed):
    rng = np.random.default_rng([11, seed])
    while True:
        net = random_network(rng)
        if net.output_dim >= 2:
            break
    weights = random_weights(net, rng, scale=float(rng.uniform(0.5, 3.0)))
    refs = random_weights(net, rng)
    net = fit_profiles(net, weights, refs)
    n = int(rng.integers(5, 40))
    data = LabeledDataset(rng.standard_normal((n, net.input_dim)), rng.integers(1, net.output_dim + 1, size=n),
                          net.output_dim)
    return net, weights, refs, data, float(rng.uniform(0.05, 5.0))


def test_ramp_dominance_and_determinism(criterion):
    bad_ramp = bad_det = 0
    with Clock() as clock:
        for seed in range(100):
            net, w, refs, data, lam = _triple(seed)
            bad_ramp += zero_one_error(net, w, data) > empirical_ramp_risk(net, w, data, lam)
            first = certify(net, w, refs, data, lam, 0.05)
            second = certify(net, w, refs, data, lam, 0.05)
            bad_det += first.to_text() != second.to_text() or first.to_csv() != second.to_csv()
    ok = bad_ramp == 0 and bad_det == 0 and clock.seconds < 30
    assert criterion(11, "ramp risk dominates 0-1 error; certify is deterministic", ok,
                     f"100 triples, {bad_ramp} ramp violations, {bad_det} nondeterministic, {clock.seconds:.2f}s")
