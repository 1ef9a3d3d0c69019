import csv
import io
import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from stemvine.bounds import total_R
from stemvine.cert import (
    SCHEMA, bound_components, certify, dudley_bound, dudley_bound_optimal_alpha, generalization_bound,
    measure_profiles,
)
from stemvine.errors import ParamError, ProfileViolation
from stemvine.evaluate import empirical_ramp_risk
from stemvine.graph import IDENTITY, NormProfile, chain_network
from stemvine.oracle.data import make_blobs
from stemvine.oracle.netgen import fit_profiles, random_weights, residual_toy

# 40-digit values from mpmath
DUDLEY_R4_N100 = 1.661861266955712892492953847372742229473
OPTIMAL_R4_N100 = 0.915218572022408728133641332237126274195
GEN_CASE = 0.1786880392206686483757482487539511983113


def mp_gen(ramp, R, n, delta):
    with mpmath.workdps(40):
        n = mpmath.mpf(n)
        return (mpmath.mpf(ramp) + 8 / n ** 1.5 + 36 / n * mpmath.sqrt(R) * mpmath.log(n)
                + 3 * mpmath.sqrt(mpmath.log(1 / mpmath.mpf(delta)) / (2 * n)))


def test_dudley_examples():
    assert dudley_bound(0.0, 100) == 4 / 100 ** 1.5
    assert dudley_bound(4.0, 100) == pytest.approx(DUDLEY_R4_N100, rel=1e-14)
    second = dudley_bound(1.0, 50) - 4 / 50 ** 1.5
    assert dudley_bound(4.0, 50) - 4 / 50 ** 1.5 == pytest.approx(2 * second, rel=1e-14)
    with pytest.raises(ParamError):
        dudley_bound(1.0, 1)


def test_optimal_alpha_examples():
    assert dudley_bound_optimal_alpha(0.0, 10) == 0.0
    assert dudley_bound_optimal_alpha(4.0, 100) == pytest.approx(OPTIMAL_R4_N100, rel=1e-14)


@given(st.floats(1e-6, 1e3), st.integers(2, 10 ** 6))
def test_optimal_alpha_below_fixed_cutoff(R, n):
    # the minimizer only improves on alpha = 1/n when it is admissible
    if 3 * math.sqrt(R / n) <= math.sqrt(n):
        assert dudley_bound_optimal_alpha(R, n) <= dudley_bound(R, n) * (1 + 1e-12)


def test_generalization_examples():
    assert generalization_bound(0.1, 1.0, 10 ** 4, 0.01) == pytest.approx(GEN_CASE, rel=1e-12)
    assert generalization_bound(0.0, 0.0, 2, 1 / math.e) == pytest.approx(2 * math.sqrt(2) + 1.5, rel=1e-15)


@given(st.floats(0, 1), st.floats(0, 100), st.integers(2, 10 ** 6), st.floats(1e-6, 0.999))
def test_generalization_matches_extended_precision(ramp, R, n, delta):
    assert generalization_bound(ramp, R, n, delta) == pytest.approx(float(mp_gen(ramp, R, n, delta)), rel=1e-12)


@given(st.floats(0, 1), st.floats(0, 100), st.integers(2, 10 ** 6), st.floats(1e-6, 0.5), st.floats(1e-6, 0.5))
def test_generalization_monotone(ramp, R, n, d1, d2):
    lo, hi = sorted((d1, d2))
    assert generalization_bound(ramp, R, n, lo) >= generalization_bound(ramp, R, n, hi)
    assert generalization_bound(ramp, R + 1, n, lo) >= generalization_bound(ramp, R, n, lo)
    assert generalization_bound(ramp, R, n, lo) >= ramp


@pytest.mark.parametrize("R, delta", [(0.0, 0.05), (1.0, 0.01), (50.0, 0.3)])
def test_non_ramp_terms_decrease_in_n(R, delta):
    grid = [8, 16, 100, 1000, 10 ** 4, 10 ** 5, 10 ** 6]
    vals = [sum(bound_components(R, n, delta).values()) for n in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_domain_errors():
    with pytest.raises(ParamError):
        generalization_bound(0.0, 1.0, 10, 0.0)
    with pytest.raises(ParamError):
        generalization_bound(1.5, 1.0, 10, 0.1)
    with pytest.raises(ParamError):
        generalization_bound(0.0, -1.0, 10, 0.1)


# -- certify -----------------------------------------------------------------------

def toy_setup(seed=0):
    net = residual_toy(2, 4, 2)
    rng = np.random.default_rng(seed)
    refs = random_weights(net, rng)
    weights = {k: v + 0.1 * rng.standard_normal(v.shape) for k, v in refs.items()}
    data = make_blobs(30, 2, 2, 0.3, seed)
    return fit_profiles(net, weights, refs), weights, refs, data


def test_report_invariant():
    net, w, refs, data = toy_setup()
    rep = certify(net, w, refs, data, lam=0.5, delta=0.1)
    n = data.n
    expected = (rep.empirical_ramp_risk + 8 / n ** 1.5 + 36 / n * math.sqrt(rep.R) * math.log(n)
                + 3 * math.sqrt(math.log(1 / 0.1) / (2 * n)))
    assert rep.generalization_bound == pytest.approx(expected, rel=1e-14)
    assert rep.generalization_bound == rep.empirical_ramp_risk + sum(rep.components.values())
    assert rep.R == pytest.approx(total_R(net, rep.input_norm), rel=1e-12)
    assert rep.empirical_ramp_risk == empirical_ramp_risk(net, w, data, 0.5)
    assert rep.network["vertex_count"] == net.vertex_count and len(rep.terms) == 4


def test_zero_weight_network_has_zero_R():
    net = chain_network([2, 3, 2], [NormProfile(1.0, 0.0)] * 2, head=IDENTITY)
    w = {"A1": np.zeros((3, 2)), "A2": np.zeros((2, 3))}
    data = make_blobs(10, 2, 2, 0.1)
    rep = certify(net, w, None, data, lam=1.0, delta=0.05)
    assert rep.R == 0.0
    assert rep.generalization_bound == pytest.approx(
        rep.empirical_ramp_risk + 8 / 10 ** 1.5 + 3 * math.sqrt(math.log(20) / 20), rel=1e-15)


def test_lambda_change_recomputes_ramp():
    net, w, refs, data = toy_setup(1)
    for lam in (0.5, 1.0):
        rep = certify(net, w, refs, data, lam=lam)
        assert rep.empirical_ramp_risk == empirical_ramp_risk(net, w, data, lam)
        assert rep.generalization_bound == rep.empirical_ramp_risk + sum(rep.components.values())


def test_profile_violation_refuses_certificate():
    net, w, refs, data = toy_setup()
    tight_s = net.map_profiles(lambda p: p.scaled(s_factor=0.5))
    with pytest.raises(ProfileViolation):
        certify(tight_s, w, refs, data)
    tight_b = net.map_profiles(lambda p: p.scaled(b_factor=0.5))
    with pytest.raises(ProfileViolation):
        certify(tight_b, w, refs, data)


def test_measured_s_tightens_profile():
    net, w, refs, _ = toy_setup()
    loose = net.map_profiles(lambda p: p.scaled(s_factor=2.0))
    tight, rows = measure_profiles(loose, w, refs)
    for row in rows:
        assert row["s_used"] == row["s_measured"] < row["s_declared"]
    assert tight.profiles()["A1"].s == rows[0]["s_measured"]


def test_certify_is_deterministic():
    net, w, refs, data = toy_setup(2)
    a, b = certify(net, w, refs, data), certify(net, w, refs, data)
    assert a.to_text() == b.to_text() and a.to_csv() == b.to_csv()


def test_report_formats():
    net, w, refs, data = toy_setup()
    rep = certify(net, w, refs, data)
    doc = json.loads(rep.to_text())
    assert doc["schema"] == SCHEMA
    assert doc["R"] == rep.R and len(doc["terms"]) == len(rep.terms)
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert [r["slot"] for r in rows] == [t.slot_id for t in rep.terms]
    assert float(rows[0]["log_term"]) == rep.terms[0].log_term
