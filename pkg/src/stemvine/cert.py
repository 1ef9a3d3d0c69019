"""Rademacher and margin generalization bounds assembled into certificates."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from . import __version__
from .bounds import LayerTerm, covering_terms, propagation_table
from .errors import DimensionError, ParamError, ProfileViolation, SemanticError
from .evaluate import LabeledDataset, empirical_ramp_risk, zero_one_error
from .graph import NormProfile, StemVineNetwork, validate
from .linalg import frobenius_norm, norm_2_1_of_transpose, spectral_norm

SCHEMA = "svcert/1"
PROFILE_SLACK = 1e-9


def _check_n(n):
    if int(n) != n or n < 2:
        raise ParamError("n must be an integer >= 2")


def dudley_bound(R: float, n: int) -> float:
    """Entropy-integral bound at the cutoff alpha = 1/n: ``4/n^1.5 + (18/n) sqrt(R) log n``."""
    _check_n(n)
    if R < 0:
        raise ParamError("R must be nonnegative")
    return 4.0 / n ** 1.5 + 18.0 / n * math.sqrt(R) * math.log(n)


def dudley_bound_optimal_alpha(R: float, n: int) -> float:
    """Same integral bound at its minimizing cutoff ``alpha = 3 sqrt(R/n)``; 0 at R = 0."""
    _check_n(n)
    if R < 0:
        raise ParamError("R must be nonnegative")
    if R == 0:
        return 0.0
    alpha = 3.0 * math.sqrt(R / n)
    return 4.0 * alpha / math.sqrt(n) + 12.0 / n * math.sqrt(R) * math.log(math.sqrt(n) / alpha)


def bound_components(R: float, n: int, delta: float) -> dict:
    """Non-ramp summands of the generalization bound, in summation order."""
    _check_n(n)
    if not (0.0 < delta < 1.0):
        raise ParamError("delta must lie in (0, 1)")
    if R < 0:
        raise ParamError("R must be nonnegative")
    return {
        "sample_term": 8.0 / n ** 1.5,
        "complexity_term": 36.0 / n * math.sqrt(R) * math.log(n),
        "confidence_term": 3.0 * math.sqrt(math.log(1.0 / delta) / (2.0 * n)),
    }


def generalization_bound(ramp_risk: float, R: float, n: int, delta: float) -> float:
    if not (0.0 <= ramp_risk <= 1.0):
        raise ParamError("ramp risk must lie in [0, 1]")
    c = bound_components(R, n, delta)
    return ramp_risk + c["sample_term"] + c["complexity_term"] + c["confidence_term"]


@dataclass
class BoundReport:
    network: dict
    terms: list
    slots: list
    alpha_bar: float
    R: float
    n: int
    lam: float
    delta: float
    input_norm: float
    empirical_ramp_risk: float
    zero_one_error: float
    rademacher_bound: float
    components: dict
    generalization_bound: float
    tool_version: str = __version__
    schema: str = SCHEMA

    @property
    def non_ramp_remainder(self) -> float:
        return self.generalization_bound - self.empirical_ramp_risk

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "tool_version": self.tool_version,
            "network": self.network,
            "sample": {"n": self.n, "input_frobenius_norm": self.input_norm},
            "lambda": self.lam,
            "delta": self.delta,
            "alpha_bar": self.alpha_bar,
            "R": self.R,
            "empirical_ramp_risk": self.empirical_ramp_risk,
            "empirical_zero_one_error": self.zero_one_error,
            "rademacher_bound": self.rademacher_bound,
            "components": self.components,
            "generalization_bound": self.generalization_bound,
            "slots": self.slots,
            "terms": [t.as_row() for t in self.terms],
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["slot", "location", "input_norm_bound", "radius_share", "b", "log_2W2", "log_term"]
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for t in self.terms:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in t.as_row().items()})
        return buf.getvalue()


def network_summary(net: StemVineNetwork) -> dict:
    slots = net.weight_slots()
    return {
        "vertex_count": net.vertex_count,
        "stem_elements": len(net.stem),
        "vines": len(net.vines),
        "identity_vines": sum(v.is_identity for v in net.vines),
        "weight_matrices": len(slots),
        "stem_weight_matrices": sum(s.vine is None for s in slots),
        "W": net.max_width,
        "input_dim": net.input_dim,
        "output_dim": net.output_dim,
    }


def measure_profiles(net: StemVineNetwork, weights: dict, refs: dict | None = None):
    """Check every weight against its declared profile and tighten ``s`` to the measured value.

    Returns the tightened network and a per-slot table. Raises ProfileViolation
    when a weight exceeds its declared ``s`` or ``b``.
    """
    refs = refs or {}
    tightened = {}
    rows = []
    for info in net.weight_slots():
        sid = info.slot_id
        if sid not in weights:
            raise ProfileViolation(f"no weight bound to slot {sid}")
        A = np.asarray(weights[sid], dtype=np.float64)
        if A.shape != info.slot.shape:
            raise DimensionError(f"slot {sid} expects shape {info.slot.shape}, got {A.shape}")
        p = info.slot.profile
        ref = refs.get(sid, p.reference)
        ref = np.zeros_like(A) if ref is None else np.asarray(ref, dtype=np.float64)
        if ref.shape != A.shape:
            raise DimensionError(f"reference for {sid} has shape {ref.shape}, expected {A.shape}")
        s_meas = spectral_norm(A)
        b_meas = norm_2_1_of_transpose(A - ref)
        if s_meas > p.s * (1 + PROFILE_SLACK):
            raise ProfileViolation(f"{sid}: spectral norm {s_meas!r} exceeds declared s = {p.s!r}")
        if b_meas > p.b * (1 + PROFILE_SLACK):
            raise ProfileViolation(f"{sid}: reference distance {b_meas!r} exceeds declared b = {p.b!r}")
        s_used = s_meas if 0.0 < s_meas <= p.s else p.s
        tightened[sid] = NormProfile(s_used, p.b, ref)
        rows.append({"slot": sid, "s_declared": p.s, "s_measured": s_meas, "s_used": s_used,
                     "b_declared": p.b, "b_measured": b_meas})
    return net.with_profiles(tightened), rows


def certify(net: StemVineNetwork, weights: dict, refs: dict | None, data: LabeledDataset,
            lam: float = 1.0, delta: float = 0.05) -> BoundReport:
    """Generalization certificate for ``weights`` on the sample ``data``."""
    violations = validate(net)
    if violations:
        raise SemanticError("; ".join(map(str, violations)), violations)
    if data.X.shape[1] != net.input_dim:
        raise DimensionError(f"data has {data.X.shape[1]} features, network expects {net.input_dim}")
    if data.k != net.output_dim:
        raise DimensionError(f"data has {data.k} classes, network emits {net.output_dim} scores")
    n = data.n
    tight, slot_rows = measure_profiles(net, weights, refs)
    input_norm = frobenius_norm(data.X)
    table = propagation_table(tight, input_norm)
    terms: list[LayerTerm] = covering_terms(tight, input_norm, table)
    R = math.fsum(t.log_term for t in terms)
    ramp = empirical_ramp_risk(net, weights, data, lam)
    comps = bound_components(R, n, delta)
    return BoundReport(
        network=network_summary(net),
        terms=terms,
        slots=slot_rows,
        alpha_bar=table.alpha_bar,
        R=R,
        n=n,
        lam=float(lam),
        delta=float(delta),
        input_norm=input_norm,
        empirical_ramp_risk=ramp,
        zero_one_error=zero_one_error(net, weights, data),
        rademacher_bound=dudley_bound(R, n),
        components=comps,
        generalization_bound=generalization_bound(ramp, R, n, delta),
    )
