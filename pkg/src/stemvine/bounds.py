"""Covering-number bounds for stem-vine networks.

The per-matrix bound is Maurey's sparsification bound instantiated for the
(2,1) norm of the transposed weight deviation. Norm bounds and cover radii are
pushed through the graph by the same linear recursion: a weight step scales by
``s`` (norms) or ``s + 1`` (radii), a nonlinearity by its Lipschitz constant,
and each vine adds ``factor(body) * value(u)`` at its terminal vertex, with an
identity body contributing factor 1.

Each weight matrix is covered at the radius reaching its input vertex, so with
radii normalized to 1 at the output,

    log N(H, eps) <= sum_j b_j^2 |F_in(j)|^2 / (eps_hat_j eps)^2 * log(2 W^2) = R / eps^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ParamError, SemanticError, UnsupportedError
from .graph import NonlinSlot, StemVineNetwork, WeightSlot, validate


def maurey_log_cover(a: float, B: float, d: int, m: int, eps: float) -> float:
    """``ceil(a^2 B^2 / eps^2) * log(2 d m)``; the ceiling is evaluated in exact rational arithmetic."""
    if not eps > 0:
        raise ParamError("eps must be positive")
    if a < 0 or B < 0:
        raise ParamError("a and B must be nonnegative")
    if d < 1 or m < 1:
        raise ParamError("d and m must be positive integers")
    ratio = (Fraction(a) * Fraction(B) / Fraction(eps)) ** 2
    return math.ceil(ratio) * math.log(2 * d * m)


def chain_radius(eps: Sequence[float], rho: Sequence[float], s: Sequence[float]) -> float:
    """Composed radius ``sum_j eps_j rho_j prod_{l>j} rho_l s_l`` of a chain cover."""
    if not (len(eps) == len(rho) == len(s)):
        raise ParamError("eps, rho and s must have equal length")
    if len(eps) == 0:
        raise ParamError("need at least one layer")
    if min(min(eps), min(rho), min(s)) <= 0:
        raise ParamError("all entries must be positive")
    total = 0.0
    tail = 1.0
    for j in reversed(range(len(eps))):
        total += eps[j] * rho[j] * tail
        tail *= rho[j] * s[j]
    return total


def _check(net):
    violations = validate(net)
    if violations:
        raise SemanticError("; ".join(map(str, violations)), violations)


def _step(e, mode):
    if isinstance(e, WeightSlot):
        return e.profile.s if mode == "norm" else e.profile.s + 1.0
    return e.nonlinearity.lipschitz


def _walk(net: StemVineNetwork, start: float, mode: str):
    """Run the recursion; returns (vertex values, vine outputs, per-slot input values)."""
    vertex = [start]
    vine_out = {}
    slot_in = {}
    k = 0
    for idx, e in enumerate(net.stem):
        if isinstance(e, WeightSlot):
            k += 1
            slot_in[f"A{k}"] = vertex[-1]
        val = vertex[-1] * _step(e, mode)
        for vine in net.vines_ending_at(idx + 2):
            h = vertex[vine.u - 1]
            kv = 0
            for ve in vine.body:
                if isinstance(ve, WeightSlot):
                    kv += 1
                    slot_in[f"{vine.name}.A{kv}"] = h
                h *= _step(ve, mode)
            vine_out[vine.key] = h
            val += h
        vertex.append(val)
    return vertex, vine_out, slot_in


def _require_zero_preserving(net):
    elements = list(net.stem) + [e for v in net.vines for e in v.body]
    for e in elements:
        if isinstance(e, NonlinSlot) and not e.nonlinearity.zero_preserving:
            raise UnsupportedError(f"norm propagation needs sigma(0) = 0; {e.nonlinearity} violates it")


def propagate_norms(net: StemVineNetwork, input_norm: float) -> list[float]:
    """Upper bounds on the Frobenius norm of the activation at vertices 1..K+1."""
    _check(net)
    _require_zero_preserving(net)
    if input_norm < 0:
        raise ParamError("input_norm must be nonnegative")
    return _walk(net, float(input_norm), "norm")[0]


def lipschitz_bound(net: StemVineNetwork) -> float:
    """Product-form Lipschitz constant of the whole map (Frobenius norms on batches)."""
    return propagate_norms(net, 1.0)[-1]


@dataclass(frozen=True)
class PropagationTable:
    vertex_norms: Optional[tuple]  # None when radii were propagated alone
    vertex_radii: tuple  # normalized: last entry is 1
    vine_radii: dict  # (u, v, i) -> normalized radius at the vine output
    slot_norms: Optional[dict]  # slot id -> norm bound at the matrix input
    slot_radii: dict  # slot id -> normalized cover radius at the matrix input
    alpha_bar: float


def propagate_radii(net: StemVineNetwork) -> PropagationTable:
    """Normalized cover radii; ``alpha_bar`` is the head-to-tail expansion factor."""
    _check(net)
    vertex, vine_out, slot_in = _walk(net, 1.0, "radius")
    alpha = vertex[-1]
    return PropagationTable(
        vertex_norms=None,
        vertex_radii=tuple(r / alpha for r in vertex),
        vine_radii={k: r / alpha for k, r in vine_out.items()},
        slot_norms=None,
        slot_radii={k: r / alpha for k, r in slot_in.items()},
        alpha_bar=alpha,
    )


def propagation_table(net: StemVineNetwork, input_norm: float) -> PropagationTable:
    radii = propagate_radii(net)
    _require_zero_preserving(net)
    norms, _, slot_norms = _walk(net, float(input_norm), "norm")
    return PropagationTable(
        vertex_norms=tuple(norms),
        vertex_radii=radii.vertex_radii,
        vine_radii=radii.vine_radii,
        slot_norms=slot_norms,
        slot_radii=radii.slot_radii,
        alpha_bar=radii.alpha_bar,
    )


@dataclass(frozen=True)
class LayerTerm:
    slot_id: str
    location: object  # "stem" or the vine triple (u, v, i)
    input_norm_bound: float
    radius_share: float
    b: float
    log_width: float  # log(2 W^2)
    log_term: float

    def as_row(self) -> dict:
        loc = self.location if self.location == "stem" else "V({},{},{})".format(*self.location)
        return {
            "slot": self.slot_id,
            "location": loc,
            "input_norm_bound": self.input_norm_bound,
            "radius_share": self.radius_share,
            "b": self.b,
            "log_2W2": self.log_width,
            "log_term": self.log_term,
        }


def covering_terms(net: StemVineNetwork, input_norm: float, table: Optional[PropagationTable] = None) -> list[LayerTerm]:
    """One term per weight matrix; identity vines contribute nothing."""
    if input_norm < 0:
        raise ParamError("input_norm must be nonnegative")
    if table is None:
        table = propagation_table(net, input_norm)
    log_width = math.log(2.0 * net.max_width ** 2)
    terms = []
    for info in net.weight_slots():
        x_norm = table.slot_norms[info.slot_id]
        share = table.slot_radii[info.slot_id]
        b = info.slot.profile.b
        terms.append(LayerTerm(
            slot_id=info.slot_id,
            location="stem" if info.vine is None else info.vine,
            input_norm_bound=x_norm,
            radius_share=share,
            b=b,
            log_width=log_width,
            log_term=(b * x_norm / share) ** 2 * log_width,
        ))
    return terms


def total_R(net: StemVineNetwork, input_norm: float) -> float:
    return math.fsum(t.log_term for t in covering_terms(net, input_norm))


def log_covering_bound(net: StemVineNetwork, input_norm: float, eps: float) -> float:
    if not eps > 0:
        raise ParamError("eps must be positive")
    return total_R(net, input_norm) / eps ** 2


def term_signature(terms: Sequence[LayerTerm]) -> list[tuple[float, float]]:
    """Sorted ``(b^2, log(2W^2))`` pairs: the placement-independent part of each term."""
    return sorted((t.b ** 2, t.log_width) for t in terms)
