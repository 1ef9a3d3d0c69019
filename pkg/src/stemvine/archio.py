"""Architecture text format ``stemvine/1``.

The format is UTF-8 JSON::

    {
      "version": "stemvine/1",
      "stem": [
        {"type": "weight", "in": 4, "out": 8, "s": 1.5, "b": 0.3},
        {"type": "nonlin", "dim": 8, "kind": "relu"},
        {"type": "nonlin", "dim": 8, "kind": "leaky_relu", "slope": 0.1}
      ],
      "vines": [
        {"u": 3, "v": 7, "copy": 1, "body": "identity"},
        {"u": 15, "v": 19, "copy": 1, "body": [{"type": "weight", ...}]}
      ],
      "weights": {"A1": {"weight": "A1.svm", "reference": "A1.ref.svm"}}
    }

``vines`` and ``weights`` are optional. Weight paths are resolved relative to
the architecture file by the loaders in :mod:`stemvine.io`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ArchSyntaxError, SemanticError
from .graph import KINDS, Nonlinearity, NonlinSlot, NormProfile, StemVineNetwork, Vine, WeightSlot, validate

VERSION = "stemvine/1"


@dataclass
class Architecture:
    network: StemVineNetwork
    weight_refs: dict = field(default_factory=dict)


def _element_to_obj(e):
    if isinstance(e, WeightSlot):
        return {"type": "weight", "in": e.in_dim, "out": e.out_dim, "s": e.profile.s, "b": e.profile.b}
    obj = {"type": "nonlin", "dim": e.dim, "kind": e.nonlinearity.kind}
    if e.nonlinearity.kind == "leaky_relu":
        obj["slope"] = e.nonlinearity.slope
    return obj


def serialize_network(net: StemVineNetwork, weight_refs: dict | None = None) -> str:
    doc = {
        "version": VERSION,
        "stem": [_element_to_obj(e) for e in net.stem],
        "vines": [
            {
                "u": v.u, "v": v.v, "copy": v.copy,
                "body": "identity" if v.is_identity else [_element_to_obj(e) for e in v.body],
            }
            for v in net.vines
        ],
    }
    if weight_refs:
        doc["weights"] = {k: dict(weight_refs[k]) for k in sorted(weight_refs)}
    return json.dumps(doc, indent=2) + "\n"


def _need(obj, key, kind, where):
    if not isinstance(obj, dict):
        raise ArchSyntaxError(f"{where}: expected an object")
    if key not in obj:
        raise ArchSyntaxError(f"{where}: missing key {key!r}")
    val = obj[key]
    if kind is int:
        ok = isinstance(val, int) and not isinstance(val, bool)
    elif kind is float:
        ok = isinstance(val, (int, float)) and not isinstance(val, bool)
    else:
        ok = isinstance(val, kind)
    if not ok:
        raise ArchSyntaxError(f"{where}.{key}: expected {kind.__name__}, got {type(val).__name__}")
    return float(val) if kind is float else val


def _element_from_obj(obj, where):
    etype = _need(obj, "type", str, where)
    if etype == "weight":
        return WeightSlot(
            _need(obj, "in", int, where),
            _need(obj, "out", int, where),
            NormProfile(_need(obj, "s", float, where), _need(obj, "b", float, where)),
        )
    if etype == "nonlin":
        kind = _need(obj, "kind", str, where)
        if kind not in KINDS:
            raise ArchSyntaxError(f"{where}.kind: unknown nonlinearity kind {kind!r}")
        slope = _need(obj, "slope", float, where) if kind == "leaky_relu" else 0.0
        try:
            nl = Nonlinearity(kind, slope)
        except ValueError as exc:
            raise ArchSyntaxError(f"{where}: {exc}") from None
        return NonlinSlot(_need(obj, "dim", int, where), nl)
    raise ArchSyntaxError(f"{where}.type: unknown element type {etype!r}")


def parse_architecture(text: str) -> Architecture:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArchSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ArchSyntaxError("top level must be an object", 1, 1)
    version = doc.get("version")
    if version != VERSION:
        raise ArchSyntaxError(f"unsupported version {version!r}, expected {VERSION!r}")
    stem_doc = _need(doc, "stem", list, "root")
    stem = tuple(_element_from_obj(o, f"stem[{i}]") for i, o in enumerate(stem_doc))
    vines = []
    for i, o in enumerate(doc.get("vines", [])):
        where = f"vines[{i}]"
        body_doc = o.get("body") if isinstance(o, dict) else None
        if body_doc == "identity":
            body = ()
        elif isinstance(body_doc, list) and body_doc:
            body = tuple(_element_from_obj(e, f"{where}.body[{j}]") for j, e in enumerate(body_doc))
        else:
            raise ArchSyntaxError(f"{where}.body: expected \"identity\" or a nonempty list")
        vines.append(Vine(_need(o, "u", int, where), _need(o, "v", int, where), _need(o, "copy", int, where), body))
    refs = doc.get("weights", {})
    if not isinstance(refs, dict) or not all(isinstance(v, dict) for v in refs.values()):
        raise ArchSyntaxError("weights: expected an object of objects")
    net = StemVineNetwork(stem, tuple(vines))
    violations = validate(net)
    if violations:
        raise SemanticError("; ".join(str(v) for v in violations), violations)
    return Architecture(net, refs)


def parse_network(text: str) -> StemVineNetwork:
    return parse_architecture(text).network
