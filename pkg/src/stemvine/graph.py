"""Stem-vine architecture model.

A network is a *stem* (ordered weight/nonlinearity elements) plus *vines*
(residual branches). Vertex ``N(j)`` is the junction before stem element ``j``
(1-based); vertex 1 receives the input and vertex ``len(stem) + 1`` holds the
output. A vine ``V(u, v, i)`` reads the full feature at ``N(u)`` and its output
is added elementwise at ``N(v)``.

Weight matrices use operator layout: a slot mapping ``in_dim -> out_dim`` holds
a matrix of shape ``(out_dim, in_dim)``, and a batch ``X`` (one example per row)
maps to ``X @ A.T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .errors import TemplateError

KINDS = ("relu", "leaky_relu", "tanh", "identity", "sigmoid")


@dataclass(frozen=True)
class Nonlinearity:
    """Elementwise activation. ``sigmoid`` is the only kind with sigma(0) != 0."""

    kind: str = "relu"
    slope: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown nonlinearity kind {self.kind!r}")
        if self.kind == "leaky_relu" and not (0.0 < self.slope < 1.0):
            raise ValueError("leaky_relu slope must lie in (0, 1)")
        if self.kind != "leaky_relu" and self.slope != 0.0:
            raise ValueError(f"slope is only meaningful for leaky_relu, not {self.kind}")

    @property
    def lipschitz(self) -> float:
        return 0.25 if self.kind == "sigmoid" else 1.0

    @property
    def zero_preserving(self) -> bool:
        return self.kind != "sigmoid"

    def __call__(self, z: np.ndarray) -> np.ndarray:
        if self.kind == "relu":
            return np.maximum(z, 0.0)
        if self.kind == "leaky_relu":
            return np.where(z > 0.0, z, self.slope * z)
        if self.kind == "tanh":
            return np.tanh(z)
        if self.kind == "sigmoid":
            return 0.5 * (1.0 + np.tanh(0.5 * z))
        return z

    def __str__(self):
        return f"leaky_relu({self.slope})" if self.kind == "leaky_relu" else self.kind


RELU = Nonlinearity("relu")
IDENTITY = Nonlinearity("identity")


@dataclass(frozen=True)
class NormProfile:
    """Declared bounds for one weight matrix.

    ``s`` bounds the spectral norm, ``b`` bounds the (2,1) norm of
    ``(A - reference).T``. A missing reference means the zero matrix.
    """

    s: float
    b: float
    reference: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def scaled(self, s_factor: float = 1.0, b_factor: float = 1.0) -> "NormProfile":
        return replace(self, s=self.s * s_factor, b=self.b * b_factor)


@dataclass(frozen=True)
class WeightSlot:
    in_dim: int
    out_dim: int
    profile: NormProfile

    @property
    def shape(self) -> tuple[int, int]:
        return (self.out_dim, self.in_dim)


@dataclass(frozen=True)
class NonlinSlot:
    dim: int
    nonlinearity: Nonlinearity = RELU

    @property
    def in_dim(self) -> int:
        return self.dim

    @property
    def out_dim(self) -> int:
        return self.dim


StemElement = Union[WeightSlot, NonlinSlot]


@dataclass(frozen=True)
class Vine:
    u: int
    v: int
    copy: int = 1
    body: tuple = ()  # empty body is the identity map

    @property
    def is_identity(self) -> bool:
        return len(self.body) == 0

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.u, self.v, self.copy)

    @property
    def name(self) -> str:
        return f"V{self.u}-{self.v}-{self.copy}"


@dataclass(frozen=True)
class SlotInfo:
    """One weight matrix in the network census."""

    slot_id: str
    vine: Optional[tuple[int, int, int]]  # None for stem slots
    position: int  # index of the element within the stem or vine body
    slot: WeightSlot


@dataclass(frozen=True)
class StemVineNetwork:
    stem: tuple
    vines: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "vines", tuple(self.vines))

    @property
    def vertex_count(self) -> int:
        return len(self.stem) + 1

    @property
    def input_dim(self) -> int:
        return self.stem[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.stem[-1].out_dim

    def vertex_dims(self) -> list[int]:
        """Feature dimension at vertices 1..K+1 (list index j-1 for vertex j)."""
        return [self.stem[0].in_dim] + [e.out_dim for e in self.stem]

    @property
    def max_width(self) -> int:
        """W: the largest feature dimension anywhere in the network."""
        dims = self.vertex_dims()
        for vine in self.vines:
            dims.extend(e.out_dim for e in vine.body)
        return max(dims)

    def vines_ending_at(self, j: int) -> list[Vine]:
        return [vine for vine in self.vines if vine.v == j]

    def weight_slots(self) -> list[SlotInfo]:
        out = []
        k = 0
        for pos, e in enumerate(self.stem):
            if isinstance(e, WeightSlot):
                k += 1
                out.append(SlotInfo(f"A{k}", None, pos, e))
        for vine in self.vines:
            k = 0
            for pos, e in enumerate(vine.body):
                if isinstance(e, WeightSlot):
                    k += 1
                    out.append(SlotInfo(f"{vine.name}.A{k}", vine.key, pos, e))
        return out

    def profiles(self) -> dict[str, NormProfile]:
        return {info.slot_id: info.slot.profile for info in self.weight_slots()}

    def with_profiles(self, profiles: dict) -> "StemVineNetwork":
        """Copy of the network with the named slots' profiles replaced."""

        def swap(elements, prefix):
            new, k = [], 0
            for e in elements:
                if isinstance(e, WeightSlot):
                    k += 1
                    sid = f"{prefix}A{k}"
                    if sid in profiles:
                        e = replace(e, profile=profiles[sid])
                new.append(e)
            return tuple(new)

        stem = swap(self.stem, "")
        vines = tuple(replace(v, body=swap(v.body, v.name + ".")) for v in self.vines)
        return StemVineNetwork(stem, vines)

    def map_profiles(self, fn) -> "StemVineNetwork":
        return self.with_profiles({sid: fn(p) for sid, p in self.profiles().items()})


def vertex_count(net: StemVineNetwork) -> int:
    return net.vertex_count


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    where: str
    message: str

    def __str__(self):
        return f"{self.rule} at {self.where}: {self.message}"


def _check_chain(elements, where, out):
    for idx, e in enumerate(elements):
        if isinstance(e, WeightSlot):
            if e.in_dim <= 0 or e.out_dim <= 0:
                out.append(Violation("NonPositiveDim", f"{where}[{idx}]", "dimensions must be positive"))
            p = e.profile
            if not (np.isfinite(p.s) and p.s > 0) or not (np.isfinite(p.b) and p.b >= 0):
                out.append(Violation("ProfileInvalid", f"{where}[{idx}]", f"need s > 0 and b >= 0, got s={p.s}, b={p.b}"))
            if p.reference is not None and np.shape(p.reference) != e.shape:
                out.append(Violation("ProfileInvalid", f"{where}[{idx}]", f"reference shape {np.shape(p.reference)} != {e.shape}"))
        elif isinstance(e, NonlinSlot):
            if e.dim <= 0:
                out.append(Violation("NonPositiveDim", f"{where}[{idx}]", "dimension must be positive"))
        else:
            out.append(Violation("UnknownElement", f"{where}[{idx}]", f"not a stem element: {e!r}"))
    for idx in range(1, len(elements)):
        if elements[idx - 1].out_dim != elements[idx].in_dim:
            out.append(Violation(
                "StemDimMismatch", f"{where}[{idx}]",
                f"input dim {elements[idx].in_dim} != previous output dim {elements[idx - 1].out_dim}"))


def validate(net: StemVineNetwork) -> list[Violation]:
    """All structural violations of ``net``; empty means valid."""
    out: list[Violation] = []
    if len(net.stem) == 0:
        return [Violation("EmptyStem", "stem", "stem has no elements")]
    _check_chain(net.stem, "stem", out)
    if out:
        return out
    dims = net.vertex_dims()
    last = net.vertex_count
    seen = set()
    for vine in net.vines:
        where = vine.name
        if vine.copy < 1:
            out.append(Violation("VineCopyIndex", where, "copy index must be >= 1"))
        if vine.key in seen:
            out.append(Violation("DuplicateVine", where, "vine triple (u, v, copy) is not unique"))
        seen.add(vine.key)
        if vine.u >= vine.v:
            out.append(Violation("VineOrderViolation", where, f"need u < v, got u={vine.u}, v={vine.v}"))
            continue
        if vine.u < 1 or vine.v > last:
            out.append(Violation("VineRange", where, f"vertices must lie in 1..{last}"))
            continue
        # N(u) is the input or follows a nonlinearity; N(v) follows a nonlinearity
        if vine.u > 1 and not isinstance(net.stem[vine.u - 2], NonlinSlot):
            out.append(Violation("VineAttachment", where, f"N({vine.u}) does not follow a nonlinearity"))
        if not isinstance(net.stem[vine.v - 2], NonlinSlot):
            out.append(Violation("VineAttachment", where, f"N({vine.v}) does not follow a nonlinearity"))
        d_in, d_out = dims[vine.u - 1], dims[vine.v - 1]
        if vine.is_identity:
            if d_in != d_out:
                out.append(Violation("DimMismatch", where, f"identity vine joins dims {d_in} and {d_out}"))
            continue
        body_errors: list[Violation] = []
        _check_chain(vine.body, where, body_errors)
        out.extend(body_errors)
        if body_errors:
            continue
        if vine.body[0].in_dim != d_in:
            out.append(Violation("DimMismatch", where, f"body input dim {vine.body[0].in_dim} != dim {d_in} at N({vine.u})"))
        if vine.body[-1].out_dim != d_out:
            out.append(Violation("DimMismatch", where, f"body output dim {vine.body[-1].out_dim} != dim {d_out} at N({vine.v})"))
    return out


# -- ResNet-34 ---------------------------------------------------------------

RESNET34_STAGE_BLOCKS = (3, 4, 6, 3)
RESNET34_DOWNSAMPLE_BLOCKS = (4, 8, 14)


def _stage_of_block(i: int) -> int:
    edge = 0
    for stage, count in enumerate(RESNET34_STAGE_BLOCKS):
        edge += count
        if i <= edge:
            return stage
    raise ValueError(i)


def resnet34_template(
    stem_profiles: Sequence[NormProfile],
    vine_profiles: Sequence[NormProfile],
    widths: Union[int, Sequence[int]] = 4,
    nonlinearity: Nonlinearity = RELU,
    head: Nonlinearity = IDENTITY,
) -> StemVineNetwork:
    """34-layer ResNet as stem ``(A1, s1, ..., A33, s33, s34, A34, s35)`` with 16 vines.

    ``widths`` is either one int (every feature has that dimension) or
    ``(n0, stage1, stage2, stage3, stage4, classes)``. Vines
    ``V(4i-1, 4i+3, 1)`` for blocks 4, 8, 14 carry one weight matrix
    (the downsampling shortcut); the other 13 are identities.
    """
    stem_profiles = list(stem_profiles)
    vine_profiles = list(vine_profiles)
    if len(stem_profiles) != 34:
        raise TemplateError(f"need 34 stem profiles, got {len(stem_profiles)}")
    if len(vine_profiles) != 3:
        raise TemplateError(f"need 3 vine profiles, got {len(vine_profiles)}")
    if isinstance(widths, int):
        widths = (widths,) * 6
    widths = tuple(int(w) for w in widths)
    if len(widths) != 6 or min(widths) <= 0:
        raise TemplateError("widths must be one positive int or six positive ints")
    n0, stages, classes = widths[0], widths[1:5], widths[5]

    stem: list = [WeightSlot(n0, stages[0], stem_profiles[0]), NonlinSlot(stages[0], nonlinearity)]
    vines = []
    current = stages[0]
    for i in range(1, 17):
        w = stages[_stage_of_block(i)]
        stem += [
            WeightSlot(current, w, stem_profiles[2 * i - 1]),
            NonlinSlot(w, nonlinearity),
            WeightSlot(w, w, stem_profiles[2 * i]),
            NonlinSlot(w, nonlinearity),
        ]
        if i in RESNET34_DOWNSAMPLE_BLOCKS:
            vp = vine_profiles[RESNET34_DOWNSAMPLE_BLOCKS.index(i)]
            body = (WeightSlot(current, w, vp),)
        else:
            if current != w:
                raise TemplateError(f"identity vine in block {i} joins widths {current} and {w}")
            body = ()
        vines.append(Vine(4 * i - 1, 4 * i + 3, 1, body))
        current = w
    stem += [NonlinSlot(current, nonlinearity), WeightSlot(current, classes, stem_profiles[33]), NonlinSlot(classes, head)]
    return StemVineNetwork(tuple(stem), tuple(vines))


def uniform_resnet34(s: float = 1.0, b: float = 1.0, widths: Union[int, Sequence[int]] = 4, **kw) -> StemVineNetwork:
    p = NormProfile(s, b)
    return resnet34_template([p] * 34, [p] * 3, widths, **kw)


def chain_network(dims: Sequence[int], profiles: Sequence[NormProfile], nonlinearity: Nonlinearity = RELU,
                  head: Optional[Nonlinearity] = None) -> StemVineNetwork:
    """Plain chain ``(A1, s1, ..., AL, sL)`` through the given feature dims."""
    if len(profiles) != len(dims) - 1:
        raise ValueError("need one profile per layer")
    stem = []
    for li, p in enumerate(profiles):
        stem.append(WeightSlot(dims[li], dims[li + 1], p))
        last = li == len(profiles) - 1
        stem.append(NonlinSlot(dims[li + 1], head if (last and head is not None) else nonlinearity))
    return StemVineNetwork(tuple(stem))
