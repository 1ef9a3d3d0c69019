"""Covering-number and margin generalization certificates for residual networks."""
__version__ = "0.1.0"

from .bounds import (
    chain_radius, covering_terms, lipschitz_bound, maurey_log_cover, propagate_norms,
    propagate_radii, total_R,
)
from .cert import BoundReport, certify, dudley_bound, dudley_bound_optimal_alpha, generalization_bound
from .evaluate import (
    LabeledDataset, empirical_ramp_risk, forward, margin, ramp_loss, zero_one_error,
)
from .graph import (
    Nonlinearity, NonlinSlot, NormProfile, StemVineNetwork, Vine, WeightSlot, resnet34_template,
    validate, vertex_count,
)
from .archio import parse_network, serialize_network
from .linalg import frobenius_norm, matmul, norm_2_1_of_transpose, spectral_norm

__all__ = [
    "BoundReport", "LabeledDataset", "Nonlinearity", "NonlinSlot", "NormProfile", "StemVineNetwork", "Vine",
    "WeightSlot", "certify", "chain_radius", "covering_terms", "dudley_bound", "dudley_bound_optimal_alpha",
    "empirical_ramp_risk", "forward", "frobenius_norm", "generalization_bound", "lipschitz_bound", "margin",
    "matmul", "maurey_log_cover", "norm_2_1_of_transpose", "parse_network", "propagate_norms",
    "propagate_radii", "ramp_loss", "resnet34_template", "serialize_network", "spectral_norm", "total_R",
    "validate", "vertex_count", "zero_one_error",
]
