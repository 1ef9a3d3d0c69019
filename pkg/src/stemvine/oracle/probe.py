"""Empirical Lipschitz probing."""
from __future__ import annotations

import numpy as np

from ..evaluate import predict
from ..graph import StemVineNetwork


def lipschitz_probe(net: StemVineNetwork, weights: dict, trials: int = 200, seed: int = 0,
                    scale: float = 1.0) -> float:
    """Largest ``|F(x) - F(x')| / |x - x'|`` over seeded random pairs.

    Half of the pairs are far apart, half are small perturbations so that
    local slopes are probed as well.
    """
    rng = np.random.default_rng(seed)
    n0 = net.input_dim
    x = scale * rng.standard_normal((trials, n0))
    direction = rng.standard_normal((trials, n0))
    step = np.where(np.arange(trials) % 2 == 0, scale, 10.0 ** rng.uniform(-4, -1, trials) * scale)
    x2 = x + step[:, None] * direction
    diff_in = np.linalg.norm(x - x2, axis=1)
    diff_out = np.linalg.norm(predict(net, weights, x) - predict(net, weights, x2), axis=1)
    keep = diff_in > 0
    return float(np.max(diff_out[keep] / diff_in[keep]))
