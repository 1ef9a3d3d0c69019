"""Synthetic labeled data."""
from __future__ import annotations

import numpy as np

from ..errors import ParamError
from ..evaluate import LabeledDataset


def corner(c: int, n0: int) -> np.ndarray:
    """Hypercube corner in {-1, +1}^n0 whose sign pattern spells ``c`` in binary."""
    bits = (c >> np.arange(n0)) & 1
    return 2.0 * bits - 1.0


def make_blobs(n: int, n0: int, k: int, spread: float, seed: int = 0) -> LabeledDataset:
    """``k`` Gaussian blobs of std ``spread`` centered on distinct hypercube corners.

    Labels are balanced (counts differ by at most one) and shuffled.
    """
    if n < 1 or n0 < 1 or k < 2:
        raise ParamError("need n >= 1, n0 >= 1, k >= 2")
    if n0 < 63 and k > 2 ** n0:
        raise ParamError(f"cannot place {k} centers on the corners of a {n0}-cube")
    if spread < 0:
        raise ParamError("spread must be nonnegative")
    rng = np.random.default_rng(seed)
    centers = np.stack([corner(c, n0) for c in range(k)])
    labels = rng.permutation(np.arange(n) % k) + 1
    X = centers[labels - 1] + spread * rng.standard_normal((n, n0))
    return LabeledDataset(X, labels, k)
