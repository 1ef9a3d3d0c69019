"""Empirical Rademacher complexity of a finite hypothesis class."""
from __future__ import annotations

import itertools

import numpy as np

from ..errors import ParamError, SizeError

ENUMERATION_LIMIT = 20


def _values(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim == 1:
        v = v.reshape(1, -1)
    if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
        raise ParamError("need a nonempty (hypotheses x points) value matrix")
    return v


def sign_stream(seed: int, trial: int, n: int) -> np.ndarray:
    """Uniform +-1 signs from a Philox stream keyed by ``seed`` and advanced by ``trial``."""
    bitgen = np.random.Philox(key=int(seed) % (1 << 64)).jumped(int(trial))
    bits = np.random.Generator(bitgen).integers(0, 2, size=n)
    return 2.0 * bits - 1.0


def rademacher_samples(values, trials: int, seed: int = 0) -> np.ndarray:
    """Per-trial suprema ``max_h (1/n) sum_i eps_i h(x_i)``."""
    v = _values(values)
    if trials < 1:
        raise ParamError("trials must be >= 1")
    n = v.shape[1]
    out = np.empty(trials)
    for t in range(trials):
        out[t] = np.max(v @ sign_stream(seed, t, n)) / n
    return out


def monte_carlo_rademacher(values, trials: int, seed: int = 0) -> float:
    """Monte-Carlo estimate of the empirical Rademacher complexity.

    ``values[h, i]`` is hypothesis ``h`` evaluated on point ``i``.
    """
    return float(np.mean(rademacher_samples(values, trials, seed)))


def exact_rademacher(values) -> float:
    """Exact expectation by enumerating all ``2^n`` sign patterns."""
    v = _values(values)
    n = v.shape[1]
    if n > ENUMERATION_LIMIT:
        raise SizeError(f"enumeration limited to n <= {ENUMERATION_LIMIT}")
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
    return float(np.mean(np.max(v @ signs.T, axis=0)) / n)
