"""Independent reference computations used only by the tests.

Nothing here calls into the code paths it is used to check.
"""
import math

import mpmath
import numpy as np

from stemvine.graph import WeightSlot

DOWNSAMPLE = (4, 8, 14)


def naive_matmul(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0.0
            for k in range(a.shape[1]):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


def mp_sigma_max(m, dps=40):
    with mpmath.workdps(dps):
        s = mpmath.svd_r(mpmath.matrix(np.asarray(m, float).tolist()), compute_uv=False)
        return float(max(s[i] for i in range(len(s))))


def mp_row_norm_sum(m, dps=40):
    with mpmath.workdps(dps):
        return float(mpmath.fsum(mpmath.sqrt(mpmath.fsum(mpmath.mpf(x) ** 2 for x in row)) for row in np.asarray(m, float)))


def _act(nl, x):
    if nl.kind == "relu":
        return max(x, 0.0)
    if nl.kind == "leaky_relu":
        return x if x > 0 else nl.slope * x
    if nl.kind == "tanh":
        return math.tanh(x)
    if nl.kind == "sigmoid":
        return 1.0 / (1.0 + math.exp(-x))
    return x


def _elem(e, vec, W):
    if isinstance(e, WeightSlot):
        return [sum(W[r][c] * vec[c] for c in range(len(vec))) for r in range(len(W))]
    return [_act(e.nonlinearity, x) for x in vec]


def recursive_eval(net, weights, x):
    """Output at the last vertex for one input vector, by direct recursion on vertices."""
    stem_ids, k = [], 0
    for e in net.stem:
        if isinstance(e, WeightSlot):
            k += 1
            stem_ids.append(f"A{k}")
        else:
            stem_ids.append(None)
    memo = {}

    def at(j):
        if j in memo:
            return memo[j]
        if j == 1:
            val = list(x)
        else:
            e = net.stem[j - 2]
            sid = stem_ids[j - 2]
            val = _elem(e, at(j - 1), None if sid is None else weights[sid].tolist())
            for vine in net.vines:
                if vine.v != j:
                    continue
                h = at(vine.u)
                kv = 0
                for ve in vine.body:
                    W = None
                    if isinstance(ve, WeightSlot):
                        kv += 1
                        W = weights[f"{vine.name}.A{kv}"].tolist()
                    h = _elem(ve, h, W)
                val = [p + q for p, q in zip(val, h)]
        memo[j] = val
        return val

    return np.array(at(net.vertex_count))


# -- closed forms for the 34-layer ResNet with stem constants s[1..34], rho[1..35]
# and downsampling-vine constants sv[4], sv[8], sv[14]; norm products use the
# unsquared (triangle-inequality) form.

def _block_norm(s, rho, sv, i):
    base = rho[2 * i] * s[2 * i] * rho[2 * i + 1] * s[2 * i + 1]
    return base + (sv[i] if i in DOWNSAMPLE else 1.0)


def _block_radius(s, rho, sv, i):
    base = rho[2 * i] * (s[2 * i] + 1) * rho[2 * i + 1] * (s[2 * i + 1] + 1)
    return base + 1.0 + (sv[i] if i in DOWNSAMPLE else 0.0)


def resnet_norm_4j3(x, s, rho, sv, j):
    out = x * rho[1] * s[1]
    for i in range(1, j + 1):
        out *= _block_norm(s, rho, sv, i)
    return out


def resnet_norm_4j1(x, s, rho, sv, j):
    out = x * rho[1] * s[1] * rho[2 * j] * s[2 * j]
    for i in range(1, j):
        out *= _block_norm(s, rho, sv, i)
    return out


def resnet_norm_68(x, s, rho, sv):
    return resnet_norm_4j3(x, s, rho, sv, 16) * rho[34]


def resnet_alpha(s, rho, sv):
    out = (s[1] + 1) * rho[1] * rho[34] * (s[34] + 1) * rho[35]
    for i in range(1, 17):
        out *= _block_radius(s, rho, sv, i)
    return out
