"""Brute-force epsilon-nets over finite point clouds.

Covers use centers drawn from the cloud itself and the Frobenius distance.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..bounds import chain_radius, maurey_log_cover
from ..errors import DimensionError, ParamError, SizeError
from ..graph import Nonlinearity, RELU
from ..linalg import as_matrix, frobenius_norm

EXACT_LIMIT = 20
GRID_DM_LIMIT = 6
GRID_CANDIDATE_LIMIT = 2_000_000


@dataclass
class PointCloud:
    points: np.ndarray  # shape (N, *point_shape)
    params: Optional[list] = field(default=None, repr=False)  # generating matrices, if any

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim < 2 or self.points.shape[0] == 0:
            raise ParamError("point cloud must hold at least one point")

    def __len__(self):
        return self.points.shape[0]

    @property
    def flat(self) -> np.ndarray:
        return self.points.reshape(len(self), -1)

    def distances_from(self, i: int) -> np.ndarray:
        diff = self.flat - self.flat[i]
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def greedy_cover(cloud: PointCloud, eps: float, farthest: bool = False) -> tuple[int, list[int]]:
    """Greedy eps-net; the count upper-bounds the minimal cover with centers in the cloud.

    Default is first-fit in insertion order: a point becomes a center when no
    earlier center lies within ``eps``. ``farthest=True`` instead grows the net
    from point 0 by repeatedly adding the point farthest from all centers.
    """
    if not eps > 0:
        raise ParamError("eps must be positive")
    n = len(cloud)
    if farthest:
        centers = [0]
        dist = cloud.distances_from(0)
        while dist.max() > eps:
            nxt = int(np.argmax(dist))
            centers.append(nxt)
            dist = np.minimum(dist, cloud.distances_from(nxt))
        return len(centers), centers
    covered = np.zeros(n, dtype=bool)
    centers = []
    i = 0
    while i < n:
        if not covered[i]:
            centers.append(i)
            covered |= cloud.distances_from(i) <= eps
        i += 1
    return len(centers), centers


def is_cover(cloud: PointCloud, centers, eps: float) -> bool:
    """Direct check that every point lies within ``eps`` of some center."""
    flat = cloud.flat
    for p in flat:
        d = np.sqrt(((flat[list(centers)] - p) ** 2).sum(axis=1))
        if d.min() > eps:
            return False
    return True


def exact_cover(cloud: PointCloud, eps: float) -> int:
    """Minimal number of eps-balls centered at cloud points that cover the cloud."""
    if not eps > 0:
        raise ParamError("eps must be positive")
    n = len(cloud)
    if n > EXACT_LIMIT:
        raise SizeError(f"exact cover is limited to {EXACT_LIMIT} points, got {n}")
    full = (1 << n) - 1
    masks = []
    for i in range(n):
        within = np.nonzero(cloud.distances_from(i) <= eps)[0]
        masks.append(sum(1 << int(j) for j in within))
    upper, _ = greedy_cover(cloud, eps)
    for size in range(1, upper):
        for combo in itertools.combinations(range(n), size):
            acc = 0
            for c in combo:
                acc |= masks[c]
            if acc == full:
                return size
    return upper


def _grid_values(a: float, step: float) -> np.ndarray:
    k = int(math.floor(a / step + 1e-9))
    return step * np.arange(-k, k + 1, dtype=np.float64)


def grid_matrices(a: float, step: float, rows: int, cols: int) -> np.ndarray:
    """All ``rows x cols`` matrices with grid entries and row-norm sum at most ``a``."""
    if a < 0 or not step > 0:
        raise ParamError("need a >= 0 and step > 0")
    if rows * cols > GRID_DM_LIMIT:
        raise SizeError(f"grid enumeration needs d*m <= {GRID_DM_LIMIT}, got {rows * cols}")
    vals = _grid_values(a, step)
    if len(vals) ** (rows * cols) > GRID_CANDIDATE_LIMIT:
        raise SizeError("grid too fine for exhaustive enumeration")
    cand = np.array(list(itertools.product(vals, repeat=rows * cols)), dtype=np.float64)
    cand = cand.reshape(-1, rows, cols)
    norms = np.sqrt((cand ** 2).sum(axis=2)).sum(axis=1)
    return cand[norms <= a * (1 + 1e-12) + 1e-15]


def grid_single_matrix_class(X, a: float, grid_step: float, d: int, m: int) -> PointCloud:
    """Discretized class ``{X W^T : W in R^{m x d} on the grid, sum of row norms of W <= a}``.

    ``W`` is in operator layout, so ``W.T`` is the ``d x m`` matrix of the
    single-matrix cover bound and the constraint is its (2,1) norm.
    """
    X = as_matrix(X, "X")
    if X.shape[1] != d:
        raise DimensionError(f"X has {X.shape[1]} columns, expected d = {d}")
    Ws = grid_matrices(a, grid_step, m, d)
    points = np.einsum("nd,kmd->knm", X, Ws)
    return PointCloud(points, params=list(Ws))


def compose_class(stage1: PointCloud, second: np.ndarray, nonlinearity: Nonlinearity = RELU) -> PointCloud:
    """``{sigma(P) W2^T}`` over every stage-1 point ``P`` and stage-2 matrix ``W2``."""
    acts = nonlinearity(stage1.points)  # (N1, n, m1)
    points = np.einsum("anm,kjm->aknj", acts, second)
    points = points.reshape(-1, *points.shape[2:])
    return PointCloud(points)


@dataclass
class MaureyCheck:
    d: int
    m: int
    a: float
    eps: float
    points: int
    greedy: int
    log_bound: float

    @property
    def ok(self) -> bool:
        return math.log(self.greedy) <= self.log_bound


def maurey_check(X, a: float, d: int, m: int, eps: float, grid_step: Optional[float] = None) -> MaureyCheck:
    """Greedy cover of a grid class against the single-matrix Maurey bound."""
    X = as_matrix(X, "X")
    step = grid_step if grid_step is not None else a / 2
    cloud = grid_single_matrix_class(X, a, step, d, m)
    count, _ = greedy_cover(cloud, eps)
    return MaureyCheck(d, m, a, eps, len(cloud), count, maurey_log_cover(a, frobenius_norm(X), d, m, eps))


@dataclass
class ChainCheck:
    radius: float
    points: int
    composed_greedy: int
    stage1_greedy: int
    stage2_greedy_max: int
    log_chain_bound: float

    @property
    def stage_product(self) -> int:
        return self.stage1_greedy * self.stage2_greedy_max

    @property
    def ok(self) -> bool:
        return math.log(self.composed_greedy) <= self.log_chain_bound


def chain_check(X, a1: float, a2: float, d: int, m1: int, m2: int, eps1: float, eps2: float,
                nonlinearity: Nonlinearity = RELU, step1=None, step2=None) -> ChainCheck:
    """Two-stage class ``sigma(X W1^T) W2^T`` against the chain product bound.

    Spectral norms are bounded by the (2,1) radii ``a1``, ``a2``. The composed
    class is covered at the chain radius built from the per-stage radii.
    """
    X = as_matrix(X, "X")
    rho = nonlinearity.lipschitz
    stage1 = grid_single_matrix_class(X, a1, step1 or a1 / 2, d, m1)
    W2 = grid_matrices(a2, step2 or a2 / 2, m2, m1)
    composed = compose_class(stage1, W2, nonlinearity)
    # the trailing stage has no nonlinearity, so its Lipschitz factor is 1
    radius = chain_radius([eps1, eps2], [rho, 1.0], [a1, a2])
    composed_count, _ = greedy_cover(composed, radius)
    c1, centers = greedy_cover(stage1, eps1)
    worst = 0
    for c in centers:
        sub = compose_class(PointCloud(stage1.points[c:c + 1]), W2, nonlinearity)
        worst = max(worst, greedy_cover(sub, eps2)[0])
    x_norm = frobenius_norm(X)
    log_bound = maurey_log_cover(a1, x_norm, d, m1, eps1) + maurey_log_cover(a2, rho * a1 * x_norm, m1, m2, eps2)
    return ChainCheck(radius, len(composed), composed_count, c1, worst, log_bound)
