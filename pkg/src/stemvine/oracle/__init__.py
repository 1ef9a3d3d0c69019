"""Independent checks: brute-force covers, Monte-Carlo Rademacher, probes, data and a tiny trainer."""
from .cover import PointCloud, exact_cover, greedy_cover, grid_single_matrix_class
from .data import make_blobs
from .probe import lipschitz_probe
from .rademacher import exact_rademacher, monte_carlo_rademacher
from .train import TrainConfig, train_tiny

__all__ = [
    "PointCloud", "TrainConfig", "exact_cover", "exact_rademacher", "greedy_cover", "grid_single_matrix_class",
    "lipschitz_probe", "make_blobs", "monte_carlo_rademacher", "train_tiny",
]
