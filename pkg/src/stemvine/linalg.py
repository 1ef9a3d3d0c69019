"""Dense matrix helpers and the three norms the bounds consume.

Matrices are plain ``numpy.ndarray`` objects of dtype float64 and ndim 2.
``as_matrix`` enforces the invariants (nonempty, finite) at module boundaries.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, DimensionError, FormatError, ParamError

SVM_MAGIC = b"SVM1"

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if a.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise ParamError(f"{name} has non-finite entries")
    return a


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def _power_from(m: np.ndarray, x: np.ndarray, tol: float, max_iter: int) -> float:
    x = x / np.linalg.norm(x)
    sigma = 0.0
    for _ in range(max_iter):
        y = m @ x
        sigma = float(np.linalg.norm(y))
        if sigma == 0.0:
            # start vector lies in the null space
            return 0.0
        z = m.T @ (y / sigma)
        # for unit x and u = Mx/|Mx|, |M^T u - sigma x| bounds the distance
        # from sigma to the nearest singular value
        resid = float(np.linalg.norm(z - sigma * x))
        x = z / np.linalg.norm(z)
        if resid <= tol * max(1.0, sigma):
            return float(np.linalg.norm(m @ x))
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations",
        last=x,
        estimate=sigma,
    )


def spectral_norm(m, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Largest singular value of ``m`` by power iteration on ``m.T @ m``.

    Starts from the normalized all-ones vector. A second deterministic start
    (the largest-norm row of ``m``) guards against the all-ones vector being
    orthogonal to the dominant right singular vector; the larger estimate wins.
    """
    if not (0.0 < tol < 1.0):
        raise ParamError("tol must lie in (0, 1)")
    if max_iter < 1:
        raise ParamError("max_iter must be >= 1")
    m = as_matrix(m)
    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        return 0.0
    # iterate on m / max|m_ij| so tiny or huge entries neither underflow nor overflow
    m = m / scale
    try:
        best = _power_from(m, np.ones(m.shape[1]), tol, max_iter)
        row = m[int(np.argmax(np.einsum("ij,ij->i", m, m)))]
        best = max(best, _power_from(m, row.copy(), tol, max_iter))
    except ConvergenceError as err:
        raise ConvergenceError(str(err), last=err.last, estimate=err.estimate * scale) from None
    return best * scale


def norm_2_1_of_transpose(m) -> float:
    """Sum over rows of ``m`` of the row's Euclidean norm, i.e. the (2,1) group norm of ``m.T``."""
    m = as_matrix(m)
    return float(np.sum(np.sqrt(np.einsum("ij,ij->i", m, m))))


def frobenius_norm(m) -> float:
    m = as_matrix(m)
    return float(np.sqrt(np.einsum("ij,ij->", m, m)))


# -- SVM1 binary weight files ------------------------------------------------

def write_matrix(path, m) -> None:
    Path(path).write_bytes(matrix_to_bytes(m))


def matrix_to_bytes(m) -> bytes:
    m = as_matrix(m)
    rows, cols = m.shape
    return SVM_MAGIC + struct.pack("<II", rows, cols) + m.astype("<f8").tobytes(order="C")


def matrix_from_bytes(data: bytes) -> np.ndarray:
    if len(data) < 12 or data[:4] != SVM_MAGIC:
        raise FormatError("missing SVM1 magic")
    rows, cols = struct.unpack_from("<II", data, 4)
    expected = 12 + 8 * rows * cols
    if len(data) != expected:
        raise FormatError(f"SVM1 payload length {len(data)} != {expected}")
    m = np.frombuffer(data, dtype="<f8", offset=12).reshape(rows, cols).astype(np.float64)
    return as_matrix(m)


def read_matrix(path) -> np.ndarray:
    return matrix_from_bytes(Path(path).read_bytes())
