"""
Jet bundle matrices for jetcurv

J_k(h): the (k+1)n x (k+1)n metric of the k-th jet bundle, block (i, j)
holding d^j dbar^i h at z0 (rows count conjugate derivatives).
J_k(A): the block upper-triangular lift of a holomorphic frame change.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from errors import DegenerateJetMetric, DegenerateMetric, JetShapeError
from models import HoloFrame, MetricModel, frame_transform, lift
from wjet import MatrixJet, partial, shift_derivative

logger = logging.getLogger(__name__)

# Relative eigenvalue floor below which J_k(h) counts as degenerate
PD_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class JetMetric:
    """The matrix of J_k(h) at a point"""

    k: int
    n: int
    value: np.ndarray

    def block(self, i: int, j: int) -> np.ndarray:
        n = self.n
        return self.value[i * n : (i + 1) * n, j * n : (j + 1) * n]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.value).real)


@dataclass(frozen=True, eq=False)
class FrameJetMatrix:
    """The matrix of J_k(A) at a point"""

    k: int
    n: int
    value: np.ndarray


def _require_order(hjet: MatrixJet, needed: int, what: str):
    if min(hjet.bi_order) < needed:
        raise JetShapeError(f"{what} needs bi_order >= ({needed}, {needed}), got {hjet.bi_order}")


def check_positive_definite(value: np.ndarray, k: int, point: Optional[complex] = None):
    """Raise DegenerateJetMetric when the smallest eigenvalue falls below PD_FLOOR x largest"""
    if not np.all(np.isfinite(value)):
        raise DegenerateMetric(f"J_{k}(h) is not finite", point=point)
    eigs = np.linalg.eigvalsh((value + value.conj().T) / 2)
    if eigs[0] < PD_FLOOR * max(eigs[-1], 0.0) or eigs[-1] <= 0:
        raise DegenerateJetMetric(
            f"J_{k}(h) is not positive definite (eigenvalues {eigs[0]:.3g} .. {eigs[-1]:.3g})", point=point
        )


def assemble_jet_metric(hjet: MatrixJet, k: int, check: bool = True) -> JetMetric:
    """J_k(h) at the center of hjet"""
    if k < 0:
        raise JetShapeError(f"jet order must be nonnegative, got {k}")
    _require_order(hjet, k, "J_k(h)")
    n = hjet.rank
    value = np.zeros(((k + 1) * n, (k + 1) * n), dtype=complex)
    for i in range(k + 1):
        for j in range(k + 1):
            value[i * n : (i + 1) * n, j * n : (j + 1) * n] = partial(hjet, j, i)
    if check:
        check_positive_definite(value, k, hjet.center)
    return JetMetric(k, n, value)


def assemble_jet_metric_jet(hjet: MatrixJet, k: int, jet_order: int = 2, check: bool = True) -> MatrixJet:
    """Jet of J_k(h) itself, truncated to bi_order (jet_order, jet_order)"""
    if k < 0:
        raise JetShapeError(f"jet order must be nonnegative, got {k}")
    _require_order(hjet, k + jet_order, "jet of J_k(h)")
    blocks = [
        [shift_derivative(hjet, j, i).truncate((jet_order, jet_order)) for j in range(k + 1)] for i in range(k + 1)
    ]
    jet = MatrixJet.from_blocks(blocks)
    if check:
        check_positive_definite(jet.value, k, hjet.center)
    return jet


def jet_frame_matrix(frame: HoloFrame, z0: complex, k: int) -> FrameJetMatrix:
    """J_k(A): block (i, j) = C(j, j - i) A^(j - i)(z0) for j >= i"""
    n = frame.n
    derivs = [math.factorial(r) * t for r, t in enumerate(frame.taylor(z0, k))]
    value = np.zeros(((k + 1) * n, (k + 1) * n), dtype=complex)
    for i in range(k + 1):
        for j in range(i, k + 1):
            value[i * n : (i + 1) * n, j * n : (j + 1) * n] = math.comb(j, j - i) * derivs[j - i]
    return FrameJetMatrix(k, n, value)


def metric_transform_check(model: MetricModel, frame: HoloFrame, z0: complex, k: int) -> float:
    """Frobenius norm of J_k(A^* h A) - J_k(A)^* J_k(h) J_k(A) at z0"""
    transformed = frame_transform(model, frame)
    lhs = assemble_jet_metric(lift(transformed, z0, (k, k)), k, check=False).value
    jh = assemble_jet_metric(lift(model, z0, (k, k)), k, check=False).value
    ja = jet_frame_matrix(frame, z0, k).value
    residual = float(np.linalg.norm(lhs - ja.conj().T @ jh @ ja))
    logger.debug(f"transform law residual at {z0}, k={k}: {residual:.3e}")
    return residual


def leibniz_frame_derivative(hjet: MatrixJet, frame: HoloFrame, l1: int, l2: int) -> np.ndarray:
    """d^l1 dbar^l2 (A^* h A) at the center by the full Leibniz sum

    sum over i <= l2, j <= l1 of C(l2, i) C(l1, j) (A^(i))^* (d^(l1-j) dbar^(l2-i) h) A^(j)
    """
    _require_order(hjet, max(l1, l2), "Leibniz frame derivative")
    z0 = hjet.center
    derivs = [math.factorial(r) * t for r, t in enumerate(frame.taylor(z0, max(l1, l2)))]
    total = np.zeros((hjet.rank, hjet.rank), dtype=complex)
    for i in range(l2 + 1):
        for j in range(l1 + 1):
            total += (
                math.comb(l2, i)
                * math.comb(l1, j)
                * derivs[i].conj().T
                @ partial(hjet, l1 - j, l2 - i)
                @ derivs[j]
            )
    return total


def cocycle_residual(first: HoloFrame, second: HoloFrame, z0: complex, k: int) -> float:
    """||J_k(AB) - J_k(A) J_k(B)|| relative to max(1, ||J_k(A) J_k(B)||)"""
    product = jet_frame_matrix(first.product(second), z0, k).value
    expected = jet_frame_matrix(first, z0, k).value @ jet_frame_matrix(second, z0, k).value
    return float(np.linalg.norm(product - expected) / max(1.0, np.linalg.norm(expected)))


def frame_det_residual(frame: HoloFrame, z0: complex, k: int) -> float:
    """Relative error of det J_k(A) = det(A(z0))^(k+1)"""
    lhs = np.linalg.det(jet_frame_matrix(frame, z0, k).value)
    rhs = np.linalg.det(frame.value(z0)) ** (k + 1)
    return float(abs(lhs - rhs) / abs(rhs)) if rhs != 0 else float(abs(lhs))


def partial_trace(matrix: np.ndarray, n: int) -> np.ndarray:
    """(trace (x) Id_n): sum of the diagonal n x n blocks"""
    matrix = np.asarray(matrix)
    size = matrix.shape[0]
    if n <= 0 or matrix.ndim != 2 or matrix.shape[1] != size or size % n:
        raise JetShapeError(f"cannot take the partial trace of a {matrix.shape} matrix with block size {n}")
    blocks = size // n
    return sum(matrix[b * n : (b + 1) * n, b * n : (b + 1) * n] for b in range(blocks))
