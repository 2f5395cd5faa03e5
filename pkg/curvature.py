"""
Curvature computations for jetcurv

Theta is the coefficient of dconj(z) ^ dz in dbar(h^-1 dh); it is positive
for the weighted disk metrics (1 - |z|^2)^-lam. All derivatives come from a
single lift of h; nothing here differentiates numerically.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from errors import ConfigError, DegenerateJetMetric, DegenerateMetric, InternalInconsistency, JetShapeError
from jetbundle import assemble_jet_metric, assemble_jet_metric_jet, partial_trace
from models import AnyModel, as_multivariable
from wjet import (
    MatrixJet,
    WirtingerJet,
    det_jet,
    invert,
    jet_log,
    mul,
    partial,
    scale,
    shift_derivative,
)

logger = logging.getLogger(__name__)

# Relative disagreement tolerated between two routes to the same curvature
ROUTE_TOL = 1e-7
DET_ROUTE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CurvatureForm:
    """Theta at a point, with the disagreement of any internal cross-check"""

    point: complex
    theta: np.ndarray
    discrepancy: float = 0.0

    @property
    def rank(self) -> int:
        return self.theta.shape[0]

    @property
    def negated(self) -> np.ndarray:
        """The same form in the -dd^c log convention"""
        return -self.theta

    @property
    def scalar(self) -> float:
        if self.rank != 1:
            raise JetShapeError(f"curvature of rank {self.rank} is not a scalar")
        return float(self.theta[0, 0].real)

    def eigenvalues(self) -> np.ndarray:
        return np.sort_complex(np.linalg.eigvals(self.theta))


@dataclass(frozen=True, eq=False)
class WedgeGram:
    """h_k = Gram matrix of the wedge vectors F_i^k, optionally as a jet"""

    k: int
    hk: np.ndarray
    jet: Optional[MatrixJet] = None


@dataclass(frozen=True, eq=False)
class MultiCurvatureForm:
    """theta[i, j] is the n x n coefficient of dconj(z_j) ^ dz_i"""

    point: tuple[complex, ...]
    theta: np.ndarray
    discrepancy: float = 0.0


def _relative_gap(a: np.ndarray, b: np.ndarray) -> float:
    scale_ = max(np.linalg.norm(a), np.linalg.norm(b))
    return float(np.linalg.norm(a - b) / scale_) if scale_ > 0 else 0.0


def _require_order(hjet: MatrixJet, needed: int, what: str):
    if min(hjet.bi_order) < needed:
        raise JetShapeError(f"{what} needs bi_order >= ({needed}, {needed}), got {hjet.bi_order}")


def _check_metric(value: np.ndarray, point: complex):
    if not np.all(np.isfinite(value)):
        raise DegenerateMetric("metric is not finite", point=point)
    eigs = np.linalg.eigvalsh((value + value.conj().T) / 2)
    if eigs[0] <= 0:
        raise DegenerateMetric("metric is not positive definite", point=point)


def curvature(hjet: MatrixJet) -> CurvatureForm:
    """Theta = h^-1 (dbar d h - dbar h h^-1 d h), read off dbar(h^-1 dh) in the jet ring"""
    _require_order(hjet, 1, "curvature")
    _check_metric(hjet.value, hjet.center)
    h = hjet.truncate((1, 1))
    connection = mul(invert(h).truncate((0, 1)), shift_derivative(h, 1, 0))
    return CurvatureForm(hjet.center, np.array(partial(connection, 0, 1)))


def _as_scalar(hjet) -> WirtingerJet:
    if isinstance(hjet, MatrixJet):
        if hjet.rank != 1:
            raise JetShapeError(f"expected a scalar metric, got rank {hjet.rank}")
        return hjet.entry(0, 0)
    return hjet


def curvature_log_line(hjet) -> float:
    """dbar d log h at the center for a scalar metric"""
    h = _as_scalar(hjet)
    _require_order(h, 1, "log curvature")
    c = h.value
    if not (abs(c.imag) <= 1e-12 * abs(c) and c.real > 0):
        raise DegenerateMetric(f"scalar metric must be positive, got {c}", point=h.center)
    return float(partial(jet_log(h.truncate((1, 1))), 1, 1).real)


def _bordered_rows(n: int, k: int, i: int) -> list[int]:
    return list(range(n * k)) + [n * k + i]


def wedge_gram(hjet: MatrixJet, k: int, jet_order: int = 0) -> WedgeGram:
    """h_k as bordered determinants of J_k(h)

    Entry (i, j) is the determinant of J_k(h) restricted to rows
    0..nk-1, nk+i and columns 0..nk-1, nk+j; h_0 = h. With jet_order > 0
    the determinants are taken in the jet ring and returned as well.
    """
    if k < 0:
        raise JetShapeError(f"jet order must be nonnegative, got {k}")
    _require_order(hjet, k + jet_order, f"h_{k}")
    n = hjet.rank
    if jet_order > 0:
        if k == 0:
            jet = hjet.truncate((jet_order, jet_order))
        else:
            big = assemble_jet_metric_jet(hjet, k, jet_order, check=False)
            entries = [
                [det_jet(big.take(_bordered_rows(n, k, i), _bordered_rows(n, k, j))) for j in range(n)]
                for i in range(n)
            ]
            jet = MatrixJet.from_entries(entries)
        return WedgeGram(k, np.array(jet.value), jet)
    if k == 0:
        return WedgeGram(0, np.array(hjet.value))
    big = assemble_jet_metric(hjet, k, check=False).value
    hk = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            hk[i, j] = np.linalg.det(big[np.ix_(_bordered_rows(n, k, i), _bordered_rows(n, k, j))])
    return WedgeGram(k, hk)


def _det_value(hjet: MatrixJet, k: int) -> complex:
    """det J_k(h) at the center, with det J_-1(h) = 1"""
    if k < 0:
        return 1.0
    return complex(np.linalg.det(assemble_jet_metric(hjet, k, check=False).value))


def _block_route(hjet: MatrixJet, k: int) -> np.ndarray:
    """Theta of J_k from the Schur-complement block formula

    Only the last block column is nonzero: the top part is
    -(det J_k)^-1 A^-1 B S^-1 h_{k+1} and the bottom part is
    (det J_k)^-1 det J_{k-1} h_k^-1 h_{k+1}, where J_k = [[A, B], [C, D]]
    splits off the last n x n block and S = D - C A^-1 B.
    """
    n = hjet.rank
    jk = assemble_jet_metric(hjet, k).value
    det_k = _det_value(hjet, k)
    det_prev = _det_value(hjet, k - 1)
    hk = wedge_gram(hjet, k).hk
    hk1 = wedge_gram(hjet, k + 1).hk
    size = (k + 1) * n
    theta = np.zeros((size, size), dtype=complex)
    bottom = det_prev * np.linalg.solve(hk, hk1) / det_k
    theta[k * n :, k * n :] = bottom
    if k > 0:
        a = jk[: k * n, : k * n]
        b = jk[: k * n, k * n :]
        # S^-1 = det J_{k-1} h_k^-1, so the top block is -A^-1 B times the bottom block
        theta[: k * n, k * n :] = -np.linalg.solve(a, b) @ bottom
    return theta


def jet_curvature(hjet: MatrixJet, k: int, strict: bool = True) -> CurvatureForm:
    """Theta of the jet bundle J_k, computed two ways and cross-checked

    With strict=False a disagreement is only recorded in the discrepancy.
    """
    _require_order(hjet, k + 1, f"curvature of J_{k}")
    general = curvature(assemble_jet_metric_jet(hjet, k, jet_order=1)).theta
    block = _block_route(hjet, k)
    gap = _relative_gap(general, block)
    if strict and gap > ROUTE_TOL:
        raise InternalInconsistency(
            f"jet curvature routes disagree at k={k} (relative gap {gap:.3e})", point=hjet.center
        )
    return CurvatureForm(hjet.center, general, gap)


def line_jet_entries(hjet: MatrixJet, k: int) -> np.ndarray:
    """Last column of Theta of J_k for a line bundle; the final entry is the det-bundle curvature"""
    if hjet.rank != 1:
        raise JetShapeError("line-jet structure applies to rank 1 metrics")
    return jet_curvature(hjet, k).theta[:, -1].copy()


def det_curvature_routes(hjet: MatrixJet, k: int) -> tuple[float, float]:
    """(det J_{k-1} det J_{k+1} / det J_k^2, dbar d log det J_k) for a line bundle"""
    if hjet.rank != 1:
        raise JetShapeError("the determinant-curvature formula applies to rank 1 metrics")
    _require_order(hjet, k + 1, f"det J_{k + 1}")
    det_k = _det_value(hjet, k)
    if det_k.real <= 0:
        raise DegenerateJetMetric(f"det J_{k}(h) = {det_k.real:.3g} is not positive", point=hjet.center)
    det_next = _det_value(hjet, k + 1)
    if det_next.real < 0:
        raise DegenerateJetMetric(f"det J_{k + 1}(h) = {det_next.real:.3g} is negative", point=hjet.center)
    formula = (_det_value(hjet, k - 1) * det_next / det_k**2).real
    log_route = curvature_log_line(det_jet(assemble_jet_metric_jet(hjet, k, jet_order=1, check=False)))
    return float(formula), log_route


def det_jet_curvature(hjet: MatrixJet, k: int) -> float:
    """Curvature of the determinant bundle of J_k for a line bundle"""
    formula, log_route = det_curvature_routes(hjet, k)
    gap = abs(formula - log_route) / max(abs(formula), abs(log_route), 1e-300)
    if gap > DET_ROUTE_TOL:
        raise InternalInconsistency(
            f"det-curvature formula {formula!r} and log route {log_route!r} disagree", point=hjet.center
        )
    return formula


def det_minor_derivatives(hjet: MatrixJet, k: int) -> dict[str, tuple[complex, complex]]:
    """d, dbar and d dbar of det J_k(h) against the matching minors of J_{k+1}(h)

    For a line bundle d det J_k is the minor of J_{k+1} on rows 0..k and
    columns 0..k-1, k+1; dbar det J_k swaps rows and columns; d dbar det J_k
    is the minor with row k and column k removed.
    """
    if hjet.rank != 1:
        raise JetShapeError("minor derivatives apply to rank 1 metrics")
    _require_order(hjet, k + 1, f"J_{k + 1}")
    det = det_jet(assemble_jet_metric_jet(hjet, k, jet_order=1, check=False))
    big = assemble_jet_metric(hjet, k + 1, check=False).value
    keep = list(range(k + 1))
    shifted = list(range(k)) + [k + 1]
    return {
        "d": (complex(partial(det, 1, 0)), complex(np.linalg.det(big[np.ix_(keep, shifted)]))),
        "dbar": (complex(partial(det, 0, 1)), complex(np.linalg.det(big[np.ix_(shifted, keep)]))),
        "d_dbar": (complex(partial(det, 1, 1)), complex(np.linalg.det(big[np.ix_(shifted, shifted)]))),
    }


def quotient_metric(hjet: MatrixJet, k: int, jet_order: int = 1) -> MatrixJet:
    """Jet of h_k / det J_{k-1}(h), the metric of J_k / J_{k-1}"""
    if k == 0:
        _require_order(hjet, jet_order, "quotient metric")
        return hjet.truncate((jet_order, jet_order))
    gram = wedge_gram(hjet, k, jet_order)
    lower = det_jet(assemble_jet_metric_jet(hjet, k - 1, jet_order))
    return scale(gram.jet, invert(lower))


def quotient_curvature(hjet: MatrixJet, k: int) -> np.ndarray:
    return curvature(quotient_metric(hjet, k)).theta


def trace_formula_terms(
    hjet: MatrixJet, k: int, strict: bool = True
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(trace (x) Id)(Theta_{J_k}), the same for J_{k-1}, and Theta of the quotient"""
    if k < 1:
        raise JetShapeError("the trace formula needs k >= 1")
    n = hjet.rank
    upper = partial_trace(jet_curvature(hjet, k, strict).theta, n)
    lower = partial_trace(jet_curvature(hjet, k - 1, strict).theta, n)
    return upper, lower, quotient_curvature(hjet, k)


def trace_formula_residual(hjet: MatrixJet, k: int, strict: bool = True) -> float:
    upper, lower, quotient = trace_formula_terms(hjet, k, strict)
    return float(np.linalg.norm(upper - lower - quotient))


def quotient_det_residual(hjet: MatrixJet, k: int, strict: bool = True) -> float:
    """Determinant of the quotient metric vs det J_k / det J_{k-1}, and its trace-curvature form"""
    quotient = quotient_metric(hjet, k)
    det_q = complex(np.linalg.det(quotient.value))
    det_ratio = _det_value(hjet, k) / _det_value(hjet, k - 1)
    det_gap = abs(det_q - det_ratio) / max(abs(det_ratio), 1e-300)
    trace_q = np.trace(curvature(quotient).theta)
    trace_upper = np.trace(jet_curvature(hjet, k, strict).theta)
    trace_lower = np.trace(jet_curvature(hjet, k - 1, strict).theta) if k > 0 else 0.0
    expected = trace_upper - trace_lower
    trace_gap = abs(trace_q - expected) / max(1.0, abs(expected))
    return float(max(det_gap, trace_gap))


def numerical_rank(theta: np.ndarray, rtol: float = 1e-8) -> int:
    """Count singular values above rtol times the largest"""
    theta = np.asarray(theta)
    if not np.all(np.isfinite(theta)):
        raise DegenerateMetric("curvature is not finite")
    s = np.linalg.svd(theta, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def curvature_multivar(model: AnyModel, point: Sequence[complex], strict: bool = True) -> MultiCurvatureForm:
    """Curvature of a metric in m <= 2 complex variables

    theta[i, j] = h^-1 (dbar_j d_i h - dbar_j h h^-1 d_i h), cross-checked
    against (det h)^-1 h^-1 h_ij with h_ij the bordered Gram determinants.
    """
    model = as_multivariable(model)
    m = model.variables
    if m > 2:
        raise ConfigError(f"curvature in {m} variables is not supported (at most 2)")
    point = tuple(complex(z) for z in (point if isinstance(point, (list, tuple)) else [point]))
    if len(point) != m:
        raise ConfigError(f"point has {len(point)} coordinates, model has {m} variables")
    data = model.derivatives(point)
    h = data.h
    _check_metric(h, point[0])
    n = h.shape[0]
    det_h = np.linalg.det(h)
    theta = np.zeros((m, m, n, n), dtype=complex)
    gram_route = np.zeros_like(theta)
    for i in range(m):
        for j in range(m):
            theta[i, j] = np.linalg.solve(h, data.dbar_d[j][i] - data.dbar[j] @ np.linalg.solve(h, data.d[i]))
            # Gram matrix of (sigma, d_i sigma) against (sigma, d_j sigma)
            gram = np.block([[h, data.d[i]], [data.dbar[j], data.dbar_d[j][i]]])
            hij = np.zeros((n, n), dtype=complex)
            for p in range(n):
                for q in range(n):
                    rows = list(range(n)) + [n + p]
                    cols = list(range(n)) + [n + q]
                    hij[p, q] = np.linalg.det(gram[np.ix_(rows, cols)])
            gram_route[i, j] = np.linalg.solve(h, hij) / det_h
    gap = _relative_gap(theta, gram_route)
    if strict and gap > ROUTE_TOL:
        raise InternalInconsistency(f"multivariable curvature routes disagree (gap {gap:.3e})", point=point[0])
    return MultiCurvatureForm(point, theta, gap)
