"""
Identity verifiers for jetcurv

Checks for the determinant and Gram-matrix lemmas, the determinant
recursion of jet metrics, gauge covariance of curvature, and the
equivalence tests for line bundles. Each check returns a verdict that
serializes into the run report; randomized drivers aggregate verdicts by
taking the worst residual.
"""

import logging
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from curvature import (
    curvature,
    det_jet_curvature,
    numerical_rank,
    wedge_gram,
)
from errors import ConfigError, DegenerateMetric, InternalInconsistency, JetShapeError
from jetbundle import assemble_jet_metric, cocycle_residual, frame_det_residual, metric_transform_check
from models import DiagModel, HoloFrame, MetricModel, PowerModel, frame_transform, lift
from wjet import MatrixJet

logger = logging.getLogger(__name__)

# Default tolerances: pure linear algebra vs curvature identities
LINALG_TOL = 1e-9
CURVATURE_TOL = 1e-8


def complex_list(values: Any) -> Any:
    """Nested [re, im] lists for JSON"""
    array = np.asarray(values)
    if array.ndim == 0:
        value = complex(array)
        return [value.real, value.imag]
    return [complex_list(v) for v in array]


@dataclass(frozen=True)
class IdentityVerdict:
    """Residual of one identity against its tolerance"""

    name: str
    residual: float
    tolerance: float
    passed: bool
    witness: Optional[dict] = None

    @classmethod
    def judge(cls, name: str, residual: float, tolerance: float, witness: Optional[dict] = None) -> "IdentityVerdict":
        residual = float(residual)
        passed = bool(residual <= tolerance)
        return cls(name, residual, float(tolerance), passed, None if passed else witness)

    @classmethod
    def combine(cls, name: str, verdicts: Iterable["IdentityVerdict"], tolerance: float) -> "IdentityVerdict":
        """Worst of several verdicts (max residual, NaN counts as failure)"""
        worst = None
        for verdict in verdicts:
            if worst is None or not verdict.residual <= worst.residual:
                worst = verdict
        if worst is None:
            raise ConfigError(f"no trials ran for {name}")
        return cls.judge(name, worst.residual, tolerance, worst.witness)

    def to_dict(self) -> dict[str, Any]:
        data = {"name": self.name, "residual": self.residual, "tolerance": self.tolerance, "pass": self.passed}
        if self.witness is not None:
            data["witness"] = self.witness
        return data


def _drop(matrix: np.ndarray, row: int, col: int) -> np.ndarray:
    return np.delete(np.delete(matrix, row, axis=0), col, axis=1)


def desnanot_jacobi(a: np.ndarray, tolerance: float = LINALG_TOL) -> IdentityVerdict:
    """det(A without last row/col) det(A without second-last row/col)
    - det(A without last row, second-last col) det(A without second-last row, last col)
    = det(B) det(A), B = A without its last two rows and columns
    """
    a = np.asarray(a, dtype=complex)
    m = a.shape[0]
    if a.ndim != 2 or a.shape[1] != m or m < 2:
        raise JetShapeError(f"desnanot_jacobi needs a square matrix of size >= 2, got {a.shape}")
    last, second = m - 1, m - 2
    lhs = np.linalg.det(_drop(a, last, last)) * np.linalg.det(_drop(a, second, second)) - np.linalg.det(
        _drop(a, last, second)
    ) * np.linalg.det(_drop(a, second, last))
    det_b = np.linalg.det(a[:second, :second]) if second > 0 else 1.0
    rhs = det_b * np.linalg.det(a)
    residual = abs(lhs - rhs) / (1 + abs(rhs))
    return IdentityVerdict.judge("desnanot_jacobi", residual, tolerance, {"matrix": complex_list(a)})


def bordered_determinants(g: np.ndarray, r: int) -> np.ndarray:
    """A_sigma[i, j] = det of g on rows 0..r-1, r+i and columns 0..r-1, r+j"""
    n = g.shape[0]
    lead = list(range(r))
    out = np.zeros((n - r, n - r), dtype=complex)
    for i in range(n - r):
        for j in range(n - r):
            out[i, j] = np.linalg.det(g[np.ix_(lead + [r + i], lead + [r + j])])
    return out


def gram_quotient_check(g: np.ndarray, r: int, tolerance: float = LINALG_TOL) -> IdentityVerdict:
    """det G = det(A_sigma) / (det A)^(n-r-1), A the leading r x r block"""
    g = np.asarray(g, dtype=complex)
    n = g.shape[0]
    if not 1 <= r < n:
        raise JetShapeError(f"need 1 <= r < n, got r={r}, n={n}")
    det_a = np.linalg.det(g[:r, :r])
    if np.min(np.linalg.eigvalsh((g[:r, :r] + g[:r, :r].conj().T) / 2)) <= 0:
        raise DegenerateMetric("leading block of the Gram matrix is singular")
    lhs = np.linalg.det(g)
    rhs = np.linalg.det(bordered_determinants(g, r)) / det_a ** (n - r - 1)
    residual = abs(lhs - rhs) / (1 + abs(rhs))
    return IdentityVerdict.judge("gram_quotient", residual, tolerance, {"gram": complex_list(g), "r": r})


def block_matrix_check(m: np.ndarray, split: int, tolerance: float = LINALG_TOL) -> IdentityVerdict:
    """Block inverse via the Schur complement and both Schur determinant formulas"""
    m = np.asarray(m, dtype=complex)
    a, b = m[:split, :split], m[:split, split:]
    c, d = m[split:, :split], m[split:, split:]
    a_inv = np.linalg.inv(a)
    schur = d - c @ a_inv @ b
    s_inv = np.linalg.inv(schur)
    inverse = np.block(
        [
            [a_inv + a_inv @ b @ s_inv @ c @ a_inv, -a_inv @ b @ s_inv],
            [-s_inv @ c @ a_inv, s_inv],
        ]
    )
    size = m.shape[0]
    inverse_gap = np.linalg.norm(m @ inverse - np.eye(size)) / max(1.0, np.linalg.norm(m) * np.linalg.norm(inverse))
    det_m = np.linalg.det(m)
    upper_gap = abs(det_m - np.linalg.det(a) * np.linalg.det(schur)) / (1 + abs(det_m))
    lower_gap = abs(det_m - np.linalg.det(d) * np.linalg.det(a - b @ np.linalg.inv(d) @ c)) / (1 + abs(det_m))
    residual = max(inverse_gap, upper_gap, lower_gap)
    return IdentityVerdict.judge("block_matrix", residual, tolerance, {"matrix": complex_list(m), "split": split})


def det_recursion_residual(hjet: MatrixJet, k: int) -> float:
    """Relative residual of det J_k = det J_{k-1}^(1-n) det h_k and of its telescoped product

    The telescoped form reads det J_{k-1} / det J_k =
    prod_{j<k} (det h_j)^(n (1-n)^(k-1-j)) / det h_k with h_0 = h.
    """
    n = hjet.rank
    det_k = np.linalg.det(assemble_jet_metric(hjet, k, check=False).value)
    det_prev = np.linalg.det(assemble_jet_metric(hjet, k - 1, check=False).value) if k > 0 else 1.0
    grams = [np.linalg.det(wedge_gram(hjet, j).hk) for j in range(k + 1)]
    recursion = abs(det_k - det_prev ** (1 - n) * grams[k]) / abs(det_k)
    telescoped = np.prod([grams[j] ** (n * (1 - n) ** (k - 1 - j)) for j in range(k)]) / grams[k]
    expected = det_prev / det_k
    telescope_gap = abs(telescoped - expected) / abs(expected)
    return float(max(recursion, telescope_gap))


def det_recursion_check(model: MetricModel, z0: complex, k: int, tolerance: float = LINALG_TOL) -> IdentityVerdict:
    hjet = lift(model, z0, (k, k))
    assemble_jet_metric(hjet, k)
    residual = det_recursion_residual(hjet, k)
    return IdentityVerdict.judge("det_recursion", residual, tolerance, {"point": complex_list(z0), "k": k})


def gauge_covariance_residual(model: MetricModel, frame: HoloFrame, z0: complex) -> float:
    """Theta of A^* h A against A(z0)^-1 Theta A(z0), and their eigenvalues"""
    frame.check_invertible(z0)
    theta = curvature(lift(model, z0, (1, 1))).theta
    moved = curvature(lift(frame_transform(model, frame), z0, (1, 1))).theta
    a = frame.value(z0)
    expected = np.linalg.solve(a, theta @ a)
    scale = max(1.0, float(np.linalg.norm(theta)))
    similarity = np.linalg.norm(moved - expected) / scale
    spectrum = np.max(np.abs(np.sort_complex(np.linalg.eigvals(moved)) - np.sort_complex(np.linalg.eigvals(theta))))
    return float(max(similarity, spectrum / scale))


def gauge_covariance_check(
    model: MetricModel, frame: HoloFrame, z0: complex, tolerance: float = CURVATURE_TOL
) -> IdentityVerdict:
    residual = gauge_covariance_residual(model, frame, z0)
    return IdentityVerdict.judge("gauge_covariance", residual, tolerance, {"point": complex_list(z0)})


def curvature_rank_check(model: MetricModel, z0: complex, rtol: float = 1e-8) -> IdentityVerdict:
    """rank Theta = rank h_1"""
    hjet = lift(model, z0, (1, 1))
    rank_theta = numerical_rank(curvature(hjet).theta, rtol)
    rank_h1 = numerical_rank(wedge_gram(hjet, 1).hk, rtol)
    return IdentityVerdict.judge(
        "curvature_rank", abs(rank_theta - rank_h1), 0.0, {"point": complex_list(z0), "ranks": [rank_theta, rank_h1]}
    )


# Equivalence of line bundles


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Local equivalence on a grid: no obstruction found at this tolerance"""

    equivalent: bool
    max_deviation: float
    point: Optional[complex]
    tolerance: float
    agrees_with_line: Optional[bool] = None

    def to_dict(self) -> dict[str, Any]:
        data = {
            "equivalent": self.equivalent,
            "max_deviation": self.max_deviation,
            "point": None if self.point is None else complex_list(self.point),
            "tolerance": self.tolerance,
        }
        if self.agrees_with_line is not None:
            data["agrees_with_line"] = self.agrees_with_line
        return data


@dataclass(frozen=True)
class DescentVerdict:
    """Agreement of K_{det J_j}, j = 0..k, for two line bundles"""

    agreement: tuple[bool, ...]
    deviations: tuple[float, ...]
    first_disagreement: Optional[int]
    consistent: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "agreement": list(self.agreement),
            "deviations": list(self.deviations),
            "first_disagreement": self.first_disagreement,
            "consistent": self.consistent,
        }


def _require_line(*models: MetricModel):
    for model in models:
        if model.rank != 1:
            raise ConfigError(f"equivalence tests need rank 1 models, got rank {model.rank}")


def _max_deviation(values: Sequence[tuple[complex, float, float]]) -> tuple[float, Optional[complex]]:
    worst, where = 0.0, None
    for z, a, b in values:
        gap = abs(a - b)
        if where is None or gap > worst:
            worst, where = gap, z
    return worst, where


def line_equiv_test(
    first: MetricModel, second: MetricModel, grid: Sequence[complex], tolerance: float = CURVATURE_TOL
) -> EquivalenceVerdict:
    """Compare the curvatures of two line bundles over the grid"""
    _require_line(first, second)
    values = [
        (z, curvature(lift(first, z, (1, 1))).scalar, curvature(lift(second, z, (1, 1))).scalar) for z in grid
    ]
    deviation, where = _max_deviation(values)
    return EquivalenceVerdict(deviation <= tolerance, deviation, where, tolerance)


def _det_curvatures(model: MetricModel, z: complex, levels: Iterable[int]) -> dict[int, float]:
    levels = list(levels)
    hjet = lift(model, z, (max(levels) + 1, max(levels) + 1))
    return {j: det_jet_curvature(hjet, j) for j in levels}


def det_bundle_equiv_test(
    first: MetricModel, second: MetricModel, k: int, grid: Sequence[complex], tolerance: float = CURVATURE_TOL
) -> EquivalenceVerdict:
    """Compare K_{det J_k} and K_{det J_{k+1}}; must agree with the line-bundle verdict"""
    _require_line(first, second)
    values = []
    for z in grid:
        a = _det_curvatures(first, z, (k, k + 1))
        b = _det_curvatures(second, z, (k, k + 1))
        values.extend((z, a[j], b[j]) for j in (k, k + 1))
    deviation, where = _max_deviation(values)
    equivalent = deviation <= tolerance
    line = line_equiv_test(first, second, grid, tolerance)
    if line.equivalent != equivalent:
        raise InternalInconsistency(
            f"determinant bundles at k={k} say equivalent={equivalent} but line bundles say {line.equivalent}",
            point=where,
        )
    return EquivalenceVerdict(equivalent, deviation, where, tolerance, agrees_with_line=True)


def jet_descent_check(
    first: MetricModel, second: MetricModel, k: int, grid: Sequence[complex], tolerance: float = CURVATURE_TOL
) -> DescentVerdict:
    """Agreement at level k must imply agreement at every lower level"""
    _require_line(first, second)
    deviations = [0.0] * (k + 1)
    for z in grid:
        a = _det_curvatures(first, z, range(k + 1))
        b = _det_curvatures(second, z, range(k + 1))
        for j in range(k + 1):
            deviations[j] = max(deviations[j], abs(a[j] - b[j]))
    agreement = tuple(d <= tolerance for d in deviations)
    first_disagreement = next((j for j, ok in enumerate(agreement) if not ok), None)
    consistent = (not agreement[k]) or all(agreement)
    return DescentVerdict(agreement, tuple(deviations), first_disagreement, consistent)


# Randomized trials


def random_complex_matrix(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))


def ill_conditioned_matrix(rng: np.random.Generator, size: int, decades: float = 8.0) -> np.ndarray:
    """Random matrix whose leading (size-2) block has condition number 10^decades"""
    a = random_complex_matrix(rng, size)
    inner = size - 2
    if inner > 0:
        u, _ = np.linalg.qr(random_complex_matrix(rng, inner))
        v, _ = np.linalg.qr(random_complex_matrix(rng, inner))
        a[:inner, :inner] = u @ np.diag(np.logspace(0, -decades, inner)) @ v.conj().T
    return a


def random_psd_gram(rng: np.random.Generator, n: int, eps: float = 1e-3) -> np.ndarray:
    b = random_complex_matrix(rng, n)
    return b.conj().T @ b + eps * np.eye(n)


def random_frame(rng: np.random.Generator, n: int, degree: int = 2, spread: float = 0.2) -> HoloFrame:
    """Polynomial frame close to the identity"""
    coeffs = np.stack([spread / (m + 1) * random_complex_matrix(rng, n) / n for m in range(degree + 1)])
    coeffs[0] += np.eye(n)
    return HoloFrame(coeffs)


def random_disk_point(rng: np.random.Generator, radius: float = 0.5) -> complex:
    r = radius * np.sqrt(rng.uniform())
    return complex(r * np.exp(2j * np.pi * rng.uniform()))


def desnanot_trials(
    rng: np.random.Generator, trials: int, sizes: Sequence[int] = range(2, 9), tolerance: float = LINALG_TOL
) -> IdentityVerdict:
    """Random matrices of the given sizes; every other one has a nearly singular inner block"""
    sizes = list(sizes)
    verdicts = []
    for t in range(trials):
        size = sizes[t % len(sizes)]
        a = ill_conditioned_matrix(rng, size) if t % 2 else random_complex_matrix(rng, size)
        verdicts.append(desnanot_jacobi(a, tolerance))
    return IdentityVerdict.combine("desnanot_jacobi", verdicts, tolerance)


def gram_quotient_trials(
    rng: np.random.Generator, trials: int, max_n: int = 6, tolerance: float = LINALG_TOL
) -> IdentityVerdict:
    """Random PSD Gram matrices, every admissible r"""
    verdicts = []
    for t in range(trials):
        n = 2 + t % (max_n - 1)
        g = random_psd_gram(rng, n)
        verdicts.extend(gram_quotient_check(g, r, tolerance) for r in range(1, n))
    return IdentityVerdict.combine("gram_quotient", verdicts, tolerance)


def block_matrix_trials(rng: np.random.Generator, trials: int, tolerance: float = LINALG_TOL) -> IdentityVerdict:
    verdicts = []
    for t in range(trials):
        size = 2 + t % 5
        m = random_psd_gram(rng, size, eps=1e-1)
        verdicts.append(block_matrix_check(m, 1 + t % (size - 1), tolerance))
    return IdentityVerdict.combine("block_matrix", verdicts, tolerance)


def _reference_metric(n: int) -> MetricModel:
    if n == 1:
        return PowerModel(1.0)
    return DiagModel(tuple(PowerModel(float(i + 1)) for i in range(n)))


def cocycle_trials(
    rng: np.random.Generator, trials: int, max_k: int = 3, max_rank: int = 2, tolerance: float = LINALG_TOL
) -> list[IdentityVerdict]:
    """Cocycle, frame determinant and transformation law over random polynomial frames"""
    cocycle, determinant, transform = [], [], []
    for t in range(trials):
        n = 1 + t % max_rank
        k = t % (max_k + 1)
        first, second = random_frame(rng, n), random_frame(rng, n)
        z0 = random_disk_point(rng)
        witness = {"point": complex_list(z0), "k": k, "frame": first.to_list()}
        cocycle.append(IdentityVerdict.judge("cocycle", cocycle_residual(first, second, z0, k), tolerance, witness))
        determinant.append(IdentityVerdict.judge("frame_det", frame_det_residual(first, z0, k), tolerance, witness))
        model = _reference_metric(n)
        scale = max(1.0, float(np.linalg.norm(assemble_jet_metric(lift(model, z0, (k, k)), k, check=False).value)))
        residual = metric_transform_check(model, first, z0, k) / scale
        transform.append(IdentityVerdict.judge("frame_transform_law", residual, tolerance, witness))
    return [
        IdentityVerdict.combine("cocycle", cocycle, tolerance),
        IdentityVerdict.combine("frame_det", determinant, tolerance),
        IdentityVerdict.combine("frame_transform_law", transform, tolerance),
    ]
