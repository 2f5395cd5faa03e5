"""
Wirtinger jets for jetcurv

Truncated bivariate Taylor expansions in u = z - z0 and v = conj(z - z0).
A scalar jet stores c[p][q] (coefficient of u^p v^q) in a (P+1, Q+1) array,
a matrix jet stores an (P+1, Q+1, n, n) array. Every derivative used by the
rest of the package is read off these coefficients.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.linalg
import scipy.special

from errors import DegenerateMetric, JetShapeError

logger = logging.getLogger(__name__)

# Constant terms whose condition number exceeds this are treated as singular
_SINGULAR_COND = 1e14


@dataclass(frozen=True, eq=False)
class _Jet:
    """Shared storage and arithmetic for scalar and matrix jets"""

    center: complex
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "center", complex(self.center))
        self._validate()

    def _validate(self):
        raise NotImplementedError

    @property
    def bi_order(self) -> tuple[int, int]:
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    @property
    def value(self):
        """Value of the jet at its center"""
        return self.coeffs[0, 0]

    def _same_frame(self, other: "_Jet"):
        if not isinstance(other, _Jet):
            raise TypeError(f"expected a jet, got {type(other).__name__}")
        if self.center != other.center:
            raise JetShapeError(f"center mismatch: {self.center} vs {other.center}")
        if self.bi_order != other.bi_order:
            raise JetShapeError(f"bi_order mismatch: {self.bi_order} vs {other.bi_order}")

    def _like(self, coeffs: np.ndarray):
        return _wrap(self.center, coeffs)

    def __add__(self, other):
        self._same_frame(other)
        if self.coeffs.shape != other.coeffs.shape:
            raise JetShapeError("cannot add jets of different kinds or ranks")
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._same_frame(other)
        if self.coeffs.shape != other.coeffs.shape:
            raise JetShapeError("cannot subtract jets of different kinds or ranks")
        return self._like(self.coeffs - other.coeffs)

    def __neg__(self):
        return self._like(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, _Jet):
            return mul(self, other)
        return self._like(self.coeffs * complex(other))

    def __rmul__(self, other):
        return self._like(self.coeffs * complex(other))

    def __matmul__(self, other):
        return mul(self, other)

    def truncate(self, bi_order: tuple[int, int]):
        """Drop coefficients beyond bi_order"""
        P, Q = bi_order
        if P > self.bi_order[0] or Q > self.bi_order[1] or P < 0 or Q < 0:
            raise JetShapeError(f"cannot truncate {self.bi_order} to {bi_order}")
        return self._like(self.coeffs[: P + 1, : Q + 1])

    def max_norm(self) -> float:
        """Largest coefficient modulus"""
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0


@dataclass(frozen=True, eq=False)
class WirtingerJet(_Jet):
    """Scalar jet: c[p][q] multiplies u^p v^q"""

    def _validate(self):
        if self.coeffs.ndim != 2 or 0 in self.coeffs.shape:
            raise JetShapeError(f"scalar jet needs a (P+1, Q+1) array, got shape {self.coeffs.shape}")

    @classmethod
    def constant(cls, value: complex, center: complex, bi_order: tuple[int, int]) -> "WirtingerJet":
        coeffs = np.zeros((bi_order[0] + 1, bi_order[1] + 1), dtype=complex)
        coeffs[0, 0] = value
        return cls(center, coeffs)

    def conjugate(self) -> "WirtingerJet":
        """Jet of conj(f); swaps the roles of u and v"""
        return WirtingerJet(self.center, np.conj(self.coeffs.T))


@dataclass(frozen=True, eq=False)
class MatrixJet(_Jet):
    """Square-matrix jet sharing one center and bi_order across entries"""

    def _validate(self):
        shape = self.coeffs.shape
        if self.coeffs.ndim != 4 or shape[2] != shape[3] or 0 in shape[:2]:
            raise JetShapeError(f"matrix jet needs a (P+1, Q+1, n, n) array, got shape {shape}")

    @property
    def rank(self) -> int:
        return self.coeffs.shape[2]

    @classmethod
    def constant(cls, value, center: complex, bi_order: tuple[int, int]) -> "MatrixJet":
        value = np.atleast_2d(np.asarray(value, dtype=complex))
        coeffs = np.zeros((bi_order[0] + 1, bi_order[1] + 1) + value.shape, dtype=complex)
        coeffs[0, 0] = value
        return cls(center, coeffs)

    @classmethod
    def identity(cls, n: int, center: complex, bi_order: tuple[int, int]) -> "MatrixJet":
        return cls.constant(np.eye(n), center, bi_order)

    @classmethod
    def from_scalar(cls, jet: WirtingerJet) -> "MatrixJet":
        return cls(jet.center, jet.coeffs[:, :, None, None])

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[WirtingerJet]]) -> "MatrixJet":
        """Assemble from an n x n nested list of scalar jets"""
        n = len(entries)
        if n == 0 or any(len(row) != n for row in entries):
            raise JetShapeError("entries must form a non-empty square array")
        first = entries[0][0]
        for row in entries:
            for jet in row:
                first._same_frame(jet)
        coeffs = np.stack([np.stack([jet.coeffs for jet in row], axis=-1) for row in entries], axis=-2)
        return cls(first.center, coeffs)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence["MatrixJet"]]) -> "MatrixJet":
        """Assemble from a square grid of matrix jets (block rows first)"""
        first = blocks[0][0]
        for row in blocks:
            for jet in row:
                first._same_frame(jet)
        coeffs = np.concatenate(
            [np.concatenate([jet.coeffs for jet in row], axis=3) for row in blocks], axis=2
        )
        return cls(first.center, coeffs)

    def entry(self, i: int, j: int) -> WirtingerJet:
        return WirtingerJet(self.center, self.coeffs[:, :, i, j])

    def take(self, rows: Sequence[int], cols: Sequence[int]) -> "MatrixJet":
        """Sub-matrix jet on the given rows and columns"""
        return MatrixJet(self.center, self.coeffs[:, :, list(rows)][:, :, :, list(cols)])

    def adjoint(self) -> "MatrixJet":
        """Jet of h(z)^*, the pointwise conjugate transpose"""
        return MatrixJet(self.center, np.conj(np.swapaxes(self.coeffs, 0, 1)).swapaxes(2, 3))

    def trace(self) -> WirtingerJet:
        return WirtingerJet(self.center, np.trace(self.coeffs, axis1=2, axis2=3))


Jet = Union[WirtingerJet, MatrixJet]


def _wrap(center: complex, coeffs: np.ndarray) -> Jet:
    if coeffs.ndim == 2:
        return WirtingerJet(center, coeffs)
    return MatrixJet(center, coeffs)


def coordinate_jets(center: complex, bi_order: tuple[int, int]) -> tuple[WirtingerJet, WirtingerJet]:
    """Jets of z and conj(z) at center"""
    z = WirtingerJet.constant(center, center, bi_order)
    zbar = WirtingerJet.constant(np.conj(center), center, bi_order)
    zc = np.array(z.coeffs)
    zbc = np.array(zbar.coeffs)
    if bi_order[0] >= 1:
        zc[1, 0] = 1.0
    if bi_order[1] >= 1:
        zbc[0, 1] = 1.0
    return WirtingerJet(center, zc), WirtingerJet(center, zbc)


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    P, Q = a.shape[0] - 1, a.shape[1] - 1
    if a.ndim == 4 and b.ndim == 4:
        op = np.matmul
    else:
        op = np.multiply
        if a.ndim == 2 and b.ndim == 4:
            a = a[:, :, None, None]
        elif a.ndim == 4 and b.ndim == 2:
            b = b[:, :, None, None]
    tail = np.broadcast_shapes(a.shape[2:], b.shape[2:])
    out = np.zeros((P + 1, Q + 1) + tail, dtype=complex)
    for r in range(P + 1):
        for s in range(Q + 1):
            if not np.any(a[r, s]):
                continue
            out[r:, s:] += op(a[r, s], b[: P + 1 - r, : Q + 1 - s])
    return out


def mul(a: Jet, b: Jet) -> Jet:
    """Truncated product: c[p][q] = sum a[r][s] b[p-r][q-s]

    Matrix times matrix is the matrix product; a scalar jet scales a matrix jet.
    """
    a._same_frame(b)
    if isinstance(a, MatrixJet) and isinstance(b, MatrixJet) and a.rank != b.rank:
        raise JetShapeError(f"rank mismatch: {a.rank} vs {b.rank}")
    return _wrap(a.center, _convolve(a.coeffs, b.coeffs))


def scale(m: MatrixJet, s: WirtingerJet) -> MatrixJet:
    """Multiply a matrix jet entrywise by a scalar jet"""
    return mul(s, m)


def _invert_coeffs(a: np.ndarray) -> np.ndarray:
    P, Q = a.shape[0] - 1, a.shape[1] - 1
    if a.ndim == 2:
        if a[0, 0] == 0:
            raise DegenerateMetric("constant term is zero")
        inv0 = 1.0 / a[0, 0]
        op = np.multiply
        one = np.ones((), dtype=complex)
    else:
        n = a.shape[2]
        if np.linalg.cond(a[0, 0]) > _SINGULAR_COND:
            raise DegenerateMetric("constant-term matrix is singular")
        inv0 = np.linalg.inv(a[0, 0])
        op = np.matmul
        one = np.eye(n, dtype=complex)
    b = np.zeros_like(a)
    for p in range(P + 1):
        for q in range(Q + 1):
            acc = one.copy() if p == 0 and q == 0 else np.zeros_like(one)
            for r in range(p + 1):
                for s in range(q + 1):
                    if r == 0 and s == 0:
                        continue
                    acc = acc - op(a[r, s], b[p - r, q - s])
            b[p, q] = op(inv0, acc)
    return b


def invert(a: Jet) -> Jet:
    """Two-sided inverse in the jet ring; needs an invertible constant term"""
    return _wrap(a.center, _invert_coeffs(a.coeffs))


def partial(a: Jet, p: int, q: int):
    """d^{p+q} / dz^p dconj(z)^q at the center (a matrix for matrix jets)"""
    P, Q = a.bi_order
    if not (0 <= p <= P and 0 <= q <= Q):
        raise JetShapeError(f"order ({p}, {q}) out of range for bi_order {a.bi_order}")
    return math.factorial(p) * math.factorial(q) * a.coeffs[p, q]


def shift_derivative(a: Jet, p: int, q: int) -> Jet:
    """Formal d^p/dz^p d^q/dconj(z)^q; lowers the bi_order by (p, q)"""
    P, Q = a.bi_order
    if not (0 <= p <= P and 0 <= q <= Q):
        raise JetShapeError(f"order ({p}, {q}) out of range for bi_order {a.bi_order}")
    rows = np.array([math.perm(r + p, p) for r in range(P - p + 1)], dtype=float)
    cols = np.array([math.perm(s + q, q) for s in range(Q - q + 1)], dtype=float)
    weights = np.outer(rows, cols)
    if a.coeffs.ndim == 4:
        weights = weights[:, :, None, None]
    return _wrap(a.center, weights * a.coeffs[p:, q:])


def _det_rows(rows: list[list[np.ndarray]], one: np.ndarray, tol: float) -> np.ndarray:
    m = len(rows)
    if m == 0:
        return one
    if m == 1:
        return rows[0][0]
    consts = [abs(row[0][0, 0]) for row in rows]
    piv = int(np.argmax(consts))
    if consts[piv] <= tol:
        # no unit pivot in this column: expand along it
        total = np.zeros_like(one)
        for i, row in enumerate(rows):
            if not np.any(row[0]):
                continue
            minor = [other[1:] for j, other in enumerate(rows) if j != i]
            total = total + (-1) ** i * _convolve(row[0], _det_rows(minor, one, tol))
        return total
    pivot = rows[piv]
    inv_pivot = _invert_coeffs(pivot[0])
    reduced = []
    for j, row in enumerate(rows):
        if j == piv:
            continue
        factor = _convolve(row[0], inv_pivot)
        reduced.append([row[c] - _convolve(factor, pivot[c]) for c in range(1, m)])
    return (-1) ** piv * _convolve(pivot[0], _det_rows(reduced, one, tol))


def det_jet(m: MatrixJet) -> WirtingerJet:
    """Determinant in the jet ring

    Gaussian elimination pivoting on the largest constant term; a column with
    no usable pivot is handled by cofactor expansion.
    """
    n = m.rank
    rows = [[np.array(m.coeffs[:, :, i, j]) for j in range(n)] for i in range(n)]
    one = np.zeros(m.coeffs.shape[:2], dtype=complex)
    one[0, 0] = 1.0
    scale_ = float(np.max(np.abs(m.coeffs[0, 0]))) if n else 0.0
    return WirtingerJet(m.center, _det_rows(rows, one, 1e-12 * scale_))


def _nilpotent_part(a: WirtingerJet) -> tuple[complex, np.ndarray]:
    c = a.coeffs[0, 0]
    if c == 0:
        raise DegenerateMetric("constant term is zero")
    x = a.coeffs / c
    x[0, 0] = 0.0
    return c, x


def _series(x: np.ndarray, coefficients: Sequence[complex]) -> np.ndarray:
    """sum_m coefficients[m] x^m for nilpotent x"""
    out = np.zeros_like(x)
    power = np.zeros_like(x)
    power[0, 0] = 1.0
    for k, c in enumerate(coefficients):
        if k > 0:
            power = _convolve(power, x)
            if not np.any(power):
                break
        out += c * power
    return out


def _series_length(a: WirtingerJet) -> int:
    P, Q = a.bi_order
    return P + Q + 1


def jet_log(a: WirtingerJet) -> WirtingerJet:
    """Principal log of a scalar jet with nonzero constant term"""
    c, x = _nilpotent_part(a)
    n = _series_length(a)
    coefficients = [0.0] + [(-1) ** (m + 1) / m for m in range(1, n)]
    out = _series(x, coefficients)
    out[0, 0] += np.log(c)
    return WirtingerJet(a.center, out)


def binomial_series(alpha: float, n: int) -> np.ndarray:
    """Generalized binomials C(alpha, m) for m = 0..n-1, finite for every real alpha"""
    m = np.arange(1, n)
    return np.cumprod(np.concatenate([[1.0], (alpha - m + 1) / m]))


def jet_pow(a: WirtingerJet, alpha: float) -> WirtingerJet:
    """a ** alpha via the binomial series around the constant term"""
    c, x = _nilpotent_part(a)
    n = _series_length(a)
    coefficients = binomial_series(alpha, n)
    return WirtingerJet(a.center, c ** alpha * _series(x, coefficients))


def jet_exp(a: WirtingerJet) -> WirtingerJet:
    c = a.coeffs[0, 0]
    x = np.array(a.coeffs)
    x[0, 0] = 0.0
    n = _series_length(a)
    coefficients = 1.0 / scipy.special.factorial(np.arange(n))
    return WirtingerJet(a.center, np.exp(c) * _series(x, coefficients))


def block_diag(*jets: MatrixJet) -> MatrixJet:
    """Block-diagonal matrix jet"""
    first = jets[0]
    for jet in jets[1:]:
        first._same_frame(jet)
    P, Q = first.bi_order
    coeffs = np.array(
        [[scipy.linalg.block_diag(*[jet.coeffs[p, q] for jet in jets]) for q in range(Q + 1)] for p in range(P + 1)]
    )
    return MatrixJet(first.center, coeffs)


def hermitian_defect(jet: Jet) -> float:
    """max |conj(c[p][q]) - c[q][p]^T| over the square part of the jet"""
    N = min(jet.bi_order)
    c = jet.coeffs[: N + 1, : N + 1]
    if c.ndim == 2:
        mirrored = np.conj(c.T)
    else:
        mirrored = np.conj(np.swapaxes(c, 0, 1)).swapaxes(2, 3)
    return float(np.max(np.abs(c - mirrored)))
