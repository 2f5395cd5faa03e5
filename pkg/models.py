"""
Metric models for jetcurv

Declarative descriptions of Hermitian metrics h(z) on a disk or the plane.
Each model evaluates itself and lifts itself to a MatrixJet at an interior
point; combinators (diagonal sums, frame conjugation, scaling) are closed
under both operations. Two-variable models for the multivariable curvature
formula live at the bottom of the module.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence, Union

import numpy as np
import scipy.linalg
import scipy.special
from numpy.polynomial import polynomial as npoly

from errors import ConfigError, DegenerateMetric, DomainError
from wjet import (
    MatrixJet,
    WirtingerJet,
    block_diag,
    coordinate_jets,
    jet_exp,
    jet_pow,
    mul,
    partial,
    scale,
)

logger = logging.getLogger(__name__)

# Certified absolute tail bound for kernel series
KERNEL_TAIL_TOL = 1e-12
# Kernels with a repeating tail converge on the unit disk; points beyond this fraction are refused
KERNEL_RADIUS_CAP = 0.95
_KERNEL_MAX_TERMS = 20_000


def _t_jet(z0: complex, bi_order: tuple[int, int]) -> WirtingerJet:
    """Jet of t = z conj(z)"""
    z, zbar = coordinate_jets(z0, bi_order)
    return z * zbar


def _complex_pair(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


class MetricModel(ABC):
    """Base class for one-variable metric models"""

    @property
    @abstractmethod
    def rank(self) -> int: ...

    @property
    @abstractmethod
    def radius(self) -> float:
        """Points with |z| >= radius are outside the domain (inf for the plane)"""

    @abstractmethod
    def evaluate(self, z: complex) -> np.ndarray:
        """h(z) as an n x n array (no domain or PD check)"""

    @abstractmethod
    def lift(self, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
        """Jet of h at z0 (no domain check)"""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]: ...

    def check_domain(self, z: complex):
        if not abs(z) < self.radius:
            raise DomainError(f"|z| = {abs(z):.6g} is outside the domain radius {self.radius}", point=complex(z))


@dataclass(frozen=True)
class PowerModel(MetricModel):
    """h = (1 - |z|^2)^(-lam) on the unit disk"""

    lam: float

    def __post_init__(self):
        if not (isinstance(self.lam, (int, float)) and math.isfinite(self.lam)) or self.lam <= 0:
            raise ConfigError(f"λ must be positive (got {self.lam})")

    @property
    def rank(self) -> int:
        return 1

    @property
    def radius(self) -> float:
        return 1.0

    def evaluate(self, z: complex) -> np.ndarray:
        return np.array([[(1.0 - abs(z) ** 2) ** (-self.lam)]], dtype=complex)

    def lift(self, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
        one = WirtingerJet.constant(1.0, z0, bi_order)
        return MatrixJet.from_scalar(jet_pow(one - _t_jet(z0, bi_order), -self.lam))

    def to_dict(self) -> dict[str, Any]:
        return {"type": "power", "lam": self.lam}


@dataclass(frozen=True)
class ExpModel(MetricModel):
    """h = exp(|z|^2) on the plane"""

    @property
    def rank(self) -> int:
        return 1

    @property
    def radius(self) -> float:
        return math.inf

    def evaluate(self, z: complex) -> np.ndarray:
        return np.array([[math.exp(abs(z) ** 2)]], dtype=complex)

    def lift(self, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
        return MatrixJet.from_scalar(jet_exp(_t_jet(z0, bi_order)))

    def to_dict(self) -> dict[str, Any]:
        return {"type": "exp"}


@dataclass(frozen=True)
class PolyModel(MetricModel):
    """h = sum_m coeffs[m] |z|^(2m) with real coefficients"""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise ConfigError("polynomial model needs at least one coefficient")
        if any(isinstance(c, complex) or not math.isfinite(c) for c in coeffs):
            raise ConfigError("polynomial model coefficients must be finite reals")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in coeffs))

    @property
    def rank(self) -> int:
        return 1

    @property
    def radius(self) -> float:
        return math.inf

    def evaluate(self, z: complex) -> np.ndarray:
        return np.array([[npoly.polyval(abs(z) ** 2, self.coeffs)]], dtype=complex)

    def lift(self, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
        t = _t_jet(z0, bi_order)
        acc = WirtingerJet.constant(self.coeffs[-1], z0, bi_order)
        for c in reversed(self.coeffs[:-1]):
            acc = acc * t + WirtingerJet.constant(c, z0, bi_order)
        return MatrixJet.from_scalar(acc)

    def to_dict(self) -> dict[str, Any]:
        return {"type": "poly", "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class KernelModel(MetricModel):
    """Diagonal kernel h = sum_m |z|^(2m) / w_m^2

    tail "zero" stops after the given weights; tail "repeat" repeats the last
    weight forever (convergence radius 1).
    """

    weights: tuple[float, ...]
    tail: str = "zero"

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if not weights:
            raise ConfigError("kernel model needs at least one weight")
        if any(not (w > 0 and math.isfinite(w)) for w in weights):
            raise ConfigError("kernel weights must be positive and finite")
        if self.tail not in ("zero", "repeat"):
            raise ConfigError(f"unknown kernel tail policy {self.tail!r}")
        object.__setattr__(self, "weights", weights)

    @property
    def rank(self) -> int:
        return 1

    @property
    def radius(self) -> float:
        return math.inf if self.tail == "zero" else KERNEL_RADIUS_CAP

    def check_domain(self, z: complex):
        if self.tail == "repeat" and abs(z) > KERNEL_RADIUS_CAP:
            raise DomainError(
                f"|z| = {abs(z):.6g} exceeds {KERNEL_RADIUS_CAP} of the kernel convergence radius",
                point=complex(z),
            )

    def _amplitudes(self, count: int) -> np.ndarray:
        a = 1.0 / np.array(self.weights) ** 2
        if count <= len(a):
            return a[:count]
        if self.tail == "zero":
            return np.concatenate([a, np.zeros(count - len(a))])
        return np.concatenate([a, np.full(count - len(a), a[-1])])

    def term_count(self, rho: float, bi_order: tuple[int, int]) -> int:
        """Number of series terms certifying every requested coefficient to KERNEL_TAIL_TOL

        Uses the geometric bound T_{N+1} / (1 - r) with r the ratio of
        consecutive terms beyond N (which decreases in N).
        """
        P, Q = bi_order
        M = len(self.weights)
        if self.tail == "zero":
            return M
        start = max(M, P, Q)
        if rho == 0:
            return start + 1
        if rho >= 1:
            raise DomainError(f"kernel series diverges at |z| = {rho}")
        log_a = -2.0 * math.log(self.weights[-1])
        p = np.arange(P + 1)[None, :, None]
        q = np.arange(Q + 1)[None, None, :]
        N = np.arange(start, start + _KERNEL_MAX_TERMS, dtype=float)[:, None, None]
        m = N + 1
        log_binom_p = scipy.special.gammaln(m + 1) - scipy.special.gammaln(p + 1) - scipy.special.gammaln(m - p + 1)
        log_binom_q = scipy.special.gammaln(m + 1) - scipy.special.gammaln(q + 1) - scipy.special.gammaln(m - q + 1)
        log_term = log_a + log_binom_p + log_binom_q + (2 * m - p - q) * math.log(rho)
        ratio = rho**2 * (m + 1) ** 2 / ((m + 1 - p) * (m + 1 - q))
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = np.where(ratio < 1, np.exp(log_term) / (1 - ratio), np.inf)
        ok = np.all(bound < KERNEL_TAIL_TOL, axis=(1, 2))
        if not ok.any():
            raise DomainError(f"kernel tail bound not met at |z| = {rho} for bi_order {bi_order}")
        return int(N[int(np.argmax(ok)), 0, 0]) + 1

    def _series(self, z0: complex, bi_order: tuple[int, int], count: int) -> np.ndarray:
        P, Q = bi_order
        a = self._amplitudes(count)
        m = np.arange(count)
        zpow = np.concatenate([[1.0 + 0j], np.cumprod(np.full(count - 1, complex(z0)))])
        zbpow = np.conj(zpow)
        coeffs = np.zeros((P + 1, Q + 1), dtype=complex)
        for p in range(P + 1):
            for q in range(Q + 1):
                lo = max(p, q)
                if lo >= count:
                    continue
                mm = m[lo:]
                terms = a[lo:] * scipy.special.binom(mm, p) * scipy.special.binom(mm, q)
                coeffs[p, q] = np.sum(terms * zpow[mm - p] * zbpow[mm - q])
        return coeffs

    @cached_property
    def _evaluation_terms(self) -> int:
        # one term count for the whole domain keeps h a single smooth function
        return self.term_count(0.0 if self.tail == "zero" else KERNEL_RADIUS_CAP, (0, 0))

    def evaluate(self, z: complex) -> np.ndarray:
        return np.array([[self._series(z, (0, 0), self._evaluation_terms)[0, 0]]])

    def lift(self, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
        self.check_domain(z0)
        count = self.term_count(abs(z0), bi_order)
        logger.debug(f"kernel lift at {z0} uses {count} terms")
        return MatrixJet.from_scalar(WirtingerJet(z0, self._series(z0, bi_order, count)))

    def to_dict(self) -> dict[str, Any]:
        return {"type": "kernel", "weights": list(self.weights), "tail": self.tail}


@dataclass(frozen=True)
class DiagModel(MetricModel):
    """Block-diagonal metric built from submodels"""

    blocks: tuple[MetricModel, ...]

    def __post_init__(self):
        if not self.blocks:
            raise ConfigError("diagonal model needs at least one block")
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def rank(self) -> int:
        return sum(block.rank for block in self.blocks)

    @property
    def radius(self) -> float:
        return min(block.radius for block in self.blocks)

    def check_domain(self, z: complex):
        for block in self.blocks:
            block.check_domain(z)

    def evaluate(self, z: complex) -> np.ndarray:
        return scipy.linalg.block_diag(*[block.evaluate(z) for block in self.blocks])

    def lift(self, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
        return block_diag(*[block.lift(z0, bi_order) for block in self.blocks])

    def to_dict(self) -> dict[str, Any]:
        return {"type": "diag", "blocks": [block.to_dict() for block in self.blocks]}


@dataclass(frozen=True, eq=False)
class HoloFrame:
    """Holomorphic polynomial frame A(z) = sum_m coeffs[m] z^m (n x n)"""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None, None]
        elif coeffs.ndim == 2:
            coeffs = coeffs[None]
        if coeffs.ndim != 3 or coeffs.shape[1] != coeffs.shape[2] or coeffs.shape[0] == 0:
            raise ConfigError(f"frame coefficients need shape (degree+1, n, n), got {coeffs.shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def identity(cls, n: int) -> "HoloFrame":
        return cls(np.eye(n)[None])

    @classmethod
    def scalar(cls, coeffs: Sequence[complex]) -> "HoloFrame":
        """Rank-1 frame from polynomial coefficients (lowest degree first)"""
        return cls(np.asarray(coeffs, dtype=complex)[:, None, None])

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def value(self, z: complex) -> np.ndarray:
        return self.taylor(z, 0)[0]

    def taylor(self, z0: complex, order: int) -> np.ndarray:
        """Taylor coefficients A^(p)(z0) / p! for p = 0..order, shape (order+1, n, n)"""
        out = np.zeros((order + 1, self.n, self.n), dtype=complex)
        for p in range(min(order, self.degree) + 1):
            m = np.arange(p, self.degree + 1)
            weights = scipy.special.binom(m, p) * np.power(complex(z0), m - p)
            out[p] = np.tensordot(weights, self.coeffs[p:], axes=1)
        return out

    def derivative(self, z0: complex, r: int) -> np.ndarray:
        return math.factorial(r) * self.taylor(z0, r)[r]

    def jet(self, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
        """Jet of A at z0; holomorphic, so only powers of u appear"""
        P, Q = bi_order
        coeffs = np.zeros((P + 1, Q + 1, self.n, self.n), dtype=complex)
        coeffs[:, 0] = self.taylor(z0, P)
        return MatrixJet(z0, coeffs)

    def adjoint_jet(self, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
        """Jet of A(z)^* at z0; antiholomorphic, so only powers of v appear"""
        P, Q = bi_order
        coeffs = np.zeros((P + 1, Q + 1, self.n, self.n), dtype=complex)
        coeffs[0, :] = np.conj(np.swapaxes(self.taylor(z0, Q), 1, 2))
        return MatrixJet(z0, coeffs)

    def product(self, other: "HoloFrame") -> "HoloFrame":
        """Frame of the pointwise product A(z) B(z)"""
        if self.n != other.n:
            raise ConfigError(f"frame rank mismatch: {self.n} vs {other.n}")
        out = np.zeros((self.degree + other.degree + 1, self.n, self.n), dtype=complex)
        for i in range(self.degree + 1):
            for j in range(other.degree + 1):
                out[i + j] += self.coeffs[i] @ other.coeffs[j]
        return HoloFrame(out)

    def check_invertible(self, z: complex, tol: float = 1e-12):
        det = np.linalg.det(self.value(z))
        if abs(det) <= tol:
            raise DegenerateMetric(f"frame is singular (det = {det:.3g})", point=complex(z))

    def to_list(self) -> list:
        return [[[_complex_pair(x) for x in row] for row in matrix] for matrix in self.coeffs]

    def __repr__(self) -> str:
        return f"HoloFrame(n={self.n}, degree={self.degree})"


@dataclass(frozen=True)
class FrameConjModel(MetricModel):
    """h~ = A(z)^* h(z) A(z) for a holomorphic frame A"""

    base: MetricModel
    frame: HoloFrame

    def __post_init__(self):
        if self.frame.n != self.base.rank:
            raise ConfigError(f"frame rank {self.frame.n} does not match metric rank {self.base.rank}")

    @property
    def rank(self) -> int:
        return self.base.rank

    @property
    def radius(self) -> float:
        return self.base.radius

    def check_domain(self, z: complex):
        self.base.check_domain(z)

    def evaluate(self, z: complex) -> np.ndarray:
        a = self.frame.value(z)
        return a.conj().T @ self.base.evaluate(z) @ a

    def lift(self, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
        a = self.frame.jet(z0, bi_order)
        return mul(mul(self.frame.adjoint_jet(z0, bi_order), self.base.lift(z0, bi_order)), a)

    def to_dict(self) -> dict[str, Any]:
        return {"type": "frame", "base": self.base.to_dict(), "frame": self.frame.to_list()}


@dataclass(frozen=True)
class ScaleModel(MetricModel):
    """h~ = |phi(z)|^2 h(z) for a polynomial phi (coefficients lowest degree first)"""

    base: MetricModel
    phi: tuple[complex, ...]

    def __post_init__(self):
        if not self.phi:
            raise ConfigError("scale model needs a non-empty polynomial")
        object.__setattr__(self, "phi", tuple(complex(c) for c in self.phi))

    @property
    def rank(self) -> int:
        return self.base.rank

    @property
    def radius(self) -> float:
        return self.base.radius

    def check_domain(self, z: complex):
        self.base.check_domain(z)

    def evaluate(self, z: complex) -> np.ndarray:
        return abs(npoly.polyval(complex(z), self.phi)) ** 2 * self.base.evaluate(z)

    def lift(self, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
        frame = HoloFrame.scalar(self.phi)
        phi = frame.jet(z0, bi_order).entry(0, 0)
        return scale(self.base.lift(z0, bi_order), frame.adjoint_jet(z0, bi_order).entry(0, 0) * phi)

    def to_dict(self) -> dict[str, Any]:
        return {"type": "scale", "base": self.base.to_dict(), "phi": [_complex_pair(c) for c in self.phi]}


def evaluate(model: MetricModel, z: complex) -> np.ndarray:
    """h(z) after domain and positive-definiteness checks"""
    model.check_domain(z)
    h = model.evaluate(z)
    norm = float(np.max(np.abs(h)))
    if not np.all(np.isfinite(h)):
        raise DegenerateMetric("metric is not finite", point=complex(z))
    if np.max(np.abs(h - h.conj().T)) > 1e-10 * max(norm, 1.0):
        raise DegenerateMetric("metric is not Hermitian", point=complex(z))
    if np.min(np.linalg.eigvalsh((h + h.conj().T) / 2)) <= 0:
        raise DegenerateMetric("metric is not positive definite", point=complex(z))
    return h


def lift(model: MetricModel, z0: complex, bi_order: tuple[int, int]) -> MatrixJet:
    """Jet of h at an interior point"""
    if min(bi_order) < 0:
        raise ConfigError(f"bi_order must be nonnegative, got {bi_order}")
    model.check_domain(z0)
    return model.lift(complex(z0), tuple(bi_order))


def frame_transform(model: MetricModel, frame: HoloFrame) -> MetricModel:
    """Metric of the frame sigma A: A^* h A"""
    return FrameConjModel(model, frame)


# Two-variable models


@dataclass(frozen=True, eq=False)
class MetricDerivatives:
    """h and its first Wirtinger derivatives at a point of C^m

    d[i] = d_i h, dbar[j] = dbar_j h, dbar_d[j][i] = dbar_j d_i h
    """

    point: tuple[complex, ...]
    h: np.ndarray
    d: list[np.ndarray]
    dbar: list[np.ndarray]
    dbar_d: list[list[np.ndarray]]

    @property
    def variables(self) -> int:
        return len(self.point)


class MultiMetricModel(ABC):
    """Base class for metrics over several complex variables"""

    variables: int = 2

    @property
    @abstractmethod
    def rank(self) -> int: ...

    @abstractmethod
    def evaluate(self, point: Sequence[complex]) -> np.ndarray: ...

    @abstractmethod
    def derivatives(self, point: Sequence[complex]) -> MetricDerivatives: ...

    @abstractmethod
    def to_dict(self) -> dict[str, Any]: ...


@dataclass(frozen=True)
class SingleVariable(MultiMetricModel):
    """View of a one-variable model through the multivariable interface"""

    model: MetricModel
    variables: int = field(default=1, init=False)

    @property
    def rank(self) -> int:
        return self.model.rank

    def evaluate(self, point: Sequence[complex]) -> np.ndarray:
        return evaluate(self.model, point[0])

    def derivatives(self, point: Sequence[complex]) -> MetricDerivatives:
        jet = lift(self.model, point[0], (1, 1))
        return MetricDerivatives(
            point=(complex(point[0]),),
            h=partial(jet, 0, 0),
            d=[partial(jet, 1, 0)],
            dbar=[partial(jet, 0, 1)],
            dbar_d=[[partial(jet, 1, 1)]],
        )

    def to_dict(self) -> dict[str, Any]:
        return self.model.to_dict()


@dataclass(frozen=True)
class SeparableModel(MultiMetricModel):
    """h(z1, z2) = h1(z1) (x) h2(z2), the Kronecker product of two one-variable metrics"""

    first: MetricModel
    second: MetricModel

    @property
    def rank(self) -> int:
        return self.first.rank * self.second.rank

    def evaluate(self, point: Sequence[complex]) -> np.ndarray:
        z1, z2 = point
        return np.kron(evaluate(self.first, z1), evaluate(self.second, z2))

    def derivatives(self, point: Sequence[complex]) -> MetricDerivatives:
        z1, z2 = point
        j1 = lift(self.first, z1, (1, 1))
        j2 = lift(self.second, z2, (1, 1))
        # factor_derivs[var][(p, q)] = d^p dbar^q of that factor, other factor undifferentiated
        f1 = {pq: partial(j1, *pq) for pq in [(0, 0), (1, 0), (0, 1), (1, 1)]}
        f2 = {pq: partial(j2, *pq) for pq in [(0, 0), (1, 0), (0, 1), (1, 1)]}

        def combo(a: tuple[int, int], b: tuple[int, int]) -> np.ndarray:
            return np.kron(f1[a], f2[b])

        d = [combo((1, 0), (0, 0)), combo((0, 0), (1, 0))]
        dbar = [combo((0, 1), (0, 0)), combo((0, 0), (0, 1))]
        dbar_d = [
            [combo((1, 1), (0, 0)), combo((0, 1), (1, 0))],
            [combo((1, 0), (0, 1)), combo((0, 0), (1, 1))],
        ]
        return MetricDerivatives((complex(z1), complex(z2)), combo((0, 0), (0, 0)), d, dbar, dbar_d)

    def to_dict(self) -> dict[str, Any]:
        return {"type": "separable", "factors": [self.first.to_dict(), self.second.to_dict()]}


@dataclass(frozen=True, eq=False)
class BiPolyModel(MultiMetricModel):
    """Rank-1 metric sum c * z1^a1 conj(z1)^b1 z2^a2 conj(z2)^b2

    terms maps (a1, b1, a2, b2) to c; Hermitian symmetry requires
    c(a1, b1, a2, b2) = conj(c(b1, a1, b2, a2)).
    """

    terms: dict

    def __post_init__(self):
        terms = {tuple(int(x) for x in key): complex(c) for key, c in dict(self.terms).items()}
        if not terms:
            raise ConfigError("bipoly model needs at least one term")
        for key, c in terms.items():
            if len(key) != 4 or min(key) < 0:
                raise ConfigError(f"bipoly powers must be four nonnegative integers, got {key}")
            a1, b1, a2, b2 = key
            mirror = terms.get((b1, a1, b2, a2), 0.0)
            if abs(c - np.conj(mirror)) > 1e-12 * max(1.0, abs(c)):
                raise ConfigError(f"bipoly term {key} breaks Hermitian symmetry")
        object.__setattr__(self, "terms", terms)

    @property
    def rank(self) -> int:
        return 1

    def _derivative(self, point: Sequence[complex], orders: tuple[int, int, int, int]) -> complex:
        """d^o1/dz1 dbar^o2/dz1 d^o3/dz2 dbar^o4/dz2 at point"""
        z1, z2 = (complex(x) for x in point)
        values = (z1, z1.conjugate(), z2, z2.conjugate())
        total = 0j
        for powers, c in self.terms.items():
            term = c
            for value, power, order in zip(values, powers, orders):
                if order > power:
                    term = 0j
                    break
                term *= math.perm(power, order) * value ** (power - order)
            total += term
        return total

    def evaluate(self, point: Sequence[complex]) -> np.ndarray:
        return np.array([[self._derivative(point, (0, 0, 0, 0))]])

    def derivatives(self, point: Sequence[complex]) -> MetricDerivatives:
        def at(*orders: int) -> np.ndarray:
            return np.array([[self._derivative(point, orders)]])

        h = at(0, 0, 0, 0)
        if h[0, 0].real <= 0:
            raise DegenerateMetric("metric is not positive definite", point=complex(point[0]))
        d = [at(1, 0, 0, 0), at(0, 0, 1, 0)]
        dbar = [at(0, 1, 0, 0), at(0, 0, 0, 1)]
        dbar_d = [[at(1, 1, 0, 0), at(0, 1, 1, 0)], [at(1, 0, 0, 1), at(0, 0, 1, 1)]]
        return MetricDerivatives(tuple(complex(x) for x in point), h, d, dbar, dbar_d)

    def to_dict(self) -> dict[str, Any]:
        return {
            "type": "bipoly",
            "terms": [{"powers": list(key), "coeff": _complex_pair(c)} for key, c in sorted(self.terms.items())],
        }


AnyModel = Union[MetricModel, MultiMetricModel]


def as_multivariable(model: AnyModel) -> MultiMetricModel:
    if isinstance(model, MultiMetricModel):
        return model
    return SingleVariable(model)
