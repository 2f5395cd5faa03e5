"""
Finite-difference oracle for jetcurv

Mixed Wirtinger partials of a model from central differences in the real
and imaginary directions, d/dz = (d/dx - i d/dy) / 2 and
d/dconj(z) = (d/dx + i d/dy) / 2, with Richardson extrapolation over the
steps h, 2h, 4h, ... It never touches the jet code it is used to certify.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from errors import ConfigError, DomainError, JetShapeError
from models import MetricModel, evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FDConfig:
    """Step and extrapolation depth of the oracle

    With step h the stencils run at h, 2h, ..., 2^levels h; a base step of
    1e-2 keeps fourth-order rounding error near 1e-8 while two Richardson
    levels remove the h^2 and h^4 truncation terms.
    """

    step: float = 1e-2
    richardson_levels: int = 2
    max_order: int = 4

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigError(f"finite-difference step must be positive, got {self.step}")
        if self.richardson_levels < 1:
            raise ConfigError(f"richardson_levels must be at least 1, got {self.richardson_levels}")
        if self.max_order < 0:
            raise ConfigError(f"max_order must be nonnegative, got {self.max_order}")

    def reach(self, order: int) -> float:
        """Distance from z0 the widest stencil for a derivative of this order may touch"""
        return order * 2**self.richardson_levels * self.step


def central_weights(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Offsets -m..m and weights of the central stencil for d^order/dx^order (unit step)"""
    m = (order + 1) // 2
    offsets = np.arange(-m, m + 1)
    vander = np.vander(offsets, increasing=True).T.astype(float)
    rhs = np.zeros(len(offsets))
    rhs[order] = math.factorial(order)
    return offsets, np.linalg.solve(vander, rhs)


def wirtinger_expansion(p: int, q: int) -> np.ndarray:
    """c[b] with d^p dbar^q = 2^-(p+q) sum_b c[b] dx^(p+q-b) dy^b"""
    holo = np.array([math.comb(p, b) * (-1j) ** b for b in range(p + 1)])
    anti = np.array([math.comb(q, b) * (1j) ** b for b in range(q + 1)])
    return np.convolve(holo, anti) / 2 ** (p + q)


def fd_partial_function(f: Callable[[complex], np.ndarray], z0: complex, p: int, q: int, cfg: FDConfig) -> np.ndarray:
    """d^p dbar^q f at z0 for any smooth matrix-valued f"""
    if p < 0 or q < 0 or p + q > cfg.max_order:
        raise JetShapeError(f"order ({p}, {q}) outside the oracle range (p + q <= {cfg.max_order})")
    z0 = complex(z0)
    cache: dict[complex, np.ndarray] = {}

    def sample(z: complex) -> np.ndarray:
        if z not in cache:
            cache[z] = np.asarray(f(z), dtype=complex)
        return cache[z]

    expansion = wirtinger_expansion(p, q)
    d = p + q

    def estimate(step: float) -> np.ndarray:
        total = 0
        for b, coefficient in enumerate(expansion):
            if coefficient == 0:
                continue
            xs, wx = central_weights(d - b)
            ys, wy = central_weights(b)
            mixed = 0
            for i, a in zip(xs, wx):
                for j, c in zip(ys, wy):
                    mixed = mixed + a * c * sample(z0 + complex(i * step, j * step))
            total = total + coefficient * mixed / step**d
        return np.asarray(total)

    table = [estimate(cfg.step * 2**level) for level in range(cfg.richardson_levels + 1)]
    for level in range(1, cfg.richardson_levels + 1):
        factor = 4**level
        table = [(factor * table[i] - table[i + 1]) / (factor - 1) for i in range(len(table) - 1)]
    return table[0]


def fd_partial(model: MetricModel, z0: complex, p: int, q: int, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """d^p dbar^q h(z0) by finite differences (an n x n array)"""
    reach = cfg.reach(p + q)
    if not abs(z0) + reach < model.radius:
        raise DomainError(
            f"need margin {reach:.3g} around |z0| = {abs(z0):.3g} inside radius {model.radius}", point=complex(z0)
        )
    return fd_partial_function(lambda z: evaluate(model, z), z0, p, q, cfg)
