"""
Run configuration for jetcurv

A run is described by a JSON file naming the model catalog, the sample
grid, the jet orders and the tolerances. Paths inside the file are
resolved relative to the file itself.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from errors import ConfigError
from models import AnyModel, MetricModel
from oracle import FDConfig

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    # curvature identities
    "curvature_wedge_formula": 1e-8,
    "gauge_covariance": 1e-8,
    "rank_bound": 1e-8,
    "trace_formula": 1e-8,
    "quotient_determinant": 1e-8,
    "equivalence": 1e-8,
    # pure linear algebra
    "jet_curvature_structure": 1e-9,
    "det_recursion": 1e-9,
    "det_curvature": 1e-9,
    "det_minor_derivatives": 1e-9,
    "line_jet_corner": 1e-9,
    "frame_transform_law": 1e-9,
    "desnanot_jacobi": 1e-9,
    "gram_quotient": 1e-9,
    "block_matrix": 1e-9,
    "cocycle": 1e-9,
    "frame_det": 1e-9,
    # cross-checks between independent routes
    "jet_route_consistency": 1e-7,
    "multivariable_routes": 1e-7,
    "oracle_agreement": 1e-6,
}


@dataclass(frozen=True)
class GridSpec:
    """Sample points: polar rings or a cartesian lattice clipped to a disk"""

    shape: str = "polar"
    radius: float = 0.5
    points: int = 64
    margin: float = 0.1
    rings: Optional[int] = None

    def __post_init__(self):
        if self.shape not in ("polar", "cartesian"):
            raise ConfigError(f"grid shape must be 'polar' or 'cartesian', got {self.shape!r}")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ConfigError(f"grid radius must be positive, got {self.radius}")
        if self.margin < 0:
            raise ConfigError(f"grid margin must be nonnegative, got {self.margin}")
        if self.rings is not None and self.rings < 1:
            raise ConfigError(f"grid needs at least one ring, got {self.rings}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GridSpec":
        unknown = set(data) - {"shape", "radius", "points", "margin", "rings"}
        if unknown:
            raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        data = {"shape": self.shape, "radius": self.radius, "points": self.points, "margin": self.margin}
        if self.rings is not None:
            data["rings"] = self.rings
        return data


def sample_grid(spec: GridSpec) -> list[complex]:
    """Deterministic point set for a grid spec

    Polar: rings at radius (j+1)/J with points // J equally spaced angles
    each (J = rings, default isqrt(points)). Cartesian: a square lattice
    over [-radius, radius]^2 keeping the points with |z| <= radius.
    """
    if spec.points <= 0:
        raise ConfigError(f"grid needs at least one point, got {spec.points}")
    if spec.shape == "polar":
        rings = spec.rings or max(1, math.isqrt(spec.points))
        angles = spec.points // rings
        if angles == 0:
            raise ConfigError(f"{spec.points} points cannot fill {rings} rings")
        return [
            complex(spec.radius * (j + 1) / rings * np.exp(2j * np.pi * a / angles))
            for j in range(rings)
            for a in range(angles)
        ]
    side = max(1, math.ceil(math.sqrt(spec.points)))
    axis = np.linspace(-spec.radius, spec.radius, side) if side > 1 else np.zeros(1)
    grid = [complex(x, y) for y in axis for x in axis if abs(complex(x, y)) <= spec.radius * (1 + 1e-12)]
    if not grid:
        raise ConfigError("cartesian grid is empty")
    return grid


@dataclass
class RunConfig:
    """Everything a run needs besides the models themselves"""

    models: Path
    grid: GridSpec = field(default_factory=GridSpec)
    jet_orders: list[int] = field(default_factory=lambda: [1])
    tolerances: dict[str, float] = field(default_factory=dict)
    outputs: Path = Path("reports")
    seed: int = 0
    trials: int = 100
    workers: int = 1
    oracle_order: int = 2
    pairs: list[tuple[str, str]] = field(default_factory=list)
    fd: FDConfig = field(default_factory=FDConfig)

    def __post_init__(self):
        if not self.jet_orders or any(not isinstance(k, int) or k < 0 for k in self.jet_orders):
            raise ConfigError(f"jet_orders must be nonnegative integers, got {self.jet_orders}")
        for name, value in self.tolerances.items():
            if not (isinstance(value, (int, float)) and value >= 0):
                raise ConfigError(f"tolerance {name} must be a nonnegative number, got {value!r}")
        if self.trials < 0:
            raise ConfigError(f"trials must be nonnegative, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if not 0 <= self.oracle_order <= self.fd.max_order:
            raise ConfigError(f"oracle_order must be in 0..{self.fd.max_order}, got {self.oracle_order}")

    @classmethod
    def from_dict(cls, data: dict[str, Any], base_dir: Path = Path(".")) -> "RunConfig":
        if not isinstance(data, dict) or "models" not in data:
            raise ConfigError("run configuration must be an object with a 'models' key")
        known = {
            "models", "grid", "jet_orders", "tolerances", "outputs", "seed",
            "trials", "workers", "oracle_order", "pairs", "fd",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        try:
            return cls(
                models=base_dir / data["models"],
                grid=GridSpec.from_dict(data.get("grid", {})),
                jet_orders=list(data.get("jet_orders", [1])),
                tolerances=dict(data.get("tolerances", {})),
                outputs=base_dir / data.get("outputs", "reports"),
                seed=int(data.get("seed", 0)),
                trials=int(data.get("trials", 100)),
                workers=int(data.get("workers", 1)),
                oracle_order=int(data.get("oracle_order", 2)),
                pairs=[tuple(pair) for pair in data.get("pairs", [])],
                fd=FDConfig(**data.get("fd", {})),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"malformed run configuration: {e}") from e

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"cannot read configuration {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"configuration {path} is not valid JSON: {e}") from e
        config = cls.from_dict(data, path.parent)
        logger.info(f"Configuration loaded from {path}")
        return config

    def tolerance(self, name: str) -> float:
        if name in self.tolerances:
            return float(self.tolerances[name])
        return DEFAULT_TOLERANCES.get(name, 1e-8)

    def validate(self, models: dict[str, AnyModel]):
        """Check the grid and pairs against the loaded catalog"""
        reach = self.grid.radius * (1 + self.grid.margin)
        oracle_reach = self.grid.radius + self.fd.reach(self.oracle_order)
        for name, model in models.items():
            if not isinstance(model, MetricModel):
                continue
            if not reach < model.radius:
                raise ConfigError(
                    f"grid radius {self.grid.radius} with margin {self.grid.margin} leaves the domain "
                    f"(radius {model.radius})",
                    model=name,
                )
            if not oracle_reach < model.radius:
                raise ConfigError(
                    f"finite-difference stencils reach |z| = {oracle_reach:.3g}, outside radius {model.radius}",
                    model=name,
                )
        for pair in self.pairs:
            if len(pair) != 2 or any(name not in models for name in pair):
                raise ConfigError(f"pair {list(pair)} does not name two catalog models")
            if any(not isinstance(models[name], MetricModel) or models[name].rank != 1 for name in pair):
                raise ConfigError(f"pair {list(pair)} must name two rank 1 one-variable models")

    def to_dict(self) -> dict[str, Any]:
        return {
            "models": self.models.as_posix(),
            "grid": self.grid.to_dict(),
            "jet_orders": list(self.jet_orders),
            "tolerances": dict(sorted(self.tolerances.items())),
            "seed": self.seed,
            "trials": self.trials,
            "oracle_order": self.oracle_order,
            "pairs": [list(pair) for pair in self.pairs],
            "fd": {
                "step": self.fd.step,
                "richardson_levels": self.fd.richardson_levels,
                "max_order": self.fd.max_order,
            },
        }

    def config_hash(self) -> str:
        """sha256 of the canonical configuration (output directory and worker count excluded)"""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
