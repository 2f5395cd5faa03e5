"""
Model catalog for jetcurv

Reads and writes the JSON catalog: {"schema": "jetcurv-catalog/1",
"models": {id: node}} where each node is a tagged union on "type".
Complex numbers are [re, im] pairs. The canonical text is
json.dumps(sort_keys=True, indent=2) plus a trailing newline.
"""

import json
import logging
from pathlib import Path
from typing import Any, Union

from errors import ConfigError
from models import (
    AnyModel,
    BiPolyModel,
    DiagModel,
    ExpModel,
    FrameConjModel,
    HoloFrame,
    KernelModel,
    MetricModel,
    PolyModel,
    PowerModel,
    ScaleModel,
    SeparableModel,
)

logger = logging.getLogger(__name__)

CATALOG_SCHEMA = "jetcurv-catalog/1"


def _complex(pair: Any, where: str) -> complex:
    if isinstance(pair, (int, float)) and not isinstance(pair, bool):
        return complex(pair)
    if isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, (int, float)) for x in pair):
        return complex(pair[0], pair[1])
    raise ConfigError(f"{where}: expected a number or [re, im] pair, got {pair!r}")


def _require(node: dict, key: str, where: str) -> Any:
    if key not in node:
        raise ConfigError(f"{where}: missing key {key!r}")
    return node[key]


def _one_variable(node: Any, where: str) -> MetricModel:
    model = model_from_dict(node, where)
    if not isinstance(model, MetricModel):
        raise ConfigError(f"{where}: expected a one-variable model")
    return model


def model_from_dict(node: Any, where: str = "model") -> AnyModel:
    """Decode one tagged-union node"""
    if not isinstance(node, dict) or "type" not in node:
        raise ConfigError(f"{where}: model node must be an object with a 'type' key")
    kind = node["type"]
    try:
        if kind == "power":
            return PowerModel(_require(node, "lam", where))
        if kind == "exp":
            return ExpModel()
        if kind == "poly":
            return PolyModel(tuple(_require(node, "coeffs", where)))
        if kind == "kernel":
            return KernelModel(tuple(_require(node, "weights", where)), node.get("tail", "zero"))
        if kind == "diag":
            blocks = _require(node, "blocks", where)
            return DiagModel(tuple(_one_variable(b, f"{where}.blocks[{i}]") for i, b in enumerate(blocks)))
        if kind == "frame":
            raw = _require(node, "frame", where)
            coeffs = [[[_complex(x, f"{where}.frame") for x in row] for row in matrix] for matrix in raw]
            return FrameConjModel(_one_variable(_require(node, "base", where), f"{where}.base"), HoloFrame(coeffs))
        if kind == "scale":
            phi = tuple(_complex(c, f"{where}.phi") for c in _require(node, "phi", where))
            return ScaleModel(_one_variable(_require(node, "base", where), f"{where}.base"), phi)
        if kind == "separable":
            factors = _require(node, "factors", where)
            if len(factors) != 2:
                raise ConfigError(f"{where}: separable model needs exactly two factors")
            return SeparableModel(*(_one_variable(f, f"{where}.factors[{i}]") for i, f in enumerate(factors)))
        if kind == "bipoly":
            terms = {}
            for term in _require(node, "terms", where):
                terms[tuple(_require(term, "powers", where))] = _complex(_require(term, "coeff", where), where)
            return BiPolyModel(terms)
    except ConfigError as e:
        if e.message.startswith(where):
            raise
        raise ConfigError(f"{where}: {e.message}") from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{where}: {e}") from e
    raise ConfigError(f"{where}: unknown model type {kind!r}")


def parse_catalog(text: str) -> dict[str, AnyModel]:
    """Parse catalog JSON text into {id: model}"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"catalog is not valid JSON: {e}") from e
    if not isinstance(data, dict) or data.get("schema") != CATALOG_SCHEMA:
        raise ConfigError(f"catalog must declare schema {CATALOG_SCHEMA!r}")
    models = data.get("models")
    if not isinstance(models, dict) or not models:
        raise ConfigError("catalog needs a non-empty 'models' object")
    return {name: model_from_dict(node, f"models.{name}") for name, node in models.items()}


def dump_catalog(models: dict[str, AnyModel]) -> str:
    """Canonical catalog text"""
    data = {"schema": CATALOG_SCHEMA, "models": {name: model.to_dict() for name, model in models.items()}}
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_catalog(path: Union[str, Path]) -> dict[str, AnyModel]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read catalog {path}: {e}") from e
    models = parse_catalog(text)
    logger.info(f"Loaded {len(models)} models from {path}")
    return models


def save_catalog(models: dict[str, AnyModel], path: Union[str, Path]):
    Path(path).write_text(dump_catalog(models), encoding="utf-8")
