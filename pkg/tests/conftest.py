import json

import pytest

from catalog import CATALOG_SCHEMA


@pytest.fixture
def catalog_path(tmp_path):
    """Small catalog with a scaled twin for the equivalence tests"""
    path = tmp_path / "catalog.json"
    data = {
        "schema": CATALOG_SCHEMA,
        "models": {
            "disk": {"type": "power", "lam": 1.0},
            "twin": {"type": "scale", "base": {"type": "power", "lam": 1.0}, "phi": [1.0, 0.5]},
            "plane": {"type": "exp"},
            "pair": {"type": "diag", "blocks": [{"type": "power", "lam": 1.0}, {"type": "power", "lam": 2.0}]},
            "product": {"type": "separable", "factors": [{"type": "power", "lam": 1.0}, {"type": "exp"}]},
        },
    }
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


@pytest.fixture
def config_path(tmp_path, catalog_path):
    path = tmp_path / "run.json"
    data = {
        "models": catalog_path.name,
        "grid": {"shape": "polar", "radius": 0.4, "points": 6, "rings": 2},
        "jet_orders": [1, 2],
        "outputs": "out",
        "seed": 7,
        "trials": 10,
        "pairs": [["disk", "twin"]],
    }
    path.write_text(json.dumps(data), encoding="utf-8")
    return path
