"""
Curvature command for jetcurv

Tabulates Theta of the jet bundle J_k for one catalog model over a grid.
"""

import logging
from pathlib import Path

import numpy as np

from catalog import load_catalog
from curvature import jet_curvature
from errors import ConfigError, JetCurvError
from models import MetricModel, lift
from report import ReportWriter
from runconfig import GridSpec, sample_grid

logger = logging.getLogger(__name__)


def curvature_command(catalog: Path, model_id: str, k: int, grid: GridSpec, writer: ReportWriter) -> Path:
    """Handle the curvature subcommand and return the CSV path"""
    models = load_catalog(catalog)
    if model_id not in models:
        raise ConfigError(f"model {model_id!r} is not in the catalog (have {sorted(models)})")
    model = models[model_id]
    if not isinstance(model, MetricModel):
        raise ConfigError("curvature tables are for one-variable models", model=model_id)
    if k < 0:
        raise ConfigError(f"k must be nonnegative, got {k}")

    rows = []
    for z in sample_grid(grid):
        try:
            theta = jet_curvature(lift(model, z, (k + 2, k + 2)), k).theta
        except JetCurvError as e:
            raise e.with_context(model_id, z)
        rows.append((z, theta))
        trace = np.trace(theta).real
        logger.info(f"{model_id} z={z:.4f}: trace Theta = {trace:.10g} (opposite sign convention {-trace:.10g})")
    return writer.write_curvature_table(model_id, k, rows)
