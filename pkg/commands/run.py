"""
Run command for jetcurv

Sweeps the configured grid for every catalog model, evaluates the identity
suite at each point from one lift of the metric, and writes the report and
curvature tables.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from commands.verify_identities import trial_records
from catalog import load_catalog
from curvature import (
    curvature,
    curvature_multivar,
    det_curvature_routes,
    det_minor_derivatives,
    jet_curvature,
    quotient_det_residual,
    trace_formula_terms,
    wedge_gram,
)
from errors import InternalInconsistency, JetCurvError
from identities import (
    det_bundle_equiv_test,
    det_recursion_residual,
    gauge_covariance_residual,
    jet_descent_check,
    line_equiv_test,
    random_frame,
)
from jetbundle import assemble_jet_metric, metric_transform_check
from models import AnyModel, MetricModel, MultiMetricModel, lift
from oracle import fd_partial
from report import IdentityRecord, IdentityReport, ReportWriter
from runconfig import RunConfig, sample_grid
from wjet import MatrixJet, partial

logger = logging.getLogger(__name__)


def _relative(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
    return float(np.max(np.abs(a - b)) / scale) if a.size else 0.0


@dataclass
class _Tracker:
    """Worst residual per (k, identity) over the grid"""

    model: str
    config: RunConfig
    worst: dict = field(default_factory=dict)

    def add(self, k: Optional[int], identity: str, residual: float, index: int, point: complex):
        key = (k, identity)
        current = self.worst.get(key)
        if current is None or not residual <= current.max_residual:
            self.worst[key] = IdentityRecord(
                self.model, k, identity, float(residual), self.config.tolerance(identity), point, index
            )

    def records(self) -> list[IdentityRecord]:
        return list(self.worst.values())


@dataclass
class ModelOutcome:
    name: str
    records: list[IdentityRecord]
    tables: dict[int, list[tuple[complex, np.ndarray]]]


def _jet_identities(tracker: _Tracker, hjet: MatrixJet, k: int, index: int, z: complex) -> np.ndarray:
    n = hjet.rank
    form = jet_curvature(hjet, k, strict=False)
    theta = form.theta
    tracker.add(k, "jet_route_consistency", form.discrepancy, index, z)

    s = np.linalg.svd(theta, compute_uv=False)
    tracker.add(k, "rank_bound", s[n] / s[0] if s.size > n and s[0] > 0 else 0.0, index, z)

    norm = max(float(np.linalg.norm(theta)), 1e-300)
    tracker.add(k, "jet_curvature_structure", float(np.linalg.norm(theta[:, : k * n])) / norm, index, z)

    tracker.add(k, "det_recursion", det_recursion_residual(hjet, k), index, z)

    if n == 1:
        formula, log_route = det_curvature_routes(hjet, k)
        tracker.add(k, "det_curvature", abs(formula - log_route) / max(abs(formula), 1e-300), index, z)
        tracker.add(k, "line_jet_corner", abs(theta[-1, -1] - formula) / max(abs(formula), 1e-300), index, z)
        minors = det_minor_derivatives(hjet, k)
        tracker.add(k, "det_minor_derivatives", max(_relative(a, b) for a, b in minors.values()), index, z)

    if k >= 1:
        upper, lower, quotient = trace_formula_terms(hjet, k, strict=False)
        residual = np.linalg.norm(upper - lower - quotient) / max(1.0, float(np.linalg.norm(upper)))
        tracker.add(k, "trace_formula", residual, index, z)
        tracker.add(k, "quotient_determinant", quotient_det_residual(hjet, k, strict=False), index, z)
    return theta


def _point_identities(tracker: _Tracker, model: MetricModel, hjet: MatrixJet, frame, index: int, z: complex):
    """Identities of the base metric that do not depend on k"""
    base = curvature(hjet).theta
    h = hjet.value
    h1 = wedge_gram(hjet, 1).hk
    wedge = np.linalg.solve(h, h1) / np.linalg.det(h)
    tracker.add(None, "curvature_wedge_formula", _relative(base, wedge), index, z)
    tracker.add(None, "gauge_covariance", gauge_covariance_residual(model, frame, z), index, z)

    config = tracker.config
    worst = 0.0
    for order in range(config.oracle_order + 1):
        for p in range(order + 1):
            q = order - p
            fd = fd_partial(model, z, p, q, config.fd)
            worst = max(worst, _relative(fd, partial(hjet, p, q)))
    tracker.add(None, "oracle_agreement", worst, index, z)


def evaluate_model(name: str, model: AnyModel, grid: list[complex], config: RunConfig, seed) -> ModelOutcome:
    """Full identity suite for one model over the grid"""
    tracker = _Tracker(name, config)
    tables: dict[int, list[tuple[complex, np.ndarray]]] = {k: [] for k in config.jet_orders}
    logger.info(f"Evaluating model {name} on {len(grid)} points")

    if isinstance(model, MultiMetricModel):
        for index, z in enumerate(grid):
            try:
                form = curvature_multivar(model, (z, z), strict=False)
                tracker.add(None, "multivariable_routes", form.discrepancy, index, z)
            except JetCurvError as e:
                raise e.with_context(name, z)
        return ModelOutcome(name, tracker.records(), {})

    frame = random_frame(np.random.default_rng(seed), model.rank)
    top = max(config.jet_orders) + 2
    for index, z in enumerate(grid):
        try:
            hjet = lift(model, z, (top, top))
            for k in config.jet_orders:
                jk = assemble_jet_metric(hjet, k)
                theta = _jet_identities(tracker, hjet, k, index, z)
                tables[k].append((z, theta))
                scale = max(1.0, float(np.linalg.norm(jk.value)))
                tracker.add(k, "frame_transform_law", metric_transform_check(model, frame, z, k) / scale, index, z)
            _point_identities(tracker, model, hjet, frame, index, z)
        except JetCurvError as e:
            raise e.with_context(name, z)
        logger.debug(f"{name}: point {index} done")
    return ModelOutcome(name, tracker.records(), tables)


def _equivalence(config: RunConfig, models: dict[str, AnyModel], grid: list[complex]) -> list[dict]:
    entries = []
    tolerance = config.tolerance("equivalence")
    for first, second in config.pairs:
        a, b = models[first], models[second]
        line = line_equiv_test(a, b, grid, tolerance)
        entries.append({"pair": [first, second], "test": "line", "k": None, **line.to_dict()})
        for k in config.jet_orders:
            try:
                verdict = det_bundle_equiv_test(a, b, k, grid, tolerance)
                entries.append({"pair": [first, second], "test": "det_bundle", "k": k, **verdict.to_dict()})
            except InternalInconsistency as e:
                logger.error(f"Equivalence biconditional failed for {first}/{second}: {e}")
                entries.append(
                    {"pair": [first, second], "test": "det_bundle", "k": k, "consistent": False, "error": e.message}
                )
        top = max(config.jet_orders)
        try:
            descent = jet_descent_check(a, b, top, grid, tolerance)
            entries.append({"pair": [first, second], "test": "descent", "k": top, **descent.to_dict()})
        except InternalInconsistency as e:
            logger.error(f"Jet descent check failed for {first}/{second}: {e}")
            entries.append(
                {"pair": [first, second], "test": "descent", "k": top, "consistent": False, "error": e.message}
            )
    return entries


def run_command(config: RunConfig, writer: Optional[ReportWriter] = None) -> IdentityReport:
    """Handle the run subcommand; raises JetCurvError for degenerate input"""
    writer = writer or ReportWriter(config.outputs)
    models = load_catalog(config.models)
    config.validate(models)
    grid = sample_grid(config.grid)
    logger.info(f"Running {len(models)} models, k in {config.jet_orders}, {len(grid)} grid points")

    names = list(models)
    seeds = np.random.SeedSequence(config.seed).spawn(len(names))

    def task(name: str, seed: np.random.SeedSequence) -> ModelOutcome:
        return evaluate_model(name, models[name], grid, config, seed)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        outcomes = list(pool.map(task, names, seeds))

    report = IdentityReport(config.config_hash())
    if config.trials > 0:
        report.identities.extend(trial_records(config.seed, config.trials, config.tolerance))
    for outcome in outcomes:
        report.identities.extend(outcome.records)
        if outcome.tables:
            report.tables[outcome.name] = {}
        for k, rows in outcome.tables.items():
            path = writer.write_curvature_table(outcome.name, k, rows)
            report.tables[outcome.name][str(k)] = path.name
    report.equivalence = _equivalence(config, models, grid)
    writer.write_report(report)

    for record in report.failures():
        logger.error(
            f"Identity {record.identity} failed for {record.model} (k={record.k}): "
            f"residual {record.max_residual:.3e} > {record.tolerance:.1e} at {record.point}"
        )
    return report
