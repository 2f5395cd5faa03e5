"""
Report output for jetcurv

Writes the versioned JSON identity report and the plot-ready curvature
tables (one CSV per model per jet order). Output is deterministic: keys
are sorted, JSON floats use Python's shortest round-trip repr, table
floats are written with 17 significant digits and the CSV writer never
consults the locale.
"""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "jetcurv-report/1"
VERSION = "0.1.0"


def _number(value: float) -> Union[float, str]:
    """JSON has no NaN/inf; spell them out"""
    value = float(value)
    if math.isfinite(value):
        return value
    return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")


def _fixed(value: float) -> str:
    return format(float(value), ".17g")


def _point(z: Optional[complex]) -> Optional[list[float]]:
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class IdentityRecord:
    """Worst residual of one identity for one model and jet order"""

    model: Optional[str]
    k: Optional[int]
    identity: str
    max_residual: float
    tolerance: float
    point: Optional[complex] = None
    point_index: Optional[int] = None
    witness: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tolerance)

    def sort_key(self) -> tuple:
        return (self.model or "", -1 if self.k is None else self.k, self.identity)

    def to_dict(self) -> dict[str, Any]:
        data = {
            "model": self.model,
            "k": self.k,
            "identity": self.identity,
            "max_residual": _number(self.max_residual),
            "tolerance": self.tolerance,
            "point": _point(self.point),
            "point_index": self.point_index,
            "pass": self.passed,
        }
        if self.witness is not None and not self.passed:
            data["witness"] = self.witness
        return data


@dataclass
class IdentityReport:
    """All verdicts of one run plus enough metadata to reproduce it"""

    config_hash: str
    identities: list[IdentityRecord] = field(default_factory=list)
    equivalence: list[dict[str, Any]] = field(default_factory=list)
    tables: dict[str, dict[str, str]] = field(default_factory=dict)
    version: str = VERSION

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.identities) and all(
            entry.get("consistent", True) for entry in self.equivalence
        )

    def failures(self) -> list[IdentityRecord]:
        return [record for record in self.identities if not record.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": REPORT_SCHEMA,
            "version": self.version,
            "config_hash": self.config_hash,
            "identities": [record.to_dict() for record in sorted(self.identities, key=IdentityRecord.sort_key)],
            "equivalence": self.equivalence,
            "tables": self.tables,
            "passed": self.passed,
        }


class ReportWriter:
    """Handle writing reports and tables into one output directory"""

    def __init__(self, output_dir: Union[str, Path]):
        self.output_dir = Path(output_dir)

    def _ensure_dir(self):
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def write_report(self, report: IdentityReport, name: str = "report.json") -> Path:
        self._ensure_dir()
        path = self.output_dir / name
        text = json.dumps(report.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"
        path.write_text(text, encoding="utf-8")
        logger.info(f"Report written: {path}")
        return path

    def write_curvature_table(self, model: str, k: int, rows: Sequence[tuple[complex, np.ndarray]]) -> Path:
        """re(z), im(z), then the row-major entries of Theta with re/im interleaved"""
        self._ensure_dir()
        path = self.output_dir / f"{model}_k{k}.csv"
        size = rows[0][1].shape[0] if rows else 0
        header = ["re_z", "im_z"]
        for r in range(size):
            for c in range(size):
                header += [f"re_theta_{r}_{c}", f"im_theta_{r}_{c}"]
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for z, theta in rows:
                line = [_fixed(z.real), _fixed(z.imag)]
                for value in np.asarray(theta).ravel():
                    line += [_fixed(value.real), _fixed(value.imag)]
                writer.writerow(line)
        logger.debug(f"Curvature table written: {path}")
        return path
