"""
Verify-identities command for jetcurv

Randomized trials of the pure linear-algebra identities: the
Desnanot-Jacobi minors identity, the Gram quotient lemma, the block-matrix
lemmas and the frame cocycle with its transformation law.
"""

import logging
from typing import Callable, Optional

import numpy as np

from identities import (
    IdentityVerdict,
    block_matrix_trials,
    cocycle_trials,
    desnanot_trials,
    gram_quotient_trials,
)
from report import IdentityRecord, IdentityReport, ReportWriter

logger = logging.getLogger(__name__)


def trial_records(seed: int, trials: int, tolerance: Callable[[str], float]) -> list[IdentityRecord]:
    """One record per randomized identity, drawn from a generator seeded with seed"""
    rng = np.random.default_rng(seed)
    logger.info(f"Running {trials} randomized trials per identity (seed {seed})")
    verdicts: list[IdentityVerdict] = [
        desnanot_trials(rng, trials, tolerance=tolerance("desnanot_jacobi")),
        gram_quotient_trials(rng, trials, tolerance=tolerance("gram_quotient")),
        block_matrix_trials(rng, trials, tolerance=tolerance("block_matrix")),
    ]
    frame_verdicts = cocycle_trials(rng, trials, tolerance=tolerance("cocycle"))
    verdicts.extend(
        IdentityVerdict.judge(v.name, v.residual, tolerance(v.name), v.witness) for v in frame_verdicts
    )

    records = []
    for verdict in verdicts:
        logger.info(f"{verdict.name}: max residual {verdict.residual:.3e} (tolerance {verdict.tolerance:.0e})")
        records.append(
            IdentityRecord(None, None, verdict.name, verdict.residual, verdict.tolerance, witness=verdict.witness)
        )
    return records


def verify_identities_command(
    seed: int,
    trials: int,
    writer: ReportWriter,
    tolerance: Callable[[str], float],
    config_hash: Optional[str] = None,
) -> IdentityReport:
    """Handle the verify-identities subcommand"""
    report = IdentityReport(config_hash or f"seed={seed};trials={trials}")
    report.identities.extend(trial_records(seed, trials, tolerance))
    writer.write_report(report, "identities.json")
    return report
