"""
Error types for jetcurv

Every library failure is a JetCurvError; the CLI maps the subclasses onto
exit codes.
"""

from typing import Optional


class JetCurvError(Exception):
    """Base error carrying optional model/point context"""

    def __init__(self, message: str, model: Optional[str] = None, point: Optional[complex] = None):
        super().__init__(message)
        self.message = message
        self.model = model
        self.point = point

    def with_context(self, model: Optional[str] = None, point: Optional[complex] = None) -> "JetCurvError":
        """Fill in missing context and return self (for re-raising)"""
        if self.model is None:
            self.model = model
        if self.point is None:
            self.point = point
        return self

    def __str__(self) -> str:
        parts = [f"{type(self).__name__}: {self.message}"]
        if self.model is not None:
            parts.append(f"model={self.model}")
        if self.point is not None:
            parts.append(f"point={self.point!r}")
        return " ".join(parts)


class JetShapeError(JetCurvError, ValueError):
    """Center, bi_order or dimension mismatch, or derivative order out of range"""


class DegenerateMetric(JetCurvError):
    """Metric (or a constant term that must be inverted) is singular or not PD"""


class DegenerateJetMetric(DegenerateMetric):
    """J_k(h) is not positive definite at the point"""


class DomainError(JetCurvError, ValueError):
    """Point outside a model's domain, or not enough margin around it"""


class ConfigError(JetCurvError, ValueError):
    """Malformed catalog, run configuration or model parameters"""


class InternalInconsistency(JetCurvError):
    """Two independent computations of the same quantity disagree"""
