"""Model-agnostic diagnostic machinery.

A realized diagnostic d(x, theta) becomes a function of data alone through a
reduction: averaging over a posterior anchored on the validation part, or
evaluating at a single point estimate.  The validation part never overlaps
the data being scored, which is what makes the resulting p-values meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset
from .errors import DomainError, DimensionError, ParameterError, WiringError
from .models import REDUCTION_AVERAGE, REDUCTION_MAP


@dataclass(frozen=True)
class DiagnosticSpec:
    """Which model's realized diagnostic to use and how to reduce it."""

    model: object
    reduction: str = None
    B: int = None

    def __post_init__(self):
        if self.reduction is None:
            object.__setattr__(self, "reduction", self.model.default_reduction)
        if self.reduction not in (REDUCTION_AVERAGE, REDUCTION_MAP):
            raise ParameterError(f"unknown reduction {self.reduction!r}")
        if self.B is not None and self.B < 1:
            raise ParameterError("B must be >= 1")


def validation_diagnostic(x: Dataset, spec: DiagnosticSpec, draws, stream) -> float:
    """Reduce the realized diagnostic of x over draws anchored on x_val."""
    if draws.model_id != spec.model.id:
        raise WiringError(f"draws for {draws.model_id!r} cannot anchor a "
                          f"{spec.model.id!r} diagnostic")
    if spec.reduction == REDUCTION_MAP:
        state = draws.states[0] if draws.B == 1 else draws.map_state()
        return float(spec.model.diagnostic_batch(x, [state], stream)[0])
    B = draws.B if spec.B is None else min(spec.B, draws.B)
    vals = spec.model.diagnostic_batch(x, draws.states[:B], stream)
    return float(np.mean(vals))


def chi2_overall_diagnostic(x: Dataset, predictive_mean, predictive_var) -> float:
    """Standardized squared deviation summed over all cells."""
    mean = np.asarray(predictive_mean, dtype=float)
    var = np.asarray(predictive_var, dtype=float)
    if mean.shape != x.values.shape or var.shape != x.values.shape:
        raise DimensionError("predictive moments must match the data shape")
    if np.any(var <= 0):
        raise DomainError("predictive variances must be positive")
    return float((((x.values - mean) ** 2) / var).sum())
