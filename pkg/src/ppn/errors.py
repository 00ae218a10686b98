"""Exception hierarchy shared across the package."""


class PpnError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(PpnError):
    """A distribution or model parameter is out of its valid domain."""


class DataError(PpnError):
    """Input data is malformed (wrong kind, non-finite values, bad one-hot rows)."""


class DimensionError(PpnError):
    """Shapes or dimension counts are incompatible."""


class DomainError(PpnError):
    """A scalar argument is outside the function's domain."""


class SingularityError(PpnError):
    """A matrix required to be invertible is (numerically) singular."""


class StateError(PpnError):
    """A model state is invalid (e.g. non-positive variances)."""


class WiringError(PpnError):
    """Mismatched components were combined (wrong model for a diagnostic, etc.)."""


class DegenerateSampleError(PpnError):
    """A sample set has zero variance and cannot support density estimation."""


class CheckError(PpnError):
    """A check failed at some stage; carries provenance of model and stage."""

    def __init__(self, model_id: str, stage: str, cause: Exception):
        super().__init__(f"model {model_id!r} failed during {stage}: {cause}")
        self.model_id = model_id
        self.stage = stage
        self.cause = cause
