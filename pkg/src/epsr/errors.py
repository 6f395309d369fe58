"""Exception types shared across the toolkit."""


class EpsrError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(EpsrError, ValueError):
    """A model spec, recipe, or config file asked for something unbuildable."""


class ShapeError(EpsrError, ValueError):
    """Tensor or image dimensions are incompatible with the operation."""


class StateError(EpsrError, RuntimeError):
    """Operation requested in the wrong lifecycle state (e.g. fused forward before fusion)."""


class ResourceError(EpsrError, RuntimeError):
    """Out of memory or similar; carries a suggested mitigation."""

    def __init__(self, message, suggested_tile=None):
        super().__init__(message)
        self.suggested_tile = suggested_tile


class AccountingError(EpsrError, ValueError):
    """FLOPs/parameter accounting hit a layer kind it cannot price."""


class ScoringError(EpsrError, ValueError):
    """Metric aggregation failed (missing metric, zero baseline, ...)."""


class TrainingAborted(EpsrError, RuntimeError):
    """Training stopped on a non-finite loss; the last good checkpoint is retained."""

    def __init__(self, message, last_checkpoint=None):
        super().__init__(message)
        self.last_checkpoint = last_checkpoint
