"""Exception hierarchy shared across the simulator."""


class OpaSimError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(OpaSimError, ValueError):
    """A physical parameter is outside its valid domain."""


class AboveThresholdError(ParameterError):
    """Pump power at or above the oscillation threshold."""


class AnalysisError(OpaSimError, ValueError):
    """A DSP operation received input it cannot process (too short,
    undersampled, band outside Nyquist, mismatched shapes...)."""


class InconsistentDataError(OpaSimError, ValueError):
    """Measured data incompatible with the model (e.g. observed squeezing
    deeper than the ideal reference)."""


class InfeasiblePairError(OpaSimError, ValueError):
    """No operating point in the valid domain reproduces the given pair."""


class LockError(OpaSimError, RuntimeError):
    """A lock simulation cannot run as configured (e.g. zero count rate)."""


class ConfigError(OpaSimError, ValueError):
    """Scenario configuration failed validation.

    The message always starts with the dotted path of the offending field.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
