"""
Exception hierarchy for nanostripe
Every failure raised by the library derives from NanostripeError so the CLI can map it to exit code 1.
"""


class NanostripeError(Exception):
    """Base class for all library errors"""


class DomainError(NanostripeError, ValueError):
    """Physical input outside its valid range (non-positive frequency, point inside the stripe, ...)"""


class SingularityError(NanostripeError):
    """Evaluation on a charged face of the stripe, or a zero-width resonance hit exactly"""


class NumericError(NanostripeError):
    """Quadrature or linear-algebra step did not converge"""


class RootNotFoundError(NanostripeError):
    """No sign change on the requested bracket"""


class ResolutionError(NanostripeError):
    """Eigenvalue scan or grid too coarse to resolve the spectrum"""


class CalibrationError(NanostripeError):
    """Decoherence model cannot be fixed to the requested anchor"""


class ConfigError(NanostripeError):
    """Run configuration could not be read or validated"""

    def __init__(self, message: str, errors: list = None):
        super().__init__(message)
        self.errors = errors or []
