"""Exception hierarchy shared by all modules."""


class SingularOscillatorError(Exception):
    """Base class for every error raised by the package."""


class CollapseError(SingularOscillatorError, ValueError):
    """Coupling at or below the fall-to-center threshold ``g <= -1``."""


class RangeError(SingularOscillatorError, ValueError):
    """Reflection parameter outside the supported interval."""


class PoleError(SingularOscillatorError, ZeroDivisionError):
    """Generating function evaluated at its pole ``z = 1/rho``."""


class SolverError(SingularOscillatorError, RuntimeError):
    """Numerical integration could not deliver an accepted result."""


class AsymptoteNotReached(SolverError):
    """The frequency profile is not flat at the ends of the matching window."""


class WronskianViolation(SolverError):
    """Classical trajectory failed the Wronskian conservation gate."""


class TruncationError(SolverError):
    """Requested level too close to the edge of the truncated basis."""


class NormDriftError(SolverError):
    """Propagated state lost normalization."""


class LeakageError(SolverError):
    """Probability reached the top of the truncated basis."""
