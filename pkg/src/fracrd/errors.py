"""Exception types shared across the package.

Every failure mode that callers are expected to branch on gets its own
class.  Plain ValueError/RuntimeError are reserved for programming errors.
"""


class FracrdError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(FracrdError, ValueError):
    """A parameter is outside its admissible range."""


class DataError(FracrdError, ValueError):
    """Input data is malformed: wrong shape, non-finite entries, bad file."""


class StateError(FracrdError):
    """An object is not in a state that supports the requested operation."""


class AccuracyError(FracrdError):
    """A numerical routine could not certify the requested accuracy.

    Carries the best available partial result and an error bound so callers
    can decide whether to accept it anyway.
    """

    def __init__(self, message, partial=None, bound=None):
        super().__init__(message)
        self.partial = partial
        self.bound = bound


class NonlinearSolveError(FracrdError):
    """The scalar implicit solve failed to locate a root.

    ``diagnostics`` holds the iteration trace summary (last iterate,
    residual, bracket endpoints tried).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class BlowupSignal(FracrdError):
    """Iterates escaped to infinity: the implicit step lost solvability.

    This is a mathematical signal (finite-time blow-up of the scheme),
    not a code defect.  ``last_value`` is the final finite iterate.
    """

    def __init__(self, message, last_value=None, time=None):
        super().__init__(message)
        self.last_value = last_value
        self.time = time


class StabilityError(FracrdError):
    """The explicit update would violate the stability monitor.

    ``advisory_dt`` is a step size predicted to satisfy the monitor.
    """

    def __init__(self, message, advisory_dt=None, monitor_value=None):
        super().__init__(message)
        self.advisory_dt = advisory_dt
        self.monitor_value = monitor_value


class NumericError(FracrdError):
    """An iterative numerical method stagnated or behaved inconsistently.

    ``report`` carries residuals or iteration history for post-mortem.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


class RegimeError(FracrdError, ValueError):
    """The requested quantity is undefined in this parameter regime."""


class DomainError(FracrdError, ValueError):
    """Input data violates a domain restriction of the formula."""


class WeightClassError(FracrdError):
    """A candidate weight function failed the admissibility check.

    ``report`` records the refinement study that triggered the failure.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


class ConfigError(FracrdError, ValueError):
    """A run configuration file is invalid.  Includes line numbers."""
