"""Exception types shared across supercrit. The CLI maps them to exit codes."""


class SupercritError(Exception):
    """Base class for errors raised by supercrit"""


class ConfigError(SupercritError, ValueError):
    """Scenario or config validation failure (exit code 2)"""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class BlowUpError(SupercritError, RuntimeError):
    """Numerical blow-up during a run (exit code 3)"""

    def __init__(self, message, time=None, last_good=None):
        super().__init__(message)
        self.time = time
        self.last_good = last_good


class EnvelopeRangeError(SupercritError, ValueError):
    """H^-1 queried beyond the tabulated range"""


class FitError(SupercritError, ValueError):
    """No constant in the bracket makes the envelope dominate the data"""


class QuadratureError(SupercritError, RuntimeError):
    """Oscillatory quadrature failed to converge"""

    def __init__(self, message, partial_sums=None):
        super().__init__(message)
        self.partial_sums = partial_sums if partial_sums is not None else []
