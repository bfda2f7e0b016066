"""Exception types shared across the solvers and the simulation harness."""


class FdbeamError(Exception):
    """Base class for library-specific failures."""


class SingularGeometryError(FdbeamError, ValueError):
    """Raised when an antenna geometry has a zero TX-RX element distance."""


class InfeasibleError(FdbeamError, ValueError):
    """Raised when the requested stream/RF-chain count cannot fit in the
    post-zero-forcing subspace."""


class DegenerateStartError(FdbeamError, RuntimeError):
    """Raised when a cyclic-maximization start vector lies entirely inside
    the null span; the caller is expected to reseed and retry."""


class NumericDegeneracyError(FdbeamError, ArithmeticError):
    """Raised when an interference-plus-noise covariance is numerically
    singular.  Rates are never silently regularized."""


class ConfigError(FdbeamError, ValueError):
    """Raised for malformed simulation configuration input; the message
    names the offending key."""
