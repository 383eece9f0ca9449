"""Exception hierarchy shared by all modules."""


class BreatherError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BreatherError, ValueError):
    """Argument outside the supported mathematical domain."""


class KinematicsError(BreatherError, ValueError):
    """Superluminal boost or undetermined classical kinematics."""


class BranchError(BreatherError, ArithmeticError):
    """The logarithm argument 1 + u is not safely inside the winding-free disc |u| < 1."""


class ConfigError(BreatherError, ValueError):
    """Invalid run or grid configuration."""


class DiagnosticsError(BreatherError, ValueError):
    """Not enough history to compute a diagnostic."""
