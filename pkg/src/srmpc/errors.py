"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: config 2, data 3, solver 4.
"""


class SrmpcError(Exception):
    """Base class for all package errors."""


class ConfigError(SrmpcError):
    """Invalid configuration file, flags, or parameter combination."""


class DataError(SrmpcError):
    """Malformed, misaligned, or insufficient input data."""


class SolverError(SrmpcError):
    """Optimization failed to produce a usable solution."""


class OperatingGapError(SrmpcError):
    """Requested HVAC operating point falls in the forbidden capacity gap."""


class InfeasibleCapacityError(OperatingGapError):
    """Capacity strictly between zero and the turn-off threshold."""


class InfeasiblePowerError(OperatingGapError):
    """Power strictly between zero and the minimum-load power draw."""
