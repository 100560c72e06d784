"""Exception types shared across the package.

All inherit ValueError so callers can catch broadly; the CLI maps them to
exit status 1 (computation/range failures) while argparse handles usage
errors with status 2.
"""

from __future__ import annotations


class DensedivError(ValueError):
    """Base class for all package-specific errors."""


class ConfigurationError(DensedivError):
    """A constructor/config parameter is outside its supported range."""


class SieveRangeError(DensedivError):
    """An argument exceeds the range covered by the factor table."""


class ResourceCapError(DensedivError):
    """A request exceeds a documented resource cap (e.g. divisor count)."""


class DomainError(DensedivError):
    """Arguments violate a formula's validity regime."""


class EstimateUndefinedError(DensedivError):
    """An empirical estimate is requested where it is undefined (count 0)."""
