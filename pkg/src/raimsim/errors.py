"""Exception hierarchy.

ConfigurationError maps to CLI exit code 2, NumericalError (and subclasses)
to exit code 1.
"""


class RaimsimError(Exception):
    pass


class ConfigurationError(RaimsimError):
    """Invalid input, unknown species, missing sector/table, bad config file."""


class NumericalError(RaimsimError):
    """Numerical failure (eigensolver breakdown, non-convergence)."""


class NumericalAccuracyError(NumericalError):
    """A result failed its internal accuracy estimate."""


class InvalidChannelError(ConfigurationError):
    """Quantum numbers outside the validity of the radial model."""


class WellNotFoundError(NumericalError):
    """No interior minimum on the tracked potential curve."""


class UnstableConfigurationError(NumericalError):
    """Hessian not positive definite at the requested equilibrium."""
