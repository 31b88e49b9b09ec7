"""Exception hierarchy shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class SICInfeasibleError(DomainError):
    """The near user can never pass the SIC threshold: a_far <= gamma_th * a_near."""


class ConfigError(ValueError):
    """A configuration value violates its invariants.

    ``field`` names the offending entry (dotted path) when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class IntegrationError(ArithmeticError):
    """Numerical integration failed: non-finite integrand or budget exhausted."""
