"""Exception hierarchy for ratext."""


class RatextError(Exception):
    """Base class for all errors raised by ratext."""


class ParameterError(RatextError, ValueError):
    """Family parameters outside their validity range."""


class UnsupportedError(ParameterError):
    """Parameter combination on a boundary where no regular extension is defined."""


class DomainError(RatextError, ValueError):
    """Evaluation point outside the physical domain."""


class SingularEnergyError(RatextError, ZeroDivisionError):
    """Energy formula evaluated where it diverges."""


class NoSuchStateError(RatextError, ValueError):
    """Requested bound state does not exist."""


class NoExtraStateError(NoSuchStateError):
    """The extra lower state is not normalizable (strictly isospectral case)."""


class PoleError(RatextError, ZeroDivisionError):
    """A continued-fraction denominator vanished."""


class CoincidenceError(RatextError, ZeroDivisionError):
    """The two RS functions entering a DBT coincide at the evaluation point."""


class RegularityError(RatextError):
    """The regularizing denominator has a zero inside the physical domain."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class InconsistencyError(RatextError, AssertionError):
    """Two independent routes to the same quantity disagree."""


class DegeneratePolynomialError(RatextError, ValueError):
    """Polynomial is numerically zero."""


class IntegrationError(RatextError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class EigensolverError(RatextError, RuntimeError):
    """Grid eigensolver cannot produce the requested levels."""
