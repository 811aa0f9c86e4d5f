"""Exception hierarchy shared by all hopial modules."""


class HopialError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HopialError):
    """Evaluation requested outside the interval, or an invalid argument."""


class InvalidSpec(HopialError):
    """A function specification violates its structural invariants."""


class NonIntegrable(HopialError):
    """Structural endpoint exponent <= -1: the integral diverges."""


class BudgetExceeded(HopialError):
    """Adaptive subdivision hit its panel cap before reaching tolerance."""


class PreconditionFailed(HopialError):
    """A theorem/lemma hypothesis is violated; the message names it."""


class NoCrossing(HopialError):
    """Balance bisection found no crossing (monotonicity audit failed)."""


class NoEigenvalueInBracket(HopialError):
    """Eigenvalue bisection bracket produced no sign change."""


class SingularCoefficient(HopialError):
    """Leading Sturm-Liouville coefficient vanishes inside the interval."""


class NonDifferentiableWeight(HopialError):
    """A weight whose derivative is required has interior kinks."""
