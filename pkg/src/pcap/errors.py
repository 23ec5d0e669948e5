"""Exception hierarchy.

Validation problems (bad input) subclass :class:`ValidationError` and map to
CLI exit status 2; numerical failures subclass :class:`NumericalError` and map
to exit status 3.
"""


class PcapError(Exception):
    pass


class ValidationError(PcapError, ValueError):
    pass


class NumericalError(PcapError, ArithmeticError):
    pass


class InvalidProfile(ValidationError):
    pass


class InvalidSpace(ValidationError):
    pass


class InvalidOperator(ValidationError):
    pass


class BadAnnulus(ValidationError):
    pass


class BadSequence(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class PNotEqualN(ValidationError):
    pass


class ParabolicProfile(ValidationError):
    """Raised when an object that exists only on non-parabolic ends is requested."""


class EvaluationFailure(PcapError):
    """A profile, operator or integrand could not be evaluated."""


class OutOfTableRange(EvaluationFailure, ValidationError):
    pass


class DivergentAtOrigin(NumericalError):
    pass


class IndeterminateError(NumericalError):
    """An improper integral could be classified neither way."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NonConvergence(NumericalError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class BracketFailure(NumericalError):
    pass


class ConditionViolated(ValidationError):
    def __init__(self, condition, s, ratio, message=None):
        self.condition = condition
        self.s = s
        self.ratio = ratio
        super().__init__(
            message or f"condition {condition!r} violated at s={s!r} (ratio {ratio!r})"
        )


class NonMonotone(ValidationError):
    def __init__(self, v1, v2, inner):
        self.v1 = v1
        self.v2 = v2
        self.inner = inner
        super().__init__(f"non-positive monotonicity product {inner!r}")


class BoundaryOrder(ValidationError):
    """Boundary data of a comparison experiment are not ordered."""
