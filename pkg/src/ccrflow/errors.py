"""Exception hierarchy.

Validation problems (bad input) derive from :class:`ValidationError`; numerical
contract violations derive from :class:`ContractFailure`. The CLI maps the two
families to exit codes 1 and 2.
"""


class CCRFlowError(Exception):
    pass


class ValidationError(CCRFlowError, ValueError):
    """Input does not satisfy a stated invariant."""


class DimensionMismatch(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class DegenerateRealPart(ValidationError):
    pass


class NonPositiveR(ValidationError):
    pass


class BoundarySpectrum(ValidationError):
    pass


class CenterNotFree(ValidationError):
    pass


class UnboundedSection(ValidationError):
    pass


class MeasureMismatch(ValidationError):
    pass


class BlockMismatch(ValidationError):
    pass


class SingularDenominator(ValidationError):
    pass


class NotCommuting(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class GridTooCoarse(CCRFlowError):
    """Quadrature error estimate exceeds the requested tolerance."""


class ContractFailure(CCRFlowError):
    pass
