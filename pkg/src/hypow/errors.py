"""Exception hierarchy.

Every error carries a short machine-readable ``code`` (the class name) so the
CLI can print one-line records without a lookup table.
"""


class HypowError(Exception):
    """Base class for all library errors."""

    #: exit status the CLI maps this error to
    exit_code = 3

    @property
    def code(self) -> str:
        return type(self).__name__


class ValidationError(HypowError):
    exit_code = 2


class NumericError(HypowError):
    exit_code = 3


# model_core
class IdealPointArgument(ValidationError):
    pass


class SingularPoint(NumericError):
    pass


class CoincidentPoints(ValidationError):
    pass


class PointAtTangency(ValidationError):
    pass


class OutsideModel(ValidationError):
    pass


class NoIntersection(NumericError):
    pass


# power
class UnsupportedKind(ValidationError):
    pass


class CarrierDegenerate(NumericError):
    pass


class NoTangent(NumericError):
    pass


# inversion
class CenterSingularity(NumericError):
    pass


class OutsideDomain(NumericError):
    pass


class AntipodalDegeneracy(NumericError):
    pass


class PoleSingularity(NumericError):
    pass


# radical
class NoEqualPowerPoint(NumericError):
    pass


class NoCommonPoint(NumericError):
    pass


class DegeneratePair(NumericError):
    pass


# power_diagram / cli
class EmptyArrangement(ValidationError):
    pass


class UnsupportedDimension(ValidationError):
    pass


class SchemaError(ValidationError):
    pass


class InvariantViolation(ValidationError):
    pass
