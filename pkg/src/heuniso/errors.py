"""Exception hierarchy.

Errors fall into three groups that the command line maps to exit codes:
bad input (1), numerical failure (2) and storage problems (3).
"""


class HeunisoError(Exception):
    exit_code = 2


class InputError(HeunisoError, ValueError):
    exit_code = 1


class NumericError(HeunisoError, ArithmeticError):
    exit_code = 2


class StoreError(HeunisoError, OSError):
    exit_code = 3


# complex_core
class StepUnderflow(NumericError):
    pass


class NonFiniteState(NumericError):
    pass


class PoleOfGamma(InputError):
    pass


class PathError(InputError):
    pass


# heun_family
class UnknownSingularity(InputError):
    pass


class EvaluationAtSingularity(InputError):
    pass


class ResonantExponents(InputError):
    pass


class RadiusTooSmall(NumericError):
    pass


# monodromy
class IllConditionedMatch(NumericError):
    pass


class SeedFailure(NumericError):
    pass


class LoopThroughSingularity(InputError):
    pass


class IncompleteData(InputError):
    pass


class FamilyMismatch(InputError):
    pass


class DegenerateParameterization(InputError):
    pass


# painleve
class UnclassifiableEvent(NumericError):
    pass


class FixedSingularityHit(InputError):
    pass


class NoConvergence(NumericError):
    pass


class AmbiguousBranch(NumericError):
    pass


# tau
class DivisionByZeroState(NumericError):
    pass


class IntervalContainsPole(InputError):
    pass


class ExtrapolationDiverges(NumericError):
    pass


# accessory
class UnsupportedCase(InputError):
    pass


class MissingTrajectory(InputError):
    pass


class EventShortfall(NumericError):
    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []


# asymptotics
class DegenerateSigma(InputError):
    pass


class GammaPole(InputError):
    pass


# cli / store
class SchemaError(InputError):
    pass


class CorruptRecord(StoreError):
    pass
