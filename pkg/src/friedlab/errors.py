"""Exception types raised across the package."""


class FriedlabError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(FriedlabError, ValueError):
    pass


class NegativeMultiplicity(FriedlabError, ValueError):
    pass


class NotLiftable(FriedlabError):
    pass


class UnknownPreset(FriedlabError, KeyError):
    pass


class NotMaximalTorus(FriedlabError):
    pass


class NonSemisimpleAction(FriedlabError):
    pass


class NotRankOne(FriedlabError):
    pass


class EllipticClass(FriedlabError, ValueError):
    pass


class InvalidModel(FriedlabError):
    pass


class NotScalar(FriedlabError):
    def __init__(self, msg, off_scalar_norm=None):
        super().__init__(msg)
        self.off_scalar_norm = off_scalar_norm


class NotScalarCasimir(NotScalar):
    pass


class Infeasible(FriedlabError):
    pass


class NonSemisimpleBAction(FriedlabError):
    pass


class RequiresAdmissibleMetric(FriedlabError):
    pass


class NotRepresentation(FriedlabError):
    pass


class OddDimension(FriedlabError):
    pass


class NotStabilizing(FriedlabError):
    pass


class BasisMismatch(FriedlabError):
    pass


class RequiresThetaInvariant(FriedlabError):
    pass


class WrongBranch(FriedlabError):
    pass


class NotIrreducible(FriedlabError):
    pass


class EvaluationAtPole(FriedlabError, ZeroDivisionError):
    def __init__(self, msg, order=0):
        super().__init__(msg)
        self.order = order


class ParseError(FriedlabError, ValueError):
    def __init__(self, msg, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{msg} ({', '.join(where)})" if where else msg)
        self.msg = msg
        self.line = line
        self.field = field


class SchemaVersionMismatch(FriedlabError, ValueError):
    pass


class InvariantViolation(FriedlabError, ValueError):
    pass


class NonInvertibleGenerator(FriedlabError, ValueError):
    pass


class Overflow(FriedlabError):
    pass
