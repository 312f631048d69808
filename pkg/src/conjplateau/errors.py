"""Exception hierarchy shared by every module."""


class ConjPlateauError(Exception):
    """Base class for all package errors."""


class InputDomainError(ConjPlateauError, ValueError):
    """An argument violates an operation's precondition."""


class DegenerateTriangleError(ConjPlateauError):
    pass


class NoSolutionError(ConjPlateauError):
    pass


class InconsistentConfigurationError(ConjPlateauError):
    pass


class MeshQualityError(ConjPlateauError):
    pass


class SolverFailure(ConjPlateauError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class GraphViolationError(ConjPlateauError):
    pass


class NotApplicableError(ConjPlateauError):
    pass


class ReconstructionError(ConjPlateauError):
    """Conjugate contour failed to close or its heights are inconsistent."""


class DegenerateHeightError(ReconstructionError):
    pass


class InvalidDomainError(ConjPlateauError):
    pass


class EmbeddednessError(ConjPlateauError):
    pass


class IndeterminateError(ConjPlateauError):
    pass


class NoRootCertificateError(ConjPlateauError):
    pass


class PrecisionLimitError(ConjPlateauError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class AssemblyError(ConjPlateauError):
    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class AuditError(ConjPlateauError):
    pass


class FormatError(ConjPlateauError):
    pass
