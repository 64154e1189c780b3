"""Exception hierarchy.

Every error carries a ``details`` dict so the CLI can print it as JSON.
Domain errors (bad inputs, cut-locus violations, infeasible requests) map to
exit code 1; numerical failures (quadrature, root finding, sampling) to 2.
"""


class SmearyError(Exception):
    exit_code = 2

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self):
        return {"error": type(self).__name__, "message": self.message, "details": self.details}


class DomainError(SmearyError, ValueError):
    exit_code = 1


class CutLocusError(DomainError):
    pass


class ConstructionError(DomainError):
    pass


class ClassificationError(DomainError):
    pass


class NumericalError(SmearyError, ArithmeticError):
    exit_code = 2


class QuadratureError(NumericalError):
    pass


class RootError(NumericalError):
    pass


class SamplingError(NumericalError):
    pass
