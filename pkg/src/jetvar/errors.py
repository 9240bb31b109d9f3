"""Exception hierarchy shared by all jetvar modules."""


class JetVarError(Exception):
    """Base class for every error raised by jetvar."""


class KernelDepthExceeded(JetVarError):
    """A sin/cos/exp argument itself contains a sin/cos/exp factor."""


class MaxOrderExceeded(JetVarError):
    """A total derivative would promote a jet coordinate past the order cap."""


class NonIntegrableKernel(JetVarError):
    """The homotopy integrand has no antiderivative inside the expression class."""


class NonPolynomialDivision(JetVarError):
    """Division by something that is not a nonzero rational constant."""


class DimensionMismatch(JetVarError):
    pass


class DegreeZero(JetVarError):
    pass


class OrderTooHigh(JetVarError):
    pass


class NotLocallyVariational(JetVarError):
    pass


class NotClosed(JetVarError):
    """The target of a d_H-exactness solve has a nonzero Euler-Lagrange image."""


class NoSolution(JetVarError):
    """The ansatz space did not contain a solution."""


class InconsistentPair(JetVarError):
    pass


class MissingCertificate(JetVarError):
    pass


class NotSolvableForLeading(JetVarError):
    pass


class HypothesisFails(JetVarError):
    pass


class TransitionMissing(JetVarError):
    pass


class ChartMismatch(JetVarError):
    pass


class FieldNotGlobal(JetVarError):
    pass


class ProblemSyntaxError(JetVarError):
    """Problem-file error carrying a 1-based line and column."""

    def __init__(self, message, line=0, column=0):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
