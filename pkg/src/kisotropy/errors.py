"""Exception hierarchy shared by all modules."""


class KIsotropyError(Exception):
    pass


class VariableMismatch(KIsotropyError, ValueError):
    pass


class ParseError(KIsotropyError, ValueError):
    pass


class PoleAtOne(KIsotropyError, ArithmeticError):
    """The series has a pole at t = 1, i.e. the graded object is infinite dimensional."""


class BudgetExceeded(KIsotropyError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DescriptorError(KIsotropyError, ValueError):
    pass


class IllDefinedMap(KIsotropyError, ValueError):
    def __init__(self, message, relation=None):
        super().__init__(message)
        self.relation = relation


class NotApplicable(KIsotropyError, ValueError):
    """Input is outside the operation's domain (ungraded ring, non-torus subgroup, ...)."""


class HypothesisRefusal(KIsotropyError):
    def __init__(self, reason, report=None):
        super().__init__(reason)
        self.reason = reason
        self.report = report


class InconsistentVerdict(KIsotropyError, AssertionError):
    """Equivalent criteria disagreed; this indicates a bug, never a mathematical outcome."""
