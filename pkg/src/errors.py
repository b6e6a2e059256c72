class LabError(Exception):
    """Base class for every error raised by the lab."""


class CapacityError(LabError):
    pass


class DomainError(LabError, ValueError):
    pass


class PreconditionError(LabError, ValueError):
    pass


class PoleError(LabError, ZeroDivisionError):
    pass


class NumericalError(LabError, ArithmeticError):
    """Quadrature or series evaluation failed its own convergence check."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})

    def __str__(self):
        if not self.diagnostics:
            return super().__str__()
        details = ", ".join(f"{k}={v}" for k, v in sorted(self.diagnostics.items()))
        return f"{super().__str__()} ({details})"
