from typing import Any


class PermcltError(Exception):
    """ Base class of every error raised by permclt """


class ValidationError(PermcltError, ValueError):
    """ The input is invalid (malformed cycle type, out of range argument...) """


class CapExceeded(ValidationError):
    """ A configured size limit would be exceeded """

    def __init__(self, what: str, limit: int, requested: int, *args: Any) -> None:
        super().__init__(args)
        self.what = what
        self.limit = limit
        self.requested = requested

    def __str__(self) -> str:
        return f"{self.what} is capped at {self.limit} (requested {self.requested})"


class DegreeCapExceeded(ValidationError):
    """ A polynomial operation produced a degree above the configured cap """

    def __init__(self, degree: int, cap: int, *args: Any) -> None:
        super().__init__(args)
        self.degree = degree
        self.cap = cap

    def __str__(self) -> str:
        return f"Polynomial degree {self.degree} exceeds the degree cap {self.cap}"


class MissingCycleVariable(ValidationError):
    """ A cycle index expectation was asked without a variable for some cycle length """

    def __init__(self, k: int, *args: Any) -> None:
        super().__init__(args)
        self.k = k

    def __str__(self) -> str:
        return f"No variable supplied for cycles of length {self.k}"


class InternalInconsistency(PermcltError, RuntimeError):
    """ A self-test failed: this is a bug, not a bad input """


class QuadratureError(PermcltError):
    """ Adaptive quadrature did not reach the requested tolerance """

    def __init__(self, achieved: float, requested: float, *args: Any) -> None:
        super().__init__(args)
        self.achieved = achieved
        self.requested = requested

    def __str__(self) -> str:
        return (f"Quadrature did not converge: achieved error estimate {self.achieved:.3e}, "
                f"requested {self.requested:.3e}")


class PrecisionBudgetExceeded(PermcltError):
    """ The requested working precision is above the configured budget """

    def __init__(self, requested: int, budget: int, *args: Any) -> None:
        super().__init__(args)
        self.requested = requested
        self.budget = budget

    def __str__(self) -> str:
        return f"Precision of {self.requested} digits exceeds the budget of {self.budget} digits"
