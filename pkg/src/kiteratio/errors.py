"""Exception hierarchy shared by all modules."""


class KiteRatioError(Exception):
    pass


class GraphError(KiteRatioError, ValueError):
    """Invalid graph construction or invalid vertex/path arguments."""


class Graph6Error(KiteRatioError, ValueError):
    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class NotConnectedError(KiteRatioError, ValueError):
    pass


class NoConvergenceError(KiteRatioError, ArithmeticError):
    """Power iteration hit ``max_iter``; ``result`` holds the last iterate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DomainError(KiteRatioError, ValueError):
    pass


class OverflowDomainError(KiteRatioError, OverflowError):
    """A linear-scale quantity does not fit in binary64."""


class DegenerateError(KiteRatioError, ValueError):
    """The min and max Perron entries coincide, so there is no min-max path."""
