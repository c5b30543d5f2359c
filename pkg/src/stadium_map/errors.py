"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(RuntimeError):
    """A numerical procedure did not reach its tolerance.

    ``estimate`` carries the best error estimate that was achieved.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class SolverError(RuntimeError):
    """A linear solve or root bracket failed."""
