"""Exception types shared across the engine.

Exit-code mapping used by the CLI: InputError -> 2, FeasibilityError -> 3.
"""


class RetargetError(Exception):
    """Base class for engine errors."""


class InputError(RetargetError):
    """Bad input data: dimension mismatch, unreadable file, invalid argument."""


class FeasibilityError(RetargetError):
    """The requested target cannot be reached within the configured budget
    (e.g. bound constraints infeasible, or expansion exceeds the distortion
    threshold without the scale fallback enabled)."""


class SolverError(RetargetError):
    """QP solver failed to converge. Carries the best iterate found."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution
