"""Exception types distinguishing numerical failures from bad input.

Plain ``ValueError`` is used for domain errors (bad arguments, violated
preconditions); the classes here mark failures of the numerics themselves.
"""


class NoSolutionError(RuntimeError):
    """The degenerate variational system is inconsistent at this configuration
    (typically a nonzero psi-gradient paired with a gauge-degenerate row)."""


class IntegrationError(RuntimeError):
    """Adaptive step size underflowed, usually next to a coordinate pole."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class ConsistencyError(RuntimeError):
    """An analytic rule and its independent numeric check disagree; this
    signals an implementation bug, not bad user input."""
