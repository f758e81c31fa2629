class ArpersistError(Exception):
    """Base class for all domain errors raised by arpersist."""


class ConvergenceError(ArpersistError, ArithmeticError):
    """A continued fraction, quadrature, series or root search did not converge."""


class HypothesisError(ArpersistError, ValueError):
    """The model violates a hypothesis the requested quantity depends on."""


class CensoredSampleError(ArpersistError, ValueError):
    """Some replicates were censored where a complete sample is required.

    Attributes:
        censored: Number of censored replicates.
        cap: Horizon cap at which the replicates were censored.
    """

    def __init__(self, censored: int, cap: int) -> None:
        super().__init__(
            f"{censored} replicate(s) did not hit the threshold before the horizon cap {cap}. "
            "Raise the cap."
        )
        self.censored = censored
        self.cap = cap


class EmptySampleError(ArpersistError, ValueError):
    """No replicate survived the conditioning event."""
