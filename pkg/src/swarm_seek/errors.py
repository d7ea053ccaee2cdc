"""Exception types shared across the package."""


class SwarmSeekError(Exception):
    pass


class ScenarioError(SwarmSeekError, ValueError):
    """Invalid scenario description or an event that cannot be applied."""


class DisconnectionError(ScenarioError):
    pass


class DivergenceError(SwarmSeekError, ArithmeticError):
    """Numerical blow-up; ``step`` is the index where it was detected."""

    def __init__(self, message, step=0):
        super().__init__(f"step {step}: {message}")
        self.step = step


class StabilityError(DivergenceError):
    """Explicit-Euler step too large for the consensus layer (caught before stepping)."""
