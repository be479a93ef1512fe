"""Exception hierarchy shared by every emberflow module."""


class EmberflowError(Exception):
    """Base class for all library errors."""


class GridMismatchError(EmberflowError, ValueError):
    """An array does not have the shape of the grid it is paired with."""


class InvalidScenarioError(EmberflowError, ValueError):
    """A scenario, model or parameter violates its documented constraints."""


class DegenerateKernelError(InvalidScenarioError):
    """A kernel radius is too small to resolve on the grid."""


class ScenarioParseError(InvalidScenarioError):
    """The scenario document is not well formed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnstableScenarioError(EmberflowError, RuntimeError):
    """No positive stable time step exists for the current state."""


class BlowUpError(EmberflowError, RuntimeError):
    """The temperature field became non-finite during a step."""

    def __init__(self, t, cell):
        self.t = t
        self.cell = cell
        super().__init__(f"non-finite temperature at cell {cell} while stepping from t={t:.6g}")


class FrontVanishedError(EmberflowError, ValueError):
    """A front needed for velocity measurement is empty."""
