class SimulationError(Exception):
    """Base class for every domain error raised by the simulator."""


class ConfigurationError(SimulationError):
    """Invalid or inconsistent model parameters (empty fiber line, bad offsets, ...)."""


class InfiniteWalkoffError(SimulationError):
    """Group birefringence is zero: the pump components never walk off."""


class CoverageError(SimulationError):
    """A filter passband reaches outside the sampled detuning grid."""


class UndefinedVisibilityError(SimulationError):
    """C_max + C_min vanishes, so a fringe visibility has no meaning."""


class DegenerateDataError(SimulationError):
    """Count data carries no information (all zero, max + min = 0)."""


class InsufficientPointsError(SimulationError):
    """Fewer analyzer angles than a fringe fit needs."""


class UnknownParameterError(SimulationError):
    """A sweep or override names a configuration key that does not exist."""


class FitFailureError(SimulationError):
    """
    The fringe fit did not converge within its iteration budget.

    Attributes
    ----------
    best_iterate : tuple[float, float, float]
        (mean_level, visibility, phase_deg) of the last iterate.
    """

    def __init__(self, message: str, best_iterate: tuple[float, float, float]):
        super().__init__(message)
        self.best_iterate = best_iterate


class SchemaError(Exception):
    """
    A CSV or configuration file does not match its expected layout.

    Kept outside ``SimulationError``: schema problems are I/O class failures
    and map to their own exit code.
    """

    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.line = line
        self.column = column
