import click
from pydantic import ValidationError

from exception.errors import SchemaError, SimulationError
from logger.logging import get_logger


# Initialize application logger
logger = get_logger()

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_IO = 2


def _echo_failure(message: str) -> None:
    click.echo(f"error: {message}", err=True)


def validation_error_handler(command: str, exc: ValidationError) -> int:
    """
    Handle pydantic validation errors raised while loading or building models.

    Parameters
    ----------
    command : str
        Name of the CLI command that was running.
    exc : ValidationError
        The validation error; each entry carries the offending key path.

    Returns
    -------
    int
        Exit code 1.
    """
    errors = []
    # Extract dotted key paths and human-readable messages
    for err in exc.errors():
        path = ".".join(str(part) for part in err.get("loc", ()))
        message = err.get("msg", "").replace("Value error, ", "")
        errors.append(f"{path}: {message}" if path else message)

    logger.warning(f"Validation error in '{command}': {errors}")
    _echo_failure(" & ".join(errors))
    return EXIT_COMPUTATION


def simulation_error_handler(command: str, exc: SimulationError) -> int:
    """
    Handle domain errors (bad parameters, degenerate data, fit failures).

    Returns
    -------
    int
        Exit code 1.
    """
    logger.warning(f"{type(exc).__name__} in '{command}': {exc}")
    _echo_failure(str(exc))
    return EXIT_COMPUTATION


def schema_error_handler(command: str, exc: SchemaError) -> int:
    """
    Handle files that do not match their expected layout.

    Returns
    -------
    int
        Exit code 2.
    """
    logger.warning(f"Schema error in '{command}': {exc}")
    _echo_failure(str(exc))
    return EXIT_IO


def io_error_handler(command: str, exc: OSError) -> int:
    """
    Handle file system failures (missing input, unwritable output).

    Returns
    -------
    int
        Exit code 2.
    """
    logger.error(f"I/O error in '{command}': {exc}")
    _echo_failure(str(exc))
    return EXIT_IO


def generic_exception_handler(command: str, exc: Exception) -> int:
    """
    Catch-all handler for unexpected exceptions.

    Returns
    -------
    int
        Exit code 1 after logging the full stack trace.
    """
    logger.error(f"Unhandled exception in '{command}': {exc}", exc_info=True)
    _echo_failure("Something went wrong; see the log for details")
    return EXIT_COMPUTATION
