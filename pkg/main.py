import click
from pydantic import ValidationError

from cli import fit, fringe, reproduce, spectra, state, sweep, walkoff
from exception.errors import SchemaError, SimulationError
from exception.exception_handler import (
    generic_exception_handler,
    io_error_handler,
    schema_error_handler,
    simulation_error_handler,
    validation_error_handler,
)
from logger.logging import get_logger
from storage.config_store import dump_config, load_config, parse_overrides

logger = get_logger()

# Exception type -> handler(command, exc) -> exit code
EXCEPTION_HANDLERS = {}


def add_exception_handler(exc_class, handler):
    EXCEPTION_HANDLERS[exc_class] = handler


def _handler_for(exc: Exception):
    # Most specific registered class wins
    for klass in type(exc).__mro__:
        if klass in EXCEPTION_HANDLERS:
            return EXCEPTION_HANDLERS[klass]
    return generic_exception_handler


class HandledGroup(click.Group):
    """click group that routes failures of any command through the handler table."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except (click.exceptions.Exit, click.exceptions.Abort, click.ClickException):
            raise
        except Exception as exc:
            command = ctx.invoked_subcommand or ctx.info_name or "main"
            logger.debug(f"Command '{command}' failed with {type(exc).__name__}")
            code = _handler_for(exc)(command, exc)
            ctx.exit(code)


@click.group(cls=HandledGroup, invoke_without_command=True)
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="Flat section.key=value configuration file (default: shipped experiment defaults).",
)
@click.option("--set", "overrides", multiple=True, metavar="SECTION.KEY=VALUE", help="Override one key; repeatable.")
@click.option("--dump-config", "dump_requested", is_flag=True, help="Print the validated configuration and exit.")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True, help="Threads per Monte Carlo run.")
@click.pass_context
def app(ctx: click.Context, config_path, overrides, dump_requested, workers):
    """Polarization-entangled photon pairs from a spliced birefringent fiber."""
    flat_overrides = parse_overrides(overrides)
    config = load_config(config_path, flat_overrides)
    ctx.obj = {"config": config, "workers": workers, "overrides": flat_overrides}
    if dump_requested:
        click.echo(dump_config(config), nl=False)
        ctx.exit(0)
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


app.add_command(spectra.cmd_spectra)
app.add_command(walkoff.cmd_walkoff)
app.add_command(fringe.cmd_fringe)
app.add_command(fit.cmd_fit)
app.add_command(sweep.cmd_sweep)
app.add_command(state.cmd_state)
app.add_command(reproduce.cmd_reproduce)


# Register exception handlers with the command group
# Each maps an exception type to a custom handler
add_exception_handler(ValidationError, validation_error_handler)
add_exception_handler(SimulationError, simulation_error_handler)
add_exception_handler(SchemaError, schema_error_handler)
add_exception_handler(OSError, io_error_handler)
add_exception_handler(Exception, generic_exception_handler)


if __name__ == "__main__":
    app()
