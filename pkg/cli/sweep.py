import numpy as np
import click

from cli import csv_header, current_config
from exception.errors import UnknownParameterError
from logger.logging import get_logger
from models.sfwm_spectra import filter_band_rate, suppression_ratio
from schema.config_schema import ExperimentConfig
from storage.config_store import flatten, with_overrides
from storage.csv_store import sweep_frame, write_csv

logger = get_logger()

# Sweep keys with no single config field behind them
TOTAL_LENGTH = "fiber.total_length"


def _check_parameter(config: ExperimentConfig, parameter: str) -> None:
    if parameter == TOTAL_LENGTH:
        return
    flat = flatten(config)
    if parameter not in flat:
        raise UnknownParameterError(f"unknown sweep parameter '{parameter}'")
    try:
        float(flat[parameter])
    except ValueError:
        raise UnknownParameterError(f"sweep parameter '{parameter}' is not a single numeric value")


def sweep_config(config: ExperimentConfig, parameter: str, value: float) -> ExperimentConfig:
    """Configuration at one sweep value; a total length rescales every segment proportionally."""
    if parameter == TOTAL_LENGTH:
        lengths = config.fiber.segment_lengths
        total = sum(lengths)
        scaled = ",".join(repr(length * float(value) / total) for length in lengths)
        return with_overrides(config, {"fiber.segment_lengths": scaled})
    return with_overrides(config, {parameter: repr(float(value))})


def sweep_point(config: ExperimentConfig) -> tuple[float, float]:
    """(suppression ratio, signal-band pairs per pulse) for one configuration."""
    line = config.line()
    lengths = config.lengths()
    model = config.spectra.phase_model
    ratio = suppression_ratio(config.filters.signal_detuning, config.pump, line, lengths, model)
    band = filter_band_rate(
        config.filters.signal(),
        config.pump,
        line,
        lengths,
        model,
        scale=config.spectra.scale,
    )
    return ratio, band.pairs_per_pulse


def run_sweep(config: ExperimentConfig, parameter: str, values) -> list[tuple[float, float, float]]:
    _check_parameter(config, parameter)
    rows = []
    for value in values:
        point = sweep_config(config, parameter, value)
        ratio, mu_band = sweep_point(point)
        rows.append((float(value), ratio, mu_band))
    logger.info(f"Sweep of {parameter}: {len(rows)} point(s)")
    return rows


@click.command("sweep")
@click.option("--param", "parameter", required=True, help="Dotted configuration key, e.g. filters.signal_detuning, or fiber.total_length.")
@click.option("--start", type=float, required=True)
@click.option("--stop", type=float, required=True)
@click.option("--points", type=click.IntRange(min=0), default=21, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="sweep.csv", show_default=True)
@click.pass_context
def cmd_sweep(ctx: click.Context, parameter: str, start: float, stop: float, points: int, out: str):
    """Re-evaluate suppression ratio and signal-band μ over one parameter."""
    config = current_config(ctx)
    rows = run_sweep(config, parameter, np.linspace(start, stop, points))
    header = csv_header("Parameter sweep", config, sweep_parameter=parameter)
    path = write_csv(out, header, sweep_frame(rows))
    click.echo(f"wrote {len(rows)} sweep point(s) of {parameter} to {path}")
