from typing import Optional

import click

from cli import csv_header, current_config
from logger.logging import get_logger
from models.fiber_model import EffectiveLengths
from models.sfwm_spectra import PhaseModel, spectrum, suppression_ratio
from storage.csv_store import spectrum_frame, write_csv
from utils.helpers import format_float

logger = get_logger()


@click.command("spectra")
@click.option("--out", type=click.Path(dir_okay=False), default="spectra.csv", show_default=True)
@click.option("--span", type=float, default=None, help="Grid half-span in THz.")
@click.option("--step", type=float, default=None, help="Grid step in THz.")
@click.option("--theta", type=float, default=None, help="Pump polarization angle in degrees.")
@click.option("--lv-override", type=float, default=None, help="Use this L_v (m) instead of the derived one.")
@click.option("--phase-model", type=click.Choice([m.value for m in PhaseModel]), default=None)
@click.pass_context
def cmd_spectra(
    ctx: click.Context,
    out: str,
    span: Optional[float],
    step: Optional[float],
    theta: Optional[float],
    lv_override: Optional[float],
    phase_model: Optional[str],
):
    """
    Write the four PFSDs over a symmetric detuning grid.

    Prints the suppression ratio (f_HH + f_VV)/(f_HV + f_VH) at the
    configured signal detuning.
    """
    overrides = {}
    if span is not None:
        overrides["spectra.span"] = repr(span)
    if step is not None:
        overrides["spectra.step"] = repr(step)
    if theta is not None:
        overrides["pump.theta"] = repr(theta)
    if phase_model is not None:
        overrides["spectra.phase_model"] = phase_model
    config = current_config(ctx, overrides)

    lengths = config.lengths()
    if lv_override is not None:
        lengths = EffectiveLengths(l_scalar=lengths.l_scalar, l_vector=lv_override)

    model = config.spectra.phase_model
    spec = spectrum(config.grid(), config.pump, config.line(), lengths, model)
    header = csv_header(
        "SFWM photon-flux spectral densities",
        config,
        l_scalar_m=lengths.l_scalar,
        l_vector_m=lengths.l_vector,
    )
    path = write_csv(out, header, spectrum_frame(spec))

    detuning = config.filters.signal_detuning
    ratio = suppression_ratio(detuning, config.pump, config.line(), lengths, model)
    logger.info(f"Spectra command: ratio={ratio!r} at {detuning!r} THz, L_v={lengths.l_vector!r} m")
    click.echo(f"suppression ratio at {format_float(detuning)} THz: {format_float(ratio)}")
    click.echo(f"wrote {spec.grid.omega_values.size} points to {path}")
