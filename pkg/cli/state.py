import click

from cli import current_config
from logger.logging import get_logger
from models.fiber_model import pump_split
from models.polarization_state import bell_fidelity, single_prob, state_from_pfsd, visibility_analytic
from models.sfwm_spectra import pfsd_scalar, pfsd_vector, thz_to_omega
from utils.helpers import format_float

logger = get_logger()

BASES = (0.0, 135.0)


@click.command("state")
@click.pass_context
def cmd_state(ctx: click.Context):
    """Analytic visibilities, Bell fidelity and singles of the configured source state."""
    config = current_config(ctx)
    state = config.state()
    phase_phi = config.noise.phase_phi

    click.echo(f"noise model: {config.noise.model}, V = {format_float(config.noise.werner_v)}")
    for theta_s in BASES:
        visibility = visibility_analytic(state, theta_s)
        click.echo(f"visibility theta_s = {theta_s:g} deg: {format_float(visibility)}")
    click.echo(f"Bell fidelity: {format_float(bell_fidelity(state, phase_phi))}")
    click.echo(f"single-side pass probability at 0 deg: {format_float(single_prob(state, 'signal', 0.0))}")

    # Same noise, plus the distinguishable vector-process pairs at the signal detuning
    segment = config.line().reference_segment
    lengths = config.lengths()
    model = config.spectra.phase_model
    omega = float(thz_to_omega(config.filters.signal_detuning))
    p_h, p_v = pump_split(config.pump)
    f_hh = pfsd_scalar(omega, p_h, lengths, segment, model)
    f_vv = pfsd_scalar(omega, p_v, lengths, segment, model)
    f_hv, f_vh = pfsd_vector(omega, p_h, p_v, lengths, segment, model)
    spectral = state_from_pfsd(f_hh, f_vv, f_hv, f_vh, phase_phi=phase_phi, werner_v=config.noise.werner_v)
    contamination = (f_hv + f_vh) / (f_hh + f_vv + f_hv + f_vh)
    click.echo(f"vector-pair fraction at {format_float(config.filters.signal_detuning)} THz: {format_float(contamination)}")
    for theta_s in BASES:
        visibility = visibility_analytic(spectral, theta_s)
        click.echo(f"with vector pairs, visibility theta_s = {theta_s:g} deg: {format_float(visibility)}")
    logger.info(f"State command: noise={config.noise.model}, vector fraction={contamination!r}")
