from typing import Optional

import click

from cli import csv_header, current_config
from logger.logging import get_logger
from models.fiber_model import FiberLine, walkoff_delay_profile
from storage.csv_store import profile_frame, write_csv
from utils.helpers import format_float

logger = get_logger()


@click.command("walkoff")
@click.option("--out", type=click.Path(dir_okay=False), default="walkoff.csv", show_default=True)
@click.option("--samples", type=int, default=151, show_default=True, help="Evenly spaced positions along the fiber.")
@click.option(
    "--sections",
    type=click.IntRange(min=1),
    default=None,
    help="Rebuild the line as N equal sections with alternating axes (1 = no splice).",
)
@click.pass_context
def cmd_walkoff(ctx: click.Context, out: str, samples: int, sections: Optional[int]):
    """Write the accumulated H-vs-V pump delay along the fiber (columns z_m, delay_ps)."""
    config = current_config(ctx)
    line = config.line()
    if sections is not None:
        line = FiberLine.spliced(
            total_length=line.total_length,
            delta_beta1=config.fiber.delta_beta1,
            beta2=config.fiber.beta2,
            gamma=config.fiber.gamma,
            n_sections=sections,
        )

    profile = walkoff_delay_profile(line, samples)
    peak_z, peak_delay = max(profile, key=lambda point: abs(point[1]))
    header = csv_header("Pump walk-off delay profile", config, sections=len(line.segments), samples=samples)
    path = write_csv(out, header, profile_frame(profile))

    logger.info(f"Walk-off command: {len(line.segments)} segments, output delay={profile[-1][1]!r} ps")
    click.echo(f"peak delay {format_float(peak_delay)} ps at z = {format_float(peak_z)} m")
    click.echo(f"output delay {format_float(profile[-1][1])} ps")
    click.echo(f"wrote {len(profile)} points to {path}")
