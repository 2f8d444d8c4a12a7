from pathlib import Path

import click

from cli import current_config
from cli.fit import fit_dataset
from cli.fringe import acquire_fringes, idler_angles, write_fringes
from logger.logging import get_logger
from models.fringe_analysis import format_report

logger = get_logger()


@click.command("reproduce")
@click.option("--out-dir", type=click.Path(file_okay=False), default="results", show_default=True)
@click.option("--subtract-accidentals", is_flag=True)
@click.pass_context
def cmd_reproduce(ctx: click.Context, out_dir: str, subtract_accidentals: bool):
    """Fringes in both configured signal bases followed by their fits."""
    config = current_config(ctx)
    out_dir = Path(out_dir)
    rows = acquire_fringes(
        config,
        config.fringe.theta_s,
        idler_angles(config),
        hwp_angles=config.fringe.hwp_angles,
        workers=ctx.obj["workers"],
    )
    counts_path = write_fringes(config, rows, out_dir / "counts.csv")
    results, report_path = fit_dataset(counts_path, out_dir / "fit_report.csv", subtract_accidentals)

    logger.info(f"Reproduce command: {len(rows)} runs, {len(results)} fits in {out_dir}")
    click.echo(format_report(results))
    click.echo(f"wrote {counts_path} and {report_path}")
