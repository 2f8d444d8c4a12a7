from pathlib import Path
from typing import Optional

import click

from logger.logging import get_logger
from models.fringe_analysis import FitResult, fit_fringe, format_report
from storage.csv_store import fringe_datasets, read_counting_csv, report_frame, write_csv
from utils.helpers import comment_header

logger = get_logger()


def fit_dataset(
    dataset: str | Path,
    out: Optional[str | Path] = None,
    subtract_accidentals: bool = False,
) -> tuple[list[FitResult], Path]:
    """Fit every basis found in a counting CSV and write the report CSV."""
    dataset = Path(dataset)
    frame = read_counting_csv(dataset)
    results = [
        fit_fringe(data, subtract_accidentals=subtract_accidentals)
        for data in fringe_datasets(frame)
    ]
    if out is None:
        out = dataset.with_name(f"{dataset.stem}_fit.csv")
    header = comment_header(
        "Fringe fit report",
        {"dataset": str(dataset), "subtract_accidentals": subtract_accidentals},
    )
    path = write_csv(out, header, report_frame(results))
    logger.info(f"Fit command: {len(results)} basis(es) from {dataset}")
    return results, path


@click.command("fit")
@click.argument("dataset", type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Report CSV (default: <dataset>_fit.csv).")
@click.option("--subtract-accidentals", is_flag=True, help="Remove estimated accidentals before fitting.")
def cmd_fit(dataset: str, out: Optional[str], subtract_accidentals: bool):
    """Fit C0 [1 + V cos 2(θ_i − θ0)] to each basis of a counting CSV."""
    results, path = fit_dataset(dataset, out, subtract_accidentals)
    click.echo(format_report(results))
    click.echo(f"wrote {len(results)} fit(s) to {path}")
