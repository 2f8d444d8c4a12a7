from pathlib import Path
from typing import Optional, Sequence

import click

from cli import csv_header, current_config
from logger.logging import get_logger
from models.counting_sim import CountRecord, run_fringe
from models.polarization_state import hwp_to_analyzer
from schema.config_schema import ExperimentConfig
from storage.csv_store import count_frame, write_csv
from utils.helpers import angle_grid, parse_float_list

logger = get_logger()

# Streams of one basis occupy [base, base + STREAM_STRIDE)
STREAM_STRIDE = 10_000


def stream_base(theta_s: float) -> int:
    """Stream offset derived from the signal basis, so bases never share random numbers."""
    return int(round((theta_s % 180.0) * 1000)) * STREAM_STRIDE


def idler_angles(config: ExperimentConfig) -> list[float]:
    fringe = config.fringe
    return angle_grid(fringe.theta_i_start, fringe.theta_i_stop, fringe.theta_i_step)


def acquire_fringes(
    config: ExperimentConfig,
    thetas_s: Sequence[float],
    thetas_i: Sequence[float],
    hwp_angles: bool = False,
    workers: int = 1,
) -> list[tuple[float, float, CountRecord]]:
    """
    One simulated counting run per (θ_s, θ_i), rows in input order.

    With ``hwp_angles`` the inputs are half-wave-plate angles and the rows
    carry the analyzer angles they select.
    """
    if hwp_angles:
        thetas_s = [hwp_to_analyzer(angle) for angle in thetas_s]
        thetas_i = [hwp_to_analyzer(angle) for angle in thetas_i]
    state = config.state()
    run = config.run_config()
    detectors = config.detectors.pair()
    rows = []
    for theta_s in thetas_s:
        results = run_fringe(
            run,
            state,
            theta_s,
            list(thetas_i),
            config.losses,
            detectors,
            stream_offset=stream_base(theta_s),
            workers=workers,
        )
        # Record the requested angles; AnalyzerSetting wraps them into [0, 180)
        rows.extend((theta_s, theta_i, record) for theta_i, (_, record) in zip(thetas_i, results))
    return rows


def write_fringes(
    config: ExperimentConfig,
    rows: Sequence[tuple[float, float, CountRecord]],
    out: str | Path,
    append: bool = False,
) -> Path:
    header = csv_header("Simulated two-photon counting runs", config)
    return write_csv(out, header, count_frame(rows), append=append)


@click.command("fringe")
@click.option("--theta-s", "thetas_s", type=float, multiple=True, help="Signal analyzer angle; repeatable.")
@click.option("--theta-i", "thetas_i", type=str, default=None, help="Comma-separated idler angles.")
@click.option("--out", type=click.Path(dir_okay=False), default="counts.csv", show_default=True)
@click.option("--append", is_flag=True, help="Add rows to an existing counting CSV.")
@click.option("--hwp-angles", is_flag=True, help="Angles are half-wave-plate angles (doubled).")
@click.option("--seed", type=int, default=None)
@click.option("--duration", type=float, default=None, help="Acquisition time per setting in s.")
@click.pass_context
def cmd_fringe(
    ctx: click.Context,
    thetas_s: tuple[float, ...],
    thetas_i: Optional[str],
    out: str,
    append: bool,
    hwp_angles: bool,
    seed: Optional[int],
    duration: Optional[float],
):
    """Simulate coincidence counts versus idler analyzer angle."""
    overrides = {}
    if seed is not None:
        overrides["run.seed"] = str(seed)
    if duration is not None:
        overrides["run.duration"] = repr(duration)
    config = current_config(ctx, overrides)

    signal_angles = list(thetas_s) or list(config.fringe.theta_s)
    idler = parse_float_list(thetas_i) if thetas_i is not None else idler_angles(config)
    rows = acquire_fringes(
        config,
        signal_angles,
        idler,
        hwp_angles=hwp_angles or config.fringe.hwp_angles,
        workers=ctx.obj["workers"],
    )
    path = write_fringes(config, rows, out, append=append)

    for theta_s in dict.fromkeys(row[0] for row in rows):
        counts = [record.coincidences for s, _, record in rows if s == theta_s]
        click.echo(f"theta_s = {theta_s:g} deg: coincidences {min(counts)}..{max(counts)} over {len(counts)} angles")
    click.echo(f"wrote {len(rows)} rows to {path}")
