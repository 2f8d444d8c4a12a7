from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from exception.errors import SchemaError
from logger.logging import get_logger
from models.counting_sim import CountRecord
from models.fringe_analysis import FitResult, FringeDataset
from models.sfwm_spectra import PfsdSpectrum
from utils.helpers import FLOAT_FORMAT

logger = get_logger()

SPECTRUM_COLUMNS = ["detuning_thz", "f_hh", "f_vv", "f_hv", "f_vh"]
PROFILE_COLUMNS = ["z_m", "delay_ps"]
COUNT_COLUMNS = [
    "theta_s_deg",
    "theta_i_deg",
    "pulses",
    "singles_s",
    "singles_i",
    "coincidences",
    "accidentals_est",
]
COUNT_INTEGER_COLUMNS = ["pulses", "singles_s", "singles_i", "coincidences"]
REPORT_COLUMNS = ["theta_s_deg", "visibility", "vis_stderr", "phase_deg", "mean_level", "red_chisq"]
SWEEP_COLUMNS = ["param_value", "suppression", "mu_signal_band"]


def write_csv(path: str | Path, header: Sequence[str], frame: pd.DataFrame, append: bool = False) -> Path:
    """
    Write ``#`` comment lines followed by the CSV body.

    With ``append`` and an existing file only body rows are added.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if append and path.exists():
        frame.to_csv(path, mode="a", header=False, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    else:
        with path.open("w", encoding="utf-8", newline="") as handle:
            for line in header:
                handle.write(f"{line}\n")
            frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} row(s) to {path}")
    return path


def spectrum_frame(spec: PfsdSpectrum) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "detuning_thz": spec.grid.detuning_thz,
            "f_hh": spec.f_hh,
            "f_vv": spec.f_vv,
            "f_hv": spec.f_hv,
            "f_vh": spec.f_vh,
        },
        columns=SPECTRUM_COLUMNS,
    )


def profile_frame(profile: Sequence[tuple[float, float]]) -> pd.DataFrame:
    return pd.DataFrame(list(profile), columns=PROFILE_COLUMNS)


def count_frame(rows: Sequence[tuple[float, float, CountRecord]]) -> pd.DataFrame:
    """Rows of (theta_s, theta_i, record) in the counting schema."""
    data = [
        (
            theta_s,
            theta_i,
            record.pulses,
            record.singles_s,
            record.singles_i,
            record.coincidences,
            record.accidentals_estimate,
        )
        for theta_s, theta_i, record in rows
    ]
    frame = pd.DataFrame(data, columns=COUNT_COLUMNS)
    for column in COUNT_INTEGER_COLUMNS:
        frame[column] = frame[column].astype(np.int64)
    return frame


def report_frame(results: Sequence[FitResult]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            (fit.theta_s, fit.visibility, fit.visibility_stderr, fit.phase_deg, fit.mean_level, fit.reduced_chi_square)
            for fit in results
        ],
        columns=REPORT_COLUMNS,
    )


def sweep_frame(rows: Sequence[tuple[float, float, float]]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=SWEEP_COLUMNS)


def _comment_lines(path: Path) -> int:
    count = 0
    with path.open("r", encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            count += 1
    return count


def read_counting_csv(path: str | Path) -> pd.DataFrame:
    """
    Load a counting CSV and check it against the counting schema.

    Raises
    ------
    SchemaError
        Missing/extra columns, unparsable rows or invalid values, with the
        offending file line and column where known.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"counting CSV not found: {path}")
    try:
        frame = pd.read_csv(path, comment="#")
    except pd.errors.EmptyDataError:
        raise SchemaError(f"{path} has no header row", line=1)
    except pd.errors.ParserError as exc:
        raise SchemaError(f"{path} is not a well-formed CSV: {exc}")

    columns = list(frame.columns)
    if columns != COUNT_COLUMNS:
        missing = [c for c in COUNT_COLUMNS if c not in columns]
        extra = [c for c in columns if c not in COUNT_COLUMNS]
        raise SchemaError(
            f"{path} columns {columns} do not match {COUNT_COLUMNS} (missing={missing}, unexpected={extra})",
            line=_comment_lines(path) + 1,
        )

    first_data_line = _comment_lines(path) + 2
    for column in COUNT_COLUMNS:
        numeric = pd.to_numeric(frame[column], errors="coerce")
        bad = numeric.isna() | ~np.isfinite(numeric.fillna(0.0))
        if column != "theta_s_deg" and column != "theta_i_deg":
            bad |= numeric < 0
        if column in COUNT_INTEGER_COLUMNS:
            bad |= numeric.fillna(0.0) != np.floor(numeric.fillna(0.0))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise SchemaError(
                f"{path}: invalid value '{frame[column].iloc[row]}'",
                line=first_data_line + row,
                column=column,
            )
        frame[column] = numeric
    for column in COUNT_INTEGER_COLUMNS:
        frame[column] = frame[column].astype(np.int64)
    return frame


def fringe_datasets(frame: pd.DataFrame) -> list[FringeDataset]:
    """One dataset per distinct θ_s, in order of first appearance."""
    datasets = []
    for theta_s in pd.unique(frame["theta_s_deg"]):
        rows = frame[frame["theta_s_deg"] == theta_s]
        datasets.append(
            FringeDataset(
                theta_s=float(theta_s),
                theta_i=rows["theta_i_deg"].to_numpy(dtype=float),
                counts=rows["coincidences"].to_numpy(dtype=float),
                pulses_per_point=int(rows["pulses"].iloc[0]),
                accidentals=rows["accidentals_est"].to_numpy(dtype=float),
            )
        )
    return datasets
