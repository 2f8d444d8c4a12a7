"""
Two-photon interference fringe fitting.

Model: C(θ_i) = C₀ [1 + V cos 2(θ_i − θ₀)], θ in degrees, period fixed at 180°.
Weighted least squares with Poisson weights 1/max(counts, 1).
"""
import math
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.optimize import least_squares

from exception.errors import (
    DegenerateDataError,
    FitFailureError,
    InsufficientPointsError,
)
from logger.logging import get_logger

logger = get_logger()

MIN_DISTINCT_ANGLES = 4
MAX_EVALUATIONS = 200
FIT_TOLERANCE = 1e-12


class FringeDataset(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    theta_s: float
    theta_i: np.ndarray
    counts: np.ndarray
    pulses_per_point: int = 0
    accidentals: Optional[np.ndarray] = None

    @field_validator("theta_i", "counts", "accidentals", mode="before")
    @classmethod
    def float_vector(cls, v):
        if v is None:
            return None
        values = np.array(v, dtype=float)
        values.setflags(write=False)
        return values

    @model_validator(mode="after")
    def usable_fringe(self):
        if self.theta_i.shape != self.counts.shape or self.theta_i.ndim != 1:
            raise DegenerateDataError("theta_i and counts must be equal-length 1-D sequences")
        if np.any(self.counts < 0) or not np.all(np.isfinite(self.counts)):
            raise DegenerateDataError("counts must be finite and non-negative")
        distinct = np.unique(np.round(self.theta_i % 180.0, 9)).size
        if distinct < MIN_DISTINCT_ANGLES:
            raise InsufficientPointsError(
                f"fringe needs at least {MIN_DISTINCT_ANGLES} distinct theta_i values, got {distinct}"
            )
        if self.accidentals is not None and self.accidentals.shape != self.counts.shape:
            raise DegenerateDataError("accidentals must match counts")
        return self

    @classmethod
    def from_points(
        cls,
        theta_s: float,
        points: Sequence[tuple[float, float]],
        pulses_per_point: int = 0,
        accidentals: Optional[Sequence[float]] = None,
    ) -> "FringeDataset":
        theta_i = [p[0] for p in points]
        counts = [p[1] for p in points]
        return cls(
            theta_s=theta_s,
            theta_i=np.array(theta_i),
            counts=np.array(counts),
            pulses_per_point=pulses_per_point,
            accidentals=None if accidentals is None else np.array(accidentals),
        )

    def scaled(self, factor: float) -> "FringeDataset":
        return FringeDataset(
            theta_s=self.theta_s,
            theta_i=self.theta_i,
            counts=self.counts * factor,
            pulses_per_point=self.pulses_per_point,
        )

    def shifted(self, delta_deg: float) -> "FringeDataset":
        return FringeDataset(
            theta_s=self.theta_s,
            theta_i=self.theta_i + delta_deg,
            counts=self.counts,
            pulses_per_point=self.pulses_per_point,
        )


class FitResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta_s: float
    visibility: float
    visibility_stderr: float
    phase_deg: float
    phase_stderr: float
    mean_level: float
    mean_level_stderr: float
    reduced_chi_square: float
    visibility_clamped: bool = False
    n_points: int = 0
    evaluations: int = 0


def fringe_model(theta_i, mean_level: float, visibility: float, phase_deg: float):
    theta = np.radians(np.asarray(theta_i, dtype=float) - phase_deg)
    return mean_level * (1.0 + visibility * np.cos(2.0 * theta))


def raw_visibility(data) -> float:
    """(max − min)/(max + min) of raw counts; accepts a dataset or a count sequence."""
    counts = data.counts if isinstance(data, FringeDataset) else np.asarray(data, dtype=float)
    if counts.size < 2:
        raise InsufficientPointsError("raw visibility needs at least 2 points")
    c_max, c_min = float(np.max(counts)), float(np.min(counts))
    if c_max + c_min == 0:
        raise DegenerateDataError("max + min of counts is zero")
    return (c_max - c_min) / (c_max + c_min)


def _initial_guess(theta_i: np.ndarray, counts: np.ndarray) -> tuple[float, float, float]:
    mean_level = float(np.mean(counts))
    visibility = min(raw_visibility(counts), 0.999)
    # Phase of the cos 2θ component
    component = np.sum(counts * np.exp(-2j * np.radians(theta_i)))
    phase_deg = (math.degrees(np.angle(component)) / 2.0) % 180.0
    return mean_level, visibility, phase_deg


def _linear_solution(theta_i: np.ndarray, counts: np.ndarray, sigma: np.ndarray) -> tuple[float, float, float]:
    """
    Exact weighted optimum of the fringe model.

    C₀[1 + V cos 2(θ − θ₀)] = a + b cos 2θ + c sin 2θ, so with fixed weights the
    fit is linear in (a, b, c).
    """
    two_theta = 2.0 * np.radians(theta_i)
    design = np.column_stack([np.ones_like(two_theta), np.cos(two_theta), np.sin(two_theta)]) / sigma[:, None]
    (a, b, c), *_ = np.linalg.lstsq(design, counts / sigma, rcond=None)
    if a <= 0:
        return _initial_guess(theta_i, counts)
    phase_deg = wrap_phase(math.degrees(math.atan2(c, b)) / 2.0)
    return float(a), float(math.hypot(b, c) / a), phase_deg


def wrap_phase(phase_deg: float) -> float:
    """Fold a fringe phase into [0, 180)."""
    phase_deg %= 180.0
    # -1e-15 % 180 rounds up to 180.0
    if phase_deg >= 180.0:
        phase_deg -= 180.0
    return phase_deg


def fit_fringe(
    data: FringeDataset,
    subtract_accidentals: bool = False,
    initial_phase_deg: Optional[float] = None,
    max_evaluations: int = MAX_EVALUATIONS,
) -> FitResult:
    """
    Weighted least-squares fit of the fringe model.

    Standard errors come from the Gauss-Newton curvature of the weighted
    objective at the optimum (Poisson weights taken as absolute).
    """
    counts = data.counts
    if subtract_accidentals:
        if data.accidentals is None:
            raise DegenerateDataError("dataset carries no accidental estimates to subtract")
        counts = np.clip(counts - data.accidentals, 0.0, None)
    if not np.any(counts > 0):
        raise DegenerateDataError(f"all counts are zero for theta_s={data.theta_s!r}")

    theta_i = data.theta_i
    sigma = np.sqrt(np.maximum(counts, 1.0))

    def residuals(params):
        return (counts - fringe_model(theta_i, *params)) / sigma

    x0 = list(_linear_solution(theta_i, counts, sigma))
    if initial_phase_deg is not None:
        x0[2] = initial_phase_deg
    result = least_squares(
        residuals,
        x0=np.array(x0),
        method="trf",
        x_scale="jac",
        xtol=FIT_TOLERANCE,
        ftol=FIT_TOLERANCE,
        gtol=FIT_TOLERANCE,
        max_nfev=max_evaluations,
    )
    mean_level, visibility, phase_deg = (float(v) for v in result.x)
    if not result.success:
        logger.warning(f"Fringe fit did not converge for theta_s={data.theta_s!r}: {result.message}")
        raise FitFailureError(
            f"fringe fit did not converge after {result.nfev} evaluations: {result.message}",
            best_iterate=(mean_level, visibility, phase_deg),
        )

    jacobian = result.jac
    covariance = np.linalg.pinv(jacobian.T @ jacobian)
    stderr = np.sqrt(np.clip(np.diag(covariance), 0.0, None))

    # V < 0 is the same curve shifted by a quarter period
    if visibility < 0:
        visibility = -visibility
        phase_deg += 90.0
    phase_deg = wrap_phase(phase_deg)

    clamped = visibility > 1.0
    if clamped:
        logger.warning(f"Fitted visibility {visibility!r} exceeds 1 for theta_s={data.theta_s!r}; clamped")
        visibility = 1.0

    dof = counts.size - 3
    red_chisq = float(np.sum(result.fun ** 2) / dof) if dof > 0 else math.nan
    fit = FitResult(
        theta_s=data.theta_s,
        visibility=visibility,
        visibility_stderr=float(stderr[1]),
        phase_deg=phase_deg,
        phase_stderr=float(stderr[2]),
        mean_level=mean_level,
        mean_level_stderr=float(stderr[0]),
        reduced_chi_square=red_chisq,
        visibility_clamped=clamped,
        n_points=int(counts.size),
        evaluations=int(result.nfev),
    )
    logger.info(
        f"Fringe fit theta_s={data.theta_s!r}: V={fit.visibility!r} ± {fit.visibility_stderr!r}, "
        f"phase={fit.phase_deg!r} deg, C0={fit.mean_level!r}, red_chisq={fit.reduced_chi_square!r}"
    )
    return fit


def format_report(results: Sequence[FitResult]) -> str:
    """Human-readable block summarizing one fit per basis."""
    lines = ["Two-photon interference fringe fits", "-" * 36]
    for fit in results:
        flag = " (clamped at 1)" if fit.visibility_clamped else ""
        lines.append(
            f"theta_s = {fit.theta_s:6.1f} deg: V = {100 * fit.visibility:5.1f} ± "
            f"{100 * fit.visibility_stderr:.1f} %{flag}, phase = {fit.phase_deg:6.2f} ± "
            f"{fit.phase_stderr:.2f} deg, C0 = {fit.mean_level:.1f}, "
            f"reduced chi2 = {fit.reduced_chi_square:.2f}"
        )
    return "\n".join(lines)
