"""
Two-section birefringent fiber: pump walk-off and effective interaction lengths.

Units at this boundary: lengths in m, delays and pulse widths in ps,
group birefringence in ps/m, GVD in ps^2/m, nonlinearity in 1/(W m),
powers in W, wavelengths in nm.
"""
import math
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.constants import c as SPEED_OF_LIGHT

from exception.errors import ConfigurationError, InfiniteWalkoffError
from logger.logging import get_logger

logger = get_logger()


class FiberSegment(BaseModel):
    model_config = ConfigDict(frozen=True)

    length: float = Field(..., gt=0, description="Segment length in m")
    delta_beta1: float = Field(..., ge=0, description="Group birefringence in ps/m")
    beta2: float = Field(..., description="Group-velocity dispersion in ps^2/m")
    gamma: float = Field(..., gt=0, description="Nonlinear coefficient in 1/(W m)")
    axis_offset: Literal[0, 90] = Field(0, description="Slow axis offset vs lab H, degrees")

    @field_validator("axis_offset", mode="before")
    def offset_is_splice_angle(cls, v):
        # Only the 90 degree splice is defined; 45 or 30 degree splices are rejected
        if float(v) not in (0.0, 90.0):
            raise ValueError("axis_offset must be 0 or 90 degrees")
        return int(float(v))

    @property
    def delay_slope(self) -> float:
        """Signed H-vs-V delay accumulation rate (ps/m) in this segment."""
        return self.delta_beta1 if self.axis_offset == 0 else -self.delta_beta1


class FiberLine(BaseModel):
    model_config = ConfigDict(frozen=True)

    segments: tuple[FiberSegment, ...]

    @field_validator("segments")
    def at_least_one_segment(cls, v):
        if len(v) == 0:
            raise ValueError("a fiber line needs at least one segment")
        return v

    @property
    def total_length(self) -> float:
        return math.fsum(segment.length for segment in self.segments)

    @property
    def reference_segment(self) -> FiberSegment:
        """Segment whose γ, β₂ and Δβ₁ parametrize the pair-generation spectra."""
        return self.segments[0]

    @property
    def is_uniform(self) -> bool:
        first = self.segments[0]
        return all(
            (s.gamma, s.beta2, s.delta_beta1) == (first.gamma, first.beta2, first.delta_beta1)
            for s in self.segments
        )

    @classmethod
    def spliced(
        cls,
        total_length: float,
        delta_beta1: float,
        beta2: float,
        gamma: float,
        n_sections: int = 2,
    ) -> "FiberLine":
        """
        Equal sections with alternating 0/90 degree axis offsets.

        ``n_sections=1`` gives the unspliced control fiber.
        """
        if n_sections < 1:
            raise ConfigurationError("n_sections must be at least 1")
        length = total_length / n_sections
        segments = tuple(
            FiberSegment(
                length=length,
                delta_beta1=delta_beta1,
                beta2=beta2,
                gamma=gamma,
                axis_offset=0 if k % 2 == 0 else 90,
            )
            for k in range(n_sections)
        )
        return cls(segments=segments)


class PumpConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    peak_power: float = Field(..., ge=0, description="Total peak power P_p in W")
    theta: float = Field(..., ge=0, lt=180, description="Polarization angle vs H, degrees")
    pulse_width: float = Field(..., gt=0, description="FWHM in ps")
    rep_rate: float = Field(..., gt=0, description="Repetition rate in Hz")
    center_wavelength: float = Field(1552.75, gt=0, description="Central wavelength in nm")

    @property
    def duty_cycle(self) -> float:
        return self.pulse_width * 1e-12 * self.rep_rate


class EffectiveLengths(BaseModel):
    model_config = ConfigDict(frozen=True)

    l_scalar: float = Field(..., gt=0, description="L_s in m")
    l_vector: float = Field(..., gt=0, description="L_v in m")

    @model_validator(mode="after")
    def vector_not_longer_than_scalar(self):
        if self.l_vector > self.l_scalar:
            raise ValueError("l_vector must not exceed l_scalar")
        return self


def pump_split(pump: PumpConfig) -> tuple[float, float]:
    """Peak powers (P_H, P_V) in W on the two fiber axes."""
    theta = math.radians(pump.theta)
    p_h = pump.peak_power * math.cos(theta) ** 2
    p_v = pump.peak_power * math.sin(theta) ** 2
    return p_h, p_v


def _segment_table(line: FiberLine) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Segment start positions, delay at each start, and signed slopes."""
    lengths = np.array([s.length for s in line.segments])
    slopes = np.array([s.delay_slope for s in line.segments])
    starts = np.concatenate(([0.0], np.cumsum(lengths)[:-1]))
    start_delays = np.concatenate(([0.0], np.cumsum(slopes * lengths)[:-1]))
    return starts, start_delays, slopes


def delay_at(line: FiberLine, z: float | np.ndarray) -> float | np.ndarray:
    """
    Accumulated H-vs-V pump group delay (ps) at position ``z`` (m).

    Piecewise linear, slope ±Δβ₁ per segment, zero at the input.
    """
    if not line.segments:
        raise ConfigurationError("empty fiber line")
    starts, start_delays, slopes = _segment_table(line)
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < 0) or np.any(z_arr > line.total_length * (1 + 1e-12)):
        raise ConfigurationError(f"position outside the fiber (0..{line.total_length} m)")
    index = np.clip(np.searchsorted(starts, z_arr, side="right") - 1, 0, len(starts) - 1)
    delay = start_delays[index] + slopes[index] * (z_arr - starts[index])
    return float(delay) if np.ndim(delay) == 0 else delay


def walkoff_delay_profile(line: FiberLine, z_samples: int) -> list[tuple[float, float]]:
    """(z, delay) pairs on ``z_samples`` evenly spaced positions from input to output."""
    if z_samples < 2:
        raise ConfigurationError("z_samples must be at least 2")
    if line.total_length <= 0:
        raise ConfigurationError("fiber line has zero length")
    z = np.linspace(0.0, line.total_length, z_samples)
    delays = delay_at(line, z)
    logger.debug(
        f"Walk-off profile: {len(line.segments)} segments, {z_samples} samples, "
        f"output delay={delays[-1]!r} ps"
    )
    return list(zip(z.tolist(), delays.tolist()))


def walkoff_length(pulse_width: float, delta_beta1: float) -> float:
    """Distance (m) after which the H and V pump envelopes separate by one pulse width."""
    if delta_beta1 <= 0:
        raise InfiniteWalkoffError(
            "delta_beta1 is zero: the pump components never walk off, "
            "vector scattering cannot be suppressed"
        )
    return pulse_width / delta_beta1


def effective_lengths(
    line: FiberLine,
    pump: PumpConfig,
    walkoff_override: Optional[float] = None,
) -> EffectiveLengths:
    """
    L_s is the full fiber length; L_v is twice the walk-off length,
    once at the input and once before the output where the pumps realign.
    """
    l_scalar = line.total_length
    if walkoff_override is not None:
        if walkoff_override <= 0:
            raise ConfigurationError("walk-off override must be positive")
        l_walk = walkoff_override
    else:
        try:
            l_walk = walkoff_length(pump.pulse_width, line.reference_segment.delta_beta1)
        except InfiniteWalkoffError:
            logger.warning("No group birefringence: vector processes act over the whole fiber")
            l_walk = math.inf

    l_vector = min(2.0 * l_walk, l_scalar)
    if l_vector <= 0:
        l_vector = math.nextafter(0.0, 1.0)
    logger.debug(f"Effective lengths: L_s={l_scalar!r} m, L_v={l_vector!r} m")
    return EffectiveLengths(l_scalar=l_scalar, l_vector=l_vector)


def detuning_from_wavelengths(pump_nm: float, photon_nm: float) -> float:
    """Frequency detuning (THz) of a photon from the pump; positive for shorter wavelengths."""
    return SPEED_OF_LIGHT * (1.0 / photon_nm - 1.0 / pump_nm) * 1e9 / 1e12


def wavelength_from_detuning(pump_nm: float, detuning_thz: float) -> float:
    """Photon wavelength (nm) at ``detuning_thz`` from the pump."""
    pump_thz = SPEED_OF_LIGHT / (pump_nm * 1e-9) / 1e12
    return SPEED_OF_LIGHT / ((pump_thz + detuning_thz) * 1e12) * 1e9
