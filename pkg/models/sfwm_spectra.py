"""
Scalar and vector SFWM photon-flux spectral densities (PFSDs).

Detuning is angular (rad/ps) inside this module; everything a user touches
(grids, filters, CSV columns) is ordinary frequency detuning Ω/2π in THz.
PFSD values stay in the dimensionless normalization of the closed forms.
"""
import math
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.integrate import trapezoid

from exception.errors import ConfigurationError, CoverageError
from logger.logging import get_logger
from models.fiber_model import (
    EffectiveLengths,
    FiberLine,
    FiberSegment,
    PumpConfig,
    pump_split,
)

logger = get_logger()

TWO_PI = 2.0 * math.pi
VECTOR_PREFACTOR = 4.0 / 9.0
# Samples across one passband for filter_band_rate
BAND_POINTS = 201


class PhaseModel(str, Enum):
    SIN2 = "sin2"    # as printed in the closed forms
    SINC2 = "sinc2"  # phase-matched convention, for comparison


def thz_to_omega(detuning_thz):
    """Ω/2π in THz -> Ω in rad/ps."""
    return TWO_PI * np.asarray(detuning_thz, dtype=float)


def omega_to_thz(omega):
    return np.asarray(omega, dtype=float) / TWO_PI


def _phase_factor(argument, phase_model: PhaseModel):
    argument = np.asarray(argument, dtype=float)
    if phase_model is PhaseModel.SINC2:
        # np.sinc is sin(pi x)/(pi x)
        return np.sinc(argument / math.pi) ** 2
    return np.sin(argument) ** 2


class DetuningGrid(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    omega_values: np.ndarray

    @field_validator("omega_values", mode="before")
    @classmethod
    def increasing_finite_grid(cls, v):
        omega = np.array(v, dtype=float)
        if omega.ndim != 1 or omega.size == 0:
            raise ConfigurationError("detuning grid must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(omega)):
            raise ConfigurationError("detuning grid contains non-finite values")
        if omega.size > 1 and not np.all(np.diff(omega) > 0):
            raise ConfigurationError("detuning grid must be strictly increasing")
        omega.setflags(write=False)
        return omega

    @property
    def detuning_thz(self) -> np.ndarray:
        return omega_to_thz(self.omega_values)

    @classmethod
    def from_thz(cls, start_thz: float, stop_thz: float, step_thz: float) -> "DetuningGrid":
        """Inclusive grid ``start..stop`` in THz; integer-indexed so points land exactly."""
        if step_thz <= 0:
            raise ConfigurationError("grid step must be positive")
        count = int(math.floor((stop_thz - start_thz) / step_thz + 1e-9)) + 1
        if count < 1:
            raise ConfigurationError("grid stop must not precede start")
        thz = start_thz + step_thz * np.arange(count)
        return cls(omega_values=thz_to_omega(thz))

    @classmethod
    def symmetric(cls, span_thz: float, step_thz: float) -> "DetuningGrid":
        """Grid over ±span with Ω and −Ω both sampled bit-exactly."""
        half = int(math.floor(span_thz / step_thz + 1e-9))
        k = np.arange(-half, half + 1)
        return cls(omega_values=thz_to_omega(k * step_thz))


class PfsdSpectrum(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: DetuningGrid
    f_hh: np.ndarray
    f_vv: np.ndarray
    f_hv: np.ndarray
    f_vh: np.ndarray

    @field_validator("f_hh", "f_vv", "f_hv", "f_vh", mode="before")
    @classmethod
    def non_negative(cls, v, info):
        values = np.array(v, dtype=float)
        if np.any(values < 0):
            raise ConfigurationError(f"{info.field_name} has negative values")
        values.setflags(write=False)
        return values

    @model_validator(mode="after")
    def matches_grid(self):
        n = self.grid.omega_values.size
        for name in ("f_hh", "f_vv", "f_hv", "f_vh"):
            if getattr(self, name).shape != (n,):
                raise ConfigurationError(f"{name} does not match the grid size")
        return self

    @property
    def scalar_total(self) -> np.ndarray:
        return self.f_hh + self.f_vv

    @property
    def vector_total(self) -> np.ndarray:
        return self.f_hv + self.f_vh

    def component_total(self, components: str = "all") -> np.ndarray:
        if components == "scalar":
            return self.scalar_total
        if components == "vector":
            return self.vector_total
        if components == "all":
            return self.scalar_total + self.vector_total
        raise ConfigurationError(f"unknown PFSD component selection '{components}'")


class FilterSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    center_detuning: float = Field(..., description="Signed centre detuning in THz")
    bandwidth: float = Field(..., ge=0, description="Rectangular passband width in GHz")
    shape: Literal["rectangular"] = "rectangular"

    @property
    def edges_thz(self) -> tuple[float, float]:
        half = self.bandwidth * 1e-3 / 2.0
        return self.center_detuning - half, self.center_detuning + half


class BandRate(BaseModel):
    model_config = ConfigDict(frozen=True)

    pairs_per_second: float
    pairs_per_pulse: float


def pfsd_scalar(
    omega,
    p_axis: float,
    lengths: EffectiveLengths,
    segment: FiberSegment,
    phase_model: PhaseModel = PhaseModel.SIN2,
):
    """f = (γ P L_s)² sin²[(β₂Ω² + 2γP) L_s / 2]; f_HH with P_H, f_VV with P_V."""
    omega = np.asarray(omega, dtype=float)
    amplitude = (segment.gamma * p_axis * lengths.l_scalar) ** 2
    kappa = segment.beta2 * omega ** 2 + 2.0 * segment.gamma * p_axis
    result = amplitude * _phase_factor(kappa * lengths.l_scalar / 2.0, phase_model)
    return float(result) if result.ndim == 0 else result


def pfsd_vector(
    omega,
    p_h: float,
    p_v: float,
    lengths: EffectiveLengths,
    segment: FiberSegment,
    phase_model: PhaseModel = PhaseModel.SIN2,
):
    """
    (f_HV, f_VH): 4/9 (γ √(P_H P_V) L_v)² sin²[(Δβ₁Ω ± (β₂Ω² + γ(P_H+P_V))) L_v / 2].

    The two processes differ only in the sign of the dispersive term,
    hence f_HV(−Ω) = f_VH(Ω).
    """
    omega = np.asarray(omega, dtype=float)
    amplitude = VECTOR_PREFACTOR * (segment.gamma * math.sqrt(p_h * p_v) * lengths.l_vector) ** 2
    walk = segment.delta_beta1 * omega
    dispersive = segment.beta2 * omega ** 2 + segment.gamma * (p_h + p_v)
    half_length = lengths.l_vector / 2.0
    f_hv = amplitude * _phase_factor((walk + dispersive) * half_length, phase_model)
    f_vh = amplitude * _phase_factor((walk - dispersive) * half_length, phase_model)
    if f_hv.ndim == 0:
        return float(f_hv), float(f_vh)
    return f_hv, f_vh


def spectrum(
    grid: DetuningGrid,
    pump: PumpConfig,
    line: FiberLine,
    lengths: EffectiveLengths,
    phase_model: PhaseModel = PhaseModel.SIN2,
) -> PfsdSpectrum:
    """All four PFSDs over the grid; each point is evaluated independently."""
    if not line.is_uniform:
        logger.warning("Fiber segments differ in γ/β₂/Δβ₁; spectra use the first segment")
    segment = line.reference_segment
    p_h, p_v = pump_split(pump)
    omega = grid.omega_values
    f_hh = pfsd_scalar(omega, p_h, lengths, segment, phase_model)
    f_vv = pfsd_scalar(omega, p_v, lengths, segment, phase_model)
    f_hv, f_vh = pfsd_vector(omega, p_h, p_v, lengths, segment, phase_model)
    logger.debug(
        f"PFSD spectrum over {omega.size} points (P_H={p_h!r} W, P_V={p_v!r} W, "
        f"L_s={lengths.l_scalar!r} m, L_v={lengths.l_vector!r} m, model={phase_model.value})"
    )
    return PfsdSpectrum(grid=grid, f_hh=f_hh, f_vv=f_vv, f_hv=f_hv, f_vh=f_vh)


def suppression_ratio(
    detuning_thz: float,
    pump: PumpConfig,
    line: FiberLine,
    lengths: EffectiveLengths,
    phase_model: PhaseModel = PhaseModel.SIN2,
) -> float:
    """
    (f_HH + f_VV) / (f_HV + f_VH) at one detuning.

    Returns ``math.inf`` when no vector process is present and ``nan``
    when neither process generates pairs.
    """
    segment = line.reference_segment
    omega = float(thz_to_omega(detuning_thz))
    p_h, p_v = pump_split(pump)
    scalar = pfsd_scalar(omega, p_h, lengths, segment, phase_model) + pfsd_scalar(
        omega, p_v, lengths, segment, phase_model
    )
    f_hv, f_vh = pfsd_vector(omega, p_h, p_v, lengths, segment, phase_model)
    vector = f_hv + f_vh
    if vector == 0.0:
        if scalar == 0.0:
            logger.warning(f"No pair generation at {detuning_thz!r} THz; suppression undefined")
            return math.nan
        logger.warning(f"Vector PFSD vanishes at {detuning_thz!r} THz; infinite suppression")
        return math.inf
    return scalar / vector


def _passband_integral(thz: np.ndarray, values: np.ndarray, low: float, high: float) -> float:
    """Exact integral of the piecewise-linear interpolant over [low, high] (THz)."""
    if high <= low:
        return 0.0
    inside = (thz > low) & (thz < high)
    x = np.concatenate(([low], thz[inside], [high]))
    y = np.concatenate(([np.interp(low, thz, values)], values[inside], [np.interp(high, thz, values)]))
    return float(trapezoid(y, x))


def band_rate(
    spec: PfsdSpectrum,
    filter: FilterSpec,
    rep_rate: float,
    duty: float,
    components: str = "all",
    scale: float = 1.0,
) -> BandRate:
    """
    Pairs generated inside a rectangular passband.

    The PFSD is read as photons per second per Hz while the pump is on:
    pairs/s = scale * duty * ∫ f dν, and pairs/pulse = pairs/s / rep_rate.
    """
    if rep_rate <= 0:
        raise ConfigurationError("rep_rate must be positive")
    low, high = filter.edges_thz
    thz = spec.grid.detuning_thz
    if filter.bandwidth > 0 and (low < thz[0] - 1e-12 or high > thz[-1] + 1e-12):
        raise CoverageError(
            f"passband {low!r}..{high!r} THz outside grid {thz[0]!r}..{thz[-1]!r} THz"
        )
    integral_thz = _passband_integral(thz, spec.component_total(components), low, high)
    pairs_per_second = scale * duty * integral_thz * 1e12
    return BandRate(
        pairs_per_second=pairs_per_second,
        pairs_per_pulse=pairs_per_second / rep_rate,
    )


def filter_band_rate(
    filter: FilterSpec,
    pump: PumpConfig,
    line: FiberLine,
    lengths: EffectiveLengths,
    phase_model: PhaseModel = PhaseModel.SIN2,
    components: str = "all",
    scale: float = 1.0,
    points: int = BAND_POINTS,
) -> BandRate:
    """band_rate on a local grid spanning exactly the passband."""
    if filter.bandwidth == 0:
        return BandRate(pairs_per_second=0.0, pairs_per_pulse=0.0)
    low, high = filter.edges_thz
    grid = DetuningGrid(omega_values=thz_to_omega(np.linspace(low, high, points)))
    local = spectrum(grid, pump, line, lengths, phase_model)
    return band_rate(local, filter, pump.rep_rate, pump.duty_cycle, components, scale)
