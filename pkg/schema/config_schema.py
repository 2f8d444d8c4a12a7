from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_validator, model_validator
from typing import Literal, Optional

from models.counting_sim import ChannelLoss, DetectorModel, RunConfig
from models.fiber_model import EffectiveLengths, FiberLine, FiberSegment, PumpConfig, effective_lengths
from models.polarization_state import SourceNoise, TwoQubitState, make_colored_state, make_state
from models.sfwm_spectra import DetuningGrid, FilterSpec, PhaseModel


def _split_list(v):
    # Flat config files carry lists as "75,75"
    if isinstance(v, str):
        return [item.strip() for item in v.split(",") if item.strip()]
    return v


class FiberSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    segment_lengths: list[PositiveFloat] = Field([75.0, 75.0], min_length=1, description="Segment lengths in m")
    axis_offsets: list[Literal[0, 90]] = Field([0, 90], min_length=1, description="Axis offset per segment, degrees")
    gamma: float = Field(3e-3, gt=0, description="Nonlinear coefficient in 1/(W m)")
    beta2: float = Field(-3.824e-3, description="GVD in ps^2/m")
    delta_beta1: float = Field(0.286, ge=0, description="Group birefringence in ps/m")
    walkoff_override: Optional[float] = Field(7.5, gt=0, description="Walk-off length in m, replaces pulse_width/Δβ₁")

    @field_validator("segment_lengths", mode="before")
    def comma_separated(cls, v):
        return _split_list(v)

    @field_validator("axis_offsets", mode="before")
    def offsets_as_int(cls, v):
        return [int(float(item)) for item in _split_list(v)]

    @model_validator(mode="after")
    def one_offset_per_segment(self):
        if len(self.segment_lengths) != len(self.axis_offsets):
            raise ValueError("segment_lengths and axis_offsets must have the same number of entries")
        return self

    def line(self) -> FiberLine:
        return FiberLine(
            segments=tuple(
                FiberSegment(
                    length=length,
                    delta_beta1=self.delta_beta1,
                    beta2=self.beta2,
                    gamma=self.gamma,
                    axis_offset=offset,
                )
                for length, offset in zip(self.segment_lengths, self.axis_offsets)
            )
        )


class PumpSection(PumpConfig):
    model_config = ConfigDict(extra="forbid", frozen=True)

    peak_power: float = Field(0.8, ge=0)
    theta: float = Field(45.0, ge=0, lt=180)
    pulse_width: float = Field(20.0, gt=0)
    rep_rate: float = Field(1e6, gt=0)
    center_wavelength: float = Field(1552.75, gt=0)


class FilterSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    signal_detuning: float = Field(0.2, description="THz")
    idler_detuning: float = Field(-0.2, description="THz")
    bandwidth: float = Field(100.0, ge=0, description="GHz")

    def signal(self) -> FilterSpec:
        return FilterSpec(center_detuning=self.signal_detuning, bandwidth=self.bandwidth)

    def idler(self) -> FilterSpec:
        return FilterSpec(center_detuning=self.idler_detuning, bandwidth=self.bandwidth)


class LossSection(ChannelLoss):
    model_config = ConfigDict(extra="forbid", frozen=True)

    # T·η ≈ 0.108 on both sides with the detector efficiencies below
    transmission_s: float = Field(0.4948, gt=0, le=1)
    transmission_i: float = Field(0.4787, gt=0, le=1)


class DetectorSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    efficiency_s: float = Field(0.2183, ge=0, le=1)
    efficiency_i: float = Field(0.2256, ge=0, le=1)
    dark_prob_s: float = Field(1e-5, ge=0, lt=1)
    dark_prob_i: float = Field(1e-5, ge=0, lt=1)
    gate_width: float = Field(2.5, gt=0, description="ns")

    def pair(self) -> tuple[DetectorModel, DetectorModel]:
        return (
            DetectorModel(efficiency=self.efficiency_s, dark_prob=self.dark_prob_s, gate_width=self.gate_width),
            DetectorModel(efficiency=self.efficiency_i, dark_prob=self.dark_prob_i, gate_width=self.gate_width),
        )


class RunSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    duration: float = Field(10.0, gt=0, description="Acquisition time per setting in s")
    seed: int = Field(20120101, ge=0)
    mean_pairs_per_pulse: float = Field(0.0186, ge=0)
    pair_statistics: Literal["poisson", "thermal"] = "poisson"


class NoiseSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    model: Literal["werner", "colored"] = "werner"
    werner_v: float = Field(0.94, ge=0, le=1)
    phase_phi: float = Field(0.2, description="radians")
    amplitude_imbalance: float = Field(1.0, gt=0)
    background_flux_s: float = Field(1e-3, ge=0, description="photons/pulse")
    background_flux_i: float = Field(1e-3, ge=0, description="photons/pulse")

    def source_noise(self) -> SourceNoise:
        return SourceNoise(
            werner_v=self.werner_v,
            amplitude_imbalance=self.amplitude_imbalance,
            phase_phi=self.phase_phi,
        )


class SpectraSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    phase_model: PhaseModel = PhaseModel.SIN2
    span: float = Field(1.0, gt=0, description="Grid half-span in THz")
    step: float = Field(0.001, gt=0, description="Grid step in THz")
    scale: float = Field(1.0, gt=0, description="Spectral-density-to-rate constant")


class FringeSection(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    theta_s: list[float] = Field([0.0, 135.0], min_length=1)
    theta_i_start: float = 0.0
    theta_i_stop: float = 180.0
    theta_i_step: float = Field(15.0, gt=0)
    hwp_angles: bool = False

    @field_validator("theta_s", mode="before")
    def comma_separated(cls, v):
        return _split_list(v)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    fiber: FiberSection = FiberSection()
    pump: PumpSection = PumpSection()
    filters: FilterSection = FilterSection()
    losses: LossSection = LossSection()
    detectors: DetectorSection = DetectorSection()
    run: RunSection = RunSection()
    noise: NoiseSection = NoiseSection()
    spectra: SpectraSection = SpectraSection()
    fringe: FringeSection = FringeSection()

    def line(self) -> FiberLine:
        return self.fiber.line()

    def lengths(self) -> EffectiveLengths:
        return effective_lengths(self.line(), self.pump, self.fiber.walkoff_override)

    def grid(self) -> DetuningGrid:
        return DetuningGrid.symmetric(self.spectra.span, self.spectra.step)

    def state(self) -> TwoQubitState:
        if self.noise.model == "colored":
            return make_colored_state(self.noise.source_noise())
        return make_state(self.noise.source_noise())

    def run_config(self) -> RunConfig:
        return RunConfig(
            rep_rate=self.pump.rep_rate,
            duration=self.run.duration,
            mean_pairs_per_pulse=self.run.mean_pairs_per_pulse,
            background_flux_s=self.noise.background_flux_s,
            background_flux_i=self.noise.background_flux_i,
            rng_seed=self.run.seed,
            pair_statistics=self.run.pair_statistics,
        )
