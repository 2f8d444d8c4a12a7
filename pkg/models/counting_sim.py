"""
Detector click statistics for the pulsed, gated measurement.

Two views of the same measurement: ``expected_rates`` gives the first-order
closed form per pulse, ``simulate_run`` draws a seeded Monte Carlo realization.
Every random quantity in the Monte Carlo is a uniform variate taken from a
stream keyed by (seed, stream, block, column) and pushed through a quantile
function or a threshold, so runs that differ only in μ or transmissions share
their random numbers and tallies do not depend on the number of workers.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.stats import geom, poisson

from exception.errors import ConfigurationError
from logger.logging import get_logger
from models.polarization_state import (
    AnalyzerSetting,
    TwoQubitState,
    coincidence_prob,
    outcome_probs,
    single_prob,
)

logger = get_logger()

BLOCK_PULSES = 1_000_000
MULTI_PAIR_MU = 0.1

# Uniform streams per block
COL_PAIRS = 0
COL_DARK_S = 1
COL_DARK_I = 2
COL_BACKGROUND_S = 3
COL_BACKGROUND_I = 4
COL_FIRST_PAIR = 5
COLS_PER_PAIR = 3  # outcome, signal detection, idler detection


def dark_prob_from_rate(dark_rate_hz: float, gate_width_ns: float) -> float:
    """Probability of at least one dark count inside one gate."""
    return -math.expm1(-dark_rate_hz * gate_width_ns * 1e-9)


class DetectorModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    efficiency: float = Field(..., ge=0, le=1, description="Detection efficiency η")
    dark_prob: float = Field(0.0, ge=0, lt=1, description="Dark click probability per gate")
    gate_width: float = Field(2.5, gt=0, description="Detection window in ns")

    @classmethod
    def from_dark_rate(cls, efficiency: float, dark_rate_hz: float, gate_width_ns: float) -> "DetectorModel":
        """Per-gate dark probability from a free-running dark count rate."""
        return cls(
            efficiency=efficiency,
            dark_prob=dark_prob_from_rate(dark_rate_hz, gate_width_ns),
            gate_width=gate_width_ns,
        )


class ChannelLoss(BaseModel):
    model_config = ConfigDict(frozen=True)

    transmission_s: float = Field(1.0, gt=0, le=1)
    transmission_i: float = Field(1.0, gt=0, le=1)
    pdl_depth: float = Field(0.0, ge=0, lt=1, description="Analyzer polarization-dependent loss depth")

    def transmission(self, side: Literal["signal", "idler"], theta_deg: float) -> float:
        """Channel transmission behind an analyzer at ``theta_deg``: T (1 − depth sin²θ)."""
        base = self.transmission_s if side == "signal" else self.transmission_i
        return base * (1.0 - self.pdl_depth * math.sin(math.radians(theta_deg)) ** 2)


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    rep_rate: float = Field(..., gt=0, description="Pulse repetition rate in Hz")
    duration: float = Field(..., gt=0, description="Acquisition time per setting in s")
    mean_pairs_per_pulse: float = Field(..., ge=0, description="μ")
    background_flux_s: float = Field(0.0, ge=0, description="Uncorrelated photons/pulse, signal")
    background_flux_i: float = Field(0.0, ge=0, description="Uncorrelated photons/pulse, idler")
    rng_seed: int = Field(0, ge=0)
    pair_statistics: Literal["poisson", "thermal"] = "poisson"

    @property
    def pulses(self) -> int:
        return int(round(self.rep_rate * self.duration))


class CountRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    pulses: int
    singles_s: int
    singles_i: int
    coincidences: int
    accidentals_estimate: float

    @model_validator(mode="after")
    def consistent_tallies(self):
        if min(self.pulses, self.singles_s, self.singles_i, self.coincidences) < 0:
            raise ConfigurationError("counts must be non-negative")
        if self.coincidences > min(self.singles_s, self.singles_i):
            raise ConfigurationError("coincidences exceed singles")
        if max(self.singles_s, self.singles_i) > self.pulses:
            raise ConfigurationError("more clicks than gates")
        return self


class ExpectedRates(BaseModel):
    """Per-pulse expectations; ``multi_pair`` flags μ outside the first-order regime."""

    model_config = ConfigDict(frozen=True)

    singles_s: float
    singles_i: float
    coincidences: float
    accidentals: float
    multi_pair: bool = False


def expected_rates(
    state: TwoQubitState,
    setting: AnalyzerSetting,
    mu: float,
    losses: ChannelLoss,
    detectors: tuple[DetectorModel, DetectorModel],
    background: tuple[float, float] = (0.0, 0.0),
) -> ExpectedRates:
    """
    First-order pair expansion of the click probabilities per pulse.

    singles     = μ T η P(pass) + background T η + dark
    coincidence = μ T_s η_s T_i η_i P(pass, pass) + singles_s singles_i
    """
    detector_s, detector_i = detectors
    multi_pair = mu > MULTI_PAIR_MU
    if multi_pair:
        logger.warning(f"mu={mu!r} exceeds {MULTI_PAIR_MU}: first-order rates underestimate multi-pair events")

    eff_s = losses.transmission("signal", setting.theta_s) * detector_s.efficiency
    eff_i = losses.transmission("idler", setting.theta_i) * detector_i.efficiency
    singles_s = mu * eff_s * single_prob(state, "signal", setting.theta_s) + background[0] * eff_s + detector_s.dark_prob
    singles_i = mu * eff_i * single_prob(state, "idler", setting.theta_i) + background[1] * eff_i + detector_i.dark_prob
    accidentals = singles_s * singles_i
    coincidences = mu * eff_s * eff_i * coincidence_prob(state, setting) + accidentals
    return ExpectedRates(
        singles_s=singles_s,
        singles_i=singles_i,
        coincidences=coincidences,
        accidentals=accidentals,
        multi_pair=multi_pair,
    )


def _uniforms(seed: int, stream: int, block: int, column: int, size: int) -> np.ndarray:
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(stream, block, column))
    return np.random.default_rng(sequence).random(size)


def _pair_numbers(u: np.ndarray, mu: float, statistics: str) -> np.ndarray:
    """Pairs per pulse by inversion, monotone in μ for fixed uniforms."""
    n = np.zeros(u.shape, dtype=np.int64)
    if mu <= 0:
        return n
    if statistics == "thermal":
        p_zero = 1.0 / (1.0 + mu)
    else:
        p_zero = math.exp(-mu)
    busy = u >= p_zero
    if np.any(busy):
        if statistics == "thermal":
            n[busy] = geom.ppf(u[busy], 1.0 / (1.0 + mu), loc=-1).astype(np.int64)
        else:
            n[busy] = poisson.ppf(u[busy], mu).astype(np.int64)
    return n


class _BlockPlan(BaseModel):
    """Per-run probabilities shared by every block."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    seed: int
    stream: int
    mu: float
    statistics: str
    outcome_cdf: np.ndarray
    eff_s: float
    eff_i: float
    click_bg_s: float
    click_bg_i: float
    dark_s: float
    dark_i: float


def _simulate_block(plan: _BlockPlan, block: int, size: int) -> tuple[int, int, int]:
    n = _pair_numbers(_uniforms(plan.seed, plan.stream, block, COL_PAIRS, size), plan.mu, plan.statistics)

    click_s = _uniforms(plan.seed, plan.stream, block, COL_DARK_S, size) < plan.dark_s
    click_i = _uniforms(plan.seed, plan.stream, block, COL_DARK_I, size) < plan.dark_i
    click_s |= _uniforms(plan.seed, plan.stream, block, COL_BACKGROUND_S, size) < plan.click_bg_s
    click_i |= _uniforms(plan.seed, plan.stream, block, COL_BACKGROUND_I, size) < plan.click_bg_i

    max_pairs = int(n.max()) if size else 0
    for k in range(max_pairs):
        column = COL_FIRST_PAIR + COLS_PER_PAIR * k
        present = n > k
        outcome = np.searchsorted(
            plan.outcome_cdf, _uniforms(plan.seed, plan.stream, block, column, size), side="right"
        )
        signal_pass = (outcome == 0) | (outcome == 1)
        idler_pass = (outcome == 0) | (outcome == 2)
        click_s |= present & signal_pass & (_uniforms(plan.seed, plan.stream, block, column + 1, size) < plan.eff_s)
        click_i |= present & idler_pass & (_uniforms(plan.seed, plan.stream, block, column + 2, size) < plan.eff_i)

    return int(click_s.sum()), int(click_i.sum()), int((click_s & click_i).sum())


def simulate_run(
    config: RunConfig,
    state: TwoQubitState,
    setting: AnalyzerSetting,
    losses: ChannelLoss,
    detectors: tuple[DetectorModel, DetectorModel],
    stream: int = 0,
    workers: int = 1,
) -> CountRecord:
    """
    Monte Carlo of ``config.pulses`` gates at one analyzer setting.

    Per pulse: a pair number drawn from the configured statistics, each pair
    routed through the analyzers (joint outcome from the state), channel loss
    and detector efficiency; background and dark clicks are added; a detector
    clicks at most once per gate; a coincidence is both detectors clicking.
    """
    detector_s, detector_i = detectors
    eff_s = losses.transmission("signal", setting.theta_s) * detector_s.efficiency
    eff_i = losses.transmission("idler", setting.theta_i) * detector_i.efficiency
    cdf = np.cumsum(outcome_probs(state, setting))
    cdf[-1] = 1.0
    plan = _BlockPlan(
        seed=config.rng_seed,
        stream=stream,
        mu=config.mean_pairs_per_pulse,
        statistics=config.pair_statistics,
        outcome_cdf=cdf,
        eff_s=eff_s,
        eff_i=eff_i,
        click_bg_s=-math.expm1(-config.background_flux_s * eff_s),
        click_bg_i=-math.expm1(-config.background_flux_i * eff_i),
        dark_s=detector_s.dark_prob,
        dark_i=detector_i.dark_prob,
    )

    pulses = config.pulses
    sizes = [BLOCK_PULSES] * (pulses // BLOCK_PULSES)
    if pulses % BLOCK_PULSES:
        sizes.append(pulses % BLOCK_PULSES)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(lambda item: _simulate_block(plan, *item), enumerate(sizes)))
    else:
        tallies = [_simulate_block(plan, block, size) for block, size in enumerate(sizes)]

    singles_s = sum(t[0] for t in tallies)
    singles_i = sum(t[1] for t in tallies)
    coincidences = sum(t[2] for t in tallies)
    accidentals = singles_s * singles_i / pulses if pulses else 0.0
    logger.info(
        f"Run theta_s={setting.theta_s!r} theta_i={setting.theta_i!r}: pulses={pulses}, "
        f"singles=({singles_s}, {singles_i}), coincidences={coincidences} "
        f"(seed={config.rng_seed}, stream={stream})"
    )
    return CountRecord(
        pulses=pulses,
        singles_s=singles_s,
        singles_i=singles_i,
        coincidences=coincidences,
        accidentals_estimate=accidentals,
    )


def accidental_estimate(record: CountRecord) -> float:
    """Expected same-gate coincidences of two uncorrelated click streams."""
    if record.pulses <= 0:
        raise ConfigurationError("record has no pulses")
    return record.singles_s * record.singles_i / record.pulses


def run_fringe(
    config: RunConfig,
    state: TwoQubitState,
    theta_s: float,
    thetas_i: list[float],
    losses: ChannelLoss,
    detectors: tuple[DetectorModel, DetectorModel],
    stream_offset: int = 0,
    workers: int = 1,
) -> list[tuple[AnalyzerSetting, CountRecord]]:
    """One run per idler angle, each on its own stream; output in input order."""
    results = []
    for index, theta_i in enumerate(thetas_i):
        setting = AnalyzerSetting(theta_s=theta_s, theta_i=theta_i)
        record = simulate_run(
            config, state, setting, losses, detectors, stream=stream_offset + index, workers=workers
        )
        results.append((setting, record))
    return results
