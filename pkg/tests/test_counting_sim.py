import math
import sys, os

import numpy as np
import pytest
from scipy.stats import chisquare

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from exception.errors import ConfigurationError
from models.counting_sim import (
    ChannelLoss,
    CountRecord,
    DetectorModel,
    RunConfig,
    _pair_numbers,
    accidental_estimate,
    expected_rates,
    run_fringe,
    simulate_run,
)
from models.polarization_state import AnalyzerSetting, SourceNoise, make_state

MU = 0.0186


# ---------- Fixtures ----------
@pytest.fixture
def state():
    return make_state(SourceNoise(werner_v=0.94, phase_phi=0.2))


@pytest.fixture
def losses():
    return ChannelLoss(transmission_s=0.4948, transmission_i=0.4787)


@pytest.fixture
def detectors():
    return (
        DetectorModel(efficiency=0.2183, dark_prob=1e-5),
        DetectorModel(efficiency=0.2256, dark_prob=1e-5),
    )


def run_config(seed=20120101, duration=10.0, mu=MU, background=1e-3, statistics="poisson"):
    return RunConfig(
        rep_rate=1e6,
        duration=duration,
        mean_pairs_per_pulse=mu,
        background_flux_s=background,
        background_flux_i=background,
        rng_seed=seed,
        pair_statistics=statistics,
    )


# ---------- Detector and loss models ----------
def test_dark_probability_from_rate():
    detector = DetectorModel.from_dark_rate(0.2, 4000.0, 2.5)
    assert detector.dark_prob == pytest.approx(1e-5, rel=1e-5)
    assert detector.gate_width == 2.5


def test_polarization_dependent_loss():
    losses = ChannelLoss(transmission_s=0.5, transmission_i=0.5, pdl_depth=0.2)
    assert losses.transmission("signal", 0.0) == pytest.approx(0.5)
    assert losses.transmission("idler", 90.0) == pytest.approx(0.4)


def test_count_record_rejects_impossible_counts():
    with pytest.raises(ConfigurationError):
        CountRecord(pulses=100, singles_s=5, singles_i=5, coincidences=6, accidentals_estimate=0.0)
    with pytest.raises(ConfigurationError):
        CountRecord(pulses=10, singles_s=11, singles_i=5, coincidences=0, accidentals_estimate=0.0)


def test_accidental_estimate():
    record = CountRecord(pulses=1000, singles_s=10, singles_i=20, coincidences=1, accidentals_estimate=0.2)
    assert accidental_estimate(record) == pytest.approx(0.2)


# ---------- Analytic rates ----------
def test_expected_singles_first_order():
    bell = make_state(SourceNoise())
    rates = expected_rates(
        bell,
        AnalyzerSetting(theta_s=0.0, theta_i=0.0),
        0.0093,
        ChannelLoss(transmission_s=1.0, transmission_i=1.0),
        (DetectorModel(efficiency=0.108), DetectorModel(efficiency=0.108)),
    )
    assert rates.singles_s == pytest.approx(5.022e-4, rel=1e-12)
    assert rates.coincidences == pytest.approx(0.0093 * 0.108 ** 2 * 0.5 + rates.singles_s * rates.singles_i)
    assert not rates.multi_pair


def test_expected_rates_flag_multi_pair(state, losses, detectors):
    rates = expected_rates(state, AnalyzerSetting(theta_s=0.0, theta_i=0.0), 0.2, losses, detectors)
    assert rates.multi_pair


def test_operating_point_singles(state, losses, detectors):
    rates = expected_rates(
        state, AnalyzerSetting(theta_s=0.0, theta_i=0.0), MU, losses, detectors, background=(1e-3, 1e-3)
    )
    assert rates.singles_s == pytest.approx(1.1e-3, rel=0.05)
    assert rates.coincidences * 1e7 == pytest.approx(1065, rel=0.02)


# ---------- Monte Carlo ----------
def test_pair_number_statistics():
    u = np.random.default_rng(0).random(1_000_000)
    poisson = _pair_numbers(u, 0.5, "poisson")
    thermal = _pair_numbers(u, 0.5, "thermal")
    assert poisson.mean() == pytest.approx(0.5, abs=5e-3)
    assert thermal.mean() == pytest.approx(0.5, abs=5e-3)
    assert poisson.var() == pytest.approx(0.5, abs=1e-2)
    assert thermal.var() == pytest.approx(0.75, abs=2e-2)
    assert np.all(_pair_numbers(u, 0.0, "poisson") == 0)


def test_identical_seed_gives_identical_record(state, losses, detectors):
    setting = AnalyzerSetting(theta_s=0.0, theta_i=30.0)
    first = simulate_run(run_config(duration=1.0), state, setting, losses, detectors)
    second = simulate_run(run_config(duration=1.0), state, setting, losses, detectors)
    assert first == second


def test_worker_count_does_not_change_tallies(state, losses, detectors):
    setting = AnalyzerSetting(theta_s=0.0, theta_i=0.0)
    serial = simulate_run(run_config(duration=2.5), state, setting, losses, detectors, workers=1)
    parallel = simulate_run(run_config(duration=2.5), state, setting, losses, detectors, workers=4)
    assert serial == parallel


def test_no_light_no_darks_gives_no_counts(state, losses):
    detectors = (DetectorModel(efficiency=0.2), DetectorModel(efficiency=0.2))
    record = simulate_run(
        run_config(duration=1.0, mu=0.0, background=0.0),
        state,
        AnalyzerSetting(theta_s=0.0, theta_i=0.0),
        losses,
        detectors,
    )
    assert record.singles_s == record.singles_i == record.coincidences == 0


def test_dark_counts_only(state, losses):
    detectors = (DetectorModel(efficiency=0.2, dark_prob=0.01), DetectorModel(efficiency=0.2, dark_prob=0.01))
    record = simulate_run(
        run_config(duration=1.0, mu=0.0, background=0.0),
        state,
        AnalyzerSetting(theta_s=0.0, theta_i=0.0),
        losses,
        detectors,
    )
    assert abs(record.singles_s - 10_000) < 4 * math.sqrt(10_000)
    assert abs(record.coincidences - 100) < 5 * math.sqrt(100)


def test_counts_monotone_in_mu(state, losses, detectors):
    setting = AnalyzerSetting(theta_s=0.0, theta_i=0.0)
    records = [
        simulate_run(run_config(duration=0.5, mu=mu), state, setting, losses, detectors)
        for mu in (0.005, 0.01, 0.02, 0.04)
    ]
    for lower, higher in zip(records, records[1:]):
        assert higher.singles_s >= lower.singles_s
        assert higher.singles_i >= lower.singles_i
        assert higher.coincidences >= lower.coincidences


def test_counts_monotone_in_transmission(state, detectors):
    setting = AnalyzerSetting(theta_s=0.0, theta_i=0.0)
    records = [
        simulate_run(
            run_config(duration=0.5),
            state,
            setting,
            ChannelLoss(transmission_s=t, transmission_i=t),
            detectors,
        )
        for t in (0.2, 0.4, 0.8, 1.0)
    ]
    for lower, higher in zip(records, records[1:]):
        assert higher.coincidences >= lower.coincidences


def test_thermal_statistics_run(state, losses, detectors):
    record = simulate_run(
        run_config(duration=1.0, statistics="thermal"),
        state,
        AnalyzerSetting(theta_s=0.0, theta_i=0.0),
        losses,
        detectors,
    )
    assert record.coincidences > 0


def test_monte_carlo_matches_expectations(state, losses, detectors):
    setting = AnalyzerSetting(theta_s=0.0, theta_i=0.0)
    pulses = 10_000_000
    rates = expected_rates(state, setting, MU, losses, detectors, background=(1e-3, 1e-3))
    agreeing = 0
    for seed in range(5):
        record = simulate_run(run_config(seed=seed), state, setting, losses, detectors)
        assert record.pulses == pulses
        ok = all(
            abs(observed - expected * pulses) <= 4 * math.sqrt(expected * pulses)
            for observed, expected in (
                (record.singles_s, rates.singles_s),
                (record.singles_i, rates.singles_i),
                (record.coincidences, rates.coincidences),
            )
        )
        agreeing += ok
    assert agreeing >= 4


def test_idler_singles_flat_over_angles(state, losses, detectors):
    thetas_i = [15.0 * k for k in range(12)]
    not_rejected = 0
    for seed in (1, 2, 3):
        results = run_fringe(run_config(seed=seed), state, 0.0, thetas_i, losses, detectors, workers=4)
        assert results[0][1].pulses == 10_000_000
        singles = np.array([record.singles_i for _, record in results], dtype=float)
        not_rejected += chisquare(singles).pvalue > 0.01
        if not_rejected >= 2:
            break
    assert not_rejected >= 2


def test_run_fringe_keeps_input_order(state, losses, detectors):
    thetas_i = [90.0, 0.0, 45.0, 180.0]
    results = run_fringe(run_config(duration=0.1), state, 0.0, thetas_i, losses, detectors)
    assert [setting.theta_i for setting, _ in results] == [90.0, 0.0, 45.0, 0.0]
    coincidences = [record.coincidences for _, record in results]
    assert coincidences[1] > coincidences[0]
