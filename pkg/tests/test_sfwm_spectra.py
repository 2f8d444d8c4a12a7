import math
import sys, os

import numpy as np
import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from exception.errors import ConfigurationError, CoverageError
from models.fiber_model import EffectiveLengths, FiberLine, PumpConfig
from models.sfwm_spectra import (
    DetuningGrid,
    FilterSpec,
    PhaseModel,
    band_rate,
    filter_band_rate,
    pfsd_scalar,
    pfsd_vector,
    spectrum,
    suppression_ratio,
    thz_to_omega,
)

GAMMA = 3e-3
BETA2 = -3.824e-3
DELTA_BETA1 = 0.286


# ---------- Fixtures ----------
@pytest.fixture
def line():
    return FiberLine.spliced(150.0, DELTA_BETA1, BETA2, GAMMA)


@pytest.fixture
def lengths():
    return EffectiveLengths(l_scalar=150.0, l_vector=15.0)


def make_pump(theta=45.0, power=0.8):
    return PumpConfig(peak_power=power, theta=theta, pulse_width=20.0, rep_rate=1e6)


@pytest.fixture
def pump():
    return make_pump()


# ---------- Closed forms ----------
def test_scalar_pfsd_at_filter_detuning(line, lengths):
    omega = float(thz_to_omega(0.2))
    assert pfsd_scalar(omega, 0.4, lengths, line.reference_segment) == pytest.approx(2.3534e-3, rel=1e-3)


def test_scalar_pfsd_at_zero_detuning(line, lengths):
    assert pfsd_scalar(0.0, 0.4, lengths, line.reference_segment) == pytest.approx(1.03847e-3, rel=1e-4)


def test_vector_pfsds_at_filter_detuning(line, lengths):
    f_hv, f_vh = pfsd_vector(float(thz_to_omega(0.2)), 0.4, 0.4, lengths, line.reference_segment)
    assert f_hv == pytest.approx(2.993e-5, rel=2e-3)
    assert f_vh == pytest.approx(2.381e-5, rel=2e-3)


def test_suppression_ratio_two_orders(pump, line, lengths):
    ratio = suppression_ratio(0.2, pump, line, lengths)
    assert ratio == pytest.approx(87.6, rel=5e-3)


def test_suppression_ratio_equal_lengths_no_walkoff():
    line = FiberLine.spliced(150.0, 0.0, BETA2, GAMMA)
    lengths = EffectiveLengths(l_scalar=150.0, l_vector=150.0)
    assert suppression_ratio(0.0, make_pump(), line, lengths) == pytest.approx(9.0 / 4.0, rel=1e-12)


def test_suppression_ratio_without_vector_process(line, lengths):
    assert math.isinf(suppression_ratio(0.2, make_pump(theta=0.0), line, lengths))


def test_suppression_ratio_without_pump(line, lengths):
    assert math.isnan(suppression_ratio(0.2, make_pump(power=0.0), line, lengths))


def test_sinc2_variant_differs(line, lengths):
    omega = float(thz_to_omega(0.2))
    sin2 = pfsd_scalar(omega, 0.4, lengths, line.reference_segment, PhaseModel.SIN2)
    sinc2 = pfsd_scalar(omega, 0.4, lengths, line.reference_segment, PhaseModel.SINC2)
    assert sinc2 != pytest.approx(sin2)
    assert pfsd_scalar(0.0, 0.0, lengths, line.reference_segment, PhaseModel.SINC2) == 0.0


# ---------- Spectra over a grid ----------
def test_spectrum_symmetries(pump, line, lengths):
    spec = spectrum(DetuningGrid.symmetric(1.0, 0.01), pump, line, lengths)
    np.testing.assert_allclose(spec.f_hh, spec.f_vv, rtol=1e-12, atol=0.0)
    np.testing.assert_array_equal(spec.f_hh, spec.f_hh[::-1])
    np.testing.assert_allclose(spec.f_hv[::-1], spec.f_vh, rtol=1e-12, atol=0.0)


def test_horizontal_pump_has_no_vector_or_vv(line, lengths):
    spec = spectrum(DetuningGrid.symmetric(0.5, 0.05), make_pump(theta=0.0), line, lengths)
    assert np.all(spec.f_hv == 0.0) and np.all(spec.f_vh == 0.0)
    assert np.all(spec.f_vv == 0.0)
    assert np.any(spec.f_hh > 0.0)


def test_vector_pfsd_peaks_at_45_degrees(line, lengths):
    omega = float(thz_to_omega(0.2))
    totals = []
    for theta in np.arange(0.0, 91.0, 5.0):
        p_h = 0.8 * math.cos(math.radians(theta)) ** 2
        p_v = 0.8 * math.sin(math.radians(theta)) ** 2
        totals.append(sum(pfsd_vector(omega, p_h, p_v, lengths, line.reference_segment)))
    assert np.argmax(totals) == 9


def test_vector_mirror_symmetry_random_draws(line, lengths):
    rng = np.random.default_rng(7)
    for _ in range(100):
        omega = rng.uniform(-10.0, 10.0)
        p_h, p_v = rng.uniform(0.0, 1.0, size=2)
        f_hv_minus, _ = pfsd_vector(-omega, p_h, p_v, lengths, line.reference_segment)
        _, f_vh_plus = pfsd_vector(omega, p_h, p_v, lengths, line.reference_segment)
        assert f_hv_minus == pytest.approx(f_vh_plus, rel=1e-12, abs=1e-300)


def test_scalar_evenness_random_draws(line):
    rng = np.random.default_rng(8)
    for _ in range(100):
        omega = rng.uniform(-10.0, 10.0)
        power = rng.uniform(0.0, 1.0)
        lengths = EffectiveLengths(l_scalar=rng.uniform(1.0, 500.0), l_vector=1.0)
        assert pfsd_scalar(omega, power, lengths, line.reference_segment) == pfsd_scalar(
            -omega, power, lengths, line.reference_segment
        )


def test_polarization_relabeling_random_draws(line):
    rng = np.random.default_rng(9)
    grid = DetuningGrid.symmetric(1.0, 0.05)
    for _ in range(100):
        theta = rng.uniform(0.0, 90.0)
        power = rng.uniform(0.1, 1.0)
        l_scalar = rng.uniform(10.0, 300.0)
        lengths = EffectiveLengths(l_scalar=l_scalar, l_vector=rng.uniform(1.0, l_scalar))
        spec = spectrum(grid, make_pump(theta=theta, power=power), line, lengths)
        mirrored = spectrum(grid, make_pump(theta=90.0 - theta, power=power), line, lengths)
        scale = max(spec.f_hh.max(), spec.f_vv.max(), 1e-300)
        np.testing.assert_allclose(spec.f_hh, mirrored.f_vv, rtol=1e-9, atol=1e-12 * scale)
        np.testing.assert_allclose(spec.f_vv, mirrored.f_hh, rtol=1e-9, atol=1e-12 * scale)
        np.testing.assert_allclose(spec.f_hv, mirrored.f_hv, rtol=1e-9, atol=1e-12 * scale)
        np.testing.assert_allclose(spec.f_vh, mirrored.f_vh, rtol=1e-9, atol=1e-12 * scale)


def test_suppression_grows_as_vector_length_shrinks(pump, line):
    # Vector PFSDs rise with L_v up to about 11 m at 0.2 THz
    ratios = [
        suppression_ratio(0.2, pump, line, EffectiveLengths(l_scalar=150.0, l_vector=l_vector))
        for l_vector in np.linspace(1.0, 10.0, 10)
    ]
    assert np.all(np.diff(ratios) < 0)


def test_grid_rejects_unsorted():
    with pytest.raises(ConfigurationError):
        DetuningGrid(omega_values=np.array([0.0, 2.0, 1.0]))


def test_grid_from_thz_is_inclusive():
    grid = DetuningGrid.from_thz(0.0, 1.0, 0.25)
    np.testing.assert_allclose(grid.detuning_thz, [0.0, 0.25, 0.5, 0.75, 1.0], atol=1e-15)


def test_symmetric_grid_samples_both_signs():
    thz = DetuningGrid.symmetric(1.0, 0.001).detuning_thz
    assert thz.size == 2001
    np.testing.assert_array_equal(thz, -thz[::-1])


# ---------- Band rates ----------
def test_zero_bandwidth_filter_gives_nothing(pump, line, lengths):
    spec = spectrum(DetuningGrid.symmetric(1.0, 0.01), pump, line, lengths)
    rate = band_rate(spec, FilterSpec(center_detuning=0.2, bandwidth=0.0), 1e6, pump.duty_cycle)
    assert rate.pairs_per_second == 0.0
    assert filter_band_rate(FilterSpec(center_detuning=0.2, bandwidth=0.0), pump, line, lengths).pairs_per_pulse == 0.0


def test_band_rate_outside_grid(pump, line, lengths):
    spec = spectrum(DetuningGrid.symmetric(0.1, 0.01), pump, line, lengths)
    with pytest.raises(CoverageError):
        band_rate(spec, FilterSpec(center_detuning=0.2, bandwidth=100.0), 1e6, pump.duty_cycle)


def test_band_rate_is_additive(pump, line, lengths):
    spec = spectrum(DetuningGrid.symmetric(1.0, 0.001), pump, line, lengths)
    whole = band_rate(spec, FilterSpec(center_detuning=0.2, bandwidth=100.0), 1e6, pump.duty_cycle)
    low = band_rate(spec, FilterSpec(center_detuning=0.175, bandwidth=50.0), 1e6, pump.duty_cycle)
    high = band_rate(spec, FilterSpec(center_detuning=0.225, bandwidth=50.0), 1e6, pump.duty_cycle)
    assert whole.pairs_per_second == pytest.approx(low.pairs_per_second + high.pairs_per_second, rel=1e-9)


def test_band_rate_components_and_scale(pump, line, lengths):
    spec = spectrum(DetuningGrid.symmetric(1.0, 0.001), pump, line, lengths)
    passband = FilterSpec(center_detuning=0.2, bandwidth=100.0)
    total = band_rate(spec, passband, 1e6, pump.duty_cycle)
    scalar = band_rate(spec, passband, 1e6, pump.duty_cycle, components="scalar")
    vector = band_rate(spec, passband, 1e6, pump.duty_cycle, components="vector")
    doubled = band_rate(spec, passband, 1e6, pump.duty_cycle, scale=2.0)
    assert total.pairs_per_second == pytest.approx(scalar.pairs_per_second + vector.pairs_per_second, rel=1e-12)
    assert doubled.pairs_per_pulse == pytest.approx(2.0 * total.pairs_per_pulse, rel=1e-12)
    assert total.pairs_per_pulse == pytest.approx(total.pairs_per_second / 1e6, rel=1e-12)


def test_filter_band_rate_matches_dense_grid(pump, line, lengths):
    spec = spectrum(DetuningGrid.symmetric(1.0, 0.0005), pump, line, lengths)
    passband = FilterSpec(center_detuning=0.2, bandwidth=100.0)
    dense = band_rate(spec, passband, 1e6, pump.duty_cycle)
    local = filter_band_rate(passband, pump, line, lengths)
    assert local.pairs_per_pulse == pytest.approx(dense.pairs_per_pulse, rel=1e-4)


def test_unknown_component_selection(pump, line, lengths):
    spec = spectrum(DetuningGrid.symmetric(0.5, 0.01), pump, line, lengths)
    with pytest.raises(ConfigurationError):
        spec.component_total("everything")
