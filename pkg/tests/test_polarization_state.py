import math
import sys, os

import numpy as np
import pytest
from pydantic import ValidationError

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))
from exception.errors import ConfigurationError, UndefinedVisibilityError
from models.polarization_state import (
    AnalyzerSetting,
    SourceNoise,
    TwoQubitState,
    bell_fidelity,
    coincidence_prob,
    coincidence_scan,
    hwp_to_analyzer,
    make_colored_state,
    make_state,
    outcome_probs,
    single_prob,
    state_from_pfsd,
    visibility_analytic,
)


# ---------- Fixtures ----------
@pytest.fixture
def bell_state():
    return make_state(SourceNoise(werner_v=1.0, amplitude_imbalance=1.0, phase_phi=0.0))


def random_state(rng) -> TwoQubitState:
    """Random mixed state from a Ginibre matrix."""
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    return TwoQubitState(rho=rho / np.trace(rho))


# ---------- Construction ----------
def test_state_rejects_wrong_trace():
    with pytest.raises(ConfigurationError):
        TwoQubitState(rho=np.eye(4) / 2.0)


def test_state_rejects_non_hermitian():
    rho = np.eye(4, dtype=complex) / 4.0
    rho[0, 1] = 0.1
    with pytest.raises(ConfigurationError):
        TwoQubitState(rho=rho)


def test_state_rejects_negative_eigenvalue():
    with pytest.raises(ConfigurationError):
        TwoQubitState(rho=np.diag([1.5, -0.5, 0.0, 0.0]))


def test_bell_state_is_pure(bell_state):
    assert bell_state.purity == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(bell_state.eigenvalues, [0.0, 0.0, 0.0, 1.0], atol=1e-12)


@pytest.mark.parametrize("werner_v", [0.0, 0.5, 0.94])
def test_werner_state_spectrum(werner_v):
    state = make_state(SourceNoise(werner_v=werner_v))
    assert state.purity == pytest.approx((1.0 + 3.0 * werner_v ** 2) / 4.0, abs=1e-12)
    expected = [(1.0 - werner_v) / 4.0] * 3 + [(1.0 + 3.0 * werner_v) / 4.0]
    np.testing.assert_allclose(state.eigenvalues, expected, atol=1e-12)


def test_state_is_read_only(bell_state):
    with pytest.raises(ValueError):
        bell_state.rho[0, 0] = 0.0


def test_noise_rejects_out_of_range_v():
    with pytest.raises(ValidationError):
        SourceNoise(werner_v=1.2)


def test_analyzer_angles_wrap():
    setting = AnalyzerSetting(theta_s=180.0, theta_i=-45.0)
    assert setting.theta_s == 0.0
    assert setting.theta_i == 135.0


# ---------- Identities ----------
@pytest.mark.parametrize("theta_s", [0.0, 135.0])
def test_bell_state_visibility_is_one(bell_state, theta_s):
    assert visibility_analytic(bell_state, theta_s) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("werner_v", [0.25, 0.5, 0.89, 0.92])
@pytest.mark.parametrize("theta_s", [0.0, 135.0])
def test_werner_visibility_equals_v(werner_v, theta_s):
    state = make_state(SourceNoise(werner_v=werner_v))
    assert visibility_analytic(state, theta_s) == pytest.approx(werner_v, abs=1e-9)


@pytest.mark.parametrize("theta", np.arange(0.0, 180.0, 15.0))
def test_singles_are_flat(bell_state, theta):
    assert single_prob(bell_state, "signal", theta) == pytest.approx(0.5, abs=1e-12)
    assert single_prob(bell_state, "idler", theta) == pytest.approx(0.5, abs=1e-12)


def test_maximally_mixed_state_has_no_visibility():
    state = make_state(SourceNoise(werner_v=0.0))
    assert visibility_analytic(state, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_colored_noise_keeps_hv_basis_visibility():
    state = make_colored_state(SourceNoise(werner_v=0.6))
    assert visibility_analytic(state, 0.0) == pytest.approx(1.0, abs=1e-9)
    assert visibility_analytic(state, 135.0) == pytest.approx(0.6, abs=1e-9)


def test_phase_reduces_diagonal_visibility_only():
    state = make_state(SourceNoise(werner_v=1.0, phase_phi=0.5))
    assert visibility_analytic(state, 0.0) == pytest.approx(1.0, abs=1e-9)
    assert visibility_analytic(state, 135.0) < 1.0 - 1e-3


def test_undefined_visibility():
    # Signal analyzer blocks everything this state contains
    state = TwoQubitState(rho=np.diag([0.0, 0.0, 0.5, 0.5]).astype(complex))
    with pytest.raises(UndefinedVisibilityError):
        visibility_analytic(state, 0.0)


def test_bell_fidelity(bell_state):
    assert bell_fidelity(bell_state) == pytest.approx(1.0, abs=1e-12)
    werner = make_state(SourceNoise(werner_v=0.8))
    assert bell_fidelity(werner) == pytest.approx(0.8 + 0.2 / 4.0, abs=1e-12)


def test_outcome_probabilities_sum_to_one(bell_state):
    probs = outcome_probs(bell_state, AnalyzerSetting(theta_s=0.0, theta_i=30.0))
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert probs[0] == pytest.approx(0.5 * math.cos(math.radians(30.0)) ** 2, abs=1e-12)


def test_scan_matches_pointwise(bell_state):
    thetas = np.arange(0.0, 180.0, 7.5)
    scan = coincidence_scan(bell_state, 45.0, thetas)
    pointwise = [coincidence_prob(bell_state, AnalyzerSetting(theta_s=45.0, theta_i=t)) for t in thetas]
    np.testing.assert_allclose(scan, pointwise, atol=1e-14)


# ---------- Spectral link ----------
def test_state_from_pfsd_without_vector_pairs_is_bell():
    state = state_from_pfsd(1.0, 1.0, 0.0, 0.0)
    assert bell_fidelity(state) == pytest.approx(1.0, abs=1e-12)


def test_vector_pairs_reduce_diagonal_visibility():
    state = state_from_pfsd(1.0, 1.0, 0.1, 0.1)
    assert visibility_analytic(state, 135.0) < visibility_analytic(state_from_pfsd(1.0, 1.0, 0.0, 0.0), 135.0)


def test_state_from_pfsd_only_vector_pairs():
    state = state_from_pfsd(0.0, 0.0, 1.0, 1.0)
    assert bell_fidelity(state) == pytest.approx(0.0, abs=1e-12)


def test_state_from_pfsd_without_pairs():
    with pytest.raises(ConfigurationError):
        state_from_pfsd(0.0, 0.0, 0.0, 0.0)


def test_hwp_doubles_angle():
    assert hwp_to_analyzer(22.5) == 45.0
    assert hwp_to_analyzer(90.0) == 180.0


# ---------- Property suites ----------
def test_random_states_are_consistent():
    rng = np.random.default_rng(11)
    for _ in range(100):
        state = random_state(rng)
        theta_s, theta_i = rng.uniform(0.0, 180.0, size=2)
        setting = AnalyzerSetting(theta_s=theta_s, theta_i=theta_i)
        p = coincidence_prob(state, setting)
        assert -1e-12 <= p <= 1.0 + 1e-12
        assert p <= single_prob(state, "signal", theta_s) + 1e-12
        outcomes = [
            coincidence_prob(state, AnalyzerSetting(theta_s=theta_s + ds, theta_i=theta_i + di))
            for ds in (0.0, 90.0)
            for di in (0.0, 90.0)
        ]
        assert sum(outcomes) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(outcome_probs(state, setting), outcomes, atol=1e-12)
        shifted = AnalyzerSetting(theta_s=theta_s + 180.0, theta_i=theta_i - 180.0)
        assert coincidence_prob(state, shifted) == pytest.approx(p, abs=1e-12)
        visibility = visibility_analytic(state, theta_s)
        assert 0.0 <= visibility <= 1.0 + 1e-12


def test_random_werner_visibility_identity():
    rng = np.random.default_rng(12)
    for werner_v in rng.uniform(0.0, 1.0, size=100):
        state = make_state(SourceNoise(werner_v=float(werner_v)))
        assert visibility_analytic(state, float(rng.uniform(0.0, 180.0))) == pytest.approx(werner_v, abs=1e-9)
