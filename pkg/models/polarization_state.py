"""
Two-photon polarization state of the source and analytic analyzer statistics.

Basis ordering is signal ⊗ idler: |HH⟩, |HV⟩, |VH⟩, |VV⟩.
Analyzer angles are polarization-transmission angles in degrees; an analyzer
at θ projects onto cos θ |H⟩ + sin θ |V⟩.
"""
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from exception.errors import ConfigurationError, UndefinedVisibilityError
from logger.logging import get_logger

logger = get_logger()

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGEN_TOL = 1e-10
# Full period of a fringe in θ_i is 180°; 3600 samples at 0.05° steps
SCAN_POINTS = 3600

KET_HH = np.array([1, 0, 0, 0], dtype=complex)
KET_HV = np.array([0, 1, 0, 0], dtype=complex)
KET_VH = np.array([0, 0, 1, 0], dtype=complex)
KET_VV = np.array([0, 0, 0, 1], dtype=complex)


class TwoQubitState(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rho: np.ndarray

    @field_validator("rho", mode="before")
    @classmethod
    def density_matrix(cls, v):
        rho = np.array(v, dtype=complex)
        if rho.shape != (4, 4):
            raise ConfigurationError("density matrix must be 4x4")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise ConfigurationError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_TOL:
            raise ConfigurationError("density matrix trace differs from 1")
        if np.min(np.linalg.eigvalsh(rho)) < -EIGEN_TOL:
            raise ConfigurationError("density matrix has negative eigenvalues")
        rho.setflags(write=False)
        return rho

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.rho)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


class AnalyzerSetting(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta_s: float
    theta_i: float

    @field_validator("theta_s", "theta_i")
    def wrap_angle(cls, v):
        return float(v) % 180.0


class SourceNoise(BaseModel):
    model_config = ConfigDict(frozen=True)

    werner_v: float = Field(1.0, ge=0, le=1, description="Entangled fraction V")
    amplitude_imbalance: float = Field(1.0, gt=0, description="f_VV / f_HH weighting")
    phase_phi: float = Field(0.0, description="Phase between |HH⟩ and |VV⟩, radians")

    @property
    def hh_weight(self) -> float:
        """Population a of |HH⟩ in the pure part; 1 − a goes to |VV⟩."""
        return 1.0 / (1.0 + self.amplitude_imbalance)


def _analyzer_ket(theta_deg: float) -> np.ndarray:
    theta = math.radians(theta_deg)
    return np.array([math.cos(theta), math.sin(theta)], dtype=complex)


def _projector(theta_deg: float) -> np.ndarray:
    ket = _analyzer_ket(theta_deg)
    return np.outer(ket, ket.conj())


def _entangled_ket(hh_weight: float, phase_phi: float) -> np.ndarray:
    return math.sqrt(hh_weight) * KET_HH + np.exp(1j * phase_phi) * math.sqrt(1.0 - hh_weight) * KET_VV


def _hermitize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + rho.conj().T)


def make_state(noise: SourceNoise) -> TwoQubitState:
    """Isotropic (Werner) noise: ρ = V |ψ⟩⟨ψ| + (1 − V) I/4."""
    psi = _entangled_ket(noise.hh_weight, noise.phase_phi)
    pure = np.outer(psi, psi.conj())
    rho = noise.werner_v * pure + (1.0 - noise.werner_v) * np.eye(4) / 4.0
    return TwoQubitState(rho=_hermitize(rho))


def make_colored_state(noise: SourceNoise) -> TwoQubitState:
    """Colored noise: the lost coherence becomes a classical HH/VV mixture."""
    a = noise.hh_weight
    psi = _entangled_ket(a, noise.phase_phi)
    pure = np.outer(psi, psi.conj())
    mixture = a * np.outer(KET_HH, KET_HH) + (1.0 - a) * np.outer(KET_VV, KET_VV)
    rho = noise.werner_v * pure + (1.0 - noise.werner_v) * mixture
    return TwoQubitState(rho=_hermitize(rho))


def state_from_pfsd(
    f_hh: float,
    f_vv: float,
    f_hv: float,
    f_vh: float,
    phase_phi: float = 0.0,
    werner_v: float = 1.0,
) -> TwoQubitState:
    """
    State of the pairs passing a filter where the four PFSDs take the given values.

    Scalar pairs form the coherent |HH⟩ + e^{iφ}|VV⟩ part (weighted by f_HH, f_VV
    and degraded by ``werner_v``); vector pairs add distinguishable |HV⟩ and |VH⟩.
    """
    total = f_hh + f_vv + f_hv + f_vh
    if total <= 0:
        raise ConfigurationError("no pair generation at this detuning")
    if not 0.0 <= werner_v <= 1.0:
        raise ConfigurationError("werner_v must lie in [0, 1]")
    scalar = f_hh + f_vv
    rho = np.zeros((4, 4), dtype=complex)
    if scalar > 0:
        psi = _entangled_ket(f_hh / scalar, phase_phi)
        coherent = werner_v * np.outer(psi, psi.conj()) + (1.0 - werner_v) * np.eye(4) / 4.0
        rho += scalar * coherent
    rho += f_hv * np.outer(KET_HV, KET_HV) + f_vh * np.outer(KET_VH, KET_VH)
    return TwoQubitState(rho=_hermitize(rho / total))


def coincidence_prob(state: TwoQubitState, setting: AnalyzerSetting) -> float:
    """⟨P(θ_s) ⊗ P(θ_i)⟩ for the two analyzers."""
    projector = np.kron(_projector(setting.theta_s), _projector(setting.theta_i))
    return float(np.real(np.trace(state.rho @ projector)))


def single_prob(state: TwoQubitState, side: Literal["signal", "idler"], theta: float) -> float:
    """Transmission probability of one analyzer, the other photon traced out."""
    if side == "signal":
        projector = np.kron(_projector(theta), np.eye(2))
    elif side == "idler":
        projector = np.kron(np.eye(2), _projector(theta))
    else:
        raise ConfigurationError(f"side must be 'signal' or 'idler', got '{side}'")
    return float(np.real(np.trace(state.rho @ projector)))


def outcome_probs(state: TwoQubitState, setting: AnalyzerSetting) -> np.ndarray:
    """
    Joint pass/block probabilities behind the two analyzers.

    Order: (pass, pass), (pass, block), (block, pass), (block, block).
    A blocked photon is one transmitted by the orthogonal analyzer port.
    """
    s, i = setting.theta_s, setting.theta_i
    probs = np.array(
        [
            coincidence_prob(state, AnalyzerSetting(theta_s=s, theta_i=i)),
            coincidence_prob(state, AnalyzerSetting(theta_s=s, theta_i=i + 90.0)),
            coincidence_prob(state, AnalyzerSetting(theta_s=s + 90.0, theta_i=i)),
            coincidence_prob(state, AnalyzerSetting(theta_s=s + 90.0, theta_i=i + 90.0)),
        ]
    )
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def coincidence_scan(state: TwoQubitState, theta_s: float, theta_i: np.ndarray) -> np.ndarray:
    """Vectorized coincidence probability over many idler angles."""
    signal = _analyzer_ket(theta_s)
    theta = np.radians(np.asarray(theta_i, dtype=float))
    idler = np.stack([np.cos(theta), np.sin(theta)], axis=1).astype(complex)
    kets = np.einsum("a,nb->nab", signal, idler).reshape(-1, 4)
    return np.real(np.einsum("na,ab,nb->n", kets.conj(), state.rho, kets))


def visibility_analytic(state: TwoQubitState, theta_s: float) -> float:
    """
    (C_max − C_min)/(C_max + C_min) of the coincidence fringe over θ_i.

    C(θ_i) is a constant plus a single cos 2θ_i harmonic, so the extrema of
    the dense scan follow exactly from its 2θ Fourier component.
    """
    theta_i = np.arange(SCAN_POINTS) * (180.0 / SCAN_POINTS)
    scan = coincidence_scan(state, theta_s, theta_i)
    mean = float(np.mean(scan))
    harmonic = 2.0 * np.mean(scan * np.exp(-2j * np.radians(theta_i)))
    amplitude = float(abs(harmonic))
    c_max = mean + amplitude
    c_min = max(mean - amplitude, 0.0)
    if c_max + c_min <= 0.0:
        logger.warning(f"Undefined visibility at theta_s={theta_s!r}: no coincidences")
        raise UndefinedVisibilityError(f"C_max + C_min = 0 at theta_s={theta_s!r} deg")
    return (c_max - c_min) / (c_max + c_min)


def bell_fidelity(state: TwoQubitState, phase_phi: float = 0.0) -> float:
    """⟨Φ_φ|ρ|Φ_φ⟩ with |Φ_φ⟩ = (|HH⟩ + e^{iφ}|VV⟩)/√2."""
    target = _entangled_ket(0.5, phase_phi)
    return float(np.real(target.conj() @ state.rho @ target))


def hwp_to_analyzer(hwp_angle_deg: float) -> float:
    """A half-wave plate at angle α before a fixed polarizer selects polarization 2α."""
    return 2.0 * hwp_angle_deg
