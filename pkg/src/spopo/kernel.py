"""Joint down-conversion kernel on a discrete frequency grid.

The kernel couples signal detunings omega, omega' around the carrier omega0:

    S(omega, omega') = chi0 * l_c * sqrt(E_p) * pump_spectrum(omega + omega')
                       * phase_matching(omega, omega')

Discretised with the quadrature weight d_omega/(2 pi) split symmetrically over
both indices, so the singular values of the matrix are directly the per-round-
trip parametric gains g_n and the singular vectors are l2-orthonormal samples
of the supermode spectra.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants

from .errors import SpectralLeakageError, ValidationError

#: ratio of intensity-FWHM to the e^-1/2 width of a Gaussian field envelope
_FWHM_TO_SIGMA = 2.0 * math.sqrt(math.log(2.0))

#: pump amplitude tail allowed at the edge of the spectral window
SPECTRAL_TAIL = 1e-8


class EnvelopeShape(enum.Enum):
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform symmetric grid of signal detunings including omega = 0."""

    n_points: int
    omega_max: float

    def __post_init__(self):
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ValidationError("n_points must be odd and >= 3")
        if self.omega_max <= 0:
            raise ValidationError("omega_max must be positive")

    @property
    def delta_omega(self) -> float:
        return 2.0 * self.omega_max / (self.n_points - 1)

    @property
    def omegas(self) -> np.ndarray:
        return np.linspace(-self.omega_max, self.omega_max, self.n_points)

    @property
    def weight(self) -> float:
        """Quadrature weight d_omega / (2 pi) of the frequency measure."""
        return self.delta_omega / (2.0 * np.pi)

    @classmethod
    def comb_aligned(cls, n_points: int, rep_period: float) -> "FrequencyGrid":
        """Grid whose spacing is exactly the comb spacing 2 pi / T0.

        On such a grid the per-period time/frequency transforms are exactly
        unitary, which the comb synthesis and pulse projections rely on.
        """
        if rep_period <= 0:
            raise ValidationError("rep_period must be positive")
        spacing = 2.0 * np.pi / rep_period
        return cls(n_points=n_points, omega_max=(n_points - 1) // 2 * spacing)


@dataclass(frozen=True)
class PumpConfig:
    """Synchronous pump pulse train.

    ``tau_p`` is the intensity FWHM of the Gaussian envelope; ``ceo_half`` is
    half the pump carrier-envelope-offset phase (the signal comb inherits
    ceo_half +- theta).  The envelope is transform limited and normalized to
    unit L2 norm.
    """

    pulse_energy: float
    tau_p: float
    rep_period: float
    ceo_half: float = 0.0
    envelope_shape: EnvelopeShape = EnvelopeShape.GAUSSIAN

    def __post_init__(self):
        if self.pulse_energy < 0:
            raise ValidationError("pulse_energy must be >= 0")
        if self.tau_p <= 0 or self.rep_period <= 0:
            raise ValidationError("tau_p and rep_period must be positive")
        if self.tau_p >= self.rep_period / 20.0:
            raise ValidationError(
                "tau_p must be << rep_period (enforced: tau_p < T0/20); "
                f"got tau_p={self.tau_p:g}, T0={self.rep_period:g}")
        if self.envelope_shape is not EnvelopeShape.GAUSSIAN:
            raise ValidationError(f"unsupported envelope {self.envelope_shape}")

    @property
    def sigma_t(self) -> float:
        """Gaussian width: envelope ~ exp(-t^2 / (2 sigma_t^2))."""
        return self.tau_p / _FWHM_TO_SIGMA

    def envelope_time(self, t: np.ndarray) -> np.ndarray:
        """Normalized envelope alpha_p(t), unit integral of |alpha_p|^2."""
        s = self.sigma_t
        return (np.pi * s**2) ** (-0.25) * np.exp(-np.asarray(t) ** 2 / (2 * s**2))

    def envelope_spectrum(self, omega: np.ndarray) -> np.ndarray:
        """Fourier transform of the envelope, alpha(w) = int alpha(t) e^{-iwt} dt."""
        s = self.sigma_t
        return (4 * np.pi * s**2) ** 0.25 * np.exp(-(s * np.asarray(omega)) ** 2 / 2)


@dataclass(frozen=True)
class CrystalConfig:
    """Nonlinear crystal and carrier parameters, SI units.

    ``signal_dispersion``/``pump_dispersion`` are Taylor coefficients (orders
    0..3) of k_s(omega0 + w) around omega0 and of k_p(2 omega0 + w) around
    2 omega0, in units m^-1 (s/rad)^j.  Degenerate phase matching at the
    carrier means pump_dispersion[0] == 2 * signal_dispersion[0]; that is the
    sensible default but is not enforced.
    """

    length: float
    d_eff: float
    n0: float
    a_eff: float
    omega0: float
    signal_dispersion: tuple = field(default=(0.0, 0.0, 0.0, 0.0))
    pump_dispersion: tuple = field(default=(0.0, 0.0, 0.0, 0.0))

    def __post_init__(self):
        if self.length <= 0:
            raise ValidationError("crystal length must be positive")
        if self.a_eff <= 0:
            raise ValidationError("a_eff must be positive")
        if self.n0 < 1:
            raise ValidationError("n0 must be >= 1")
        if self.omega0 <= 0:
            raise ValidationError("omega0 must be positive")
        for name in ("signal_dispersion", "pump_dispersion"):
            coeffs = tuple(float(x) for x in getattr(self, name))
            if len(coeffs) != 4:
                raise ValidationError(f"{name} needs exactly 4 coefficients")
            object.__setattr__(self, name, coeffs)

    def k_signal(self, omega) -> np.ndarray:
        """Signal wavevector at carrier detuning omega."""
        return _poly3(self.signal_dispersion, omega)

    def k_pump(self, omega) -> np.ndarray:
        """Pump wavevector at detuning omega from 2 omega0."""
        return _poly3(self.pump_dispersion, omega)


def _poly3(c, x):
    x = np.asarray(x, dtype=float)
    return c[0] + x * (c[1] + x * (c[2] + x * c[3]))


def chi0(crystal: CrystalConfig) -> float:
    """Effective nonlinear coupling sqrt(2 w0^2 / (eps0 n0^3 c^3 A_eff)) d_eff."""
    num = 2.0 * crystal.omega0**2
    den = constants.epsilon_0 * crystal.n0**3 * constants.c**3 * crystal.a_eff
    return math.sqrt(num / den) * crystal.d_eff


def phase_matching(crystal: CrystalConfig, omega, omega_prime) -> np.ndarray:
    """sinc phase-matching factor sin(dphi)/dphi.

    dphi = l_c [k_s(w) + k_s(w') - k_p(w + w')] / 2, with the analytic limit
    1 at dphi = 0.
    """
    w, wp = np.asarray(omega, dtype=float), np.asarray(omega_prime, dtype=float)
    dphi = 0.5 * crystal.length * (
        crystal.k_signal(w) + crystal.k_signal(wp) - crystal.k_pump(w + wp))
    return np.sinc(dphi / np.pi)


@dataclass(frozen=True)
class JointKernel:
    """Discretised symmetric kernel with the quadrature weight folded in.

    ``matrix[i, j]`` = (d_omega / 2 pi) S(w_i, w_j); singular values of the
    matrix approximate the continuous gains g_n.
    """

    matrix: np.ndarray
    grid: FrequencyGrid

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.grid.n_points, self.grid.n_points):
            raise ValidationError("kernel matrix does not match the grid")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > 1e-12 * scale:
            raise ValidationError("kernel matrix must be symmetric")
        object.__setattr__(self, "matrix", m)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


def build_kernel(grid: FrequencyGrid, pump: PumpConfig,
                 crystal: CrystalConfig) -> JointKernel:
    """Assemble the joint kernel matrix from physical parameters.

    Refuses (``SpectralLeakageError``) when the pump spectrum has more than
    ``SPECTRAL_TAIL`` relative amplitude at the edge of the reachable sum
    window [-2 omega_max, 2 omega_max]: gains computed on such a window would
    be truncation artifacts.
    """
    edge = pump.envelope_spectrum(2.0 * grid.omega_max)
    peak = pump.envelope_spectrum(0.0)
    if edge > SPECTRAL_TAIL * peak:
        raise SpectralLeakageError(
            "pump spectrum leaks outside the frequency window: relative "
            f"amplitude {edge / peak:.3e} at omega = 2*omega_max "
            f"(limit {SPECTRAL_TAIL:g}); enlarge omega_max or shorten tau_p")
    w = grid.omegas
    w1, w2 = np.meshgrid(w, w, indexing="ij")
    prefactor = chi0(crystal) * crystal.length * math.sqrt(pump.pulse_energy)
    matrix = grid.weight * prefactor * pump.envelope_spectrum(w1 + w2) \
        * phase_matching(crystal, w1, w2)
    # enforce exact symmetry against floating-point asymmetries in sinc edges
    matrix = 0.5 * (matrix + matrix.T)
    return JointKernel(matrix=matrix.astype(complex), grid=grid)
